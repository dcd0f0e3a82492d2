#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lrsm/grid.hpp"

namespace lrsm {

/// Node-index description of one overlapping subdomain K_m.
///
/// `nodes` is the closed node range of K_m; its endpoints carry the inflow set
/// (left endpoint with v > 0, right endpoint with v < 0). `interior` is the
/// closed node range of the buffered region K_m^s = ((m-1)/M, m/M) on which the
/// restricted map lives, and `owned` is the half-open version of it used for
/// assembly bookkeeping (the node at m/M belongs to m).
struct Subdomain {
  int m = 1;
  NodeRange nodes;
  NodeRange interior;
  NodeRange owned;
  /// Node of E_{m,m+1}: v > 0 values there become the left inflow of m+1.
  std::optional<int> exchange_next;
  /// Node of E_{m,m-1}: v < 0 values there become the right inflow of m-1.
  std::optional<int> exchange_prev;
  bool physical_left = false;
  bool physical_right = false;
};

class DecompositionGeometry {
 public:
  const Grid1D& grid() const noexcept { return grid_; }
  int m_count() const noexcept { return static_cast<int>(subs_.size()); }
  double beta() const noexcept { return beta_; }

  /// 1-based access.
  const Subdomain& subdomain(int m) const;
  const std::vector<Subdomain>& subdomains() const noexcept { return subs_; }

  std::uint64_t fingerprint() const;

 private:
  friend DecompositionGeometry build_decomposition(const Grid1D&, int, double);
  DecompositionGeometry(Grid1D grid, double beta) : grid_(grid), beta_(beta) {}

  Grid1D grid_;
  double beta_;
  std::vector<Subdomain> subs_;
};

/// K_m = ((m-1-beta)/M, (m+beta)/M) intersected with (0, 1), exchange points
/// at (m-beta)/M and (m-1+beta)/M. Every endpoint must land on a grid node;
/// otherwise AlignmentError names the offending point.
DecompositionGeometry build_decomposition(const Grid1D& grid, int m_count,
                                          double beta = 0.5);

}  // namespace lrsm
