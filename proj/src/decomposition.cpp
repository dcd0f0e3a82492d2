#include "lrsm/decomposition.hpp"

#include <cstdio>
#include <string>

#include "lrsm/errors.hpp"
#include "lrsm/hash.hpp"

namespace lrsm {

namespace {

int aligned_node(const Grid1D& grid, double x, const char* label, int m) {
  const int j = grid.node_at(x);
  if (j < 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "alignment error: point %s = %.12g (m=%d) is not a grid node "
                  "(dx = 1/%d)",
                  label, x, m, grid.n_cells());
    throw AlignmentError(buf);
  }
  return j;
}

}  // namespace

const Subdomain& DecompositionGeometry::subdomain(int m) const {
  if (m < 1 || m > m_count())
    throw InvalidArgument("subdomain index " + std::to_string(m) +
                          " out of range 1.." + std::to_string(m_count()));
  return subs_[static_cast<std::size_t>(m - 1)];
}

std::uint64_t DecompositionGeometry::fingerprint() const {
  Fnv1a h;
  h.add_string("geometry").add_i64(grid_.n_cells()).add_i64(m_count()).add_double(beta_);
  return h.value();
}

DecompositionGeometry build_decomposition(const Grid1D& grid, int m_count,
                                          double beta) {
  if (m_count < 1) throw InvalidArgument("build_decomposition: m_count must be >= 1");
  if (m_count > 1 && !(beta > 0.0 && beta <= 0.5))
    throw InvalidArgument(
        "build_decomposition: beta must lie in (0, 1/2] so that K_m overlaps "
        "only K_{m-1} and K_{m+1}");

  DecompositionGeometry g(grid, beta);
  const double M = m_count;
  for (int m = 1; m <= m_count; ++m) {
    Subdomain s;
    s.m = m;
    s.physical_left = (m == 1);
    s.physical_right = (m == m_count);
    const int left = s.physical_left ? 0 : aligned_node(grid, (m - 1 - beta) / M, "(m-1-beta)/M", m);
    const int right = s.physical_right ? grid.n_cells()
                                       : aligned_node(grid, (m + beta) / M, "(m+beta)/M", m);
    const int s_left = aligned_node(grid, (m - 1) / M, "(m-1)/M", m);
    const int s_right = aligned_node(grid, m / M, "m/M", m);
    s.nodes = {left, right};
    s.interior = {s_left, s_right};
    s.owned = {m == 1 ? s_left : s_left + 1, s_right};
    if (m < m_count)
      s.exchange_next = aligned_node(grid, (m - beta) / M, "(m-beta)/M", m);
    if (m > 1)
      s.exchange_prev = aligned_node(grid, (m - 1 + beta) / M, "(m-1+beta)/M", m);

    for (const auto& e : {s.exchange_next, s.exchange_prev}) {
      if (e && !s.interior.contains_interior(*e))
        throw AlignmentError("alignment error: exchange node " + std::to_string(*e) +
                             " is not strictly inside K_" + std::to_string(m) +
                             "^s (grid too coarse for beta)");
    }
    if (s.nodes.size() < 2)
      throw AlignmentError("alignment error: subdomain " + std::to_string(m) +
                           " spans fewer than two nodes");
    g.subs_.push_back(s);
  }
  return g;
}

}  // namespace lrsm
