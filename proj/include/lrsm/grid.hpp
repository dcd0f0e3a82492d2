#pragma once

#include <cstdint>
#include <vector>

namespace lrsm {

/// Inclusive range of global grid-node indices.
struct NodeRange {
  int first = 0;
  int last = -1;

  int size() const noexcept { return last - first + 1; }
  bool empty() const noexcept { return last < first; }
  bool contains(int j) const noexcept { return j >= first && j <= last; }
  /// Strictly between the endpoints.
  bool contains_interior(int j) const noexcept { return j > first && j < last; }

  friend bool operator==(const NodeRange&, const NodeRange&) = default;
};

/// Uniform node-based grid on [0, 1]: x_j = j dx, j = 0..n_cells.
class Grid1D {
 public:
  explicit Grid1D(int n_cells);

  int n_cells() const noexcept { return n_cells_; }
  int n_nodes() const noexcept { return n_cells_ + 1; }
  double dx() const noexcept { return dx_; }
  double node(int j) const noexcept { return j * dx_; }
  NodeRange all_nodes() const noexcept { return {0, n_cells_}; }

  /// Node index at position x, or -1 when x is not within `tol` cells of a node.
  int node_at(double x, double tol = 1e-9) const noexcept;

  /// Composite-trapezoid weights over the node range (endpoints get dx/2).
  std::vector<double> trapezoid_weights(NodeRange range) const;

 private:
  int n_cells_;
  double dx_;
};

}  // namespace lrsm
