#include "lrsm/grid.hpp"

#include <cmath>

#include "lrsm/errors.hpp"

namespace lrsm {

Grid1D::Grid1D(int n_cells) : n_cells_(n_cells), dx_(0.0) {
  if (n_cells < 1) throw InvalidArgument("Grid1D: n_cells must be >= 1");
  dx_ = 1.0 / n_cells;
}

int Grid1D::node_at(double x, double tol) const noexcept {
  const double s = x * n_cells_;
  const double r = std::round(s);
  if (std::abs(s - r) > tol) return -1;
  const int j = static_cast<int>(r);
  if (j < 0 || j > n_cells_) return -1;
  return j;
}

std::vector<double> Grid1D::trapezoid_weights(NodeRange range) const {
  std::vector<double> w(static_cast<std::size_t>(std::max(range.size(), 0)), dx_);
  if (w.empty()) return w;
  if (w.size() == 1) {
    w[0] = 0.0;
    return w;
  }
  w.front() = 0.5 * dx_;
  w.back() = 0.5 * dx_;
  return w;
}

}  // namespace lrsm
