#pragma once

#include <cstddef>
#include <vector>

namespace lrsm {

/// Discrete ordinates on V = (-1, 1) with weights of the normalized measure
/// dv/2. Nodes are sorted ascending: the first half is v < 0, the second half
/// v > 0, and node i mirrors node n-1-i.
struct AngularQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t half() const noexcept { return nodes.size() / 2; }

  /// Index of the k-th positive ordinate (k in [0, half)).
  std::size_t positive(std::size_t k) const noexcept { return half() + k; }
  /// Index of the k-th negative ordinate, ordered by increasing |v|.
  std::size_t negative(std::size_t k) const noexcept { return half() - 1 - k; }
};

/// Midpoint rule with n_v cells on (-1, 1): v_i = -1 + (i - 1/2) 2/n_v.
/// Throws InvalidArgument when n_v is odd or below 2.
AngularQuadrature build_quadrature(int n_v);

}  // namespace lrsm
