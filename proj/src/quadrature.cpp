#include "lrsm/quadrature.hpp"

#include "lrsm/errors.hpp"

namespace lrsm {

AngularQuadrature build_quadrature(int n_v) {
  if (n_v < 2 || n_v % 2 != 0)
    throw InvalidArgument("build_quadrature: n_v must be even and >= 2, got " +
                          std::to_string(n_v));
  AngularQuadrature q;
  q.nodes.resize(static_cast<std::size_t>(n_v));
  q.weights.assign(static_cast<std::size_t>(n_v), 1.0 / n_v);
  const double dv = 2.0 / n_v;
  const int h = n_v / 2;
  // Build the positive half and mirror it so the node set is exactly symmetric.
  for (int k = 0; k < h; ++k) {
    const double v = (k + 0.5) * dv;
    q.nodes[static_cast<std::size_t>(h + k)] = v;
    q.nodes[static_cast<std::size_t>(h - 1 - k)] = -v;
  }
  return q;
}

}  // namespace lrsm
