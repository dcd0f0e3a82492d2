#pragma once

#include <vector>

#include "lrsm/decomposition.hpp"

namespace lrsm {

/// Piecewise-linear partition of unity over the subdomains: eta_m is 1 on the
/// part of K_m no other subdomain covers, ramps linearly across each overlap and
/// vanishes outside K_m.
struct PartitionOfUnity {
  /// Node range of K_m (index m - 1).
  std::vector<NodeRange> support;
  /// eta_m at the nodes of support[m - 1].
  std::vector<std::vector<double>> eta;

  /// eta_m(x_j), zero outside the support.
  double at(int m, int j) const;
  int m_count() const noexcept { return static_cast<int>(eta.size()); }
};

PartitionOfUnity build_partition(const DecompositionGeometry& geometry);

}  // namespace lrsm
