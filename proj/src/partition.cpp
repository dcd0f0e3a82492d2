#include "lrsm/partition.hpp"

#include "lrsm/errors.hpp"

namespace lrsm {

double PartitionOfUnity::at(int m, int j) const {
  if (m < 1 || m > m_count()) throw InvalidArgument("PartitionOfUnity::at: bad subdomain");
  const NodeRange& r = support[static_cast<std::size_t>(m - 1)];
  if (!r.contains(j)) return 0.0;
  return eta[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(j - r.first)];
}

PartitionOfUnity build_partition(const DecompositionGeometry& geometry) {
  PartitionOfUnity p;
  const int M = geometry.m_count();
  for (int m = 1; m <= M; ++m) {
    const Subdomain& s = geometry.subdomain(m);
    std::vector<double> eta(static_cast<std::size_t>(s.nodes.size()), 1.0);
    // Ramps are evaluated from integer node offsets so that the rising ramp of
    // eta_m and the falling ramp of eta_{m-1} are exact complements.
    if (m > 1) {
      const int a = s.nodes.first;
      const int b = geometry.subdomain(m - 1).nodes.last;
      for (int j = a; j <= b; ++j)
        eta[static_cast<std::size_t>(j - a)] = static_cast<double>(j - a) / (b - a);
    }
    if (m < M) {
      const int a = geometry.subdomain(m + 1).nodes.first;
      const int b = s.nodes.last;
      for (int j = a; j <= b; ++j)
        eta[static_cast<std::size_t>(j - s.nodes.first)] *= 1.0 - static_cast<double>(j - a) / (b - a);
    }
    p.support.push_back(s.nodes);
    p.eta.push_back(std::move(eta));
  }
  return p;
}

}  // namespace lrsm
