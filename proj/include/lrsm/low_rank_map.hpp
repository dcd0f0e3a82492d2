#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "lrsm/decomposition.hpp"
#include "lrsm/fields.hpp"
#include "lrsm/local_system.hpp"
#include "lrsm/media.hpp"
#include "lrsm/quadrature.hpp"
#include "lrsm/rsvd.hpp"

namespace lrsm {

/// Compressed restricted solution map of one subdomain:
/// S_m^s phi ~ sum_i sigma_i mu_i <nu_i, phi>_Gamma.
///
/// nu columns use the flat() layout of the inflow trace (positive side at the
/// left endpoint, then negative side at the right endpoint); mu columns use the
/// node-major layout of a PhaseSpaceField on the interior node range.
struct LowRankMap {
  int subdomain = 0;
  std::uint64_t fingerprint = 0;
  int n_v = 0;
  NodeRange interior;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd nu;
  Eigen::MatrixXd mu;
  /// Independent directions found when the map was built.
  Eigen::Index numerical_rank = 0;

  int rank() const noexcept { return static_cast<int>(sigma.size()); }
  friend bool operator==(const LowRankMap& a, const LowRankMap& b) {
    return a.subdomain == b.subdomain && a.fingerprint == b.fingerprint && a.n_v == b.n_v &&
           a.interior == b.interior && a.numerical_rank == b.numerical_rank &&
           identical(a.sigma, b.sigma) && identical(a.nu, b.nu) && identical(a.mu, b.mu);
  }
};

/// Fingerprint of everything that determines S_m^s: grid, ordinates, media,
/// decomposition geometry.
std::uint64_t problem_fingerprint(const DecompositionGeometry& geometry, const MediaField& media,
                                  const AngularQuadrature& quad);

/// Compresses S_m^s with the two-stage randomized SVD. The stream of Gaussian
/// draws depends on (cfg.seed, m) only.
LowRankMap compress_subdomain(const LocalSystem& sys, const DecompositionGeometry& geometry,
                              int m, const MediaField& media, const RsvdConfig& cfg);

/// Largest deviation from the identity of the weighted Gram matrices of nu and mu.
double orthonormality_defect(const LowRankMap& map, const Grid1D& grid,
                             const AngularQuadrature& quad);

/// Throws StaleMapError unless map.fingerprint == expected.
void require_fingerprint(const LowRankMap& map, std::uint64_t expected);

/// sum_i sigma_i mu_i <nu_i, phi>_Gamma on the interior node range.
PhaseSpaceField apply_lowrank(const LowRankMap& map, const BoundaryTrace& phi,
                              const AngularQuadrature& quad);

/// First r' triples; throws InvalidArgument if r' > rank or r' < 0.
LowRankMap truncate(const LowRankMap& map, int rank);

}  // namespace lrsm
