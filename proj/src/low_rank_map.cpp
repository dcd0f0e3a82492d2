#include "lrsm/low_rank_map.hpp"

#include <cmath>
#include <string>

#include "lrsm/errors.hpp"
#include "lrsm/hash.hpp"
#include "lrsm/random.hpp"
#include "lrsm/transport.hpp"

namespace lrsm {

std::uint64_t problem_fingerprint(const DecompositionGeometry& geometry, const MediaField& media,
                                  const AngularQuadrature& quad) {
  Fnv1a h;
  h.add_string("lrsm-problem");
  h.add_u64(geometry.fingerprint());
  h.add_u64(media.fingerprint());
  h.add_doubles(quad.nodes);
  h.add_doubles(quad.weights);
  return h.value();
}

LowRankMap compress_subdomain(const LocalSystem& sys, const DecompositionGeometry& geometry,
                              int m, const MediaField& media, const RsvdConfig& cfg) {
  const RestrictedSolutionMap map(sys, geometry, m);
  WeightedOperator op;
  op.domain_weights = map.domain_weights();
  op.codomain_weights = map.codomain_weights();
  op.apply = [&map](const Eigen::VectorXd& x) { return map.apply(x); };
  op.apply_adjoint = [&map](const Eigen::VectorXd& y) { return map.apply_adjoint(y); };

  RsvdConfig local = cfg;
  local.seed = splitmix64(cfg.seed ^ (0x6a09e667f3bcc909ULL * static_cast<std::uint64_t>(m)));
  const OperatorRsvd f = rsvd_operator(op, local);

  LowRankMap out;
  out.subdomain = m;
  out.fingerprint = problem_fingerprint(geometry, media, sys.quadrature());
  out.n_v = sys.n_v();
  out.interior = map.interior();
  out.sigma = f.sigma;
  out.nu = f.nu;
  out.mu = f.mu;
  out.numerical_rank = std::min<Eigen::Index>(f.numerical_rank, out.sigma.size());
  const double defect = orthonormality_defect(out, geometry.grid(), sys.quadrature());
  if (!(defect <= 1e-10))
    throw NonConvergence("compress_subdomain: factors lost orthonormality on subdomain " +
                             std::to_string(m) + " (defect " + std::to_string(defect) + ")",
                         defect, m);
  return out;
}

namespace {

Eigen::VectorXd inflow_weights(int n_v, const AngularQuadrature& quad) {
  if (static_cast<int>(quad.size()) != n_v)
    throw InvalidArgument("low-rank map: ordinate count does not match the quadrature");
  return boundary_weights(BoundaryTrace::zeros(0, n_v / 2), quad);
}

}  // namespace

double orthonormality_defect(const LowRankMap& map, const Grid1D& grid,
                             const AngularQuadrature& quad) {
  const Eigen::VectorXd wb = inflow_weights(map.n_v, quad);
  const Eigen::VectorXd wi = interior_weights(map.interior, grid, quad);
  const Eigen::Index r = map.rank();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(r, r);
  const Eigen::MatrixXd gn = map.nu.transpose() * wb.asDiagonal() * map.nu;
  const Eigen::MatrixXd gm = map.mu.transpose() * wi.asDiagonal() * map.mu;
  double d = 0.0;
  if (r > 0) d = std::max((gn - eye).cwiseAbs().maxCoeff(), (gm - eye).cwiseAbs().maxCoeff());
  return d;
}

void require_fingerprint(const LowRankMap& map, std::uint64_t expected) {
  if (map.fingerprint != expected)
    throw StaleMapError("compressed map of subdomain " + std::to_string(map.subdomain) +
                        " was built for a different problem; re-run the offline stage");
}

PhaseSpaceField apply_lowrank(const LowRankMap& map, const BoundaryTrace& phi,
                              const AngularQuadrature& quad) {
  const int half = map.n_v / 2;
  if (phi.positive.size() != half || phi.negative.size() != half)
    throw InvalidArgument("apply_lowrank: trace does not match the map's inflow set");
  const Eigen::VectorXd wphi = inflow_weights(map.n_v, quad).cwiseProduct(phi.flat());
  const Eigen::VectorXd coeff = map.sigma.cwiseProduct(map.nu.transpose() * wphi);
  return PhaseSpaceField(map.interior, map.n_v, map.mu * coeff);
}

LowRankMap truncate(const LowRankMap& map, int rank) {
  if (rank < 0 || rank > map.rank())
    throw InvalidArgument("truncate: rank " + std::to_string(rank) + " outside [0, " +
                          std::to_string(map.rank()) + "]");
  LowRankMap out = map;
  out.sigma = map.sigma.head(rank);
  out.nu = map.nu.leftCols(rank);
  out.mu = map.mu.leftCols(rank);
  out.numerical_rank = std::min<Eigen::Index>(map.numerical_rank, rank);
  return out;
}

}  // namespace lrsm
