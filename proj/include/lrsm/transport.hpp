#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "lrsm/decomposition.hpp"
#include "lrsm/fields.hpp"
#include "lrsm/local_system.hpp"
#include "lrsm/media.hpp"

namespace lrsm {

/// S_m: inflow data on Gamma_{m,-} to the discrete solution on D_m.
std::pair<PhaseSpaceField, SolveReport> solve_local(const LocalSystem& sys,
                                                    const BoundaryTrace& phi);

/// u restricted to the closed node range of K_m^s.
PhaseSpaceField restrict_interior(const PhaseSpaceField& u,
                                  const DecompositionGeometry& geometry, int m);

struct ExchangeTraces {
  /// v < 0 values at E_{m,m-1}; the right inflow of subdomain m-1.
  std::optional<BoundaryTrace> to_prev;
  /// v > 0 values at E_{m,m+1}; the left inflow of subdomain m+1.
  std::optional<BoundaryTrace> to_next;
};

ExchangeTraces take_exchange_traces(const PhaseSpaceField& u_s,
                                    const DecompositionGeometry& geometry, int m);

/// Exchange traces packed as one trace on Gamma^s_{m,+}: positive side is
/// E_{m,m+1} (empty for m = M), negative side is E_{m,m-1} (empty for m = 1).
BoundaryTrace pack_exchange(const ExchangeTraces& t, int m, int half);

/// P_m = trace o S_m^s.
BoundaryTrace apply_P(const LocalSystem& sys, const DecompositionGeometry& geometry,
                      int m, const BoundaryTrace& phi);

/// S_m^s as a map between flat vectors, with the weights of its domain
/// (|v| w on Gamma_{m,-}) and codomain (trapezoid x w on D_m^s).
class RestrictedSolutionMap {
 public:
  RestrictedSolutionMap(LocalSystem sys, const DecompositionGeometry& geometry, int m);

  Eigen::VectorXd apply(const Eigen::VectorXd& phi) const;
  /// Exact discrete adjoint W_G^{-1} E^T A^{-T} R^T W_D g.
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& g) const;

  const Eigen::VectorXd& domain_weights() const noexcept { return w_boundary_; }
  const Eigen::VectorXd& codomain_weights() const noexcept { return w_interior_; }
  const BoundaryTrace& inflow_layout() const noexcept { return layout_; }
  NodeRange interior() const noexcept { return interior_; }
  const LocalSystem& system() const noexcept { return sys_; }

 private:
  LocalSystem sys_;
  NodeRange interior_;
  Eigen::Index offset_ = 0;
  BoundaryTrace layout_;
  Eigen::VectorXd w_boundary_;
  Eigen::VectorXd w_interior_;
};

/// (S_m^s)^*: adjoint of the restricted solution map under the weighted
/// products, realized as the discrete transpose.
BoundaryTrace apply_S_s_adjoint(const LocalSystem& sys,
                                const DecompositionGeometry& geometry, int m,
                                const PhaseSpaceField& g);

/// P_m^* computed from the coupled adjoint transport problem: the adjoint
/// equation on D_m with zero data on Gamma_{m,+} and the interface condition
/// g = psi + h across each exchange cross-section, assembled and solved as one
/// linear system independent of the forward matrix.
BoundaryTrace apply_P_star_oracle(const DecompositionGeometry& geometry,
                                  const MediaField& media, const AngularQuadrature& quad,
                                  int m, const BoundaryTrace& psi);

/// Reversed-upwind discretization of (-v d/dx - sigma L / eps) h = g~ on D_m,
/// h = 0 on Gamma_{m,+}, g~ the zero extension of g; returns h on Gamma_{m,-}.
/// Agrees with apply_S_s_adjoint up to O(dx).
BoundaryTrace continuous_adjoint_oracle(const DecompositionGeometry& geometry,
                                        const MediaField& media,
                                        const AngularQuadrature& quad, int m,
                                        const PhaseSpaceField& g);

/// J(x_j) = sum_i w_i v_i u(x_j, v_i).
std::vector<double> flux_profile(const PhaseSpaceField& u, const AngularQuadrature& quad);

enum class MapKind { S, Ss, P };

/// Dense matrix of S_m, S_m^s or P_m in orthonormal coordinates of the weighted
/// spaces, built by probing every weighted canonical inflow basis vector.
/// Singular values of the result are those of the operator.
Eigen::MatrixXd probe_weighted_matrix(const LocalSystem& sys,
                                      const DecompositionGeometry& geometry, int m,
                                      MapKind kind);

/// Global inflow data on Gamma_-: positive side at x = 0, negative at x = 1.
BoundaryTrace benchmark_inflow_data(const AngularQuadrature& quad);

/// Monolithic solve on the whole slab (one subdomain covering [0, 1]).
PhaseSpaceField solve_global_direct(const Grid1D& grid, const MediaField& media,
                                    const AngularQuadrature& quad,
                                    const BoundaryTrace& phi_bdry);

}  // namespace lrsm
