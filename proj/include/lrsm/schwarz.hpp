#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "lrsm/decomposition.hpp"
#include "lrsm/fields.hpp"
#include "lrsm/local_system.hpp"
#include "lrsm/low_rank_map.hpp"
#include "lrsm/partition.hpp"
#include "lrsm/transport.hpp"

namespace lrsm {

/// Iterate of the additive Schwarz method: one inflow trace per subdomain.
struct SchwarzState {
  int t = 0;
  /// Inflow data on Gamma_{m,-} for subdomain m at index m - 1.
  std::vector<BoundaryTrace> traces;
  /// history[t - 1] = sum_m |phi_m^t - phi_m^{t-1}|_Gamma.
  std::vector<double> history;
  bool converged = false;

  bool operator==(const SchwarzState&) const = default;
};

/// Zero traces everywhere except the physical inflow of subdomains 1 and M.
SchwarzState init_state(const DecompositionGeometry& geometry, const BoundaryTrace& phi_bdry);

/// Produces the exchange traces of subdomain m from its inflow data.
class SchwarzBackend {
 public:
  virtual ~SchwarzBackend() = default;
  virtual ExchangeTraces exchange(int m, const BoundaryTrace& phi) const = 0;
  /// Ordinates defining the weighted boundary norm of the iteration error.
  virtual const AngularQuadrature& quadrature() const noexcept = 0;
  /// Worth spreading the per-subdomain map over threads.
  virtual bool parallel() const noexcept { return true; }
};

/// Vanilla backend: full local solve, restriction, trace.
class FullSolveBackend final : public SchwarzBackend {
 public:
  FullSolveBackend(const DecompositionGeometry& geometry, const std::vector<LocalSystem>& systems);
  ExchangeTraces exchange(int m, const BoundaryTrace& phi) const override;
  const AngularQuadrature& quadrature() const noexcept override {
    return systems_->front().quadrature();
  }

 private:
  const DecompositionGeometry* geometry_;
  const std::vector<LocalSystem>* systems_;
};

/// Low-rank backend: evaluates only the exchange rows of each compressed map,
/// sum_i sigma_i mu_i(E) <nu_i, phi>_Gamma.
class LowRankBackend final : public SchwarzBackend {
 public:
  /// Throws StaleMapError unless there is exactly one map per subdomain, in
  /// order, each carrying `fingerprint`.
  LowRankBackend(const DecompositionGeometry& geometry, std::vector<LowRankMap> maps,
                 const AngularQuadrature& quad, std::uint64_t fingerprint);
  ExchangeTraces exchange(int m, const BoundaryTrace& phi) const override;
  const AngularQuadrature& quadrature() const noexcept override { return quad_; }
  bool parallel() const noexcept override { return false; }
  const std::vector<LowRankMap>& maps() const noexcept { return maps_; }

 private:
  AngularQuadrature quad_;
  struct Rows {
    Eigen::MatrixXd weighted_nu;  // W_Gamma nu, n_v x r
    Eigen::MatrixXd next;         // sigma-scaled mu rows at E_{m,m+1}, v > 0
    Eigen::MatrixXd prev;         // sigma-scaled mu rows at E_{m,m-1}, v < 0
  };
  std::vector<LowRankMap> maps_;
  std::vector<Rows> rows_;
};

/// One additive step: every subdomain consumes the previous traces, the new
/// exchange values are committed together, physical inflow entries are kept.
SchwarzState schwarz_step(const SchwarzBackend& backend, const DecompositionGeometry& geometry,
                          const SchwarzState& state);

struct SchwarzOptions {
  /// Stop once the newest history entry is <= tau (absolute).
  double tau = 1e-8;
  int max_iters = 5000;
  /// Run exactly max_iters steps regardless of tau.
  bool fixed_iterations = false;
  /// Called after every step with the wall time of that step.
  std::function<void(const SchwarzState&, double)> observer;
};

struct Assembly {
  /// Full solutions u_m on D_m (index m - 1).
  std::vector<PhaseSpaceField> local;
  /// sum_m eta_m u_m on all grid nodes.
  PhaseSpaceField global;
};

/// Full local solves with the given traces, blended by the partition of unity.
Assembly assemble_solution(const std::vector<LocalSystem>& systems,
                           const DecompositionGeometry& geometry,
                           const PartitionOfUnity& partition,
                           const std::vector<BoundaryTrace>& traces);

struct SchwarzResult {
  SchwarzState state;
  Assembly solution;
  /// Wall time of each step (online loop only).
  std::vector<double> step_seconds;
};

/// Iterates until convergence (or max_iters), then assembles the final field
/// from one full solve per subdomain regardless of the backend.
SchwarzResult run_schwarz(const SchwarzBackend& backend, const std::vector<LocalSystem>& systems,
                          const DecompositionGeometry& geometry, const BoundaryTrace& phi_bdry,
                          const SchwarzOptions& options);

/// Assembles every LocalSystem of the decomposition.
std::vector<LocalSystem> assemble_all(const DecompositionGeometry& geometry,
                                      const MediaField& media, const AngularQuadrature& quad,
                                      const SolverSettings& settings = {});

/// |u - u_ref|_2 / |u_ref|_2 over all node x ordinate entries (unweighted).
double relative_error(const PhaseSpaceField& u, const PhaseSpaceField& u_ref);

}  // namespace lrsm
