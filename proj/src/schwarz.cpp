#include "lrsm/schwarz.hpp"

#include <chrono>
#include <optional>
#include <string>

#include "lrsm/errors.hpp"
#include "lrsm/parallel.hpp"

namespace lrsm {

SchwarzState init_state(const DecompositionGeometry& geometry, const BoundaryTrace& phi_bdry) {
  const int M = geometry.m_count();
  const Eigen::Index half = phi_bdry.positive.size();
  if (half == 0 || phi_bdry.negative.size() != half)
    throw InvalidArgument("init_state: physical inflow data must cover both ends");
  SchwarzState s;
  for (int m = 1; m <= M; ++m) s.traces.push_back(BoundaryTrace::zeros(m, static_cast<int>(half)));
  s.traces.front().positive = phi_bdry.positive;
  s.traces.back().negative = phi_bdry.negative;
  return s;
}

FullSolveBackend::FullSolveBackend(const DecompositionGeometry& geometry,
                                   const std::vector<LocalSystem>& systems)
    : geometry_(&geometry), systems_(&systems) {
  if (systems.empty() || static_cast<int>(systems.size()) != geometry.m_count())
    throw InvalidArgument("FullSolveBackend: need one local system per subdomain");
}

ExchangeTraces FullSolveBackend::exchange(int m, const BoundaryTrace& phi) const {
  const auto& sys = (*systems_)[static_cast<std::size_t>(m - 1)];
  auto [u, report] = solve_local(sys, phi);
  return take_exchange_traces(restrict_interior(u, *geometry_, m), *geometry_, m);
}

LowRankBackend::LowRankBackend(const DecompositionGeometry& geometry, std::vector<LowRankMap> maps,
                               const AngularQuadrature& quad, std::uint64_t fingerprint)
    : quad_(quad), maps_(std::move(maps)) {
  if (static_cast<int>(maps_.size()) != geometry.m_count())
    throw StaleMapError("low-rank backend: expected " + std::to_string(geometry.m_count()) +
                        " maps, got " + std::to_string(maps_.size()));
  const Eigen::VectorXd wb =
      boundary_weights(BoundaryTrace::zeros(0, static_cast<int>(quad.half())), quad);
  for (int m = 1; m <= geometry.m_count(); ++m) {
    const LowRankMap& map = maps_[static_cast<std::size_t>(m - 1)];
    require_fingerprint(map, fingerprint);
    const Subdomain& s = geometry.subdomain(m);
    if (map.subdomain != m || map.interior != s.interior ||
        map.n_v != static_cast<int>(quad.size()))
      throw StaleMapError("low-rank backend: map " + std::to_string(m) +
                          " does not match the decomposition");
    Rows rows;
    rows.weighted_nu = wb.asDiagonal() * map.nu;
    const Eigen::Index half = static_cast<Eigen::Index>(quad.half());
    auto gather = [&](int node, bool positive) {
      Eigen::MatrixXd out(half, map.rank());
      for (Eigen::Index k = 0; k < half; ++k) {
        const auto i = positive ? quad.positive(static_cast<std::size_t>(k))
                                : quad.negative(static_cast<std::size_t>(k));
        const Eigen::Index row = static_cast<Eigen::Index>(node - s.interior.first) * map.n_v +
                                 static_cast<Eigen::Index>(i);
        out.row(k) = map.mu.row(row).cwiseProduct(map.sigma.transpose());
      }
      return out;
    };
    if (s.exchange_next) rows.next = gather(*s.exchange_next, true);
    if (s.exchange_prev) rows.prev = gather(*s.exchange_prev, false);
    rows_.push_back(std::move(rows));
  }
}

ExchangeTraces LowRankBackend::exchange(int m, const BoundaryTrace& phi) const {
  const Rows& rows = rows_[static_cast<std::size_t>(m - 1)];
  const Eigen::Index half = rows.weighted_nu.rows() / 2;
  if (phi.positive.size() != half || phi.negative.size() != half)
    throw InvalidArgument("LowRankBackend: trace does not match the map's inflow set");
  const Eigen::VectorXd coeff = rows.weighted_nu.topRows(half).transpose() * phi.positive +
                                rows.weighted_nu.bottomRows(half).transpose() * phi.negative;
  ExchangeTraces out;
  if (rows.next.size() > 0) {
    BoundaryTrace t;
    t.owner = m + 1;
    t.positive = rows.next * coeff;
    out.to_next = std::move(t);
  }
  if (rows.prev.size() > 0) {
    BoundaryTrace t;
    t.owner = m - 1;
    t.negative = rows.prev * coeff;
    out.to_prev = std::move(t);
  }
  return out;
}

SchwarzState schwarz_step(const SchwarzBackend& backend, const DecompositionGeometry& geometry,
                          const SchwarzState& state) {
  const int M = geometry.m_count();
  if (static_cast<int>(state.traces.size()) != M)
    throw InvalidArgument("schwarz_step: state does not match the decomposition");
  std::vector<ExchangeTraces> produced(static_cast<std::size_t>(M));
  auto work = [&](int idx) {
    produced[static_cast<std::size_t>(idx)] =
        backend.exchange(idx + 1, state.traces[static_cast<std::size_t>(idx)]);
  };
  if (backend.parallel()) parallel_for(M, work);
  else for (int idx = 0; idx < M; ++idx) work(idx);

  SchwarzState next = state;
  for (int m = 1; m <= M; ++m) {
    const auto& ex = produced[static_cast<std::size_t>(m - 1)];
    if (ex.to_next) next.traces[static_cast<std::size_t>(m)].positive = ex.to_next->positive;
    if (ex.to_prev) next.traces[static_cast<std::size_t>(m - 2)].negative = ex.to_prev->negative;
  }
  double change = 0.0;
  for (int m = 0; m < M; ++m) {
    const auto& a = next.traces[static_cast<std::size_t>(m)];
    const auto& b = state.traces[static_cast<std::size_t>(m)];
    change += boundary_norm(BoundaryTrace::from_flat(a, a.flat() - b.flat()), backend.quadrature());
  }
  next.t = state.t + 1;
  next.history.push_back(change);
  return next;
}

Assembly assemble_solution(const std::vector<LocalSystem>& systems,
                           const DecompositionGeometry& geometry,
                           const PartitionOfUnity& partition,
                           const std::vector<BoundaryTrace>& traces) {
  const int M = geometry.m_count();
  if (static_cast<int>(systems.size()) != M || static_cast<int>(traces.size()) != M ||
      partition.m_count() != M)
    throw InvalidArgument("assemble_solution: inputs do not match the decomposition");
  Assembly out;
  out.local.resize(static_cast<std::size_t>(M));
  parallel_for(M, [&](int idx) {
    out.local[static_cast<std::size_t>(idx)] =
        solve_local(systems[static_cast<std::size_t>(idx)], traces[static_cast<std::size_t>(idx)]).first;
  });
  const Grid1D& grid = geometry.grid();
  const int n_v = systems.front().n_v();
  out.global = PhaseSpaceField(grid.all_nodes(), n_v);
  for (int m = 1; m <= M; ++m) {
    const PhaseSpaceField& u = out.local[static_cast<std::size_t>(m - 1)];
    for (int j = u.nodes.first; j <= u.nodes.last; ++j) {
      const double eta = partition.at(m, j);
      if (eta == 0.0) continue;
      out.global.values.segment(out.global.index(j, 0), n_v) +=
          eta * u.values.segment(u.index(j, 0), n_v);
    }
  }
  return out;
}

SchwarzResult run_schwarz(const SchwarzBackend& backend, const std::vector<LocalSystem>& systems,
                          const DecompositionGeometry& geometry, const BoundaryTrace& phi_bdry,
                          const SchwarzOptions& options) {
  if (!(options.tau > 0.0)) throw InvalidArgument("run_schwarz: tau must be positive");
  if (options.max_iters < 1) throw InvalidArgument("run_schwarz: max_iters must be positive");
  SchwarzResult result;
  SchwarzState state = init_state(geometry, phi_bdry);
  while (state.t < options.max_iters) {
    const auto t0 = std::chrono::steady_clock::now();
    state = schwarz_step(backend, geometry, state);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.step_seconds.push_back(dt);
    state.converged = state.history.back() <= options.tau;
    if (options.observer) options.observer(state, dt);
    if (state.converged && !options.fixed_iterations) break;
  }
  result.solution = assemble_solution(systems, geometry, build_partition(geometry), state.traces);
  result.state = std::move(state);
  return result;
}

std::vector<LocalSystem> assemble_all(const DecompositionGeometry& geometry,
                                      const MediaField& media, const AngularQuadrature& quad,
                                      const SolverSettings& settings) {
  std::vector<std::optional<LocalSystem>> built(static_cast<std::size_t>(geometry.m_count()));
  parallel_for(geometry.m_count(), [&](int idx) {
    built[static_cast<std::size_t>(idx)] = assemble_local(geometry, idx + 1, media, quad, settings);
  });
  std::vector<LocalSystem> out;
  out.reserve(built.size());
  for (auto& b : built) out.push_back(std::move(*b));
  return out;
}

double relative_error(const PhaseSpaceField& u, const PhaseSpaceField& u_ref) {
  if (u.nodes != u_ref.nodes || u.n_v != u_ref.n_v)
    throw InvalidArgument("relative_error: fields have different shapes");
  const double ref = u_ref.values.norm();
  if (ref == 0.0) throw InvalidArgument("relative_error: reference field is zero");
  return (u.values - u_ref.values).norm() / ref;
}

}  // namespace lrsm
