#include "lrsm/local_system.hpp"

#include <Eigen/SparseLU>
#include <chrono>
#include <limits>
#include <string>
#include <vector>

#include "lrsm/errors.hpp"

namespace lrsm {

struct LocalSystem::Solvers {
  using Lu = Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor>,
                             Eigen::COLAMDOrdering<int>>;
  std::unique_ptr<Lu> lu;
  std::unique_ptr<Lu> lu_transpose;
  /// Inverse diagonal: the factors are of D A and A^T D (row equilibration).
  Eigen::VectorXd scale;
  SweepPreconditioner sweep;
  SweepPreconditioner sweep_transpose;
};

namespace {

std::unique_ptr<LocalSystem::Solvers> factor(const SparseMatrix& a,
                                             const SparseMatrix& at, SolverKind kind,
                                             int n_v, int m);

}  // namespace

bool LocalSystem::is_inflow(int j, int i) const noexcept {
  const double v = quad_.nodes[static_cast<std::size_t>(i)];
  return (j == nodes_.first && v > 0.0) || (j == nodes_.last && v < 0.0);
}

Eigen::VectorXd LocalSystem::inject(const BoundaryTrace& phi) const {
  const auto half = static_cast<Eigen::Index>(quad_.half());
  if (phi.positive.size() != half || phi.negative.size() != half)
    throw InvalidArgument("LocalSystem::inject: trace must cover the inflow set");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim());
  for (Eigen::Index k = 0; k < half; ++k) {
    b[index(nodes_.first, static_cast<int>(quad_.positive(static_cast<std::size_t>(k))))] =
        phi.positive[k];
    b[index(nodes_.last, static_cast<int>(quad_.negative(static_cast<std::size_t>(k))))] =
        phi.negative[k];
  }
  return b;
}

BoundaryTrace LocalSystem::extract_inflow(const Eigen::VectorXd& y) const {
  const auto half = static_cast<int>(quad_.half());
  BoundaryTrace t = BoundaryTrace::zeros(m_, half);
  for (int k = 0; k < half; ++k) {
    t.positive[k] = y[index(nodes_.first, static_cast<int>(quad_.positive(static_cast<std::size_t>(k))))];
    t.negative[k] = y[index(nodes_.last, static_cast<int>(quad_.negative(static_cast<std::size_t>(k))))];
  }
  return t;
}

namespace {

Eigen::VectorXd run_solve(const SparseMatrix& a, const LocalSystem::Solvers& s,
                          bool transpose, const Eigen::VectorXd& rhs,
                          const SolverSettings& settings, int m, SolveReport* report) {
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd x;
  SolveReport rep;
  if (s.lu) {
    if (transpose) x = s.scale.cwiseProduct(s.lu_transpose->solve(rhs));
    else x = s.lu->solve(s.scale.cwiseProduct(rhs));
    const double bn = rhs.norm();
    rep.iterations = 1;
    rep.residual = bn > 0.0 ? (rhs - a * x).norm() / bn : (a * x).norm();
  } else {
    const auto& pre = transpose ? s.sweep_transpose : s.sweep;
    const int cap = settings.max_matvecs > 0 ? settings.max_matvecs
                                             : static_cast<int>(10 * a.rows());
    auto res = gmres([&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return a * v; },
                     [&](const Eigen::VectorXd& v) { return pre.apply(v); }, rhs,
                     settings.tolerance, cap, settings.restart);
    rep.iterations = res.matvecs;
    rep.residual = res.relative_residual;
    if (!res.converged)
      throw NonConvergence("transport solve on subdomain " + std::to_string(m) +
                               " stalled at relative residual " +
                               std::to_string(res.relative_residual),
                           res.relative_residual, m);
    x = std::move(res.x);
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (report) *report = rep;
  return x;
}

}  // namespace

Eigen::VectorXd LocalSystem::solve(const Eigen::VectorXd& rhs, SolveReport* report) const {
  if (rhs.size() != dim()) throw InvalidArgument("LocalSystem::solve: size mismatch");
  return run_solve(*matrix_, *solvers_, false, rhs, settings_, m_, report);
}

Eigen::VectorXd LocalSystem::solve_transpose(const Eigen::VectorXd& rhs,
                                             SolveReport* report) const {
  if (rhs.size() != dim()) throw InvalidArgument("LocalSystem::solve_transpose: size mismatch");
  return run_solve(*transpose_, *solvers_, true, rhs, settings_, m_, report);
}

namespace {

std::unique_ptr<LocalSystem::Solvers> factor(const SparseMatrix& a,
                                             const SparseMatrix& at, SolverKind kind,
                                             int n_v, int m) {
  auto s = std::make_unique<LocalSystem::Solvers>();
  if (kind == SolverKind::direct) {
    using Lu = LocalSystem::Solvers::Lu;
    s->scale = a.diagonal().cwiseInverse();
    auto run = [m](const Eigen::SparseMatrix<double, Eigen::ColMajor>& mat) {
      auto lu = std::make_unique<Lu>();
      Eigen::SparseMatrix<double, Eigen::ColMajor> cm = mat;
      cm.makeCompressed();
      lu->compute(cm);
      if (lu->info() != Eigen::Success)
        throw NonConvergence("sparse LU failed on subdomain " + std::to_string(m) + ": " +
                                 lu->lastErrorMessage(),
                             std::numeric_limits<double>::infinity(), m);
      return lu;
    };
    s->lu = run(s->scale.asDiagonal() * a);
    s->lu_transpose = run(at * s->scale.asDiagonal());
  } else {
    s->sweep = SweepPreconditioner(a, n_v);
    s->sweep_transpose = SweepPreconditioner(at, n_v);
  }
  return s;
}

}  // namespace

LocalSystem assemble_local(const DecompositionGeometry& geometry, int m,
                           const MediaField& media, const AngularQuadrature& quad,
                           const SolverSettings& settings) {
  const Subdomain& sub = geometry.subdomain(m);
  const Grid1D& grid = geometry.grid();
  if (static_cast<int>(media.sigma_nodes.size()) != grid.n_nodes())
    throw InvalidArgument("assemble_local: media is not sampled on this grid");

  LocalSystem sys;
  sys.m_ = m;
  sys.nodes_ = sub.nodes;
  sys.quad_ = quad;
  sys.grid_ = grid;
  sys.settings_ = settings;

  const int nv = static_cast<int>(quad.size());
  const Eigen::Index n = static_cast<Eigen::Index>(sub.nodes.size()) * nv;
  const double dx = grid.dx();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * (nv + 2));

  for (int j = sub.nodes.first; j <= sub.nodes.last; ++j) {
    const double c = media.sigma(j) / media.epsilon;
    for (int i = 0; i < nv; ++i) {
      const auto row = sys.index(j, i);
      if (sys.is_inflow(j, i)) {
        trips.emplace_back(row, row, 1.0);
        continue;
      }
      const double v = quad.nodes[static_cast<std::size_t>(i)];
      const int upwind = v > 0.0 ? j - 1 : j + 1;
      const double a = std::abs(v) / dx;
      trips.emplace_back(row, row, a + c);
      trips.emplace_back(row, sys.index(upwind, i), -a);
      for (int k = 0; k < nv; ++k)
        trips.emplace_back(row, sys.index(j, k), -c * quad.weights[static_cast<std::size_t>(k)]);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  SparseMatrix at = a.transpose();
  at.makeCompressed();

  sys.solvers_ = factor(a, at, settings.kind, nv, m);
  sys.matrix_ = std::make_shared<const SparseMatrix>(std::move(a));
  sys.transpose_ = std::make_shared<const SparseMatrix>(std::move(at));
  return sys;
}

}  // namespace lrsm
