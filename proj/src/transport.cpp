#include "lrsm/transport.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <numbers>

#include "lrsm/errors.hpp"

namespace lrsm {

std::pair<PhaseSpaceField, SolveReport> solve_local(const LocalSystem& sys,
                                                    const BoundaryTrace& phi) {
  SolveReport rep;
  Eigen::VectorXd u = sys.solve(sys.inject(phi), &rep);
  return {PhaseSpaceField(sys.nodes(), sys.n_v(), std::move(u)), rep};
}

PhaseSpaceField restrict_interior(const PhaseSpaceField& u,
                                  const DecompositionGeometry& geometry, int m) {
  return restrict_nodes(u, geometry.subdomain(m).interior);
}

ExchangeTraces take_exchange_traces(const PhaseSpaceField& u_s,
                                    const DecompositionGeometry& geometry, int m) {
  const Subdomain& sub = geometry.subdomain(m);
  const int half = u_s.n_v / 2;
  ExchangeTraces out;
  if (sub.exchange_next) {
    const int e = *sub.exchange_next;
    if (!u_s.nodes.contains(e)) throw InvalidArgument("take_exchange_traces: node outside field");
    BoundaryTrace t = BoundaryTrace::zeros(m + 1, half, true, false);
    for (int k = 0; k < half; ++k) t.positive[k] = u_s.at(e, half + k);
    out.to_next = std::move(t);
  }
  if (sub.exchange_prev) {
    const int e = *sub.exchange_prev;
    if (!u_s.nodes.contains(e)) throw InvalidArgument("take_exchange_traces: node outside field");
    BoundaryTrace t = BoundaryTrace::zeros(m - 1, half, false, true);
    for (int k = 0; k < half; ++k) t.negative[k] = u_s.at(e, half - 1 - k);
    out.to_prev = std::move(t);
  }
  return out;
}

BoundaryTrace pack_exchange(const ExchangeTraces& t, int m, int half) {
  BoundaryTrace out = BoundaryTrace::zeros(m, half, t.to_next.has_value(), t.to_prev.has_value());
  if (t.to_next) out.positive = t.to_next->positive;
  if (t.to_prev) out.negative = t.to_prev->negative;
  return out;
}

BoundaryTrace apply_P(const LocalSystem& sys, const DecompositionGeometry& geometry,
                      int m, const BoundaryTrace& phi) {
  auto [u, rep] = solve_local(sys, phi);
  const auto u_s = restrict_interior(u, geometry, m);
  return pack_exchange(take_exchange_traces(u_s, geometry, m), m, sys.n_v() / 2);
}

RestrictedSolutionMap::RestrictedSolutionMap(LocalSystem sys,
                                             const DecompositionGeometry& geometry, int m)
    : sys_(std::move(sys)), interior_(geometry.subdomain(m).interior) {
  if (sys_.subdomain() != m) throw InvalidArgument("RestrictedSolutionMap: system is for another subdomain");
  offset_ = sys_.index(interior_.first, 0);
  layout_ = BoundaryTrace::zeros(m, sys_.n_v() / 2);
  w_boundary_ = boundary_weights(layout_, sys_.quadrature());
  w_interior_ = interior_weights(interior_, sys_.grid(), sys_.quadrature());
}

Eigen::VectorXd RestrictedSolutionMap::apply(const Eigen::VectorXd& phi) const {
  const Eigen::VectorXd u = sys_.solve(sys_.inject(BoundaryTrace::from_flat(layout_, phi)));
  return u.segment(offset_, w_interior_.size());
}

Eigen::VectorXd RestrictedSolutionMap::apply_adjoint(const Eigen::VectorXd& g) const {
  if (g.size() != w_interior_.size())
    throw InvalidArgument("RestrictedSolutionMap::apply_adjoint: size mismatch");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys_.dim());
  rhs.segment(offset_, g.size()) = w_interior_.cwiseProduct(g);
  const Eigen::VectorXd y = sys_.solve_transpose(rhs);
  return sys_.extract_inflow(y).flat().cwiseQuotient(w_boundary_);
}

BoundaryTrace apply_S_s_adjoint(const LocalSystem& sys,
                                const DecompositionGeometry& geometry, int m,
                                const PhaseSpaceField& g) {
  RestrictedSolutionMap map(sys, geometry, m);
  if (g.nodes != map.interior() || g.n_v != sys.n_v())
    throw InvalidArgument("apply_S_s_adjoint: g must live on D_m^s");
  return BoundaryTrace::from_flat(map.inflow_layout(), map.apply_adjoint(g.values));
}

namespace {

enum class Closure {
  // Zero extension on the forward inflow points; matches the discrete transpose.
  adjoint_consistent,
  // h = 0 imposed on the outflow nodes themselves.
  reversed_upwind,
};

struct AdjointProblem {
  NodeRange nodes;
  int nv = 0;
  SparseMatrix matrix;
  Eigen::Index index(int j, int i) const { return static_cast<Eigen::Index>(j - nodes.first) * nv + i; }
};

AdjointProblem assemble_adjoint(const DecompositionGeometry& geometry, const MediaField& media,
                                const AngularQuadrature& quad, int m, Closure closure) {
  AdjointProblem p;
  p.nodes = geometry.subdomain(m).nodes;
  p.nv = static_cast<int>(quad.size());
  const double dx = geometry.grid().dx();
  const int a_node = p.nodes.first;
  const int b_node = p.nodes.last;
  std::vector<Eigen::Triplet<double>> trips;
  for (int j = a_node; j <= b_node; ++j) {
    const double c = media.sigma(j) / media.epsilon;
    for (int i = 0; i < p.nv; ++i) {
      const double v = quad.nodes[static_cast<std::size_t>(i)];
      const auto row = p.index(j, i);
      const bool pinned = closure == Closure::adjoint_consistent
                              ? (v > 0.0 ? j == a_node : j == b_node)
                              : (v > 0.0 ? j == b_node : j == a_node);
      if (pinned) {
        trips.emplace_back(row, row, 1.0);
        continue;
      }
      const double s = std::abs(v) / dx;
      // -v dh/dx looks downstream of the forward flow.
      const int down = v > 0.0 ? j + 1 : j - 1;
      trips.emplace_back(row, row, s + c);
      if (p.nodes.contains(down)) trips.emplace_back(row, p.index(down, i), -s);
      for (int k = 0; k < p.nv; ++k)
        trips.emplace_back(row, p.index(j, k), -c * quad.weights[static_cast<std::size_t>(k)]);
    }
  }
  p.matrix.resize(static_cast<Eigen::Index>(p.nodes.size()) * p.nv,
                  static_cast<Eigen::Index>(p.nodes.size()) * p.nv);
  p.matrix.setFromTriplets(trips.begin(), trips.end());
  p.matrix.makeCompressed();
  return p;
}

Eigen::VectorXd direct_solve(const SparseMatrix& a, const Eigen::VectorXd& rhs) {
  Eigen::SparseMatrix<double, Eigen::ColMajor> cm = a;
  cm.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(cm);
  if (lu.info() != Eigen::Success)
    throw NonConvergence("adjoint oracle factorization failed: " + lu.lastErrorMessage(),
                         std::numeric_limits<double>::infinity());
  return lu.solve(rhs);
}

}  // namespace

BoundaryTrace apply_P_star_oracle(const DecompositionGeometry& geometry,
                                  const MediaField& media, const AngularQuadrature& quad,
                                  int m, const BoundaryTrace& psi) {
  const Subdomain& sub = geometry.subdomain(m);
  const int half = static_cast<int>(quad.half());
  if (psi.positive.size() != (sub.exchange_next ? half : 0) ||
      psi.negative.size() != (sub.exchange_prev ? half : 0))
    throw InvalidArgument("apply_P_star_oracle: psi must live on the exchange cross-sections");
  const AdjointProblem p = assemble_adjoint(geometry, media, quad, m, Closure::adjoint_consistent);
  const double dx = geometry.grid().dx();

  // Interface condition g = psi + h across each exchange cross-section: the
  // jump enters the upwind difference at the exchange node as |v| psi / dx.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p.matrix.rows());
  for (int k = 0; k < half; ++k) {
    if (sub.exchange_next) {
      const auto i = quad.positive(static_cast<std::size_t>(k));
      rhs[p.index(*sub.exchange_next, static_cast<int>(i))] += std::abs(quad.nodes[i]) * psi.positive[k] / dx;
    }
    if (sub.exchange_prev) {
      const auto i = quad.negative(static_cast<std::size_t>(k));
      rhs[p.index(*sub.exchange_prev, static_cast<int>(i))] += std::abs(quad.nodes[i]) * psi.negative[k] / dx;
    }
  }
  const Eigen::VectorXd h = direct_solve(p.matrix, rhs);

  auto mean = [&](int j) {
    double s = 0.0;
    for (int i = 0; i < p.nv; ++i) s += quad.weights[static_cast<std::size_t>(i)] * h[p.index(j, i)];
    return s;
  };
  const int a = p.nodes.first, b = p.nodes.last;
  const double ca = media.sigma(a) / media.epsilon, cb = media.sigma(b) / media.epsilon;
  const double mean_a = mean(a), mean_b = mean(b);
  BoundaryTrace out = BoundaryTrace::zeros(m, half);
  for (int k = 0; k < half; ++k) {
    const auto ip = quad.positive(static_cast<std::size_t>(k));
    const auto in = quad.negative(static_cast<std::size_t>(k));
    out.positive[k] = h[p.index(a + 1, static_cast<int>(ip))] + dx * ca / std::abs(quad.nodes[ip]) * mean_a;
    out.negative[k] = h[p.index(b - 1, static_cast<int>(in))] + dx * cb / std::abs(quad.nodes[in]) * mean_b;
  }
  return out;
}

BoundaryTrace continuous_adjoint_oracle(const DecompositionGeometry& geometry,
                                        const MediaField& media,
                                        const AngularQuadrature& quad, int m,
                                        const PhaseSpaceField& g) {
  const Subdomain& sub = geometry.subdomain(m);
  if (g.nodes != sub.interior || g.n_v != static_cast<int>(quad.size()))
    throw InvalidArgument("continuous_adjoint_oracle: g must live on D_m^s");
  const AdjointProblem p = assemble_adjoint(geometry, media, quad, m, Closure::reversed_upwind);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p.matrix.rows());
  for (int j = g.nodes.first; j <= g.nodes.last; ++j)
    for (int i = 0; i < p.nv; ++i) {
      const double v = quad.nodes[static_cast<std::size_t>(i)];
      const bool pinned = v > 0.0 ? j == p.nodes.last : j == p.nodes.first;
      if (!pinned) rhs[p.index(j, i)] = g.at(j, i);
    }
  const Eigen::VectorXd h = direct_solve(p.matrix, rhs);
  const int half = static_cast<int>(quad.half());
  BoundaryTrace out = BoundaryTrace::zeros(m, half);
  for (int k = 0; k < half; ++k) {
    out.positive[k] = h[p.index(p.nodes.first, static_cast<int>(quad.positive(static_cast<std::size_t>(k))))];
    out.negative[k] = h[p.index(p.nodes.last, static_cast<int>(quad.negative(static_cast<std::size_t>(k))))];
  }
  return out;
}

std::vector<double> flux_profile(const PhaseSpaceField& u, const AngularQuadrature& quad) {
  if (u.n_v != static_cast<int>(quad.size())) throw InvalidArgument("flux_profile: ordinate mismatch");
  std::vector<double> j_of_x(static_cast<std::size_t>(u.nodes.size()), 0.0);
  for (int j = u.nodes.first; j <= u.nodes.last; ++j) {
    double s = 0.0;
    for (int i = 0; i < u.n_v; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      s += quad.weights[ii] * quad.nodes[ii] * u.at(j, i);
    }
    j_of_x[static_cast<std::size_t>(j - u.nodes.first)] = s;
  }
  return j_of_x;
}

Eigen::MatrixXd probe_weighted_matrix(const LocalSystem& sys,
                                      const DecompositionGeometry& geometry, int m,
                                      MapKind kind) {
  const AngularQuadrature& quad = sys.quadrature();
  const int half = static_cast<int>(quad.half());
  const BoundaryTrace layout = BoundaryTrace::zeros(m, half);
  const Eigen::VectorXd w_in = boundary_weights(layout, quad);
  const Subdomain& sub = geometry.subdomain(m);

  Eigen::VectorXd w_out;
  switch (kind) {
    case MapKind::S: w_out = interior_weights(sub.nodes, geometry.grid(), quad); break;
    case MapKind::Ss: w_out = interior_weights(sub.interior, geometry.grid(), quad); break;
    case MapKind::P: {
      const BoundaryTrace ex = BoundaryTrace::zeros(m, half, sub.exchange_next.has_value(),
                                                    sub.exchange_prev.has_value());
      w_out = boundary_weights(ex, quad);
      break;
    }
  }
  const Eigen::VectorXd sqrt_out = w_out.cwiseSqrt();
  Eigen::MatrixXd a(w_out.size(), w_in.size());
  for (Eigen::Index c = 0; c < w_in.size(); ++c) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(w_in.size());
    e[c] = 1.0 / std::sqrt(w_in[c]);
    const BoundaryTrace phi = BoundaryTrace::from_flat(layout, e);
    auto [u, rep] = solve_local(sys, phi);
    Eigen::VectorXd col;
    switch (kind) {
      case MapKind::S: col = u.values; break;
      case MapKind::Ss: col = restrict_interior(u, geometry, m).values; break;
      case MapKind::P:
        col = pack_exchange(take_exchange_traces(restrict_interior(u, geometry, m), geometry, m), m, half).flat();
        break;
    }
    a.col(c) = sqrt_out.cwiseProduct(col);
  }
  return a;
}

BoundaryTrace benchmark_inflow_data(const AngularQuadrature& quad) {
  using std::numbers::pi;
  const int half = static_cast<int>(quad.half());
  BoundaryTrace t = BoundaryTrace::zeros(0, half);
  for (int k = 0; k < half; ++k) {
    const double vp = quad.nodes[quad.positive(static_cast<std::size_t>(k))];
    const double vn = quad.nodes[quad.negative(static_cast<std::size_t>(k))];
    t.positive[k] = 10.0 + std::sin(2.0 * pi * vp);
    t.negative[k] = 1.0 + std::sin(2.0 * pi * vn);
  }
  return t;
}

PhaseSpaceField solve_global_direct(const Grid1D& grid, const MediaField& media,
                                    const AngularQuadrature& quad,
                                    const BoundaryTrace& phi_bdry) {
  const auto geometry = build_decomposition(grid, 1);
  const LocalSystem sys = assemble_local(geometry, 1, media, quad);
  BoundaryTrace phi = phi_bdry;
  phi.owner = 1;
  return solve_local(sys, phi).first;
}

}  // namespace lrsm
