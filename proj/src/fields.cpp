#include "lrsm/fields.hpp"

#include <cmath>

#include "lrsm/errors.hpp"

namespace lrsm {

BoundaryTrace BoundaryTrace::zeros(int owner, int half, bool with_positive,
                                   bool with_negative) {
  BoundaryTrace t;
  t.owner = owner;
  t.positive = Eigen::VectorXd::Zero(with_positive ? half : 0);
  t.negative = Eigen::VectorXd::Zero(with_negative ? half : 0);
  return t;
}

BoundaryTrace BoundaryTrace::constant(int owner, int half, double c) {
  BoundaryTrace t;
  t.owner = owner;
  t.positive = Eigen::VectorXd::Constant(half, c);
  t.negative = Eigen::VectorXd::Constant(half, c);
  return t;
}

Eigen::VectorXd BoundaryTrace::flat() const {
  Eigen::VectorXd out(size());
  out << positive, negative;
  return out;
}

BoundaryTrace BoundaryTrace::from_flat(const BoundaryTrace& layout,
                                       const Eigen::VectorXd& values) {
  if (values.size() != layout.size())
    throw InvalidArgument("BoundaryTrace::from_flat: size mismatch");
  BoundaryTrace t;
  t.owner = layout.owner;
  t.positive = values.head(layout.positive.size());
  t.negative = values.tail(layout.negative.size());
  return t;
}

double BoundaryTrace::min() const { return flat().minCoeff(); }
double BoundaryTrace::max() const { return flat().maxCoeff(); }

PhaseSpaceField::PhaseSpaceField(NodeRange r, int nv, Eigen::VectorXd v)
    : nodes(r), n_v(nv), values(std::move(v)) {
  if (values.size() != static_cast<Eigen::Index>(r.size()) * nv)
    throw InvalidArgument("PhaseSpaceField: value count does not match shape");
}

PhaseSpaceField restrict_nodes(const PhaseSpaceField& u, NodeRange r) {
  if (!u.nodes.contains(r.first) || !u.nodes.contains(r.last))
    throw InvalidArgument("restrict_nodes: range outside the field");
  const Eigen::Index off = u.index(r.first, 0);
  return PhaseSpaceField(r, u.n_v,
                         u.values.segment(off, static_cast<Eigen::Index>(r.size()) * u.n_v));
}

Eigen::VectorXd boundary_weights(const BoundaryTrace& layout,
                                 const AngularQuadrature& quad) {
  const auto half = static_cast<Eigen::Index>(quad.half());
  if ((layout.positive.size() != 0 && layout.positive.size() != half) ||
      (layout.negative.size() != 0 && layout.negative.size() != half))
    throw InvalidArgument("boundary_weights: trace sides must be empty or n_v/2");
  Eigen::VectorXd w(layout.size());
  Eigen::Index p = 0;
  for (Eigen::Index k = 0; k < layout.positive.size(); ++k) {
    const auto i = quad.positive(static_cast<std::size_t>(k));
    w[p++] = std::abs(quad.nodes[i]) * quad.weights[i];
  }
  for (Eigen::Index k = 0; k < layout.negative.size(); ++k) {
    const auto i = quad.negative(static_cast<std::size_t>(k));
    w[p++] = std::abs(quad.nodes[i]) * quad.weights[i];
  }
  return w;
}

Eigen::VectorXd interior_weights(NodeRange r, const Grid1D& grid,
                                 const AngularQuadrature& quad) {
  const auto wx = grid.trapezoid_weights(r);
  const auto nv = static_cast<Eigen::Index>(quad.size());
  Eigen::VectorXd w(static_cast<Eigen::Index>(r.size()) * nv);
  for (std::size_t j = 0; j < wx.size(); ++j)
    for (Eigen::Index i = 0; i < nv; ++i)
      w[static_cast<Eigen::Index>(j) * nv + i] = wx[j] * quad.weights[static_cast<std::size_t>(i)];
  return w;
}

double boundary_inner(const BoundaryTrace& a, const BoundaryTrace& b,
                      const AngularQuadrature& quad) {
  if (a.positive.size() != b.positive.size() || a.negative.size() != b.negative.size())
    throw InvalidArgument("boundary_inner: trace sets do not match");
  const Eigen::VectorXd w = boundary_weights(a, quad);
  return (a.flat().array() * b.flat().array() * w.array()).sum();
}

double boundary_norm(const BoundaryTrace& a, const AngularQuadrature& quad) {
  return std::sqrt(boundary_inner(a, a, quad));
}

double interior_inner(const PhaseSpaceField& f, const PhaseSpaceField& g,
                      const Grid1D& grid, const AngularQuadrature& quad) {
  if (f.nodes != g.nodes || f.n_v != g.n_v || f.n_v != static_cast<int>(quad.size()))
    throw InvalidArgument("interior_inner: field shapes do not match");
  const Eigen::VectorXd w = interior_weights(f.nodes, grid, quad);
  return (f.values.array() * g.values.array() * w.array()).sum();
}

double interior_norm(const PhaseSpaceField& f, const Grid1D& grid,
                     const AngularQuadrature& quad) {
  return std::sqrt(interior_inner(f, f, grid, quad));
}

namespace {

double h12_squared(const PhaseSpaceField& f, const Grid1D& grid,
                   const AngularQuadrature& quad) {
  if (f.n_v != static_cast<int>(quad.size()))
    throw InvalidArgument("h12_norm: ordinate count mismatch");
  double deriv = 0.0;
  for (int j = f.nodes.first + 1; j <= f.nodes.last; ++j) {
    for (int i = 0; i < f.n_v; ++i) {
      const double v = quad.nodes[static_cast<std::size_t>(i)];
      const double d = v * (f.at(j, i) - f.at(j - 1, i)) / grid.dx();
      deriv += quad.weights[static_cast<std::size_t>(i)] * d * d * grid.dx();
    }
  }
  return deriv + interior_inner(f, f, grid, quad);
}

}  // namespace

double h12_norm(const PhaseSpaceField& f, const Grid1D& grid,
                const AngularQuadrature& quad) {
  return std::sqrt(h12_squared(f, grid, quad));
}

double ha_norm(const PhaseSpaceField& f, const Grid1D& grid,
               const AngularQuadrature& quad) {
  double boundary = 0.0;
  for (int j : {f.nodes.first, f.nodes.last}) {
    for (int i = 0; i < f.n_v; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      boundary += std::abs(quad.nodes[ii]) * quad.weights[ii] * f.at(j, i) * f.at(j, i);
    }
  }
  return std::sqrt(h12_squared(f, grid, quad) + boundary);
}

}  // namespace lrsm
