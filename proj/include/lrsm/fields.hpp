#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lrsm/grid.hpp"
#include "lrsm/quadrature.hpp"

namespace lrsm {

/// Exact equality of shape and every entry (Eigen's operator== requires equal sizes).
template <class A, class B>
bool identical(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

/// Intensity values on a set of (endpoint, ordinate) pairs.
///
/// `positive` holds values for the v > 0 ordinates (ordered by increasing v),
/// `negative` for the v < 0 ordinates (ordered by increasing |v|). Each side is
/// either empty or has n_v/2 entries. On an inflow set Gamma_{m,-} the positive
/// side lives at the left endpoint and the negative side at the right endpoint;
/// on an exchange set the sides are E_{m,m+1} and E_{m,m-1}.
struct BoundaryTrace {
  int owner = 0;
  Eigen::VectorXd positive;
  Eigen::VectorXd negative;

  static BoundaryTrace zeros(int owner, int half, bool with_positive = true,
                             bool with_negative = true);
  static BoundaryTrace constant(int owner, int half, double c);

  Eigen::Index size() const noexcept { return positive.size() + negative.size(); }
  /// positive side followed by negative side.
  Eigen::VectorXd flat() const;
  /// Inverse of flat() for a trace with the same side layout as `layout`.
  static BoundaryTrace from_flat(const BoundaryTrace& layout,
                                 const Eigen::VectorXd& values);
  double min() const;
  double max() const;

  friend bool operator==(const BoundaryTrace& a, const BoundaryTrace& b) {
    return a.owner == b.owner && identical(a.positive, b.positive) &&
           identical(a.negative, b.negative);
  }
};

/// Grid-node x ordinate array over a contiguous node range; node-major layout,
/// value(j, i) at (j - nodes.first) * n_v + i.
struct PhaseSpaceField {
  NodeRange nodes;
  int n_v = 0;
  Eigen::VectorXd values;

  PhaseSpaceField() = default;
  PhaseSpaceField(NodeRange r, int nv)
      : nodes(r), n_v(nv), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r.size()) * nv)) {}
  PhaseSpaceField(NodeRange r, int nv, Eigen::VectorXd v);

  double& at(int j, int i) { return values[index(j, i)]; }
  double at(int j, int i) const { return values[index(j, i)]; }
  Eigen::Index index(int j, int i) const noexcept {
    return static_cast<Eigen::Index>(j - nodes.first) * n_v + i;
  }
  bool all_finite() const { return values.allFinite(); }
};

/// Restriction of a field onto a sub-range of its nodes.
PhaseSpaceField restrict_nodes(const PhaseSpaceField& u, NodeRange r);

/// Per-entry weights |v_i| w_i in the flat() layout of `layout`.
Eigen::VectorXd boundary_weights(const BoundaryTrace& layout,
                                 const AngularQuadrature& quad);

/// Per-entry weights omega_j w_i (trapezoid in x) for a field on `r`.
Eigen::VectorXd interior_weights(NodeRange r, const Grid1D& grid,
                                 const AngularQuadrature& quad);

/// sum over the trace set of a b |v| w (counting measure on the endpoints).
double boundary_inner(const BoundaryTrace& a, const BoundaryTrace& b,
                      const AngularQuadrature& quad);
double boundary_norm(const BoundaryTrace& a, const AngularQuadrature& quad);

/// sum_j sum_i f g omega_j w_i with trapezoid node weights in x.
double interior_inner(const PhaseSpaceField& f, const PhaseSpaceField& g,
                      const Grid1D& grid, const AngularQuadrature& quad);
double interior_norm(const PhaseSpaceField& f, const Grid1D& grid,
                     const AngularQuadrature& quad);

/// Discrete H^1_2 norm: upwind v d/dx per cell plus trapezoid L^2.
double h12_norm(const PhaseSpaceField& f, const Grid1D& grid,
                const AngularQuadrature& quad);

/// H_A norm: h12_norm squared plus |v|-weighted squares on both endpoints.
double ha_norm(const PhaseSpaceField& f, const Grid1D& grid,
               const AngularQuadrature& quad);

}  // namespace lrsm
