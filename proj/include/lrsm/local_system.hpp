#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>

#include "lrsm/decomposition.hpp"
#include "lrsm/fields.hpp"
#include "lrsm/krylov.hpp"
#include "lrsm/media.hpp"
#include "lrsm/quadrature.hpp"

namespace lrsm {

enum class SolverKind {
  /// Sparse LU of the matrix and of its transpose, computed at assembly.
  direct,
  /// Restarted GMRES with one transport sweep as right preconditioner.
  gmres,
};

struct SolverSettings {
  SolverKind kind = SolverKind::direct;
  double tolerance = 1e-10;
  /// 0 means 10 x system dimension.
  int max_matvecs = 0;
  int restart = 60;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  double seconds = 0.0;
};

/// Discrete transport operator v d/dx - (sigma/eps) L on one subdomain D_m.
///
/// Node-based first-order upwind in x and discrete ordinates in v. Unknowns are
/// node-major over `nodes()`. Rows at inflow points (left endpoint with v > 0,
/// right endpoint with v < 0) are identity rows whose right-hand side carries
/// the boundary data. The object is immutable and safe to solve from several
/// threads at once.
class LocalSystem {
 public:
  struct Solvers;  // opaque factorizations / preconditioners

  int subdomain() const noexcept { return m_; }
  NodeRange nodes() const noexcept { return nodes_; }
  int n_v() const noexcept { return static_cast<int>(quad_.size()); }
  Eigen::Index dim() const noexcept { return matrix_->rows(); }
  const SparseMatrix& matrix() const noexcept { return *matrix_; }
  const AngularQuadrature& quadrature() const noexcept { return quad_; }
  const Grid1D& grid() const noexcept { return grid_; }
  const SolverSettings& settings() const noexcept { return settings_; }

  bool is_inflow(int j, int i) const noexcept;
  Eigen::Index index(int j, int i) const noexcept {
    return static_cast<Eigen::Index>(j - nodes_.first) * n_v() + i;
  }

  /// Right-hand side with phi on the inflow rows (phi must cover Gamma_{m,-}).
  Eigen::VectorXd inject(const BoundaryTrace& phi) const;
  /// Transpose of inject: the inflow-row entries of a full-length vector.
  BoundaryTrace extract_inflow(const Eigen::VectorXd& y) const;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveReport* report = nullptr) const;
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& rhs,
                                  SolveReport* report = nullptr) const;

 private:
  friend LocalSystem assemble_local(const DecompositionGeometry&, int, const MediaField&,
                                    const AngularQuadrature&, const SolverSettings&);
  int m_ = 1;
  NodeRange nodes_;
  AngularQuadrature quad_;
  Grid1D grid_{1};
  SolverSettings settings_;
  std::shared_ptr<const SparseMatrix> matrix_;
  std::shared_ptr<const SparseMatrix> transpose_;
  std::shared_ptr<const Solvers> solvers_;
};

LocalSystem assemble_local(const DecompositionGeometry& geometry, int m,
                           const MediaField& media, const AngularQuadrature& quad,
                           const SolverSettings& settings = {});

}  // namespace lrsm
