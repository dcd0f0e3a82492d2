#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

namespace lrsm {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using VectorOp = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// One transport sweep: exact inverse of the per-ordinate upwind part of a
/// discrete-ordinates matrix (cross-ordinate scattering coupling dropped).
/// Each ordinate block is bidiagonal and is solved by substitution in its
/// upwind direction.
class SweepPreconditioner {
 public:
  SweepPreconditioner() = default;
  /// `a` is node-major with `n_v` ordinates per node.
  SweepPreconditioner(const SparseMatrix& a, int n_v);

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const;

 private:
  int n_v_ = 0;
  int n_nodes_ = 0;
  // Per ordinate: diagonal, coefficient on node j-1, coefficient on node j+1.
  std::vector<Eigen::VectorXd> diag_, lower_, upper_;
  std::vector<bool> forward_;
};

struct GmresResult {
  Eigen::VectorXd x;
  int matvecs = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted right-preconditioned GMRES. Stops when ||b - A x|| <= tol ||b||
/// or after `max_matvecs` applications of A.
GmresResult gmres(const VectorOp& a, const VectorOp& precond,
                  const Eigen::VectorXd& b, double tol, int max_matvecs,
                  int restart = 60);

}  // namespace lrsm
