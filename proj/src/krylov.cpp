#include "lrsm/krylov.hpp"

#include <cmath>

#include "lrsm/errors.hpp"

namespace lrsm {

SweepPreconditioner::SweepPreconditioner(const SparseMatrix& a, int n_v)
    : n_v_(n_v), n_nodes_(static_cast<int>(a.rows() / n_v)) {
  if (a.rows() != a.cols() || a.rows() % n_v != 0)
    throw InvalidArgument("SweepPreconditioner: matrix is not node x ordinate square");
  diag_.assign(static_cast<std::size_t>(n_v), Eigen::VectorXd::Zero(n_nodes_));
  lower_ = diag_;
  upper_ = diag_;
  for (int row = 0; row < a.outerSize(); ++row) {
    const int j = row / n_v;
    const int i = row % n_v;
    const auto ii = static_cast<std::size_t>(i);
    for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
      const auto col = static_cast<int>(it.col());
      if (col % n_v != i) continue;
      const int jc = col / n_v;
      if (jc == j) diag_[ii][j] = it.value();
      else if (jc == j - 1) lower_[ii][j] = it.value();
      else if (jc == j + 1) upper_[ii][j] = it.value();
      else throw InvalidArgument("SweepPreconditioner: stencil wider than one node");
    }
  }
  forward_.resize(static_cast<std::size_t>(n_v));
  for (std::size_t i = 0; i < forward_.size(); ++i) {
    const bool has_lower = lower_[i].cwiseAbs().maxCoeff() > 0.0;
    const bool has_upper = upper_[i].cwiseAbs().maxCoeff() > 0.0;
    if (has_lower && has_upper)
      throw InvalidArgument("SweepPreconditioner: ordinate block is not upwind");
    forward_[i] = !has_upper;
  }
}

Eigen::VectorXd SweepPreconditioner::apply(const Eigen::VectorXd& r) const {
  Eigen::VectorXd z(r.size());
  for (int i = 0; i < n_v_; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto& d = diag_[ii];
    if (forward_[ii]) {
      for (int j = 0; j < n_nodes_; ++j) {
        double s = r[j * n_v_ + i];
        if (j > 0) s -= lower_[ii][j] * z[(j - 1) * n_v_ + i];
        z[j * n_v_ + i] = s / d[j];
      }
    } else {
      for (int j = n_nodes_ - 1; j >= 0; --j) {
        double s = r[j * n_v_ + i];
        if (j + 1 < n_nodes_) s -= upper_[ii][j] * z[(j + 1) * n_v_ + i];
        z[j * n_v_ + i] = s / d[j];
      }
    }
  }
  return z;
}

GmresResult gmres(const VectorOp& a, const VectorOp& precond,
                  const Eigen::VectorXd& b, double tol, int max_matvecs,
                  int restart) {
  GmresResult res;
  const Eigen::Index n = b.size();
  res.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  restart = std::max(1, std::min<int>(restart, static_cast<int>(n)));

  Eigen::VectorXd r = b;
  double beta = bnorm;
  while (true) {
    if (beta <= tol * bnorm) {
      res.converged = true;
      break;
    }
    if (res.matvecs >= max_matvecs) break;

    Eigen::MatrixXd v(n, restart + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(restart + 1, restart);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(restart), sn = Eigen::VectorXd::Zero(restart);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(restart + 1);
    v.col(0) = r / beta;
    g[0] = beta;

    int k = 0;
    for (; k < restart && res.matvecs < max_matvecs; ++k) {
      Eigen::VectorXd w = a(precond(v.col(k)));
      ++res.matvecs;
      for (int i = 0; i <= k; ++i) {
        h(i, k) = v.col(i).dot(w);
        w -= h(i, k) * v.col(i);
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 0.0) v.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
        h(i, k) = t;
      }
      const double rho = std::hypot(h(k, k), h(k + 1, k));
      cs[k] = h(k, k) / rho;
      sn[k] = h(k + 1, k) / rho;
      h(k, k) = rho;
      h(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= tol * bnorm || h.col(k).head(k + 2).norm() == 0.0) {
        ++k;
        break;
      }
    }
    const Eigen::VectorXd y =
        h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    res.x += precond(v.leftCols(k) * y);
    r = b - a(res.x);
    ++res.matvecs;
    beta = r.norm();
  }
  res.relative_residual = beta / bnorm;
  return res;
}

}  // namespace lrsm
