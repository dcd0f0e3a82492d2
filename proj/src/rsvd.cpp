#include "lrsm/rsvd.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "lrsm/errors.hpp"
#include "lrsm/parallel.hpp"
#include "lrsm/random.hpp"

namespace lrsm {

namespace {

constexpr int kConsecutiveSmall = 5;
constexpr int kAdjointPairs = 3;
constexpr double kAdjointTolerance = 1e-10;
/// Streams above this offset are reserved for the adjoint consistency probes.
constexpr std::uint64_t kProbeStream = 1ULL << 40;

Eigen::MatrixXd orthonormalize_impl(const Eigen::MatrixXd& y, double drop_tol) {
  const Eigen::Index n = y.rows();
  double scale = 0.0;
  for (Eigen::Index c = 0; c < y.cols(); ++c) scale = std::max(scale, y.col(c).norm());
  Eigen::MatrixXd q(n, std::min(n, y.cols()));
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < y.cols() && kept < n; ++c) {
    Eigen::VectorXd v = y.col(c);
    const double original = v.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (kept > 0) v -= q.leftCols(kept) * (q.leftCols(kept).transpose() * v);
    }
    const double remaining = v.norm();
    if (remaining <= drop_tol * original || remaining <= drop_tol * scale) continue;
    q.col(kept++) = v / remaining;
  }
  q.conservativeResize(n, kept);
  return q;
}

}  // namespace

void RsvdConfig::validate(Eigen::Index domain_dim) const {
  if (rank < 1) throw InvalidArgument("rsvd: rank must be at least 1");
  if (oversample < 4)
    throw InvalidArgument("rsvd: oversampling must be at least 4 (got " +
                          std::to_string(oversample) + ")");
  if (rank > domain_dim)
    throw InvalidArgument("rsvd: rank " + std::to_string(rank) +
                          " exceeds the domain dimension " + std::to_string(domain_dim));
  if (!(tolerance > 0.0)) throw InvalidArgument("rsvd: tolerance must be positive");
}

Eigen::Index RsvdConfig::sketch_size(Eigen::Index domain_dim) const {
  return std::min<Eigen::Index>(rank + oversample, domain_dim);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y, double drop_tol) {
  return orthonormalize_impl(y, drop_tol);
}

Eigen::MatrixXd complete_orthonormal(const Eigen::MatrixXd& q, Eigen::Index cols) {
  const Eigen::Index n = q.rows();
  if (cols > n) throw InvalidArgument("complete_orthonormal: more columns than rows");
  Eigen::MatrixXd out(n, std::max(cols, q.cols()));
  out.leftCols(q.cols()) = q;
  Eigen::Index kept = q.cols();
  for (Eigen::Index e = 0; e < n && kept < cols; ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass)
      if (kept > 0) v -= out.leftCols(kept) * (out.leftCols(kept).transpose() * v);
    const double norm = v.norm();
    if (norm < 0.5) continue;
    out.col(kept++) = v / norm;
  }
  return out;
}

Eigen::MatrixXd sketch_range(const Eigen::MatrixXd& a, Eigen::Index k, std::uint64_t seed) {
  const Eigen::MatrixXd omega = gaussian_matrix(a.cols(), k, seed);
  return orthonormalize_impl(a * omega, 1e-12);
}

DenseRsvd rsvd_matrix(const Eigen::MatrixXd& a, const RsvdConfig& cfg) {
  cfg.validate(std::min(a.rows(), a.cols()));
  const Eigen::Index k = std::min(cfg.sketch_size(a.cols()), a.rows());
  const Eigen::MatrixXd q = sketch_range(a, k, cfg.seed);

  DenseRsvd out;
  out.sketch_rank = q.cols();
  const Eigen::Index r = cfg.rank;
  Eigen::MatrixXd u(a.rows(), 0), v(a.cols(), 0);
  Eigen::VectorXd s(0);
  if (q.cols() > 0) {
    const Eigen::MatrixXd b = q.transpose() * a;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index keep = std::min<Eigen::Index>(r, svd.singularValues().size());
    u = q * svd.matrixU().leftCols(keep);
    v = svd.matrixV().leftCols(keep);
    s = svd.singularValues().head(keep);
  }
  out.sigma = Eigen::VectorXd::Zero(r);
  out.sigma.head(s.size()) = s;
  out.u = complete_orthonormal(u, r);
  out.v = complete_orthonormal(v, r);
  return out;
}

double adjoint_discrepancy(const WeightedOperator& op, int pairs, std::uint64_t seed) {
  const Eigen::Index n = op.domain_weights.size();
  const Eigen::Index m = op.codomain_weights.size();
  double worst = 0.0;
  for (int t = 0; t < pairs; ++t) {
    const Eigen::VectorXd x = gaussian_matrix(n, 1, seed, kProbeStream + 2 * t);
    const Eigen::VectorXd y = gaussian_matrix(m, 1, seed, kProbeStream + 2 * t + 1);
    const Eigen::VectorXd ax = op.apply(x);
    const Eigen::VectorXd ay = op.apply_adjoint(y);
    const double lhs = ax.dot(op.codomain_weights.cwiseProduct(y));
    const double rhs = x.dot(op.domain_weights.cwiseProduct(ay));
    auto wnorm = [](const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
      return std::sqrt(v.dot(w.cwiseProduct(v)));
    };
    const double scale = wnorm(ax, op.codomain_weights) * wnorm(y, op.codomain_weights) +
                         wnorm(x, op.domain_weights) * wnorm(ay, op.domain_weights);
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

namespace {

/// Stage II and lifting given a codomain basis qhat in rescaled coordinates.
OperatorRsvd finish(const WeightedOperator& op, const Eigen::MatrixXd& qhat, Eigen::Index r) {
  const Eigen::VectorXd sd = op.domain_weights.cwiseSqrt();
  const Eigen::VectorXd sc = op.codomain_weights.cwiseSqrt();
  const Eigen::Index n = sd.size();
  const Eigen::Index q = qhat.cols();

  // bhat_i = W_G^{1/2} A* (W_D^{-1/2} qhat_i) = Ahat^T qhat_i.
  Eigen::MatrixXd bhat(n, q);
  parallel_for(static_cast<int>(q), [&](int i) {
    const Eigen::VectorXd field = qhat.col(i).cwiseQuotient(sc);
    bhat.col(i) = sd.cwiseProduct(op.apply_adjoint(field));
  });

  OperatorRsvd out;
  out.numerical_rank = q;
  Eigen::MatrixXd nhat(n, 0), mhat(sc.size(), 0);
  Eigen::VectorXd s(0);
  if (q > 0) {
    // bhat = N Sigma Mtilde^T, so Qhat^T Ahat = Mtilde Sigma N^T.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bhat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index keep = std::min<Eigen::Index>(r, svd.singularValues().size());
    nhat = svd.matrixU().leftCols(keep);
    mhat = qhat * svd.matrixV().leftCols(keep);
    s = svd.singularValues().head(keep);
  }
  out.sigma = Eigen::VectorXd::Zero(r);
  out.sigma.head(s.size()) = s;
  out.nu = complete_orthonormal(nhat, r).array().colwise() / sd.array();
  out.mu = complete_orthonormal(mhat, r).array().colwise() / sc.array();
  return out;
}

void check_weights(const WeightedOperator& op) {
  if (op.domain_weights.size() == 0 || op.codomain_weights.size() == 0)
    throw InvalidArgument("rsvd_operator: empty domain or codomain");
  if ((op.domain_weights.array() <= 0.0).any() || (op.codomain_weights.array() <= 0.0).any())
    throw InvalidArgument("rsvd_operator: inner-product weights must be positive");
  if (!op.apply || !op.apply_adjoint) throw InvalidArgument("rsvd_operator: missing map");
}

}  // namespace

OperatorRsvd rsvd_operator(const WeightedOperator& op, const RsvdConfig& cfg) {
  check_weights(op);
  const Eigen::Index n = op.domain_weights.size();
  cfg.validate(std::min(n, op.codomain_weights.size()));
  const double mismatch = adjoint_discrepancy(op, kAdjointPairs, cfg.seed);
  if (!(mismatch <= kAdjointTolerance))
    throw AdjointMismatch("rsvd_operator: forward map and adjoint disagree (relative "
                          "discrepancy " + std::to_string(mismatch) + ")");

  const Eigen::VectorXd sd = op.domain_weights.cwiseSqrt();
  const Eigen::VectorXd sc = op.codomain_weights.cwiseSqrt();
  Eigen::MatrixXd qhat;
  if (cfg.adaptive) {
    const auto range = adaptive_range(op, cfg.tolerance, std::min(n, sc.size()), cfg.seed);
    qhat = sc.asDiagonal() * range.q;
  } else {
    // Stage I: inputs are Gaussian coefficients against e_j / sqrt(omega_j).
    const Eigen::Index k = std::min(cfg.sketch_size(n), sc.size());
    const Eigen::MatrixXd coeff = gaussian_matrix(n, k, cfg.seed);
    Eigen::MatrixXd yhat(sc.size(), k);
    parallel_for(static_cast<int>(k), [&](int j) {
      yhat.col(j) = sc.cwiseProduct(op.apply(coeff.col(j).cwiseQuotient(sd)));
    });
    qhat = orthonormalize_impl(yhat, 1e-12);
  }
  return finish(op, qhat, cfg.rank);
}

AdaptiveRange adaptive_range(const WeightedOperator& op, double tol, Eigen::Index max_k,
                             std::uint64_t seed) {
  check_weights(op);
  if (!(tol > 0.0)) throw InvalidArgument("adaptive_range: tolerance must be positive");
  if (max_k < 0) throw InvalidArgument("adaptive_range: max_k must be nonnegative");
  const Eigen::Index n = op.domain_weights.size();
  const Eigen::VectorXd sd = op.domain_weights.cwiseSqrt();
  const Eigen::VectorXd sc = op.codomain_weights.cwiseSqrt();
  max_k = std::min(max_k, sc.size());

  Eigen::MatrixXd qhat(sc.size(), max_k);
  AdaptiveRange out;
  Eigen::Index kept = 0;
  int small = 0;
  while (small < kConsecutiveSmall && kept < max_k) {
    const Eigen::VectorXd c = gaussian_matrix(n, 1, seed, static_cast<std::uint64_t>(out.draws));
    ++out.draws;
    Eigen::VectorXd y = sc.cwiseProduct(op.apply(c.cwiseQuotient(sd)));
    for (int pass = 0; pass < 2; ++pass)
      if (kept > 0) y -= qhat.leftCols(kept) * (qhat.leftCols(kept).transpose() * y);
    const double norm = y.norm();
    if (norm < tol) {
      ++small;
      continue;
    }
    small = 0;
    qhat.col(kept++) = y / norm;
  }
  out.converged = small >= kConsecutiveSmall || kept == sc.size();
  out.rank = kept;
  out.q = qhat.leftCols(kept).array().colwise() / sc.array();
  return out;
}

}  // namespace lrsm
