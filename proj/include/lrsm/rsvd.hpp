#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace lrsm {

struct RsvdConfig {
  /// Target rank r.
  int rank = 6;
  /// Oversampling p; the probabilistic bound needs p >= 4.
  int oversample = 5;
  std::uint64_t seed = 0;
  /// Replace the fixed-size sketch with the adaptive range finder.
  bool adaptive = false;
  double tolerance = 1e-8;

  /// Throws InvalidArgument unless r >= 1, p >= 4, r <= domain_dim, tolerance > 0.
  void validate(Eigen::Index domain_dim) const;
  /// Sketch size k = r + p, capped at the domain dimension.
  Eigen::Index sketch_size(Eigen::Index domain_dim) const;
};

/// Orthonormal columns spanning range(y): classical Gram-Schmidt with one full
/// re-orthogonalization pass. Columns whose remaining norm falls below
/// `drop_tol` times their original norm (or below `drop_tol` times the largest
/// column norm) are dropped.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y, double drop_tol = 1e-12);

/// Appends orthonormal columns to q (orthonormal columns) until it has `cols`
/// columns, drawing candidates from the canonical basis.
Eigen::MatrixXd complete_orthonormal(const Eigen::MatrixXd& q, Eigen::Index cols);

struct DenseRsvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
  /// Columns of the orthonormalized sketch (numerical rank of Y).
  Eigen::Index sketch_rank = 0;
};

/// Randomized SVD of a dense matrix: Gaussian sketch, orthonormalize, project,
/// small SVD, lift; truncated to cfg.rank (zero-padded when the sketch is
/// rank-deficient).
DenseRsvd rsvd_matrix(const Eigen::MatrixXd& a, const RsvdConfig& cfg);

/// Q with orthonormal columns from the first `k` columns of the sketch of a.
Eigen::MatrixXd sketch_range(const Eigen::MatrixXd& a, Eigen::Index k, std::uint64_t seed);

/// Linear map between two spaces with diagonal inner-product weights:
/// <a, b>_W = sum_i a_i b_i W_i. `apply_adjoint` must be the adjoint under
/// these products.
struct WeightedOperator {
  Eigen::VectorXd domain_weights;
  Eigen::VectorXd codomain_weights;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_adjoint;
};

/// Relative adjoint discrepancy max over `pairs` seeded random pairs of
/// |<A x, y> - <x, A* y>| / (|A x| |y| + |x| |A* y|).
double adjoint_discrepancy(const WeightedOperator& op, int pairs, std::uint64_t seed);

/// Low-rank factorization A ~ sum_i sigma_i mu_i <nu_i, .>_domain with nu / mu
/// orthonormal under the domain / codomain weights.
struct OperatorRsvd {
  Eigen::VectorXd sigma;
  Eigen::MatrixXd nu;
  Eigen::MatrixXd mu;
  /// Independent directions found by Stage I (may be below the requested rank).
  Eigen::Index numerical_rank = 0;
};

/// Matrix-free two-stage randomized SVD in weighted spaces. Stage I pushes k
/// Gaussian inputs (coefficients against the weighted canonical basis) through
/// the operator and orthonormalizes the outputs; Stage II applies the adjoint to
/// each basis field and takes the SVD of the resulting boundary-side matrix.
/// Throws AdjointMismatch if apply/apply_adjoint disagree beyond 1e-10 on three
/// random pairs.
OperatorRsvd rsvd_operator(const WeightedOperator& op, const RsvdConfig& cfg);

struct AdaptiveRange {
  /// Codomain-weighted orthonormal basis, one column per accepted direction.
  Eigen::MatrixXd q;
  Eigen::Index rank = 0;
  bool converged = false;
  int draws = 0;
};

/// Adaptive randomized range finder: draws one Gaussian input at a time and
/// keeps the component of its image outside span(Q); stops after five
/// consecutive draws whose new component has weighted norm below `tol`, or once
/// `max_k` directions have been accepted (converged = false).
AdaptiveRange adaptive_range(const WeightedOperator& op, double tol, Eigen::Index max_k,
                             std::uint64_t seed);

}  // namespace lrsm
