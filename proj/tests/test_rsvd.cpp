#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "lrsm/errors.hpp"
#include "lrsm/low_rank_map.hpp"
#include "lrsm/random.hpp"
#include "lrsm/rsvd.hpp"
#include "lrsm/transport.hpp"

using namespace lrsm;
using doctest::Approx;

namespace {

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
}

/// Weighted operator sum_i s_i mu_i <nu_i, .> built from its own factorization.
struct Synthetic {
  WeightedOperator op;
  Eigen::VectorXd s;
  Eigen::MatrixXd nu, mu;
};

Synthetic synthetic(Eigen::Index n, Eigen::Index m, const Eigen::VectorXd& s, std::uint64_t seed) {
  Synthetic out;
  out.s = s;
  out.op.domain_weights = (gaussian_matrix(n, 1, seed, 1).array().abs() + 0.1).matrix();
  out.op.codomain_weights = (gaussian_matrix(m, 1, seed, 2).array().abs() + 0.1).matrix();
  const Eigen::VectorXd sd = out.op.domain_weights.cwiseSqrt();
  const Eigen::VectorXd sc = out.op.codomain_weights.cwiseSqrt();
  const Eigen::Index r = s.size();
  out.nu = orthonormalize(gaussian_matrix(n, r, seed, 10)).array().colwise() / sd.array();
  out.mu = orthonormalize(gaussian_matrix(m, r, seed, 50)).array().colwise() / sc.array();
  const Eigen::MatrixXd nu = out.nu, mu = out.mu;
  const Eigen::VectorXd wd = out.op.domain_weights, wc = out.op.codomain_weights;
  out.op.apply = [=](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return mu * s.cwiseProduct(nu.transpose() * wd.cwiseProduct(x));
  };
  out.op.apply_adjoint = [=](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return nu * s.cwiseProduct(mu.transpose() * wc.cwiseProduct(y));
  };
  return out;
}

}  // namespace

TEST_CASE("random: counter-based normals are reproducible and standard") {
  CHECK(gaussian_at(1, 2, 3) == gaussian_at(1, 2, 3));
  CHECK(gaussian_at(1, 2, 3) != gaussian_at(2, 2, 3));
  CHECK(gaussian_at(1, 2, 3) != gaussian_at(1, 3, 3));
  const Eigen::MatrixXd g = gaussian_matrix(200000, 1, 42);
  const double mean = g.mean();
  const double var = (g.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.01);
  CHECK(gaussian_matrix(5, 3, 7, 2).col(0) == gaussian_matrix(5, 1, 7, 2).col(0));
}

TEST_CASE("orthonormalize: drops dependent and zero columns") {
  Eigen::MatrixXd y = gaussian_matrix(30, 4, 3);
  y.col(2) = 2.0 * y.col(0) - y.col(1);
  const Eigen::MatrixXd q = orthonormalize(y);
  CHECK(q.cols() == 3);
  CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
  CHECK(orthonormalize(Eigen::MatrixXd::Zero(10, 3)).cols() == 0);
  const Eigen::MatrixXd full = complete_orthonormal(q, 6);
  CHECK(full.cols() == 6);
  CHECK((full.transpose() * full - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-13);
  CHECK(full.leftCols(3) == q);
}

TEST_CASE("rsvd config validation") {
  RsvdConfig c;
  CHECK_NOTHROW(c.validate(40));
  CHECK(c.sketch_size(40) == 11);
  c.rank = 40;
  CHECK(c.sketch_size(40) == 40);
  c.oversample = 3;
  CHECK_THROWS_AS(c.validate(40), InvalidArgument);
  c.oversample = 5;
  c.rank = 0;
  CHECK_THROWS_AS(c.validate(40), InvalidArgument);
  c.rank = 41;
  CHECK_THROWS_AS(c.validate(40), InvalidArgument);
}

TEST_CASE("rsvd_matrix: zero matrix and exact-rank recovery") {
  RsvdConfig cfg;
  cfg.rank = 4;
  const auto z = rsvd_matrix(Eigen::MatrixXd::Zero(50, 40), cfg);
  CHECK(z.sigma.size() == 4);
  CHECK(z.sigma.norm() == 0.0);
  CHECK((z.u.transpose() * z.u - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);

  for (int r : {1, 3, 7}) {
    const Eigen::MatrixXd a = gaussian_matrix(200, r, 11, 0) * gaussian_matrix(r, 150, 11, 500);
    cfg.rank = r;
    cfg.seed = 99;
    const auto f = rsvd_matrix(a, cfg);
    const Eigen::MatrixXd ar = f.u * f.sigma.asDiagonal() * f.v.transpose();
    CHECK(spectral_norm(a - ar) <= 1e-10 * spectral_norm(a));
    CHECK(f.sketch_rank == r);
  }
}

TEST_CASE("rsvd_matrix: probabilistic bound with p = 5 over 200 seeds") {
  // Fixed 100 x 100 matrix with known, slowly decaying spectrum.
  const Eigen::MatrixXd u = orthonormalize(gaussian_matrix(100, 100, 5, 0));
  const Eigen::MatrixXd v = orthonormalize(gaussian_matrix(100, 100, 6, 0));
  Eigen::VectorXd s(100);
  for (int i = 0; i < 100; ++i) s[i] = std::pow(0.8, i);
  const Eigen::MatrixXd a = u * s.asDiagonal() * v.transpose();
  const double bound = (1.0 + 11.0 * std::sqrt(100.0 * 15.0)) * s[10];
  int ok = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::MatrixXd q = sketch_range(a, 15, 1000 + t);
    if (spectral_norm(a - q * (q.transpose() * a)) <= bound) ++ok;
  }
  CHECK(ok >= 198);
}

TEST_CASE("rsvd_operator: zero operator") {
  WeightedOperator op;
  op.domain_weights = Eigen::VectorXd::Constant(12, 0.5);
  op.codomain_weights = Eigen::VectorXd::Constant(30, 2.0);
  op.apply = [](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(30); };
  op.apply_adjoint = [](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(12); };
  RsvdConfig cfg;
  cfg.rank = 3;
  const auto f = rsvd_operator(op, cfg);
  CHECK(f.sigma.norm() == 0.0);
  CHECK(f.numerical_rank == 0);
  CHECK((f.nu.transpose() * op.domain_weights.asDiagonal() * f.nu - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-13);
  CHECK((f.mu.transpose() * op.codomain_weights.asDiagonal() * f.mu - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-13);
}

TEST_CASE("rsvd_operator: recovers a synthetic rank-3 factorization") {
  const Eigen::Vector3d s(5.0, 2.0, 0.25);
  const auto syn = synthetic(40, 300, s, 21);
  RsvdConfig cfg;
  cfg.rank = 3;
  cfg.seed = 8;
  const auto f = rsvd_operator(syn.op, cfg);
  CHECK(f.numerical_rank == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(f.sigma[i] - s[i]) <= 1e-8 * s[0]);
    const double cn = f.nu.col(i).dot(syn.op.domain_weights.cwiseProduct(syn.nu.col(i)));
    const double cm = f.mu.col(i).dot(syn.op.codomain_weights.cwiseProduct(syn.mu.col(i)));
    CHECK(std::abs(std::abs(cn) - 1.0) < 1e-8);
    CHECK(cn * cm == Approx(1.0).epsilon(1e-8));  // same sign on both sides
  }
  // Asking for more rank than exists pads with zero singular values.
  cfg.rank = 5;
  const auto g = rsvd_operator(syn.op, cfg);
  CHECK(g.numerical_rank == 3);
  CHECK(g.sigma.tail(2).norm() == 0.0);
}

TEST_CASE("rsvd_operator: inconsistent adjoint is rejected") {
  auto syn = synthetic(20, 50, Eigen::Vector2d(1.0, 0.5), 4);
  auto wrong = syn.op;
  wrong.apply_adjoint = [base = syn.op.apply_adjoint](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return 1.001 * base(y);
  };
  RsvdConfig cfg;
  cfg.rank = 2;
  CHECK(adjoint_discrepancy(syn.op, 3, 1) < 1e-14);
  CHECK_THROWS_AS(rsvd_operator(wrong, cfg), AdjointMismatch);
}

TEST_CASE("adaptive_range") {
  const auto syn = synthetic(40, 300, Eigen::Vector3d(5.0, 2.0, 0.25), 21);
  const auto r = adaptive_range(syn.op, 1e-8, 40, 3);
  CHECK(r.rank == 3);
  CHECK(r.converged);
  CHECK(r.draws == 8);

  auto zero = syn.op;
  zero.apply = [](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(300); };
  const auto z = adaptive_range(zero, 1e-8, 40, 3);
  CHECK(z.rank == 0);
  CHECK(z.converged);

  const auto steep = synthetic(40, 300, Eigen::Vector3d(1.0, 1e-3, 1e-6), 2);
  CHECK(adaptive_range(steep.op, 2.0, 40, 5).rank <= 1);

  const auto capped = adaptive_range(syn.op, 1e-8, 2, 3);
  CHECK(capped.rank == 2);
  CHECK(!capped.converged);
  CHECK_THROWS_AS(adaptive_range(syn.op, 0.0, 4, 3), InvalidArgument);

  RsvdConfig cfg;
  cfg.rank = 3;
  cfg.adaptive = true;
  const auto f = rsvd_operator(syn.op, cfg);
  CHECK(f.sigma[2] == Approx(0.25).epsilon(1e-8));
}

namespace {

struct Benchmark {
  Grid1D grid{360};
  AngularQuadrature quad = build_quadrature(40);
  MediaField media;
  DecompositionGeometry geo = build_decomposition(grid, 10, 0.5);
  LocalSystem sys;
  Benchmark(double eps, double delta)
      : media(make_media(grid, eps, delta)), sys(assemble_local(geo, 4, media, quad)) {}
};

}  // namespace

TEST_CASE("compressed S_4^s tracks the dense spectrum") {
  const Benchmark p(1.0 / 81, 1.0 / 81);
  const Eigen::VectorXd dense =
      probe_weighted_matrix(p.sys, p.geo, 4, MapKind::Ss).jacobiSvd().singularValues();
  RsvdConfig cfg;
  cfg.rank = 10;
  cfg.seed = 1;
  const auto map = compress_subdomain(p.sys, p.geo, 4, p.media, cfg);
  CHECK(map.rank() == 10);
  CHECK(orthonormality_defect(map, p.grid, p.quad) <= 1e-10);
  // Dense oracle: sigma_10 / sigma_1 = 0.0253 for this configuration.
  CHECK(dense[9] / dense[0] < 0.03);
  CHECK(dense[14] / dense[0] < 1e-2);
  CHECK(map.sigma[9] / map.sigma[0] < 0.03);
  for (int i = 0; i < 10; ++i) {
    CHECK(map.sigma[i] <= dense[i] * (1 + 1e-10));
    // Top values are captured to within the oversampling slack.
    if (i < 6) CHECK(map.sigma[i] >= 0.9 * dense[i]);
  }

  // Reproducible bit for bit under a fixed seed.
  CHECK(compress_subdomain(p.sys, p.geo, 4, p.media, cfg) == map);
  cfg.seed = 2;
  CHECK(!(compress_subdomain(p.sys, p.geo, 4, p.media, cfg) == map));
}

TEST_CASE("apply_lowrank against the full restricted map") {
  const Benchmark p(1.0 / 81, 1.0 / 81);
  const Eigen::VectorXd dense =
      probe_weighted_matrix(p.sys, p.geo, 4, MapKind::Ss).jacobiSvd().singularValues();
  RsvdConfig cfg;
  cfg.rank = 6;
  cfg.seed = 3;
  const auto map = compress_subdomain(p.sys, p.geo, 4, p.media, cfg);
  const RestrictedSolutionMap full(p.sys, p.geo, 4);
  const auto layout = full.inflow_layout();
  const Eigen::VectorXd wi = full.codomain_weights();
  auto wnorm = [&](const Eigen::VectorXd& x) { return std::sqrt(x.dot(wi.cwiseProduct(x))); };

  for (int t = 0; t < 5; ++t) {
    const Eigen::VectorXd phi = gaussian_matrix(40, 1, 77, t);
    const auto approx = apply_lowrank(map, BoundaryTrace::from_flat(layout, phi), p.quad);
    const Eigen::VectorXd exact = full.apply(phi);
    // Error measured against the operator scale sigma_1 |phi|.
    const double phin = std::sqrt(phi.dot(full.domain_weights().cwiseProduct(phi)));
    CHECK(wnorm(approx.values - exact) / (dense[0] * phin) <= 5.0 * dense[6] / dense[0]);
  }

  // phi = nu_1 gives sigma_1 mu_1.
  const auto nu1 = BoundaryTrace::from_flat(layout, map.nu.col(0));
  CHECK((apply_lowrank(map, nu1, p.quad).values - map.sigma[0] * map.mu.col(0)).norm() <=
        1e-12 * map.sigma[0] * map.mu.col(0).norm());

  // phi orthogonal to every nu_i gives zero.
  const Eigen::VectorXd wb = full.domain_weights();
  Eigen::VectorXd x = gaussian_matrix(40, 1, 5, 0);
  for (int pass = 0; pass < 2; ++pass)
    x -= map.nu * (map.nu.transpose() * wb.cwiseProduct(x));
  CHECK(apply_lowrank(map, BoundaryTrace::from_flat(layout, x), p.quad).values.norm() < 1e-12);

  CHECK_THROWS_AS(apply_lowrank(map, BoundaryTrace::zeros(4, 20, true, false), p.quad), InvalidArgument);
  CHECK_NOTHROW(require_fingerprint(map, problem_fingerprint(p.geo, p.media, p.quad)));
  const auto other = make_media(p.grid, 1.0 / 81, 1.0 / 9);
  CHECK_THROWS_AS(require_fingerprint(map, problem_fingerprint(p.geo, other, p.quad)), StaleMapError);
}

TEST_CASE("truncate") {
  const Benchmark p(1.0 / 81, 1.0 / 81);
  RsvdConfig cfg;
  cfg.rank = 6;
  const auto map = compress_subdomain(p.sys, p.geo, 4, p.media, cfg);
  CHECK(truncate(map, 6) == map);
  CHECK_THROWS_AS(truncate(map, 7), InvalidArgument);
  const RestrictedSolutionMap full(p.sys, p.geo, 4);
  const Eigen::VectorXd phi = gaussian_matrix(40, 1, 12, 0);
  const auto trace = BoundaryTrace::from_flat(full.inflow_layout(), phi);
  CHECK(apply_lowrank(truncate(map, 0), trace, p.quad).values.norm() == 0.0);
  const Eigen::VectorXd exact = full.apply(phi);
  double previous = 1e300;
  for (int r = 1; r <= 6; ++r) {
    const double err = (apply_lowrank(truncate(map, r), trace, p.quad).values - exact).norm();
    CHECK(err <= previous * (1 + 1e-12));
    previous = err;
  }
}
