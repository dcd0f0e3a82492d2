#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lrsm/decomposition.hpp"
#include "lrsm/errors.hpp"
#include "lrsm/fields.hpp"
#include "lrsm/media.hpp"
#include "lrsm/quadrature.hpp"

using namespace lrsm;
using doctest::Approx;

TEST_CASE("quadrature: midpoint ordinates for n_v = 40") {
  const auto q = build_quadrature(40);
  REQUIRE(q.size() == 40);
  CHECK(q.nodes.front() == Approx(-0.975).epsilon(1e-15));
  CHECK(q.nodes.back() == Approx(0.975).epsilon(1e-15));
  double sw = 0.0, swv = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(q.weights[i] == 0.025);
    CHECK(q.nodes[i] != 0.0);
    CHECK(q.nodes[i] == -q.nodes[q.size() - 1 - i]);
    sw += q.weights[i];
    swv += q.weights[i] * q.nodes[i];
  }
  CHECK(std::abs(sw - 1.0) < 1e-15);
  CHECK(std::abs(swv) < 1e-15);
  CHECK(q.nodes[q.positive(0)] == Approx(0.025));
  CHECK(q.nodes[q.negative(0)] == Approx(-0.025));
}

TEST_CASE("quadrature: two ordinates and invalid counts") {
  const auto q = build_quadrature(2);
  CHECK(q.nodes == std::vector<double>{-0.5, 0.5});
  CHECK(q.weights == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(build_quadrature(3), InvalidArgument);
  CHECK_THROWS_AS(build_quadrature(0), InvalidArgument);
  CHECK_THROWS_AS(build_quadrature(-4), InvalidArgument);
}

TEST_CASE("media: oscillatory coefficient values and range") {
  CHECK(eval_sigma(0.0, 1.0 / 81) == Approx(2.1 / 1.1).epsilon(1e-14));
  CHECK(eval_sigma(0.0, 0.37) == Approx(1.909090909).epsilon(1e-9));
  // cos(4 pi x) = -1 and sin(2 pi x / delta) = 1 both hold at x = 1/4, delta = 1/81.
  CHECK(eval_sigma(0.25, 1.0 / 81) == Approx(0.1 / 2.1).epsilon(1e-10));

  const double delta = 1.0 / 81;
  double lo = 1e300, hi = -1e300;
  const int n = 1'000'000;
  for (int s = 0; s <= n; ++s) {
    const double v = eval_sigma(static_cast<double>(s) / n, delta);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= 0.047);
  CHECK(hi <= 21.0);
  CHECK(lo == Approx(0.1 / 2.1).epsilon(1e-6));
}

TEST_CASE("media: homogenized coefficient against trapezoid oracle") {
  using std::numbers::pi;
  // Periodic integrand: composite trapezoid converges spectrally.
  const int n = 1'000'000;
  double avg = 0.0;
  for (int s = 0; s < n; ++s) avg += 1.0 / (1.1 + std::sin(2.0 * pi * s / n));
  avg /= n;
  CHECK(std::abs(avg - 1.0 / std::sqrt(0.21)) < 1e-10);

  CHECK(homogenized_sigma(0.0) == Approx(2.1 * avg).epsilon(1e-8));
  CHECK(homogenized_sigma(0.0) == Approx(4.58258).epsilon(1e-5));
  CHECK(homogenized_sigma(0.25) == Approx(0.1 * avg).epsilon(1e-8));
  CHECK(homogenized_sigma(0.25) == Approx(0.21822).epsilon(1e-4));
  for (double x : {0.1, 0.33, 0.71}) {
    for (double y : {0.05, 0.5}) {
      const double ratio = homogenized_sigma(x) / homogenized_sigma(y);
      CHECK(ratio == Approx((1.1 + std::cos(4 * pi * x)) / (1.1 + std::cos(4 * pi * y))));
    }
  }
  // sigma* equals the fast-variable average of sigma(x, y) at fixed slow x.
  for (double x : {0.0, 0.13, 0.6}) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += (1.1 + std::cos(4 * pi * x)) / (1.1 + std::sin(2 * pi * k / double(n)));
    CHECK(std::abs(s / n - homogenized_sigma(x)) < 1e-8);
  }
}

TEST_CASE("media: sampled fields and table validation") {
  const Grid1D grid(360);
  const auto m = make_media(grid, 1.0 / 81, 1.0 / 81);
  CHECK(m.sigma_nodes.size() == 361);
  for (double s : m.sigma_nodes) CHECK(s > 0.0);
  CHECK_THROWS_AS(make_media(grid, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_media(grid, 1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(make_media_from_table(grid, 1.0, std::vector<double>(10, 1.0)), InvalidArgument);
  auto bad = std::vector<double>(361, 1.0);
  bad[7] = 0.0;
  CHECK_THROWS_AS(make_media_from_table(grid, 1.0, bad), InvalidArgument);
  CHECK(make_media(grid, 1.0, 1.0).fingerprint() != make_media(grid, 1.0, 0.5).fingerprint());
}

TEST_CASE("grid: spacing and trapezoid weights") {
  const Grid1D g(360);
  CHECK(std::abs(g.n_cells() * g.dx() - 1.0) < 1e-15);
  for (int j = 1; j < g.n_nodes(); ++j) CHECK(g.node(j) > g.node(j - 1));
  const auto w = g.trapezoid_weights(g.all_nodes());
  double s = 0.0;
  for (double x : w) s += x;
  CHECK(s == Approx(1.0).epsilon(1e-14));
  CHECK(g.node_at(0.35) == 126);
  CHECK(g.node_at(0.351) == -1);
}

TEST_CASE("decomposition: benchmark layout M = 10, beta = 1/2, dx = 1/360") {
  const Grid1D grid(360);
  const auto geo = build_decomposition(grid, 10, 0.5);
  REQUIRE(geo.m_count() == 10);
  const auto& k4 = geo.subdomain(4);
  // K_4 = (0.25, 0.45), K_4^s = (0.3, 0.4), exchange at 0.35 * 360 = 126.
  CHECK(k4.nodes == NodeRange{90, 162});
  CHECK(k4.interior == NodeRange{108, 144});
  CHECK(k4.exchange_next == 126);
  CHECK(k4.exchange_prev == 126);
  CHECK(geo.subdomain(1).nodes == NodeRange{0, 54});
  CHECK(geo.subdomain(1).physical_left);
  CHECK(!geo.subdomain(1).exchange_prev);
  CHECK(geo.subdomain(10).nodes == NodeRange{306, 360});
  CHECK(!geo.subdomain(10).exchange_next);
  CHECK_THROWS_AS(geo.subdomain(11), InvalidArgument);

  std::vector<int> owners(static_cast<std::size_t>(grid.n_nodes()), 0);
  for (const auto& s : geo.subdomains()) {
    for (int j = s.owned.first; j <= s.owned.last; ++j) ++owners[static_cast<std::size_t>(j)];
    for (const auto& e : {s.exchange_next, s.exchange_prev})
      if (e) CHECK(s.interior.contains_interior(*e));
    if (s.m > 1) {
      // Left inflow of K_m is the exchange node of K_{m-1}; right inflow of K_{m-1}
      // is the exchange node of K_m.
      CHECK(s.nodes.first == *geo.subdomain(s.m - 1).exchange_next);
      CHECK(geo.subdomain(s.m - 1).nodes.last == *s.exchange_prev);
      // K_m overlaps only its neighbours.
      if (s.m > 2) CHECK(geo.subdomain(s.m - 2).nodes.last <= s.nodes.first);
    }
  }
  for (int c : owners) CHECK(c == 1);
}

TEST_CASE("decomposition: single subdomain and misalignment") {
  const Grid1D grid(360);
  const auto one = build_decomposition(grid, 1, 0.5);
  CHECK(one.subdomain(1).nodes == NodeRange{0, 360});
  CHECK(one.subdomain(1).interior == NodeRange{0, 360});
  CHECK(!one.subdomain(1).exchange_next);
  CHECK(!one.subdomain(1).exchange_prev);

  try {
    build_decomposition(Grid1D(100), 10, 1.0 / 3.0);
    FAIL("expected alignment error");
  } catch (const AlignmentError& e) {
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
  CHECK_THROWS_AS(build_decomposition(grid, 10, 0.75), InvalidArgument);
  CHECK_THROWS_AS(build_decomposition(grid, 10, 0.0), InvalidArgument);
  CHECK(build_decomposition(grid, 10).fingerprint() != build_decomposition(Grid1D(720), 10).fingerprint());
}

TEST_CASE("inner products on boundary traces") {
  const auto q = build_quadrature(40);
  const auto ones = BoundaryTrace::constant(4, 20, 1.0);
  double brute = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) brute += std::abs(q.nodes[i]) * 0.025;
  CHECK(brute == Approx(0.5).epsilon(1e-14));
  CHECK(boundary_inner(ones, ones, q) == Approx(brute).epsilon(1e-14));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  BoundaryTrace a = BoundaryTrace::zeros(4, 20);
  for (auto& x : a.positive) x = n01(rng);
  for (auto& x : a.negative) x = n01(rng);
  BoundaryTrace b = a;
  b.positive = -a.positive;
  b.negative = -a.negative;
  CHECK(boundary_inner(a, b, q) == Approx(-std::pow(boundary_norm(a, q), 2)));
  CHECK(boundary_inner(a, BoundaryTrace::zeros(4, 20), q) == 0.0);
  CHECK_THROWS_AS(boundary_inner(a, BoundaryTrace::zeros(4, 20, true, false), q), InvalidArgument);
}

TEST_CASE("interior products and H^1_2 / H_A norms") {
  const auto q = build_quadrature(40);
  const Grid1D grid(360);
  const NodeRange all = grid.all_nodes();

  PhaseSpaceField c(all, 40);
  c.values.setConstant(-3.0);
  CHECK(interior_inner(c, c, grid, q) == Approx(9.0).epsilon(1e-13));
  CHECK(h12_norm(c, grid, q) == Approx(3.0).epsilon(1e-13));
  CHECK(ha_norm(c, grid, q) >= h12_norm(c, grid, q));

  PhaseSpaceField f(all, 40);
  for (int j = 0; j <= 360; ++j)
    for (int i = 0; i < 40; ++i) f.at(j, i) = grid.node(j);
  double sv2 = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sv2 += q.weights[i] * q.nodes[i] * q.nodes[i];
  const double h2 = std::pow(h12_norm(f, grid, q), 2);
  CHECK(h2 == Approx(sv2 + 1.0 / 3.0).epsilon(1e-5));
  CHECK(ha_norm(f, grid, q) >= h12_norm(f, grid, q));

  PhaseSpaceField other(NodeRange{0, 10}, 40);
  CHECK_THROWS_AS(interior_inner(f, other, grid, q), InvalidArgument);
}
