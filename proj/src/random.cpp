#include "lrsm/random.hpp"

#include <cmath>
#include <numbers>

namespace lrsm {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

/// Uniform in (0, 1): 53 random bits, shifted off zero.
double open_uniform(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double gaussian_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL));
  // Box-Muller on a pair of counters; the index parity picks cos or sin.
  const std::uint64_t pair = index >> 1;
  const double u1 = open_uniform(splitmix64(key ^ (2 * pair)));
  const double u2 = open_uniform(splitmix64(key ^ (2 * pair + 1) ^ 0x5851f42d4c957f2dULL));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index & 1U) ? radius * std::sin(angle) : radius * std::cos(angle);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                std::uint64_t first_stream) {
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      g(r, c) = gaussian_at(seed, first_stream + static_cast<std::uint64_t>(c),
                            static_cast<std::uint64_t>(r));
  return g;
}

}  // namespace lrsm
