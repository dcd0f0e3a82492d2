#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace lrsm {

/// splitmix64 finalizer: a bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based standard normal draws: the value at (seed, stream, index) is a
/// pure function of its arguments, so sketches are reproducible independently
/// of evaluation order or threading.
double gaussian_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

/// rows x cols matrix of standard normals; column c uses stream `first_stream + c`.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                std::uint64_t first_stream = 0);

}  // namespace lrsm
