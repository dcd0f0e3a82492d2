#pragma once

#include <stdexcept>
#include <string>

namespace lrsm {

/// Precondition violated by a caller (bad size, bad count, shape mismatch).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A decomposition endpoint or exchange point does not sit on a grid node.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solve stopped before reaching its residual tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual, int subdomain = 0)
      : std::runtime_error(what), residual_(residual), subdomain_(subdomain) {}

  double residual() const noexcept { return residual_; }
  /// 1-based subdomain id, 0 when the solve was not tied to a subdomain.
  int subdomain() const noexcept { return subdomain_; }

 private:
  double residual_;
  int subdomain_;
};

/// Forward map and supplied adjoint disagree under the weighted products.
class AdjointMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A low-rank map was built for a different grid/media/geometry.
class StaleMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration rejected at load.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persisted artifact could not be loaded.
class CacheError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, bad_version, fingerprint_mismatch, corrupt };
  CacheError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace lrsm
