#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

namespace lrsm {

/// FNV-1a over explicit little-endian byte streams, so fingerprints agree
/// across platforms.
class Fnv1a {
 public:
  Fnv1a& add_u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) add_byte(static_cast<std::uint8_t>(v >> (8 * b)));
    return *this;
  }
  Fnv1a& add_i64(std::int64_t v) { return add_u64(static_cast<std::uint64_t>(v)); }
  Fnv1a& add_double(double v) { return add_u64(std::bit_cast<std::uint64_t>(v)); }
  Fnv1a& add_doubles(std::span<const double> vs) {
    for (double v : vs) add_double(v);
    return *this;
  }
  Fnv1a& add_string(std::string_view s) {
    for (char c : s) add_byte(static_cast<std::uint8_t>(c));
    return add_u64(s.size());
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  void add_byte(std::uint8_t b) {
    h_ ^= b;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace lrsm
