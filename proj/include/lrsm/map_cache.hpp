#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrsm/fields.hpp"
#include "lrsm/low_rank_map.hpp"

namespace lrsm {

/// Compressed maps of one problem, one per subdomain in order.
struct MapCache {
  std::uint64_t fingerprint = 0;
  std::uint64_t seed = 0;
  int oversample = 0;
  std::vector<LowRankMap> maps;

  bool operator==(const MapCache&) const = default;
};

/// File layout (all integers and floats little-endian):
///   "LRSM1" | u32 version | u64 fingerprint | u64 seed | u32 oversample |
///   u32 map count | per map: i32 m, i32 first, i32 last, u32 n_v, u32 rank,
///   u64 numerical rank, u64 map fingerprint, f64 sigma[rank],
///   f64 nu[n_v * rank], f64 mu[rows * rank] (column-major) | u64 checksum
/// The checksum is FNV-1a over every preceding byte. Written to a temporary
/// file and renamed into place.
void save_cache(const std::string& path, const MapCache& cache);

/// Throws CacheError: io (unreadable), bad_magic, bad_version, corrupt
/// (truncated, checksum or layout mismatch), fingerprint_mismatch (when
/// `expected_fingerprint` is nonzero and differs).
MapCache load_cache(const std::string& path, std::uint64_t expected_fingerprint = 0);

inline constexpr std::uint32_t kCacheVersion = 1;

/// Reference field persisted next to the maps: "LRSR1" | u32 version |
/// u64 fingerprint | i32 first | i32 last | u32 n_v | f64 values | u64 checksum.
void save_field(const std::string& path, std::uint64_t fingerprint, const PhaseSpaceField& field);
PhaseSpaceField load_field(const std::string& path, std::uint64_t expected_fingerprint);

/// Writes `bytes` to path via a temporary sibling and rename.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace lrsm
