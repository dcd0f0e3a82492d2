#include "lrsm/map_cache.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "lrsm/errors.hpp"
#include "lrsm/hash.hpp"

namespace lrsm {

namespace {

constexpr char kMapMagic[5] = {'L', 'R', 'S', 'M', '1'};
constexpr char kFieldMagic[5] = {'L', 'R', 'S', 'R', '1'};
constexpr std::uint32_t kFieldVersion = 1;

class Writer {
 public:
  void raw(const char* p, std::size_t n) { bytes_.append(p, n); }
  void u32(std::uint32_t v) { put(v, 4); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void f64s(const double* p, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) f64(p[i]);
  }
  std::string finish() {
    Fnv1a h;
    h.add_string(bytes_);
    u64(h.value());
    return std::move(bytes_);
  }

 private:
  void put(std::uint64_t v, int n) {
    for (int b = 0; b < n; ++b) bytes_.push_back(static_cast<char>((v >> (8 * b)) & 0xffU));
  }
  std::string bytes_;
};

class Reader {
 public:
  Reader(std::string bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

  void magic(const char (&expected)[5]) {
    if (bytes_.size() < 5 || std::memcmp(bytes_.data(), expected, 5) != 0)
      throw CacheError(CacheError::Kind::bad_magic,
                       path_ + ": not a " + std::string(expected, 5) + " file (bad magic)");
    pos_ = 5;
  }
  /// Verifies the trailing checksum; call after magic and version.
  void checksum() {
    if (bytes_.size() < pos_ + 8) corrupt("file is truncated");
    const std::size_t body = bytes_.size() - 8;
    Fnv1a h;
    h.add_string(std::string_view(bytes_).substr(0, body));
    std::uint64_t stored = 0;
    for (int b = 0; b < 8; ++b)
      stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[body + b])) << (8 * b);
    if (stored != h.value()) corrupt("checksum mismatch (truncated or modified)");
    end_ = body;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4))); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  void f64s(double* p, Eigen::Index n) {
    if (n < 0 || static_cast<std::size_t>(n) > (limit() - pos_) / 8) corrupt("payload is truncated");
    for (Eigen::Index i = 0; i < n; ++i) p[i] = f64();
  }
  void done() {
    if (pos_ != limit()) corrupt("trailing bytes after payload");
  }
  [[noreturn]] void corrupt(const std::string& why) const {
    throw CacheError(CacheError::Kind::corrupt, path_ + ": corrupt file: " + why);
  }

 private:
  std::size_t limit() const { return end_ ? end_ : bytes_.size(); }
  std::uint64_t get(int n) {
    if (pos_ + static_cast<std::size_t>(n) > limit()) corrupt("file is truncated");
    std::uint64_t v = 0;
    for (int b = 0; b < n; ++b)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::string bytes_;
  std::string path_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError(CacheError::Kind::io, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << v;
  return s.str();
}

void check_fingerprint(const std::string& path, std::uint64_t stored, std::uint64_t expected) {
  if (expected != 0 && stored != expected)
    throw CacheError(CacheError::Kind::fingerprint_mismatch,
                     path + ": built for problem " + hex(stored) + ", current problem is " +
                         hex(expected) + "; re-run the offline stage");
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError(CacheError::Kind::io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw CacheError(CacheError::Kind::io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw CacheError(CacheError::Kind::io, "cannot rename into " + path + ": " + ec.message());
  }
}

void save_cache(const std::string& path, const MapCache& cache) {
  Writer w;
  w.raw(kMapMagic, 5);
  w.u32(kCacheVersion);
  w.u64(cache.fingerprint);
  w.u64(cache.seed);
  w.u32(static_cast<std::uint32_t>(cache.oversample));
  w.u32(static_cast<std::uint32_t>(cache.maps.size()));
  for (const auto& m : cache.maps) {
    const Eigen::Index rows = static_cast<Eigen::Index>(m.interior.size()) * m.n_v;
    if (m.nu.rows() != m.n_v || m.nu.cols() != m.rank() || m.mu.rows() != rows ||
        m.mu.cols() != m.rank())
      throw InvalidArgument("save_cache: map " + std::to_string(m.subdomain) + " has inconsistent shapes");
    w.i32(m.subdomain);
    w.i32(m.interior.first);
    w.i32(m.interior.last);
    w.u32(static_cast<std::uint32_t>(m.n_v));
    w.u32(static_cast<std::uint32_t>(m.rank()));
    w.u64(static_cast<std::uint64_t>(m.numerical_rank));
    w.u64(m.fingerprint);
    w.f64s(m.sigma.data(), m.sigma.size());
    w.f64s(m.nu.data(), m.nu.size());
    w.f64s(m.mu.data(), m.mu.size());
  }
  write_file_atomic(path, w.finish());
}

MapCache load_cache(const std::string& path, std::uint64_t expected_fingerprint) {
  Reader r(read_file(path), path);
  r.magic(kMapMagic);
  const std::uint32_t version = r.u32();
  if (version != kCacheVersion)
    throw CacheError(CacheError::Kind::bad_version,
                     path + ": unsupported cache version " + std::to_string(version) +
                         " (expected " + std::to_string(kCacheVersion) + ")");
  r.checksum();
  MapCache c;
  c.fingerprint = r.u64();
  check_fingerprint(path, c.fingerprint, expected_fingerprint);
  c.seed = r.u64();
  c.oversample = static_cast<int>(r.u32());
  const std::uint32_t count = r.u32();
  for (std::uint32_t k = 0; k < count; ++k) {
    LowRankMap m;
    m.subdomain = r.i32();
    m.interior.first = r.i32();
    m.interior.last = r.i32();
    m.n_v = static_cast<int>(r.u32());
    const auto rank = static_cast<Eigen::Index>(r.u32());
    m.numerical_rank = static_cast<Eigen::Index>(r.u64());
    m.fingerprint = r.u64();
    if (m.interior.last < m.interior.first || m.n_v <= 0 || m.n_v % 2 != 0 || rank > m.n_v)
      r.corrupt("implausible map header");
    const Eigen::Index rows = static_cast<Eigen::Index>(m.interior.size()) * m.n_v;
    m.sigma.resize(rank);
    m.nu.resize(m.n_v, rank);
    m.mu.resize(rows, rank);
    r.f64s(m.sigma.data(), m.sigma.size());
    r.f64s(m.nu.data(), m.nu.size());
    r.f64s(m.mu.data(), m.mu.size());
    c.maps.push_back(std::move(m));
  }
  r.done();
  return c;
}

void save_field(const std::string& path, std::uint64_t fingerprint, const PhaseSpaceField& field) {
  Writer w;
  w.raw(kFieldMagic, 5);
  w.u32(kFieldVersion);
  w.u64(fingerprint);
  w.i32(field.nodes.first);
  w.i32(field.nodes.last);
  w.u32(static_cast<std::uint32_t>(field.n_v));
  w.f64s(field.values.data(), field.values.size());
  write_file_atomic(path, w.finish());
}

PhaseSpaceField load_field(const std::string& path, std::uint64_t expected_fingerprint) {
  Reader r(read_file(path), path);
  r.magic(kFieldMagic);
  const std::uint32_t version = r.u32();
  if (version != kFieldVersion)
    throw CacheError(CacheError::Kind::bad_version,
                     path + ": unsupported field version " + std::to_string(version));
  r.checksum();
  check_fingerprint(path, r.u64(), expected_fingerprint);
  NodeRange nodes;
  nodes.first = r.i32();
  nodes.last = r.i32();
  const int n_v = static_cast<int>(r.u32());
  if (nodes.last < nodes.first || n_v <= 0) r.corrupt("implausible field header");
  PhaseSpaceField f(nodes, n_v);
  r.f64s(f.values.data(), f.values.size());
  r.done();
  return f;
}

}  // namespace lrsm
