#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "lrsm/config.hpp"
#include "lrsm/errors.hpp"
#include "lrsm/experiments.hpp"
#include "lrsm/map_cache.hpp"

using namespace lrsm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lrsm_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

CacheError::Kind load_kind(const fs::path& p, std::uint64_t fp = 0) {
  try {
    (void)load_cache(p.string(), fp);
  } catch (const CacheError& e) {
    return e.kind();
  }
  FAIL("load_cache accepted a bad file");
  return CacheError::Kind::io;
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c;
  c.n_cells = 120;
  c.n_v = 8;
  c.m_count = 4;
  c.epsilon = 0.25;
  c.delta = 0.25;
  c.homog_deltas = {0.25, 0.125};
  c.online_iters = 10;
  c.ranks = {2, 3};
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST_CASE("config: defaults are the benchmark setup") {
  const auto c = parse_config("{}");
  CHECK(c.epsilon == 1.0 / 81);
  CHECK(c.delta == 1.0 / 81);
  CHECK(c.m_count == 10);
  CHECK(c.n_cells == 360);
  CHECK(c.n_v == 40);
  CHECK(c.rank == 6);
  CHECK(c.oversample == 5);
  CHECK(c.seed == 0);
}

TEST_CASE("config: fractions, overrides and round trip") {
  const auto c = parse_config(R"({"epsilon": "1/9", "delta": 0.125, "seed": 7, "ranks": [2, 4]})");
  CHECK(c.epsilon == 1.0 / 9);
  CHECK(c.delta == 0.125);
  CHECK(c.seed == 7);
  CHECK(c.ranks == std::vector<int>{2, 4});
  const auto back = parse_config(to_json(c));
  CHECK(back.epsilon == c.epsilon);
  CHECK(back.ranks == c.ranks);
  CHECK(parse_real("3/4") == 0.75);
  CHECK_THROWS_AS(parse_real("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_real("abc"), ConfigError);
}

TEST_CASE("config: rejected inputs") {
  CHECK_THROWS_AS(parse_config("{\"epsilonn\": 1}"), ConfigError);
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"n_v": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"m_count": 7})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"beta": 0.75})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"epsilon": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"media": "table"})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/lrsm.json"), ConfigError);
}

TEST_CASE("map cache: bitwise round trip and typed load errors") {
  const auto dir = scratch("cache");
  const Grid1D grid(360);
  const auto quad = build_quadrature(40);
  const auto media = make_media(grid, 1.0 / 81, 1.0 / 81);
  const auto geo = build_decomposition(grid, 10, 0.5);
  const auto systems = assemble_all(geo, media, quad);
  RsvdConfig rc;
  MapCache cache;
  cache.fingerprint = problem_fingerprint(geo, media, quad);
  cache.oversample = rc.oversample;
  for (int m = 1; m <= 10; ++m)
    cache.maps.push_back(compress_subdomain(systems[static_cast<std::size_t>(m - 1)], geo, m, media, rc));

  const auto path = dir / "maps.lrsm";
  save_cache(path.string(), cache);
  const std::string bytes = slurp(path);
  CHECK(bytes.substr(0, 5) == "LRSM1");
  CHECK(load_cache(path.string(), cache.fingerprint) == cache);

  save_cache((dir / "again.lrsm").string(), load_cache(path.string()));
  CHECK(slurp(dir / "again.lrsm") == bytes);

  CHECK(load_kind(dir / "missing.lrsm") == CacheError::Kind::io);

  std::string bad = bytes;
  bad[0] = 'X';
  spit(dir / "magic.lrsm", bad);
  CHECK(load_kind(dir / "magic.lrsm") == CacheError::Kind::bad_magic);

  bad = bytes;
  bad[5] = static_cast<char>(kCacheVersion + 1);
  spit(dir / "version.lrsm", bad);
  CHECK(load_kind(dir / "version.lrsm") == CacheError::Kind::bad_version);

  spit(dir / "short.lrsm", bytes.substr(0, bytes.size() / 2));
  CHECK(load_kind(dir / "short.lrsm") == CacheError::Kind::corrupt);

  bad = bytes;
  bad[bytes.size() / 2] ^= 0x01;
  spit(dir / "flip.lrsm", bad);
  CHECK(load_kind(dir / "flip.lrsm") == CacheError::Kind::corrupt);

  // Same layout on a refined grid is a different problem.
  const Grid1D fine(720);
  const auto fine_geo = build_decomposition(fine, 10, 0.5);
  const auto fine_fp = problem_fingerprint(fine_geo, make_media(fine, 1.0 / 81, 1.0 / 81), quad);
  CHECK(fine_fp != cache.fingerprint);
  CHECK(load_kind(path, fine_fp) == CacheError::Kind::fingerprint_mismatch);
  fs::remove_all(dir);
}

TEST_CASE("reference field store") {
  const auto dir = scratch("field");
  PhaseSpaceField u(NodeRange{0, 10}, 4);
  for (Eigen::Index k = 0; k < u.values.size(); ++k) u.values[k] = 0.1 * static_cast<double>(k) - 1.0 / 3.0;
  const auto path = (dir / "ref.lrsr").string();
  save_field(path, 42, u);
  const auto back = load_field(path, 42);
  CHECK(identical(back.values, u.values));
  CHECK(back.nodes.first == 0);
  CHECK(back.nodes.last == 10);
  CHECK_THROWS_AS(load_field(path, 43), CacheError);
  fs::remove_all(dir);
}

TEST_CASE("format_double reads back exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 0.0, 6.02214076e23}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("commands: deterministic CSV bytes, LF endings, header rows") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    const auto cfg = small_config(dir);
    (void)cmd_reference(cfg);
    (void)cmd_offline(cfg);
    (void)cmd_run(cfg, Backend::lowrank);
    (void)cmd_run(cfg, Backend::full);
    (void)cmd_spectrum(cfg, MapKind::Ss, 2);
    (void)cmd_rank_sweep(cfg);
    (void)cmd_homog_check(cfg);
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename().string();
    if (name.find("timing") != std::string::npos) continue;
    const std::string bytes = slurp(entry.path());
    CAPTURE(name);
    CHECK(bytes == slurp(b / name));
    if (entry.path().extension() == ".csv") {
      CHECK(bytes.find('\r') == std::string::npos);
      CHECK(!bytes.empty());
      CHECK(bytes.back() == '\n');
      CHECK(bytes.find(',') < bytes.find('\n'));
    }
    ++compared;
  }
  CHECK(compared >= 20);
  CHECK(fs::exists(a / "maps.lrsm"));
  CHECK(fs::exists(a / "rank_sweep.csv"));
  CHECK(fs::exists(a / "homog_check.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("commands: seed changes the maps; stale maps are rejected") {
  const auto dir = scratch("seed");
  auto cfg = small_config(dir);
  (void)cmd_offline(cfg);
  const std::string first = slurp(dir / "maps.lrsm");
  cfg.seed = 1;
  (void)cmd_offline(cfg);
  CHECK(slurp(dir / "maps.lrsm") != first);

  auto other = cfg;
  other.n_cells = 240;
  CHECK_THROWS_AS((void)cmd_run(other, Backend::lowrank), CacheError);
  fs::remove_all(dir);
}

TEST_CASE("commands: budget exhaustion is reported after writing outputs") {
  const auto dir = scratch("budget");
  auto cfg = small_config(dir);
  cfg.max_iters = 2;
  CHECK_THROWS_AS((void)cmd_reference(cfg), NonConvergence);
  CHECK(fs::exists(dir / "reference_history.csv"));
  CHECK_THROWS_AS((void)cmd_spectrum(cfg, MapKind::Ss, 9), ConfigError);
  fs::remove_all(dir);
}
