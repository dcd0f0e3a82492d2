#include "lrsm/experiments.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <span>
#include <sstream>

#include "lrsm/errors.hpp"
#include "lrsm/hash.hpp"
#include "lrsm/parallel.hpp"

namespace lrsm {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_string(Backend b) { return b == Backend::full ? "full" : "lowrank"; }

std::string to_string(MapKind k) {
  switch (k) {
    case MapKind::S: return "S";
    case MapKind::Ss: return "Ss";
    case MapKind::P: return "P";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Comma-separated table with a header row and LF line ends.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { line(header); }

  template <class... Ts>
  void row(const Ts&... cells) {
    static_assert(sizeof...(Ts) > 0);
    std::vector<std::string> out{cell(cells)...};
    if (out.size() != width_) throw InvalidArgument("Csv::row: wrong number of cells");
    line(out);
    ++rows_;
  }
  std::size_t rows() const noexcept { return rows_; }
  const std::string& text() const noexcept { return text_; }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(CommandOutput& out, const std::string& name, const std::string& text) const {
    write_file_atomic(path(name), text);
    out.files.push_back(path(name));
  }
  void csv(CommandOutput& out, const std::string& name, const Csv& t) const {
    write(out, name, t.text());
  }
  /// Plain-text description an external plotter can follow.
  void manifest(CommandOutput& out, const std::string& name, const std::string& title,
                const std::string& csv, const std::string& x, const std::string& y,
                const std::string& yscale, const std::string& group = "") const {
    std::string text = "title: " + title + "\ncsv: " + csv + "\nx: " + x + "\ny: " + y +
                       "\nyscale: " + yscale + "\n";
    if (!group.empty()) text += "group: " + group + "\n";
    write(out, name, text);
  }

 private:
  fs::path dir_;
};

MediaField config_media(const ExperimentConfig& cfg, const Grid1D& grid, double eps, double delta) {
  if (cfg.media == MediaKind::table) return make_media_from_table(grid, eps, cfg.media_table);
  return make_media(grid, eps, delta, cfg.media);
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << v;
  return s.str();
}

std::uint64_t reference_fingerprint(const Problem& p) {
  Fnv1a h;
  h.add_string("lrsm-reference");
  h.add_u64(p.fingerprint);
  h.add_doubles(std::span<const double>(p.phi_bdry.positive.data(), static_cast<std::size_t>(p.phi_bdry.positive.size())));
  h.add_doubles(std::span<const double>(p.phi_bdry.negative.data(), static_cast<std::size_t>(p.phi_bdry.negative.size())));
  h.add_double(p.config.tau_ref);
  h.add_i64(p.config.max_iters);
  return h.value();
}

std::string reference_name(const Problem& p) {
  return "reference_" + hex(reference_fingerprint(p)) + ".lrsr";
}

SchwarzResult solve_reference(const Problem& p, double* seconds) {
  const FullSolveBackend full(p.geometry, p.systems);
  SchwarzOptions o;
  o.tau = p.config.tau_ref;
  o.max_iters = p.config.max_iters;
  const auto t0 = Clock::now();
  auto r = run_schwarz(full, p.systems, p.geometry, p.phi_bdry, o);
  if (seconds) *seconds = seconds_since(t0);
  return r;
}

Csv field_csv(const PhaseSpaceField& u, const Grid1D& grid, const AngularQuadrature& quad) {
  Csv t({"x", "v", "u"});
  for (int j = u.nodes.first; j <= u.nodes.last; ++j)
    for (int i = 0; i < u.n_v; ++i)
      t.row(grid.node(j), quad.nodes[static_cast<std::size_t>(i)], u.at(j, i));
  return t;
}

std::vector<LowRankMap> compress_all(const Problem& p, const RsvdConfig& rc,
                                     std::vector<double>* seconds) {
  const int M = p.geometry.m_count();
  std::vector<LowRankMap> maps(static_cast<std::size_t>(M));
  std::vector<double> secs(static_cast<std::size_t>(M), 0.0);
  parallel_for(M, [&](int idx) {
    const auto t0 = Clock::now();
    maps[static_cast<std::size_t>(idx)] =
        compress_subdomain(p.systems[static_cast<std::size_t>(idx)], p.geometry, idx + 1, p.media, rc);
    secs[static_cast<std::size_t>(idx)] = seconds_since(t0);
  });
  if (seconds) *seconds = secs;
  return maps;
}

RsvdConfig rsvd_config(const ExperimentConfig& cfg, int rank) {
  RsvdConfig rc;
  rc.rank = rank;
  rc.oversample = cfg.oversample;
  rc.seed = cfg.seed;
  return rc;
}

std::string maps_name() { return "maps.lrsm"; }

}  // namespace

Problem make_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  const Grid1D grid(cfg.n_cells);
  auto quad = build_quadrature(cfg.n_v);
  auto media = config_media(cfg, grid, cfg.epsilon, cfg.delta);
  auto geometry = build_decomposition(grid, cfg.m_count, cfg.beta);
  SolverSettings s;
  s.kind = cfg.solver;
  auto systems = assemble_all(geometry, media, quad, s);
  auto phi = benchmark_inflow_data(quad);
  const auto fp = problem_fingerprint(geometry, media, quad);
  return Problem{cfg, grid, std::move(quad), std::move(media), std::move(geometry),
                 std::move(systems), std::move(phi), fp};
}

PhaseSpaceField obtain_reference(const Problem& p) {
  const OutputDir out(p.config.output_dir);
  const std::string path = out.path(reference_name(p));
  if (fs::exists(path)) {
    try {
      return load_field(path, reference_fingerprint(p));
    } catch (const CacheError& e) {
      std::cerr << "warning: ignoring unusable reference " << path << " (" << e.what() << ")\n";
    }
  }
  const auto r = solve_reference(p, nullptr);
  if (!r.state.converged)
    throw NonConvergence("reference Schwarz run did not reach tau_ref within max_iters",
                         r.state.history.back());
  save_field(path, reference_fingerprint(p), r.solution.global);
  return r.solution.global;
}

CommandOutput cmd_reference(const ExperimentConfig& cfg) {
  const auto t_setup = Clock::now();
  const Problem p = make_problem(cfg);
  const double setup = seconds_since(t_setup);
  const OutputDir dir(cfg.output_dir);
  CommandOutput out;

  double schwarz_seconds = 0.0;
  const auto r = solve_reference(p, &schwarz_seconds);
  const auto t_direct = Clock::now();
  const auto direct = solve_global_direct(p.grid, p.media, p.quad, p.phi_bdry);
  const double direct_seconds = seconds_since(t_direct);
  const auto& u = r.solution.global;
  const double cross = direct.values.norm() > 0.0 ? relative_error(u, direct) : u.values.norm();

  Csv history({"iteration", "trace_change"});
  for (std::size_t t = 0; t < r.state.history.size(); ++t) history.row(static_cast<int>(t + 1), r.state.history[t]);
  const auto flux = flux_profile(u, p.quad);
  Csv flux_csv({"x", "flux"});
  for (int j = 0; j < p.grid.n_nodes(); ++j) flux_csv.row(p.grid.node(j), flux[static_cast<std::size_t>(j)]);
  const auto [fmin, fmax] = std::minmax_element(flux.begin(), flux.end());

  Csv summary({"n_cells", "n_v", "m_count", "epsilon", "delta", "media", "iterations", "converged",
               "final_trace_change", "schwarz_vs_direct", "field_min", "field_max", "flux_min",
               "flux_max", "flux_deviation"});
  summary.row(cfg.n_cells, cfg.n_v, cfg.m_count, cfg.epsilon, cfg.delta, to_string(cfg.media),
              r.state.t, r.state.converged, r.state.history.back(), cross, u.values.minCoeff(),
              u.values.maxCoeff(), *fmin, *fmax, *fmax - *fmin);
  Csv timing({"phase", "seconds"});
  timing.row("setup", setup);
  timing.row("schwarz", schwarz_seconds);
  timing.row("direct", direct_seconds);

  if (r.state.converged) {
    save_field(dir.path(reference_name(p)), reference_fingerprint(p), u);
    out.files.push_back(dir.path(reference_name(p)));
  }
  dir.csv(out, "reference_summary.csv", summary);
  dir.csv(out, "reference_history.csv", history);
  dir.csv(out, "reference_flux.csv", flux_csv);
  dir.csv(out, "reference_field.csv", field_csv(u, p.grid, p.quad));
  dir.csv(out, "reference_timing.csv", timing);
  dir.manifest(out, "reference_history.plot.txt", "Reference Schwarz trace change",
               "reference_history.csv", "iteration", "trace_change", "log");
  dir.manifest(out, "reference_field.plot.txt", "Reference solution u(x, v)",
               "reference_field.csv", "x", "u", "linear", "v");
  if (!r.state.converged)
    throw NonConvergence("reference Schwarz run stopped at trace change " +
                             format_double(r.state.history.back()) + " after " +
                             std::to_string(r.state.t) + " iterations (tau_ref " +
                             format_double(cfg.tau_ref) + ")",
                         r.state.history.back());
  return out;
}

CommandOutput cmd_offline(const ExperimentConfig& cfg) {
  const Problem p = make_problem(cfg);
  const OutputDir dir(cfg.output_dir);
  CommandOutput out;
  std::vector<double> seconds;
  MapCache cache;
  cache.fingerprint = p.fingerprint;
  cache.seed = cfg.seed;
  cache.oversample = cfg.oversample;
  cache.maps = compress_all(p, rsvd_config(cfg, cfg.rank), &seconds);

  Csv spectra({"subdomain", "index", "sigma", "sigma_normalized"});
  Csv timing({"subdomain", "seconds"});
  for (const auto& m : cache.maps) {
    for (int i = 0; i < m.rank(); ++i)
      spectra.row(m.subdomain, i + 1, m.sigma[i], m.sigma[0] > 0.0 ? m.sigma[i] / m.sigma[0] : 0.0);
    timing.row(m.subdomain, seconds[static_cast<std::size_t>(m.subdomain - 1)]);
  }
  save_cache(dir.path(maps_name()), cache);
  out.files.push_back(dir.path(maps_name()));
  dir.csv(out, "offline_spectra.csv", spectra);
  dir.csv(out, "offline_timing.csv", timing);
  dir.manifest(out, "offline_spectra.plot.txt", "Compressed map spectra",
               "offline_spectra.csv", "index", "sigma_normalized", "log", "subdomain");
  return out;
}

CommandOutput cmd_run(const ExperimentConfig& cfg, Backend backend) {
  const Problem p = make_problem(cfg);
  const OutputDir dir(cfg.output_dir);
  std::optional<LowRankBackend> low;
  if (backend == Backend::lowrank) {
    MapCache cache;
    try {
      cache = load_cache(dir.path(maps_name()), p.fingerprint);
    } catch (const CacheError& e) {
      if (e.kind() == CacheError::Kind::fingerprint_mismatch || e.kind() == CacheError::Kind::io)
        throw CacheError(e.kind(), std::string(e.what()) +
                                       "\nhint: run `lrsm offline` with this configuration first");
      throw;
    }
    low.emplace(p.geometry, std::move(cache.maps), p.quad, p.fingerprint);
  }
  const PhaseSpaceField reference = obtain_reference(p);
  const FullSolveBackend full(p.geometry, p.systems);
  const SchwarzBackend& active = backend == Backend::full
                                     ? static_cast<const SchwarzBackend&>(full)
                                     : static_cast<const SchwarzBackend&>(*low);
  const PartitionOfUnity partition = build_partition(p.geometry);

  Csv history({"iteration", "trace_change", "relative_error"});
  Csv timing({"iteration", "seconds"});
  SchwarzOptions o;
  o.tau = cfg.tau;
  if (backend == Backend::lowrank) {
    o.max_iters = cfg.online_iters;
    o.fixed_iterations = true;
  } else {
    o.max_iters = cfg.max_iters;
  }
  o.observer = [&](const SchwarzState& s, double dt) {
    const auto a = assemble_solution(p.systems, p.geometry, partition, s.traces);
    history.row(s.t, s.history.back(), relative_error(a.global, reference));
    timing.row(s.t, dt);
  };
  const auto r = run_schwarz(active, p.systems, p.geometry, p.phi_bdry, o);

  CommandOutput out;
  const std::string stem = "run_" + to_string(backend);
  Csv summary({"backend", "iterations", "converged", "final_trace_change", "relative_error"});
  summary.row(to_string(backend), r.state.t, r.state.converged, r.state.history.back(),
              relative_error(r.solution.global, reference));
  dir.csv(out, stem + "_summary.csv", summary);
  dir.csv(out, stem + "_history.csv", history);
  dir.csv(out, stem + "_timing.csv", timing);
  dir.csv(out, stem + "_field.csv", field_csv(r.solution.global, p.grid, p.quad));
  dir.manifest(out, stem + "_history.plot.txt", "Relative error per iteration (" + to_string(backend) + ")",
               stem + "_history.csv", "iteration", "relative_error", "log");
  if (backend == Backend::full && !r.state.converged)
    throw NonConvergence("Schwarz run stopped at trace change " + format_double(r.state.history.back()) +
                             " after " + std::to_string(r.state.t) + " iterations",
                         r.state.history.back());
  return out;
}

CommandOutput cmd_spectrum(const ExperimentConfig& cfg, MapKind kind, int m) {
  cfg.validate();
  if (m < 1 || m > cfg.m_count)
    throw ConfigError("--subdomain must lie in [1, " + std::to_string(cfg.m_count) + "]");
  const Grid1D grid(cfg.n_cells);
  const auto geo = build_decomposition(grid, cfg.m_count, cfg.beta);
  const auto& sub = geo.subdomain(m);
  const long rows = kind == MapKind::S    ? static_cast<long>(sub.nodes.size()) * cfg.n_v
                    : kind == MapKind::Ss ? static_cast<long>(sub.interior.size()) * cfg.n_v
                                          : cfg.n_v;
  constexpr long kCap = 10000;
  if (rows > kCap)
    throw ConfigError("probed matrix would have " + std::to_string(rows) +
                      " rows (cap " + std::to_string(kCap) +
                      "); use a coarser grid, fewer ordinates or more subdomains");
  const auto quad = build_quadrature(cfg.n_v);
  const auto media = config_media(cfg, grid, cfg.epsilon, cfg.delta);
  SolverSettings s;
  s.kind = cfg.solver;
  const auto sys = assemble_local(geo, m, media, quad, s);
  const Eigen::VectorXd sv = probe_weighted_matrix(sys, geo, m, kind).jacobiSvd().singularValues();

  Csv t({"index", "sigma", "sigma_normalized"});
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    t.row(static_cast<int>(i + 1), sv[i], sv[0] > 0.0 ? sv[i] / sv[0] : 0.0);
  const OutputDir dir(cfg.output_dir);
  CommandOutput out;
  const std::string stem = "spectrum_" + to_string(kind) + "_m" + std::to_string(m);
  dir.csv(out, stem + ".csv", t);
  dir.manifest(out, stem + ".plot.txt", "Normalized singular values of " + to_string(kind) + "_" + std::to_string(m),
               stem + ".csv", "index", "sigma_normalized", "log");
  return out;
}

CommandOutput cmd_rank_sweep(const ExperimentConfig& cfg) {
  const Problem p = make_problem(cfg);
  const OutputDir dir(cfg.output_dir);
  const PhaseSpaceField reference = obtain_reference(p);
  const int T = cfg.online_iters;

  Csv errors({"method", "rank", "iterations", "relative_error"});
  Csv timing({"method", "rank", "offline_seconds", "online_seconds", "seconds_per_iteration"});
  SchwarzOptions o;
  o.tau = cfg.tau;
  o.max_iters = T;
  o.fixed_iterations = true;
  auto online = [&](const SchwarzBackend& b, const std::string& method, int rank, double offline) {
    const auto r = run_schwarz(b, p.systems, p.geometry, p.phi_bdry, o);
    double total = 0.0;
    for (double s : r.step_seconds) total += s;
    errors.row(method, rank, r.state.t, relative_error(r.solution.global, reference));
    timing.row(method, rank, offline, total, total / r.state.t);
  };

  const FullSolveBackend full(p.geometry, p.systems);
  online(full, "vanilla", cfg.n_v, 0.0);
  std::vector<int> ranks = cfg.ranks;
  std::vector<std::string> methods(ranks.size(), "lowrank");
  if (cfg.full_basis) {
    ranks.push_back(cfg.n_v);
    methods.push_back("full_basis");
  }
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    const auto t0 = Clock::now();
    auto maps = compress_all(p, rsvd_config(cfg, ranks[k]), nullptr);
    const double offline = seconds_since(t0);
    const LowRankBackend low(p.geometry, std::move(maps), p.quad, p.fingerprint);
    online(low, methods[k], ranks[k], offline);
  }
  CommandOutput out;
  dir.csv(out, "rank_sweep.csv", errors);
  dir.csv(out, "rank_sweep_timing.csv", timing);
  dir.manifest(out, "rank_sweep.plot.txt", "Relative error against rank", "rank_sweep.csv", "rank",
               "relative_error", "log", "method");
  return out;
}

CommandOutput cmd_homog_check(const ExperimentConfig& cfg) {
  cfg.validate();
  const Grid1D grid(cfg.n_cells);
  const auto quad = build_quadrature(cfg.n_v);
  const auto phi = benchmark_inflow_data(quad);
  auto averaged = [&](const MediaField& media) {
    const auto u = solve_global_direct(grid, media, quad, phi);
    Eigen::VectorXd avg(grid.n_nodes());
    for (int j = 0; j < grid.n_nodes(); ++j) {
      double s = 0.0;
      for (int i = 0; i < cfg.n_v; ++i) s += quad.weights[static_cast<std::size_t>(i)] * u.at(j, i);
      avg[j] = s;
    }
    return avg;
  };
  const Eigen::VectorXd star =
      averaged(make_media(grid, cfg.homog_epsilon, cfg.homog_deltas.front(), MediaKind::homogenized));
  Csv t({"delta", "relative_discrepancy"});
  for (double d : cfg.homog_deltas) {
    const Eigen::VectorXd ud = averaged(make_media(grid, cfg.homog_epsilon, d, MediaKind::oscillatory));
    t.row(d, (ud - star).norm() / star.norm());
  }
  const OutputDir dir(cfg.output_dir);
  CommandOutput out;
  dir.csv(out, "homog_check.csv", t);
  dir.manifest(out, "homog_check.plot.txt", "Homogenization discrepancy", "homog_check.csv", "delta",
               "relative_discrepancy", "log");
  return out;
}

}  // namespace lrsm
