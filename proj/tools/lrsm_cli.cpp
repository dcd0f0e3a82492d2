#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "lrsm/config.hpp"
#include "lrsm/errors.hpp"
#include "lrsm/experiments.hpp"

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kNonConvergence = 3, kCache = 4, kInternal = 1 };

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "JSON experiment configuration");
  sub->add_option("--seed", c.seed, "Sketch seed (overrides the configuration)");
  sub->add_option("--out", c.out, "Output directory (overrides the configuration)");
}

lrsm::ExperimentConfig resolve(const Common& c) {
  lrsm::ExperimentConfig cfg = c.config_path.empty() ? lrsm::ExperimentConfig{}
                                                     : lrsm::load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.output_dir = *c.out;
  cfg.validate();
  return cfg;
}

void report(const lrsm::CommandOutput& out) {
  for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank Schwarz solver for the 1D slab radiative transfer equation"};
  app.require_subcommand(1);
  Common common;

  auto* reference = app.add_subcommand("reference", "Vanilla Schwarz reference solution at tau_ref");
  auto* offline = app.add_subcommand("offline", "Compress every subdomain map into maps.lrsm");
  auto* run = app.add_subcommand("run", "Online Schwarz iteration");
  std::string backend = "full";
  run->add_option("--backend", backend, "full or lowrank")
      ->check(CLI::IsMember({"full", "lowrank"}));
  auto* spectrum = app.add_subcommand("spectrum", "Singular values of one probed map");
  std::string map = "Ss";
  int subdomain = 4;
  spectrum->add_option("--map", map, "S, Ss or P")->check(CLI::IsMember({"S", "Ss", "P"}));
  spectrum->add_option("--subdomain", subdomain, "1-based subdomain index");
  auto* sweep = app.add_subcommand("rank-sweep", "Relative error and timing against rank");
  auto* homog = app.add_subcommand("homog-check", "Discrepancy to the homogenized solution");
  for (auto* sub : {reference, offline, run, spectrum, sweep, homog}) add_common(sub, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const lrsm::ExperimentConfig cfg = resolve(common);
    lrsm::CommandOutput out;
    if (*reference) out = lrsm::cmd_reference(cfg);
    else if (*offline) out = lrsm::cmd_offline(cfg);
    else if (*run)
      out = lrsm::cmd_run(cfg, backend == "full" ? lrsm::Backend::full : lrsm::Backend::lowrank);
    else if (*spectrum) {
      const auto kind = map == "S" ? lrsm::MapKind::S : map == "Ss" ? lrsm::MapKind::Ss : lrsm::MapKind::P;
      out = lrsm::cmd_spectrum(cfg, kind, subdomain);
    } else if (*sweep) out = lrsm::cmd_rank_sweep(cfg);
    else if (*homog) out = lrsm::cmd_homog_check(cfg);
    report(out);
    return kOk;
  } catch (const lrsm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const lrsm::AlignmentError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const lrsm::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const lrsm::AdjointMismatch& e) {
    std::cerr << "adjoint check failed: " << e.what() << "\n";
    return kConfig;
  } catch (const lrsm::NonConvergence& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const lrsm::CacheError& e) {
    std::cerr << "cache error: " << e.what() << "\n";
    return kCache;
  } catch (const lrsm::StaleMapError& e) {
    std::cerr << "stale maps: " << e.what() << "\n";
    return kCache;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}
