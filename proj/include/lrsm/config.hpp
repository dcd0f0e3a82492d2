#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrsm/local_system.hpp"
#include "lrsm/media.hpp"

namespace lrsm {

/// Parameters of one experiment. Loaded from JSON; every key is optional and
/// unknown keys are rejected. Real-valued keys accept numbers or fraction
/// strings such as "1/81".
struct ExperimentConfig {
  double epsilon = 1.0 / 81;
  double delta = 1.0 / 81;
  int m_count = 10;
  double beta = 0.5;
  int n_cells = 360;
  int n_v = 40;
  int rank = 6;
  int oversample = 5;
  /// Stopping value for the trace change of online runs.
  double tau = 1e-8;
  /// Stopping value for the reference solution.
  double tau_ref = 1e-10;
  int max_iters = 5000;
  /// Fixed iteration count T of low-rank online runs.
  int online_iters = 50;
  std::uint64_t seed = 0;
  MediaKind media = MediaKind::oscillatory;
  /// Node values of sigma when media == table (n_cells + 1 entries).
  std::vector<double> media_table;
  SolverKind solver = SolverKind::direct;
  std::string output_dir = "out";
  /// Ranks visited by rank-sweep.
  std::vector<int> ranks{2, 3, 4, 5, 6};
  /// Also time an untruncated compression (k = boundary dimension) in rank-sweep.
  bool full_basis = false;
  /// Periods visited by homog-check, and its Knudsen number.
  std::vector<double> homog_deltas{1.0 / 9, 1.0 / 27, 1.0 / 81};
  double homog_epsilon = 1.0;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string to_json(const ExperimentConfig& cfg);

/// "1/81", "0.5", "1e-3" -> double; throws ConfigError otherwise.
double parse_real(const std::string& text);

}  // namespace lrsm
