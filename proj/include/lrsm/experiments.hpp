#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrsm/config.hpp"
#include "lrsm/map_cache.hpp"
#include "lrsm/schwarz.hpp"
#include "lrsm/transport.hpp"

namespace lrsm {

/// Everything derived from a configuration: discretization, media, geometry,
/// assembled local systems and the physical inflow data.
struct Problem {
  ExperimentConfig config;
  Grid1D grid;
  AngularQuadrature quad;
  MediaField media;
  DecompositionGeometry geometry;
  std::vector<LocalSystem> systems;
  BoundaryTrace phi_bdry;
  std::uint64_t fingerprint = 0;
};

Problem make_problem(const ExperimentConfig& cfg);

/// Files written by a command, in write order.
struct CommandOutput {
  std::vector<std::string> files;
};

/// Vanilla Schwarz at tau_ref plus a monolithic direct solve for cross-check;
/// writes the reference field (binary and CSV), history, flux profile and a
/// summary. Throws NonConvergence after writing if tau_ref is not reached.
CommandOutput cmd_reference(const ExperimentConfig& cfg);

/// Compresses every subdomain map and writes maps.lrsm plus the spectra.
CommandOutput cmd_offline(const ExperimentConfig& cfg);

enum class Backend { full, lowrank };

/// Online run with per-iteration trace change and relative error against the
/// (cached) reference. The full backend iterates to tau; the low-rank backend
/// runs online_iters steps from maps.lrsm.
CommandOutput cmd_run(const ExperimentConfig& cfg, Backend backend);

/// Normalized singular values of S_m, S_m^s or P_m from the probed dense matrix.
CommandOutput cmd_spectrum(const ExperimentConfig& cfg, MapKind kind, int m);

/// For each configured rank: offline build, online_iters low-rank steps,
/// relative error; plus the vanilla baseline over the same iterations.
CommandOutput cmd_rank_sweep(const ExperimentConfig& cfg);

/// Velocity-averaged discrepancy between the sigma^delta and sigma* solutions.
CommandOutput cmd_homog_check(const ExperimentConfig& cfg);

/// Reference field for the problem: loaded from the output directory when a
/// file with a matching fingerprint exists, computed and stored otherwise.
PhaseSpaceField obtain_reference(const Problem& problem);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

std::string to_string(Backend b);
std::string to_string(MapKind k);

}  // namespace lrsm
