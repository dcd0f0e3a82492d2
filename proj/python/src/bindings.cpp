#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <Eigen/SVD>

#include "lrsm/config.hpp"
#include "lrsm/errors.hpp"
#include "lrsm/experiments.hpp"
#include "lrsm/map_cache.hpp"
#include "lrsm/rsvd.hpp"
#include "lrsm/transport.hpp"

namespace py = pybind11;
using namespace lrsm;

namespace {

/// Solution as an (n_nodes, n_v) array, rows ordered by node.
Eigen::MatrixXd as_matrix(const PhaseSpaceField& u) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(u.nodes.size()), u.n_v);
  for (int j = u.nodes.first; j <= u.nodes.last; ++j)
    for (int i = 0; i < u.n_v; ++i) out(j - u.nodes.first, i) = u.at(j, i);
  return out;
}

Eigen::MatrixXd global_solve(int n_cells, int n_v, double epsilon, double delta, const std::string& media) {
  const Grid1D grid(n_cells);
  const auto quad = build_quadrature(n_v);
  const auto m = make_media(grid, epsilon, delta, media_kind_from_string(media));
  return as_matrix(solve_global_direct(grid, m, quad, benchmark_inflow_data(quad)));
}

Eigen::VectorXd map_spectrum(const ExperimentConfig& cfg, const std::string& kind, int m) {
  cfg.validate();
  const MapKind k = kind == "S" ? MapKind::S : kind == "Ss" ? MapKind::Ss : kind == "P" ? MapKind::P
                                                                                       : throw ConfigError("map must be S, Ss or P");
  const Grid1D grid(cfg.n_cells);
  const auto geo = build_decomposition(grid, cfg.m_count, cfg.beta);
  const auto quad = build_quadrature(cfg.n_v);
  const auto media = make_media(grid, cfg.epsilon, cfg.delta, cfg.media);
  const auto sys = assemble_local(geo, m, media, quad);
  Eigen::VectorXd sv = probe_weighted_matrix(sys, geo, m, k).jacobiSvd().singularValues();
  if (sv.size() && sv[0] > 0.0) sv /= sv[0];
  return sv;
}

py::dict reference(const ExperimentConfig& cfg) {
  const Problem p = make_problem(cfg);
  SchwarzOptions o;
  o.tau = cfg.tau_ref;
  o.max_iters = cfg.max_iters;
  const FullSolveBackend full(p.geometry, p.systems);
  const auto r = run_schwarz(full, p.systems, p.geometry, p.phi_bdry, o);
  py::dict d;
  d["field"] = as_matrix(r.solution.global);
  d["history"] = r.state.history;
  d["iterations"] = r.state.t;
  d["converged"] = r.state.converged;
  d["flux"] = flux_profile(r.solution.global, p.quad);
  return d;
}

py::list cache_summary(const std::string& path) {
  const auto cache = load_cache(path);
  py::list out;
  for (const auto& m : cache.maps) {
    py::dict d;
    d["subdomain"] = m.subdomain;
    d["rank"] = m.rank();
    d["numerical_rank"] = m.numerical_rank;
    d["sigma"] = Eigen::VectorXd(m.sigma);
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Low-rank Schwarz solver for the 1D slab radiative transfer equation";

  auto base = py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(mod, "InvalidArgument", PyExc_ValueError);
  py::register_exception<AlignmentError>(mod, "AlignmentError", PyExc_ValueError);
  py::register_exception<NonConvergence>(mod, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<AdjointMismatch>(mod, "AdjointMismatch", PyExc_RuntimeError);
  py::register_exception<StaleMapError>(mod, "StaleMapError", PyExc_RuntimeError);
  py::register_exception<CacheError>(mod, "CacheError", PyExc_OSError);
  (void)base;

  py::class_<ExperimentConfig>(mod, "Config")
      .def(py::init<>())
      .def_static("from_json", &parse_config, py::arg("text"))
      .def_static("load", &load_config, py::arg("path"))
      .def("to_json", [](const ExperimentConfig& c) { return to_json(c); })
      .def("validate", &ExperimentConfig::validate)
      .def_readwrite("epsilon", &ExperimentConfig::epsilon)
      .def_readwrite("delta", &ExperimentConfig::delta)
      .def_readwrite("m_count", &ExperimentConfig::m_count)
      .def_readwrite("beta", &ExperimentConfig::beta)
      .def_readwrite("n_cells", &ExperimentConfig::n_cells)
      .def_readwrite("n_v", &ExperimentConfig::n_v)
      .def_readwrite("rank", &ExperimentConfig::rank)
      .def_readwrite("oversample", &ExperimentConfig::oversample)
      .def_readwrite("tau", &ExperimentConfig::tau)
      .def_readwrite("tau_ref", &ExperimentConfig::tau_ref)
      .def_readwrite("max_iters", &ExperimentConfig::max_iters)
      .def_readwrite("online_iters", &ExperimentConfig::online_iters)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_readwrite("ranks", &ExperimentConfig::ranks)
      .def_readwrite("full_basis", &ExperimentConfig::full_basis)
      .def_readwrite("homog_deltas", &ExperimentConfig::homog_deltas)
      .def_readwrite("homog_epsilon", &ExperimentConfig::homog_epsilon)
      .def_property(
          "media", [](const ExperimentConfig& c) { return to_string(c.media); },
          [](ExperimentConfig& c, const std::string& s) { c.media = media_kind_from_string(s); });

  auto files = [](const CommandOutput& o) { return o.files; };
  mod.def("cmd_reference", [=](const ExperimentConfig& c) { return files(cmd_reference(c)); });
  mod.def("cmd_offline", [=](const ExperimentConfig& c) { return files(cmd_offline(c)); });
  mod.def(
      "cmd_run",
      [=](const ExperimentConfig& c, const std::string& backend) {
        if (backend != "full" && backend != "lowrank") throw ConfigError("backend must be full or lowrank");
        return files(cmd_run(c, backend == "full" ? Backend::full : Backend::lowrank));
      },
      py::arg("config"), py::arg("backend") = "full");
  mod.def(
      "cmd_spectrum",
      [=](const ExperimentConfig& c, const std::string& kind, int m) {
        const MapKind k = kind == "S" ? MapKind::S : kind == "Ss" ? MapKind::Ss : kind == "P" ? MapKind::P
                                                                                            : throw ConfigError("map must be S, Ss or P");
        return files(cmd_spectrum(c, k, m));
      },
      py::arg("config"), py::arg("map"), py::arg("subdomain"));
  mod.def("cmd_rank_sweep", [=](const ExperimentConfig& c) { return files(cmd_rank_sweep(c)); });
  mod.def("cmd_homog_check", [=](const ExperimentConfig& c) { return files(cmd_homog_check(c)); });

  mod.def("quadrature", [](int n_v) {
    const auto q = build_quadrature(n_v);
    return py::make_tuple(q.nodes, q.weights);
  }, py::arg("n_v"), "Midpoint ordinates and weights on [-1, 1].");
  mod.def("sigma", &eval_sigma, py::arg("x"), py::arg("delta"), "Oscillatory scattering coefficient.");
  mod.def("homogenized_sigma", &homogenized_sigma, py::arg("x"));
  mod.def("global_solve", &global_solve, py::arg("n_cells") = 360, py::arg("n_v") = 40,
          py::arg("epsilon") = 1.0 / 81, py::arg("delta") = 1.0 / 81, py::arg("media") = "oscillatory",
          "Monolithic direct solve with the benchmark inflow data; returns (n_nodes, n_v).");
  mod.def("reference", &reference, py::arg("config"),
          "Vanilla Schwarz at tau_ref: field, trace-change history and flux profile.");
  mod.def("map_spectrum", &map_spectrum, py::arg("config"), py::arg("map"), py::arg("subdomain"),
          "Normalized singular values of a probed subdomain map.");
  mod.def(
      "rsvd",
      [](const Eigen::MatrixXd& a, int rank, int oversample, std::uint64_t seed) {
        RsvdConfig cfg;
        cfg.rank = rank;
        cfg.oversample = oversample;
        cfg.seed = seed;
        const auto f = rsvd_matrix(a, cfg);
        return py::make_tuple(f.u, f.sigma, f.v);
      },
      py::arg("a"), py::arg("rank"), py::arg("oversample") = 5, py::arg("seed") = 0,
      "Randomized SVD of a dense matrix: (U, sigma, V).");
  mod.def("cache_summary", &cache_summary, py::arg("path"), "Per-subdomain spectra stored in a map cache.");
}
