#include "lrsm/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "lrsm/decomposition.hpp"
#include "lrsm/errors.hpp"

namespace lrsm {

using nlohmann::json;

double parse_real(const std::string& text) {
  auto number = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number: \"" + text + "\"");
    }
    if (used != part.size()) throw ConfigError("not a number: \"" + text + "\"");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return number(text);
  const double num = number(text.substr(0, slash));
  const double den = number(text.substr(slash + 1));
  if (den == 0.0) throw ConfigError("zero denominator in \"" + text + "\"");
  return num / den;
}

namespace {

double real_of(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_real(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError("config key \"" + key + "\": " + e.what());
    }
  }
  throw ConfigError("config key \"" + key + "\" must be a number or a fraction string");
}

int int_of(const json& v, const std::string& key) {
  if (!v.is_number_integer())
    throw ConfigError("config key \"" + key + "\" must be an integer");
  const auto x = v.get<long long>();
  if (x < INT32_MIN || x > INT32_MAX) throw ConfigError("config key \"" + key + "\" is out of range");
  return static_cast<int>(x);
}

std::string string_of(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key \"" + key + "\" must be a string");
  return v.get<std::string>();
}

template <class F>
auto list_of(const json& v, const std::string& key, F each) {
  if (!v.is_array()) throw ConfigError("config key \"" + key + "\" must be an array");
  std::vector<decltype(each(v, key))> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(each(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  require(delta > 0.0 && std::isfinite(delta), "delta must be positive");
  require(m_count >= 1, "m_count must be at least 1");
  require(beta > 0.0 && beta <= 0.5, "beta must lie in (0, 1/2]");
  require(n_cells >= 1, "n_cells must be at least 1");
  require(n_v >= 2 && n_v % 2 == 0, "n_v must be even and at least 2");
  require(rank >= 1 && rank <= n_v, "rank must lie in [1, n_v]");
  require(oversample >= 4, "oversample must be at least 4");
  require(tau > 0.0, "tau must be positive");
  require(tau_ref > 0.0, "tau_ref must be positive");
  require(max_iters >= 1, "max_iters must be at least 1");
  require(online_iters >= 1, "online_iters must be at least 1");
  require(!ranks.empty(), "ranks must not be empty");
  for (int r : ranks) require(r >= 1 && r <= n_v, "ranks entries must lie in [1, n_v]");
  require(!homog_deltas.empty(), "homog_deltas must not be empty");
  const double dx = 1.0 / n_cells;
  for (double d : homog_deltas)
    require(d >= 2.0 * dx, "homog_deltas entry " + std::to_string(d) +
                               " is not resolved by the grid (need delta >= 2 dx)");
  require(homog_epsilon > 0.0, "homog_epsilon must be positive");
  if (media == MediaKind::table) {
    require(static_cast<int>(media_table.size()) == n_cells + 1,
            "media_table must have n_cells + 1 = " + std::to_string(n_cells + 1) + " entries");
    for (double s : media_table) require(s > 0.0, "media_table entries must be positive");
  } else {
    require(media_table.empty(), "media_table is only allowed with media = \"table\"");
  }
  try {
    (void)build_decomposition(Grid1D(n_cells), m_count, beta);
  } catch (const AlignmentError& e) {
    throw ConfigError(std::string("m_count/beta/n_cells: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("m_count/beta/n_cells: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig c;
  using Setter = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"epsilon", [&](const json& v, const std::string& k) { c.epsilon = real_of(v, k); }},
      {"delta", [&](const json& v, const std::string& k) { c.delta = real_of(v, k); }},
      {"m_count", [&](const json& v, const std::string& k) { c.m_count = int_of(v, k); }},
      {"beta", [&](const json& v, const std::string& k) { c.beta = real_of(v, k); }},
      {"n_cells", [&](const json& v, const std::string& k) { c.n_cells = int_of(v, k); }},
      {"n_v", [&](const json& v, const std::string& k) { c.n_v = int_of(v, k); }},
      {"rank", [&](const json& v, const std::string& k) { c.rank = int_of(v, k); }},
      {"oversample", [&](const json& v, const std::string& k) { c.oversample = int_of(v, k); }},
      {"tau", [&](const json& v, const std::string& k) { c.tau = real_of(v, k); }},
      {"tau_ref", [&](const json& v, const std::string& k) { c.tau_ref = real_of(v, k); }},
      {"max_iters", [&](const json& v, const std::string& k) { c.max_iters = int_of(v, k); }},
      {"online_iters", [&](const json& v, const std::string& k) { c.online_iters = int_of(v, k); }},
      {"seed",
       [&](const json& v, const std::string& k) {
         if (!v.is_number_unsigned()) throw ConfigError("config key \"" + k + "\" must be a nonnegative integer");
         c.seed = v.get<std::uint64_t>();
       }},
      {"media",
       [&](const json& v, const std::string& k) { c.media = media_kind_from_string(string_of(v, k)); }},
      {"media_table", [&](const json& v, const std::string& k) { c.media_table = list_of(v, k, real_of); }},
      {"solver",
       [&](const json& v, const std::string& k) {
         const auto s = string_of(v, k);
         if (s == "direct") c.solver = SolverKind::direct;
         else if (s == "gmres") c.solver = SolverKind::gmres;
         else throw ConfigError("config key \"solver\" must be \"direct\" or \"gmres\"");
       }},
      {"output_dir", [&](const json& v, const std::string& k) { c.output_dir = string_of(v, k); }},
      {"ranks", [&](const json& v, const std::string& k) { c.ranks = list_of(v, k, int_of); }},
      {"full_basis",
       [&](const json& v, const std::string& k) {
         if (!v.is_boolean()) throw ConfigError("config key \"" + k + "\" must be true or false");
         c.full_basis = v.get<bool>();
       }},
      {"homog_deltas", [&](const json& v, const std::string& k) { c.homog_deltas = list_of(v, k, real_of); }},
      {"homog_epsilon", [&](const json& v, const std::string& k) { c.homog_epsilon = real_of(v, k); }},
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key \"" + key + "\"");
    it->second(value, key);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_json(const ExperimentConfig& c) {
  json j{{"epsilon", c.epsilon},
         {"delta", c.delta},
         {"m_count", c.m_count},
         {"beta", c.beta},
         {"n_cells", c.n_cells},
         {"n_v", c.n_v},
         {"rank", c.rank},
         {"oversample", c.oversample},
         {"tau", c.tau},
         {"tau_ref", c.tau_ref},
         {"max_iters", c.max_iters},
         {"online_iters", c.online_iters},
         {"seed", c.seed},
         {"media", to_string(c.media)},
         {"solver", c.solver == SolverKind::direct ? "direct" : "gmres"},
         {"output_dir", c.output_dir},
         {"ranks", c.ranks},
         {"full_basis", c.full_basis},
         {"homog_deltas", c.homog_deltas},
         {"homog_epsilon", c.homog_epsilon}};
  if (c.media == MediaKind::table) j["media_table"] = c.media_table;
  return j.dump(2) + "\n";
}

}  // namespace lrsm
