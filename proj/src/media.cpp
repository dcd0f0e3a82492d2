#include "lrsm/media.hpp"

#include <cmath>
#include <numbers>

#include "lrsm/errors.hpp"
#include "lrsm/hash.hpp"

namespace lrsm {

double eval_sigma(double x, double delta) {
  using std::numbers::pi;
  return (1.1 + std::cos(4.0 * pi * x)) / (1.1 + std::sin(2.0 * pi * x / delta));
}

double homogenized_sigma(double x) {
  using std::numbers::pi;
  // int_0^1 dy / (a + sin 2 pi y) = 1 / sqrt(a^2 - 1) for a > 1.
  return (1.1 + std::cos(4.0 * pi * x)) / std::sqrt(1.1 * 1.1 - 1.0);
}

std::string to_string(MediaKind kind) {
  switch (kind) {
    case MediaKind::oscillatory: return "oscillatory";
    case MediaKind::homogenized: return "homogenized";
    case MediaKind::table: return "table";
  }
  return "?";
}

MediaKind media_kind_from_string(const std::string& name) {
  if (name == "oscillatory") return MediaKind::oscillatory;
  if (name == "homogenized") return MediaKind::homogenized;
  if (name == "table") return MediaKind::table;
  throw ConfigError("unknown media selector '" + name +
                    "' (expected oscillatory, homogenized or table)");
}

std::uint64_t MediaField::fingerprint() const {
  Fnv1a h;
  h.add_string("media").add_double(epsilon).add_doubles(sigma_nodes);
  return h.value();
}

MediaField make_media(const Grid1D& grid, double epsilon, double delta,
                      MediaKind kind) {
  if (!(epsilon > 0.0)) throw InvalidArgument("make_media: epsilon must be > 0");
  if (!(delta > 0.0)) throw InvalidArgument("make_media: delta must be > 0");
  if (kind == MediaKind::table)
    throw InvalidArgument("make_media: table media needs make_media_from_table");
  MediaField m;
  m.epsilon = epsilon;
  m.delta = delta;
  m.kind = kind;
  m.sigma_nodes.resize(static_cast<std::size_t>(grid.n_nodes()));
  for (int j = 0; j < grid.n_nodes(); ++j) {
    const double x = grid.node(j);
    m.sigma_nodes[static_cast<std::size_t>(j)] =
        kind == MediaKind::oscillatory ? eval_sigma(x, delta) : homogenized_sigma(x);
  }
  return m;
}

MediaField make_media_from_table(const Grid1D& grid, double epsilon,
                                 std::vector<double> sigma_nodes) {
  if (!(epsilon > 0.0)) throw InvalidArgument("make_media: epsilon must be > 0");
  if (static_cast<int>(sigma_nodes.size()) != grid.n_nodes())
    throw InvalidArgument("make_media_from_table: expected " +
                          std::to_string(grid.n_nodes()) + " values, got " +
                          std::to_string(sigma_nodes.size()));
  for (double s : sigma_nodes)
    if (!(s > 0.0) || !std::isfinite(s))
      throw InvalidArgument("make_media_from_table: sigma must be finite and > 0");
  MediaField m;
  m.epsilon = epsilon;
  m.delta = 1.0;
  m.kind = MediaKind::table;
  m.sigma_nodes = std::move(sigma_nodes);
  return m;
}

}  // namespace lrsm
