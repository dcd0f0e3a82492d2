#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrsm/grid.hpp"

namespace lrsm {

/// sigma(x) = (1.1 + cos 4 pi x) / (1.1 + sin(2 pi x / delta)).
double eval_sigma(double x, double delta);

/// Period average over the fast variable of eval_sigma:
/// (1.1 + cos 4 pi x) / sqrt(1.1^2 - 1).
double homogenized_sigma(double x);

enum class MediaKind { oscillatory, homogenized, table };

std::string to_string(MediaKind kind);
MediaKind media_kind_from_string(const std::string& name);

/// Scattering coefficient sampled at grid nodes, with the Knudsen number.
struct MediaField {
  double epsilon = 1.0;
  double delta = 1.0;
  MediaKind kind = MediaKind::oscillatory;
  std::vector<double> sigma_nodes;

  double sigma(int j) const { return sigma_nodes[static_cast<std::size_t>(j)]; }
  /// Hash of epsilon and the sampled coefficient bits.
  std::uint64_t fingerprint() const;
};

MediaField make_media(const Grid1D& grid, double epsilon, double delta,
                      MediaKind kind = MediaKind::oscillatory);

/// User-supplied nodal values; must have one strictly positive value per node.
MediaField make_media_from_table(const Grid1D& grid, double epsilon,
                                 std::vector<double> sigma_nodes);

}  // namespace lrsm
