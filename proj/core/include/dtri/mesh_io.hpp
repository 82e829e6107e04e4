#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtri/complex.hpp"
#include "dtri/metric.hpp"

namespace dtri {

// Text mesh document:
//
//   dtri mesh 1
//   dim 2
//   kind weighted
//   vertices 4
//   simplex 0 1 2
//   simplex 0 1 3 glue g0 g1~ -
//   len 0 1
//   weight 0 0.25
//   f 0 1
//
// The header fixes the dimension, the metric kind (euclidean, weighted,
// thurston, duality) and the number of vertex labels. Each `simplex` line
// lists one top simplex by vertex label; an optional glue block names each
// face, `-` leaving it unglued, equal names identifying two faces (a trailing
// `~` reverses the induced correspondence). Metric lines follow by kind:
// `len e v`, `weight v x`, `c e v`, or `dloc e d_fwd d_rev` where edge ids
// and orientations are the ones the simplex block itself determines (edges
// are stored lower-label-first, parallel copies told apart by their gluing).
// Weight and `f` lines address vertex classes, which coincide with the
// labels in documents without gluing. Blank lines and `#` comments are
// ignored. Values are written with 17 significant digits so round trips are
// exact.
struct MeshData {
  SimplicialComplex complex;
  MetricStructure metric;
  std::optional<std::vector<double>> f;
};

MeshData parse_mesh(const std::string& text);

std::string write_mesh(const SimplicialComplex& cx, const MetricStructure& metric,
                       const std::optional<std::vector<double>>& f = std::nullopt);

inline std::string write_mesh(const MeshData& mesh) {
  return write_mesh(mesh.complex, mesh.metric, mesh.f);
}

}  // namespace dtri
