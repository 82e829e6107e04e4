#pragma once

#include <variant>
#include <vector>

#include "dtri/complex.hpp"
#include "dtri/types.hpp"

namespace dtri {

// Metric payloads are indexed by simplex identifier (edge tables keep dead
// slots after flips, so the vectors track table size, not alive count).
// Missing values are NaN and are rejected by the validators.

struct EuclideanMetric {
  std::vector<double> len;  // edge id -> length
};

struct WeightedMetric {
  EuclideanMetric base;
  std::vector<double> w;  // vertex class -> weight (squared sphere radius, any sign)
};

struct ThurstonMetric {
  std::vector<double> w;  // vertex class -> weight
  std::vector<double> c;  // edge id -> inversive parameter, c_ij < w_i + w_j
};

struct DualityMetric {
  std::vector<double> d_fwd;  // edge id -> local length from corners[0]
  std::vector<double> d_rev;  // edge id -> local length from corners[1]

  double length(Index e) const { return d_fwd[e] + d_rev[e]; }
};

using MetricStructure = std::variant<EuclideanMetric, WeightedMetric, ThurstonMetric, DualityMetric>;

// Edge id between corner positions a and b of a k-simplex (k = 1, 2, or the
// complex dimension).
Index edge_between(const SimplicialComplex& cx, int k, Index id, int a, int b);

// Local length directed from corner position `a` to corner position `b` of
// the 2-simplex `tri` (positions in canonical corner order).
double directed_local(const SimplicialComplex& cx, const DualityMetric& m, Index tri, int a, int b);

// Same, for a k-simplex with k = 1, 2, or the complex dimension.
double directed_between(const SimplicialComplex& cx, const DualityMetric& m, int k, Index id,
                        int a, int b);

// Squared volume of a k-simplex from its squared edge lengths, by the
// Cayley-Menger determinant. `d2[i][j]` for corners i,j of the simplex.
double cm_squared_volume(const std::vector<std::vector<double>>& d2);

struct RealizabilityEntry {
  int dim;
  Index id;
  double squared_volume;
  bool ok;
};

struct RealizabilityReport {
  std::vector<RealizabilityEntry> entries;
  bool pass = true;
};

// Checks every simplex of dimension 2..n for positive Cayley-Menger squared
// volume (and every edge for positive length). The threshold for a k-simplex
// is tol * (max incident edge length)^(2k).
RealizabilityReport validate_euclidean(const SimplicialComplex& cx, const EuclideanMetric& m,
                                       double tol = 1e-12);

struct CompatibilityEntry {
  Index triangle;
  double residual;
};

struct CompatibilityReport {
  std::vector<CompatibilityEntry> entries;
  double max_abs_residual = 0.0;
  bool pass = true;
};

// Per-triangle duality residual (d_ij^2 + d_jk^2 + d_ki^2) - (d_ji^2 + d_ik^2 + d_kj^2)
// with (i,j,k) the triangle's canonical corner order.
CompatibilityReport check_compatibility(const SimplicialComplex& cx, const DualityMetric& m,
                                        double tol = 1e-10);

EuclideanMetric induced_lengths(const SimplicialComplex& cx, const ThurstonMetric& m);
EuclideanMetric induced_lengths(const SimplicialComplex& cx, const DualityMetric& m);

ThurstonMetric weighted_to_thurston(const SimplicialComplex& cx, const WeightedMetric& m);
WeightedMetric thurston_to_weighted(const SimplicialComplex& cx, const ThurstonMetric& m);
DualityMetric weighted_to_duality(const SimplicialComplex& cx, const WeightedMetric& m);

// Reported when local lengths cannot come from vertex weights: some cycle
// violates the propagation rule w_head = d_rev^2 - d_fwd^2 + w_tail.
struct LoopObstruction {
  Index witness_edge = kInvalid;  // non-tree edge closing the worst cycle
  double residual = 0.0;
  std::vector<Index> cycle_edges;  // witness edge, then tree path back
};

// Propagates weights over a BFS spanning tree rooted at base_vertex with
// w(base_vertex) = w0, then checks every non-tree edge's closure residual.
std::variant<WeightedMetric, LoopObstruction> duality_to_weighted(const SimplicialComplex& cx,
                                                                  const DualityMetric& m,
                                                                  Index base_vertex = 0,
                                                                  double w0 = 0.0,
                                                                  double tol = 1e-10);

}  // namespace dtri
