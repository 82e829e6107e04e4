#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <vector>

#include "dtri/complex.hpp"
#include "dtri/dual_geometry.hpp"
#include "dtri/metric.hpp"
#include "dtri/types.hpp"

namespace dtri {

// pi_p(x) = |x - p|^2 - w_p
double power_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& p, double w_p);

// Local weights for the columns of a hinge embedding (shared corners, then
// the two apexes), recovered from the duality metric with column 0 gauged to
// weight 0. Well defined on a hinge because it is simply connected.
std::vector<double> hinge_local_weights(const SimplicialComplex& cx, const HingeEmbedding& he,
                                        const DualityMetric& m);

struct RegularityResult {
  double margin = 0.0;  // |*shared| restricted to the hinge (both chain terms)
  double power_margin1 = 0.0;  // power of apex2 against top1's center, minus apex2's weight
  double power_margin2 = 0.0;
  bool regular = true;  // margin > -tol; exact ties count as regular
  bool strict = false;  // margin > tol
};

// Evaluates both the dual-length test and the power test and checks they
// agree in sign outside the +-tol exclusion zone.
RegularityResult is_locally_regular(const SimplicialComplex& cx, const Hinge& h,
                                    const WeightedMetric& m, double tol = 1e-10);
RegularityResult is_locally_regular(const SimplicialComplex& cx, const Hinge& h,
                                    const DualityMetric& m, double tol = 1e-10);

// 2D: the hinge's quadrilateral (shared tail, apex1, shared head, apex2) is
// strictly convex. Angles of exactly pi count as not flippable.
bool is_flippable(const HingeEmbedding& he, double tol = 1e-12);
bool is_flippable(const SimplicialComplex& cx, const Hinge& h, const EuclideanMetric& m,
                  double tol = 1e-12);

struct FlipRecord {
  Index removed_edge = kInvalid;
  Index new_edge = kInvalid;
  Index new_tri1 = kInvalid, new_tri2 = kInvalid;
  double d_new_fwd = 0.0, d_new_rev = 0.0;  // local lengths of the new edge, canonical orientation
  double margin_before = 0.0, margin_after = 0.0;  // |*e| of removed and created edge
  double phi = 0.0;
  double energy_before = 0.0, energy_after = 0.0;  // filled by regularize
};

// Replaces the hinge at `edge` by the opposite diagonal, solving the new
// local lengths from the linear flip system; mutates complex and metric.
FlipRecord flip_edge(SimplicialComplex& cx, DualityMetric& m, Index edge, double tol = 1e-10);

struct EdgePositivityReport {
  bool positive = true;
  std::vector<Index> nonpositive_edges;  // edges with d_fwd <= 0 or d_rev <= 0
  std::vector<Index> flip_violations;    // flippable edges whose flip would create d <= 0
};

EdgePositivityReport is_edge_positive(const SimplicialComplex& cx, const DualityMetric& m);

struct CentralityReport {
  bool central = true;
  std::vector<std::pair<int, Index>> violations;  // (dim, id) of simplices not containing their center
};

// Every simplex of dimension <= m contains its own center (all barycentric
// coordinates > tol).
CentralityReport is_m_central(const DualGeometry& g, int m, double tol = 1e-12);

struct RegularizeOptions {
  double tol = 1e-10;
  long max_flips = 100000;
};

struct RegularizeReport {
  std::vector<FlipRecord> flips;
  std::vector<Index> stalled_edges;  // non-regular, non-flippable (non-edge-positive input only)
  bool saturated = false;            // hit max_flips
  bool edge_positive_input = false;
  double initial_energy = 0.0;
  double final_energy = 0.0;
};

using FlipObserver = std::function<void(const FlipRecord&)>;

// Flips non-regular interior edges (FIFO over suspect edges, seeded in id
// order) until every interior hinge is regular or no progress is possible.
// `f` is the instrumentation function whose Dirichlet energy is logged
// around every flip.
RegularizeReport regularize(SimplicialComplex& cx, DualityMetric& m, const std::vector<double>& f,
                            const RegularizeOptions& opt = {}, const FlipObserver& observer = {});

struct RippaResult {
  double direct = 0.0;      // energy after minus before, from truncated dual lengths
  double factorized = 0.0;  // (f_T'(c) - f_T(c))^2 A_1234^2 Phi
  double phi = 0.0;
  double f_t_c = 0.0, f_tp_c = 0.0;  // interpolated values at the diagonal crossing
};

// Energy change of flipping the hinge, computed both directly and through
// the closed-form factorization. `f` holds values at (shared tail, shared
// head, apex1, apex2).
RippaResult rippa_delta(const SimplicialComplex& cx, const Hinge& h, const DualityMetric& m,
                        const std::array<double, 4>& f);

}  // namespace dtri
