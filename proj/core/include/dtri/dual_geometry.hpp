#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "dtri/complex.hpp"
#include "dtri/metric.hpp"
#include "dtri/types.hpp"

namespace dtri {

// Isometric realization of one simplex in R^k: vertex 0 at the origin, edge
// 0-1 along the first axis, each further vertex adding one coordinate with
// positive last component.
struct SimplexEmbedding {
  int dim = 0;
  Index id = kInvalid;
  Eigen::MatrixXd points;  // dim x (dim+1), column per canonical corner
  double orientation = 1.0;
};

SimplexEmbedding embed_simplex(const SimplicialComplex& cx, int k, Index id,
                               const EuclideanMetric& m);

// Two top simplices realized around their shared (n-1)-face in a common
// frame: columns 0..n-1 are the shared face's canonical corners (last
// coordinate 0), column n is apex1 (last coordinate > 0), column n+1 is
// apex2 (< 0).
struct HingeEmbedding {
  Hinge hinge;
  int n = 0;
  Eigen::MatrixXd points;                     // n x (n+2)
  std::array<std::array<int, 4>, 2> top_to_col{};  // [side][top corner position] -> column
};

HingeEmbedding embed_hinge(const SimplicialComplex& cx, const Hinge& h, const EuclideanMetric& m);

// Center of the simplex spanned by the columns of `pts` (full-rank direction
// matrix), from the power equalities |C - p_i|^2 - w_i all equal. Returns the
// center and its weight w_C (the common power value, may be negative).
std::pair<Eigen::VectorXd, double> weighted_center(const Eigen::MatrixXd& pts,
                                                   const Eigen::VectorXd& w);

// Same center from directed local lengths: C lies on the hyperplane through
// p_0 + (dloc(0,i)/l_0i)(p_i - p_0) perpendicular to p_i - p_0 for each i.
// The returned weight is gauged so corner 0 has weight 0.
std::pair<Eigen::VectorXd, double> duality_center(const Eigen::MatrixXd& pts,
                                                  const Eigen::MatrixXd& dloc);

// Signed distance from the center of the sub-simplex spanned by `base_pts`
// to `center_up`, measured perpendicular to the base within the span that
// includes `apex`; positive when on the apex side.
double signed_distance_step(const Eigen::MatrixXd& base_pts, const Eigen::VectorXd& center_base,
                            const Eigen::VectorXd& center_up, const Eigen::VectorXd& apex);

// Assembled per-complex geometry: every top simplex is embedded, centers are
// computed for all of its sub-simplices (indexed by corner-position mask),
// and the chain recursions produce simplex volumes and signed dual volumes.
class DualGeometry {
 public:
  int dimension() const { return n_; }
  const SimplicialComplex& complex() const { return *cx_; }

  const Eigen::MatrixXd& top_points(Index top) const { return top_points_.at(top); }
  const Eigen::VectorXd& center(Index top, unsigned mask) const { return center_.at(top).at(mask); }
  double center_weight(Index top, unsigned mask) const { return center_w_.at(top).at(mask); }

  // d± from the sub-simplex at `mask` to the sub-simplex at mask|1<<c.
  double signed_distance(Index top, unsigned mask, int c) const {
    return sdist_.at(top).at(mask)[c];
  }

  double simplex_volume(int k, Index id) const { return volume_.at(k).at(id); }
  double dual_volume(int k, Index id) const { return dual_volume_.at(k).at(id); }

  friend DualGeometry compute_dual_geometry(const SimplicialComplex& cx, const WeightedMetric& m);
  friend DualGeometry compute_dual_geometry(const SimplicialComplex& cx, const DualityMetric& m);

 private:
  using CenterFn =
      std::function<std::pair<Eigen::VectorXd, double>(Index, unsigned, const Eigen::MatrixXd&)>;
  static DualGeometry assemble(const SimplicialComplex& cx, const EuclideanMetric& len,
                               const CenterFn& centers);

  const SimplicialComplex* cx_ = nullptr;
  int n_ = 0;
  std::vector<Eigen::MatrixXd> top_points_;
  std::vector<std::vector<Eigen::VectorXd>> center_;
  std::vector<std::vector<double>> center_w_;
  std::vector<std::vector<std::array<double, 4>>> sdist_;
  std::vector<std::vector<double>> volume_;       // [k][id]
  std::vector<std::vector<double>> dual_volume_;  // [k][id], signed
};

DualGeometry compute_dual_geometry(const SimplicialComplex& cx, const WeightedMetric& m);
DualGeometry compute_dual_geometry(const SimplicialComplex& cx, const DualityMetric& m);

// Closed-form in-triangle offset of the triangle's center from the center of
// edge (a,b), positive toward the third corner: (d_ac - d_ab cos g_a)/sin g_a
// with g_a the corner angle at a.
double center_offset_2d(const SimplicialComplex& cx, const DualityMetric& m, Index tri, int a,
                        int b, double tol = 1e-12);

struct TotalVolumeReport {
  double sum_simplex = 0.0;
  double sum_dual_vertex = 0.0;
  double difference = 0.0;
  bool boundary = false;
  bool pass = true;
};

TotalVolumeReport total_volume_check(const DualGeometry& g, double tol = 1e-9);

// Worst-case consistency residuals of an assembled geometry: edge-length
// reproduction in the embeddings, the center perpendicularity conditions,
// and agreement of shared-face centers between the two frames of each hinge
// (compared through corner distances and center weights).
struct GeometryDiagnostics {
  double max_length_residual = 0.0;
  double max_perp_residual = 0.0;
  double max_face_center_mismatch = 0.0;
};

GeometryDiagnostics verify_geometry(const DualGeometry& g, const EuclideanMetric& m);

}  // namespace dtri
