#pragma once

// Reference computations and randomized generators shared by the tests. The
// oracles deliberately avoid the library's own geometry paths.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "dtri/complex.hpp"
#include "dtri/metric.hpp"
#include "dtri/mesh_io.hpp"
#include "dtri/regularity.hpp"

namespace oracle {

inline double heron_area(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  return std::sqrt(s * (s - a) * (s - b) * (s - c));
}

// Squared k-volume from the bordered distance determinant.
inline double cayley_menger(const Eigen::MatrixXd& d2) {
  const int m = static_cast<int>(d2.rows());
  Eigen::MatrixXd B = Eigen::MatrixXd::Ones(m + 1, m + 1);
  B(0, 0) = 0.0;
  B.block(1, 1, m, m) = d2;
  const int k = m - 1;
  double denom = 1.0;
  for (int i = 2; i <= k; ++i) denom *= i;
  const double sign = (k % 2 == 0) ? -1.0 : 1.0;
  return sign * B.determinant() / (std::pow(2.0, k) * denom * denom);
}

inline double tri_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& c) {
  const Eigen::Vector2d u = b - a, v = c - a;
  return 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
}

// Point with equal power |x - p_i|^2 - w_i against all three vertices.
inline Eigen::Vector2d power_center(const std::array<Eigen::Vector2d, 3>& p,
                                    const std::array<double, 3>& w) {
  Eigen::Matrix2d A;
  Eigen::Vector2d b;
  for (int i = 0; i < 2; ++i) {
    A.row(i) = 2.0 * (p[i + 1] - p[0]).transpose();
    b(i) = p[i + 1].squaredNorm() - p[0].squaredNorm() - w[i + 1] + w[0];
  }
  return A.colPivHouseholderQr().solve(b);
}

inline Eigen::Vector2d circumcenter(const std::array<Eigen::Vector2d, 3>& p) {
  return power_center(p, {0.0, 0.0, 0.0});
}

}  // namespace oracle

namespace support {

using dtri::Index;

struct PlanarHinge {
  dtri::SimplicialComplex complex;
  dtri::WeightedMetric metric;
  std::array<Eigen::Vector2d, 4> pts;  // shared tail, shared head, apex above, apex below
  Index shared_edge = dtri::kInvalid;
};

inline PlanarHinge hinge_from_points(const std::array<Eigen::Vector2d, 4>& pts,
                                     const std::array<double, 4>& w) {
  PlanarHinge h;
  h.pts = pts;
  h.complex = dtri::build_complex(std::vector<std::vector<Index>>{{0, 1, 2}, {0, 1, 3}}, 2);
  h.metric.base.len.assign(h.complex.table_size(1), 0.0);
  for (Index e : h.complex.alive_ids(1)) {
    const auto& l = h.complex.simplex(1, e).labels;
    h.metric.base.len[e] = (pts[l[0]] - pts[l[1]]).norm();
    if ((l[0] == 0 && l[1] == 1) || (l[0] == 1 && l[1] == 0)) h.shared_edge = e;
  }
  h.metric.w = {w[0], w[1], w[2], w[3]};
  return h;
}

// Random two-triangle hinge over a horizontal base. With convex_feet both
// apexes project strictly inside the base segment, which makes the hinge
// quadrilateral strictly convex.
inline PlanarHinge random_hinge_2d(std::mt19937_64& rng, bool convex_feet,
                                   double weight_scale = 0.15) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double l = 0.5 + 1.5 * u(rng);
  auto foot = [&] {
    return convex_feet ? l * (0.1 + 0.8 * u(rng)) : l * (-0.4 + 1.8 * u(rng));
  };
  const std::array<Eigen::Vector2d, 4> pts{
      Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(l, 0.0),
      Eigen::Vector2d(foot(), l * (0.08 + 0.9 * u(rng))),
      Eigen::Vector2d(foot(), -l * (0.08 + 0.9 * u(rng)))};
  std::array<double, 4> w{};
  for (double& x : w) x = weight_scale * l * l * (2.0 * u(rng) - 1.0);
  return hinge_from_points(pts, w);
}

struct SolidHinge {
  dtri::SimplicialComplex complex;
  dtri::WeightedMetric metric;
  Index shared_tri = dtri::kInvalid;
};

// Two tetrahedra sharing a triangle, from five random points with the apexes
// on opposite sides of the z = 0 plane.
inline SolidHinge random_hinge_3d(std::mt19937_64& rng, double weight_scale = 0.1) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<Eigen::Vector3d, 5> pts;
  pts[0] = {0.0, 0.0, 0.0};
  pts[1] = {0.8 + 0.8 * u(rng), 0.0, 0.0};
  pts[2] = {u(rng) - 0.2, 0.3 + u(rng), 0.0};
  pts[3] = {u(rng), u(rng) - 0.3, 0.3 + u(rng)};
  pts[4] = {u(rng), u(rng) - 0.3, -(0.3 + u(rng))};
  SolidHinge h;
  h.complex =
      dtri::build_complex(std::vector<std::vector<Index>>{{0, 1, 2, 3}, {0, 1, 2, 4}}, 3);
  h.metric.base.len.assign(h.complex.table_size(1), 0.0);
  double lmax = 0.0;
  for (Index e : h.complex.alive_ids(1)) {
    const auto& l = h.complex.simplex(1, e).labels;
    h.metric.base.len[e] = (pts[l[0]] - pts[l[1]]).norm();
    lmax = std::max(lmax, h.metric.base.len[e]);
  }
  h.metric.w.assign(5, 0.0);
  for (double& x : h.metric.w) x = weight_scale * lmax * lmax * (2.0 * u(rng) - 1.0);
  for (Index f : h.complex.alive_ids(2))
    if (h.complex.interior(f)) h.shared_tri = f;
  return h;
}

// Shrinks the weights until the induced duality structure is edge positive
// (zero weights always are, so this terminates).
inline dtri::DualityMetric edge_positive_duality(const dtri::SimplicialComplex& cx,
                                                 dtri::WeightedMetric& m) {
  for (int i = 0; i < 200; ++i) {
    dtri::DualityMetric d = dtri::weighted_to_duality(cx, m);
    if (dtri::is_edge_positive(cx, d).positive) return d;
    for (double& w : m.w) w *= 0.5;
  }
  throw dtri::Error("edge-positive rescaling did not converge");
}

}  // namespace support
