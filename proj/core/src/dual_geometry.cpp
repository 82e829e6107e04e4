#include "dtri/dual_geometry.hpp"

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <functional>
#include <string>

namespace dtri {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Eigen::MatrixXd pairwise_sq(const SimplicialComplex& cx, int k, Index id,
                            const EuclideanMetric& m) {
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (int a = 0; a <= k; ++a)
    for (int b = a + 1; b <= k; ++b) {
      const Index e = edge_between(cx, k, id, a, b);
      const double l = m.len.at(e);
      d2(a, b) = d2(b, a) = l * l;
    }
  return d2;
}

// Gram-matrix realization: vertex 0 at the origin, Cholesky rows as the
// remaining vertices (lower-triangular frame).
Eigen::MatrixXd embed_from_d2(const Eigen::MatrixXd& d2) {
  const int k = static_cast<int>(d2.rows()) - 1;
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(k, k + 1);
  if (k == 0) return pts;
  Eigen::MatrixXd G(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) G(i, j) = 0.5 * (d2(0, i + 1) + d2(0, j + 1) - d2(i + 1, j + 1));
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw Degenerate("simplex is not realizable with these edge lengths");
  const Eigen::MatrixXd L = llt.matrixL();
  for (int i = 0; i < k; ++i) pts.col(i + 1) = L.row(i).transpose();
  return pts;
}

}  // namespace

SimplexEmbedding embed_simplex(const SimplicialComplex& cx, int k, Index id,
                               const EuclideanMetric& m) {
  SimplexEmbedding out;
  out.dim = k;
  out.id = id;
  out.points = embed_from_d2(pairwise_sq(cx, k, id, m));
  out.orientation = 1.0;
  return out;
}

HingeEmbedding embed_hinge(const SimplicialComplex& cx, const Hinge& h, const EuclideanMetric& m) {
  const int n = cx.dimension();
  if (n < 2) throw Error("hinge embedding requires dimension >= 2");
  HingeEmbedding out;
  out.hinge = h;
  out.n = n;
  out.points = Eigen::MatrixXd::Zero(n, n + 2);

  const Eigen::MatrixXd shared = embed_from_d2(pairwise_sq(cx, n - 1, h.shared, m));
  out.points.block(0, 0, n - 1, n) = shared;  // last coordinate stays 0

  const std::array<std::pair<Index, int>, 2> sides{{{h.top1, h.drop1}, {h.top2, h.drop2}}};
  double scale2 = 0.0;
  for (int side = 0; side < 2; ++side) {
    const auto [top, drop] = sides[side];
    const auto& ts = cx.simplex(n, top);
    const CornerPerm& fp = ts.face_perms[drop];
    std::array<int, 4> col_of_p{};  // shared canonical position -> top corner position
    for (int u = 0; u < n; ++u) {
      const int c = (u < drop) ? u : u + 1;
      col_of_p[fp[u]] = c;
      out.top_to_col[side][c] = fp[u];
    }
    out.top_to_col[side][drop] = n + side;

    Eigen::VectorXd l2(n);
    for (int p = 0; p < n; ++p) {
      const Index e = edge_between(cx, n, top, drop, col_of_p[p]);
      const double l = m.len.at(e);
      l2(p) = l * l;
      scale2 = std::max(scale2, l * l);
    }

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n - 1);
    if (n >= 2) {
      Eigen::MatrixXd A(n - 1, n - 1);
      Eigen::VectorXd b(n - 1);
      const Eigen::VectorXd q0 = shared.col(0);
      for (int p = 1; p < n; ++p) {
        A.row(p - 1) = 2.0 * (shared.col(p) - q0).transpose();
        b(p - 1) = shared.col(p).squaredNorm() - q0.squaredNorm() - l2(p) + l2(0);
      }
      if (n == 2)
        y(0) = b(0) / A(0, 0);
      else
        y = A.partialPivLu().solve(b);
    }
    const double h2 = l2(0) - (y - shared.col(0)).squaredNorm();
    if (!(h2 > 1e-12 * scale2))
      throw DegenerateHinge("apex collapses onto the shared face's span");
    Eigen::VectorXd apex(n);
    apex.head(n - 1) = y;
    apex(n - 1) = (side == 0) ? std::sqrt(h2) : -std::sqrt(h2);
    out.points.col(n + side) = apex;
  }
  return out;
}

std::pair<Eigen::VectorXd, double> weighted_center(const Eigen::MatrixXd& pts,
                                                   const Eigen::VectorXd& w) {
  const int k = static_cast<int>(pts.cols()) - 1;
  if (k == 0) return {pts.col(0), -w(0)};
  const Eigen::MatrixXd D = pts.rightCols(k).colwise() - pts.col(0);
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < k; ++i) rhs(i) = 0.5 * (D.col(i).squaredNorm() - w(i + 1) + w(0));
  Eigen::LLT<Eigen::MatrixXd> llt(D.transpose() * D);
  if (llt.info() != Eigen::Success) throw Degenerate("center solve on a degenerate simplex");
  const Eigen::VectorXd y = llt.solve(rhs);
  const Eigen::VectorXd c = pts.col(0) + D * y;
  return {c, (c - pts.col(0)).squaredNorm() - w(0)};
}

std::pair<Eigen::VectorXd, double> duality_center(const Eigen::MatrixXd& pts,
                                                  const Eigen::MatrixXd& dloc) {
  const int k = static_cast<int>(pts.cols()) - 1;
  if (k == 0) return {pts.col(0), 0.0};
  const Eigen::MatrixXd D = pts.rightCols(k).colwise() - pts.col(0);
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < k; ++i) {
    const double l = dloc(0, i + 1) + dloc(i + 1, 0);
    rhs(i) = (dloc(0, i + 1) / l) * D.col(i).squaredNorm();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(D.transpose() * D);
  if (llt.info() != Eigen::Success) throw Degenerate("center solve on a degenerate simplex");
  const Eigen::VectorXd y = llt.solve(rhs);
  const Eigen::VectorXd c = pts.col(0) + D * y;
  return {c, (c - pts.col(0)).squaredNorm()};
}

double signed_distance_step(const Eigen::MatrixXd& base_pts, const Eigen::VectorXd& center_base,
                            const Eigen::VectorXd& center_up, const Eigen::VectorXd& apex) {
  const int k = static_cast<int>(base_pts.cols()) - 1;
  Eigen::VectorXd nu = apex - center_base;
  if (k > 0) {
    const Eigen::MatrixXd D = base_pts.rightCols(k).colwise() - base_pts.col(0);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(D);
    const Eigen::MatrixXd Q =
        qr.householderQ() * Eigen::MatrixXd::Identity(base_pts.rows(), k);
    nu -= Q * (Q.transpose() * nu);
  }
  const double nn = nu.squaredNorm();
  if (!(nn > 0.0)) throw Degenerate("apex lies in the base simplex's span");
  const double lambda = (center_up - center_base).dot(nu) / nn;
  return lambda * std::sqrt(nn);
}

DualGeometry DualGeometry::assemble(const SimplicialComplex& cx, const EuclideanMetric& len,
                                    const CenterFn& center_of) {
  const int n = cx.dimension();
  if (n < 2) throw Error("dual geometry needs dimension >= 2");
  const int m = n + 1;
  const unsigned full = (1u << m) - 1u;

  DualGeometry g;
  g.cx_ = &cx;
  g.n_ = n;
  g.top_points_.resize(cx.table_size(n));
  g.center_.resize(cx.table_size(n));
  g.center_w_.resize(cx.table_size(n));
  g.sdist_.resize(cx.table_size(n));
  g.volume_.resize(n + 1);
  g.dual_volume_.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    g.volume_[k].assign(cx.table_size(k), 0.0);
    g.dual_volume_[k].assign(cx.table_size(k), 0.0);
  }

  std::vector<int> bits_of(full + 1, 0);
  for (unsigned mask = 1; mask <= full; ++mask) bits_of[mask] = std::popcount(mask);

  for (Index t : cx.alive_ids(n)) {
    const Eigen::MatrixXd pts = embed_from_d2(pairwise_sq(cx, n, t, len));
    g.top_points_[t] = pts;
    auto& centers = g.center_[t];
    auto& weights = g.center_w_[t];
    auto& sd = g.sdist_[t];
    centers.assign(full + 1, Eigen::VectorXd());
    weights.assign(full + 1, 0.0);
    sd.assign(full + 1, {0.0, 0.0, 0.0, 0.0});

    auto mask_points = [&](unsigned mask) {
      Eigen::MatrixXd p(n, bits_of[mask]);
      int col = 0;
      for (int c = 0; c < m; ++c)
        if (mask & (1u << c)) p.col(col++) = pts.col(c);
      return p;
    };

    for (unsigned mask = 1; mask <= full; ++mask) {
      auto [c, w] = center_of(t, mask, mask_points(mask));
      centers[mask] = std::move(c);
      weights[mask] = w;
    }

    for (unsigned mask = 1; mask <= full; ++mask)
      for (int c = 0; c < m; ++c) {
        if (mask & (1u << c)) continue;
        sd[mask][c] = signed_distance_step(mask_points(mask), centers[mask],
                                           centers[mask | (1u << c)], pts.col(c));
      }

    // Chain recursions over the mask lattice. up(mask) sums products of
    // signed distances along flags from mask to the full simplex; down(mask)
    // along flags from the vertices up to mask.
    std::vector<double> up(full + 1, 0.0), down(full + 1, 0.0);
    up[full] = 1.0;
    for (unsigned mask = full - 1; mask >= 1; --mask) {
      if (bits_of[mask] == 0) continue;
      double acc = 0.0;
      for (int c = 0; c < m; ++c) {
        if (mask & (1u << c)) continue;
        acc += sd[mask][c] * up[mask | (1u << c)];
      }
      up[mask] = acc;
    }
    for (unsigned mask = 1; mask <= full; ++mask) {
      if (bits_of[mask] == 1) {
        down[mask] = 1.0;
        continue;
      }
      double acc = 0.0;
      for (int c = 0; c < m; ++c) {
        if (!(mask & (1u << c))) continue;
        acc += sd[mask & ~(1u << c)][c] * down[mask & ~(1u << c)];
      }
      down[mask] = acc;
    }

    for (unsigned mask = 1; mask <= full; ++mask) {
      const int k = bits_of[mask] - 1;
      const Index id = cx.sub_id(t, mask);
      g.dual_volume_[k][id] += up[mask];
      g.volume_[k][id] = down[mask] / factorial(k);
    }
  }

  for (int k = 0; k <= n; ++k)
    for (double& v : g.dual_volume_[k]) v /= factorial(n - k);
  return g;
}

DualGeometry compute_dual_geometry(const SimplicialComplex& cx, const WeightedMetric& m) {
  const int mm = cx.dimension() + 1;
  DualGeometry::CenterFn fn = [&cx, &m, mm](Index top, unsigned mask, const Eigen::MatrixXd& pts) {
    Eigen::VectorXd w(pts.cols());
    int col = 0;
    for (int c = 0; c < mm; ++c)
      if (mask & (1u << c)) w(col++) = m.w.at(cx.simplex(cx.dimension(), top).corners[c]);
    return weighted_center(pts, w);
  };
  return DualGeometry::assemble(cx, m.base, fn);
}

DualGeometry compute_dual_geometry(const SimplicialComplex& cx, const DualityMetric& m) {
  const EuclideanMetric len = induced_lengths(cx, m);
  const int n = cx.dimension();
  const int mm = n + 1;
  DualGeometry::CenterFn fn = [&cx, &m, n, mm](Index top, unsigned mask,
                                               const Eigen::MatrixXd& pts) {
    std::vector<int> pos;
    for (int c = 0; c < mm; ++c)
      if (mask & (1u << c)) pos.push_back(c);
    Eigen::MatrixXd dloc = Eigen::MatrixXd::Zero(pos.size(), pos.size());
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = 0; b < pos.size(); ++b)
        if (a != b) dloc(a, b) = directed_between(cx, m, n, top, pos[a], pos[b]);
    return duality_center(pts, dloc);
  };
  return DualGeometry::assemble(cx, len, fn);
}

double center_offset_2d(const SimplicialComplex& cx, const DualityMetric& m, Index tri, int a,
                        int b, double tol) {
  const int o = 3 - a - b;
  const double dab = directed_local(cx, m, tri, a, b), dba = directed_local(cx, m, tri, b, a);
  const double dao = directed_local(cx, m, tri, a, o), doa = directed_local(cx, m, tri, o, a);
  const double dbo = directed_local(cx, m, tri, b, o), dob = directed_local(cx, m, tri, o, b);
  const double lab = dab + dba, lao = dao + doa, lbo = dbo + dob;
  const double cosg = (lab * lab + lao * lao - lbo * lbo) / (2.0 * lab * lao);
  const double sin2 = 1.0 - cosg * cosg;
  if (!(sin2 > tol * tol))
    throw DegenerateAngle("flat corner angle in triangle " + std::to_string(tri));
  return (dao - dab * cosg) / std::sqrt(sin2);
}

TotalVolumeReport total_volume_check(const DualGeometry& g, double tol) {
  const SimplicialComplex& cx = g.complex();
  const int n = g.dimension();
  TotalVolumeReport r;
  for (Index t : cx.alive_ids(n)) r.sum_simplex += g.simplex_volume(n, t);
  for (Index v : cx.alive_ids(0)) r.sum_dual_vertex += g.dual_volume(0, v);
  r.difference = r.sum_simplex - r.sum_dual_vertex;
  r.boundary = !cx.closed();
  r.pass = std::abs(r.difference) <= tol * std::abs(r.sum_simplex);
  return r;
}

GeometryDiagnostics verify_geometry(const DualGeometry& g, const EuclideanMetric& m) {
  const SimplicialComplex& cx = g.complex();
  const int n = g.dimension();
  const int mm = n + 1;
  GeometryDiagnostics diag;

  for (Index t : cx.alive_ids(n)) {
    const Eigen::MatrixXd& pts = g.top_points(t);
    for (int a = 0; a < mm; ++a)
      for (int b = a + 1; b < mm; ++b) {
        const double l = m.len.at(edge_between(cx, n, t, a, b));
        const double got = (pts.col(a) - pts.col(b)).norm();
        diag.max_length_residual = std::max(diag.max_length_residual, std::abs(got - l) / l);
      }
    const unsigned full = (1u << mm) - 1u;
    for (unsigned mask = 1; mask <= full; ++mask) {
      if (std::popcount(mask) < 2) continue;
      const Eigen::VectorXd& c = g.center(t, mask);
      for (int a = 0; a < mm; ++a)
        for (int b = a + 1; b < mm; ++b) {
          if (!(mask & (1u << a)) || !(mask & (1u << b))) continue;
          const unsigned em = (1u << a) | (1u << b);
          const Eigen::VectorXd& ec = g.center(t, em);
          const double lab = (pts.col(a) - pts.col(b)).norm();
          const double resid = std::abs((c - ec).dot(pts.col(b) - pts.col(a))) / (lab * lab);
          diag.max_perp_residual = std::max(diag.max_perp_residual, resid);
        }
    }
  }

  for (const Hinge& h : cx.hinges()) {
    const unsigned full = (1u << mm) - 1u;
    const unsigned m1 = full & ~(1u << h.drop1);
    const unsigned m2 = full & ~(1u << h.drop2);
    const Eigen::VectorXd& c1 = g.center(h.top1, m1);
    const Eigen::VectorXd& c2 = g.center(h.top2, m2);
    const CornerPerm& fp1 = cx.simplex(n, h.top1).face_perms[h.drop1];
    const CornerPerm& fp2 = cx.simplex(n, h.top2).face_perms[h.drop2];
    std::array<int, 4> col1{}, col2{};  // shared canonical position -> top corner position
    for (int u = 0; u < n; ++u) {
      col1[fp1[u]] = (u < h.drop1) ? u : u + 1;
      col2[fp2[u]] = (u < h.drop2) ? u : u + 1;
    }
    double scale = 0.0;
    for (int p = 0; p < n; ++p)
      scale = std::max(scale, (g.top_points(h.top1).col(col1[p]) - c1).norm());
    for (int p = 0; p < n; ++p) {
      const double r1 = (g.top_points(h.top1).col(col1[p]) - c1).norm();
      const double r2 = (g.top_points(h.top2).col(col2[p]) - c2).norm();
      diag.max_face_center_mismatch =
          std::max(diag.max_face_center_mismatch, std::abs(r1 - r2) / std::max(scale, 1e-300));
    }
  }
  return diag;
}

}  // namespace dtri
