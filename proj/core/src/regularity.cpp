#include "dtri/regularity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include "dtri/laplace.hpp"

namespace dtri {

namespace {

// column -> top corner position, per hinge side (only meaningful for the
// columns that side actually touches)
std::array<std::array<int, 6>, 2> column_positions(const HingeEmbedding& he) {
  std::array<std::array<int, 6>, 2> pos_of{};
  for (auto& side : pos_of) side.fill(-1);
  for (int side = 0; side < 2; ++side)
    for (int p = 0; p <= he.n; ++p) pos_of[side][he.top_to_col[side][p]] = p;
  return pos_of;
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

struct PhiParts {
  double phi = 0.0;
  double a123 = 0.0, a124 = 0.0, a134 = 0.0, a234 = 0.0, a1234 = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
  double l12 = 0.0, l34 = 0.0;
};

// Quantities of the flip factorization on a 2D hinge: vertices 1,2 are the
// shared edge, 3,4 the apexes, areas unsigned.
PhiParts phi_parts(const HingeEmbedding& he, const std::vector<double>& w) {
  const Eigen::Vector2d p1 = he.points.col(0), p2 = he.points.col(1);
  const Eigen::Vector2d p3 = he.points.col(2), p4 = he.points.col(3);
  PhiParts out;
  out.a123 = 0.5 * std::abs(cross2(p2 - p1, p3 - p1));
  out.a124 = 0.5 * std::abs(cross2(p2 - p1, p4 - p1));
  out.a134 = 0.5 * std::abs(cross2(p3 - p1, p4 - p1));
  out.a234 = 0.5 * std::abs(cross2(p3 - p2, p4 - p2));
  out.a1234 = out.a123 + out.a124;
  out.l12 = (p2 - p1).norm();
  out.l34 = (p4 - p3).norm();
  const double den = 8.0 * out.a123 * out.a134 * out.a234 * out.a124;
  if (!(std::abs(den) > 0.0)) throw DegenerateHinge("vanishing triangle area in flip hinge");
  out.r1 = out.l12 * out.a134 / out.a1234;
  out.r2 = out.l12 * out.a234 / out.a1234;
  out.r3 = out.l34 * out.a123 / out.a1234;
  out.r4 = out.l34 * out.a124 / out.a1234;
  // The r3r4 - r1r2 term carries A1234 / 2, from
  //   cot g_312 + cot g_412 = (l34^2 A123 A124 - l12^2 A134 A234) / (2 A1234 A123 A124)
  //                         = A1234 (r3 r4 - r1 r2) / (2 A123 A124),
  // which makes a12 = 2 A234 A134 phi exactly (checked against the truncated
  // dual-length energies in the tests).
  out.phi = ((out.r3 * out.r4 - out.r1 * out.r2) * out.a1234 + w[0] * out.a234 +
             w[1] * out.a134 - w[2] * out.a124 - w[3] * out.a123) /
            den;
  return out;
}

struct HingeCenters {
  Eigen::VectorXd c1, c2, c_shared;
  double w1 = 0.0, w2 = 0.0;  // center weights in the same gauge as the apex weights
};

RegularityResult regularity_from_centers(const HingeEmbedding& he, const HingeCenters& hc,
                                         double w_apex1, double w_apex2, double tol) {
  const int n = he.n;
  const Eigen::MatrixXd shared_pts = he.points.leftCols(n);
  const Eigen::VectorXd apex1 = he.points.col(n), apex2 = he.points.col(n + 1);
  RegularityResult r;
  r.margin = signed_distance_step(shared_pts, hc.c_shared, hc.c1, apex1) +
             signed_distance_step(shared_pts, hc.c_shared, hc.c2, apex2);
  r.power_margin1 = (apex2 - hc.c1).squaredNorm() - hc.w1 - w_apex2;
  r.power_margin2 = (apex1 - hc.c2).squaredNorm() - hc.w2 - w_apex1;
  r.regular = r.margin > -tol;
  r.strict = r.margin > tol;
  auto sgn = [tol](double x) { return x > tol ? 1 : (x < -tol ? -1 : 0); };
  const int sm = sgn(r.margin), s1 = sgn(r.power_margin1), s2 = sgn(r.power_margin2);
  if ((sm != 0 && s1 != 0 && sm != s1) || (sm != 0 && s2 != 0 && sm != s2))
    throw Error("regularity cross-validation failed: dual-length and power tests disagree");
  return r;
}

// Dirichlet energy of one embedded triangle with vertex weights, using the
// in-triangle truncated dual lengths.
double triangle_energy(const Eigen::MatrixXd& pts, const Eigen::Vector3d& w,
                       const Eigen::Vector3d& f) {
  const auto [c, cw] = weighted_center(pts, w);
  double acc = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      Eigen::MatrixXd ep(2, 2);
      ep.col(0) = pts.col(a);
      ep.col(1) = pts.col(b);
      Eigen::VectorXd ew(2);
      ew << w(a), w(b);
      const auto [ec, ecw] = weighted_center(ep, ew);
      const double sd = signed_distance_step(ep, ec, c, pts.col(3 - a - b));
      const double l = (pts.col(a) - pts.col(b)).norm();
      acc += 0.5 * (sd / l) * (f(a) - f(b)) * (f(a) - f(b));
    }
  return acc;
}

double complex_energy(const SimplicialComplex& cx, const DualityMetric& m,
                      const std::vector<double>& f) {
  const DualGeometry g = compute_dual_geometry(cx, m);
  return dirichlet_energy(g, induced_lengths(cx, m), f);
}

}  // namespace

double power_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& p, double w_p) {
  return (x - p).squaredNorm() - w_p;
}

std::vector<double> hinge_local_weights(const SimplicialComplex& cx, const HingeEmbedding& he,
                                        const DualityMetric& m) {
  const int n = he.n;
  const auto pos_of = column_positions(he);
  const std::array<Index, 2> tops{he.hinge.top1, he.hinge.top2};
  std::vector<double> w(n + 2, 0.0);
  auto propagate = [&](int side, int col) {
    const int a = pos_of[side][0], b = pos_of[side][col];
    const double dab = directed_between(cx, m, n, tops[side], a, b);
    const double dba = directed_between(cx, m, n, tops[side], b, a);
    w[col] = dba * dba - dab * dab;
  };
  for (int q = 1; q < n; ++q) propagate(0, q);
  propagate(0, n);
  propagate(1, n + 1);
  return w;
}

RegularityResult is_locally_regular(const SimplicialComplex& cx, const Hinge& h,
                                    const WeightedMetric& m, double tol) {
  const int n = cx.dimension();
  const HingeEmbedding he = embed_hinge(cx, h, m.base);
  const auto& shared = cx.simplex(n - 1, h.shared);

  HingeCenters hc;
  const std::array<std::pair<Index, int>, 2> sides{{{h.top1, h.drop1}, {h.top2, h.drop2}}};
  for (int side = 0; side < 2; ++side) {
    const auto [top, drop] = sides[side];
    Eigen::MatrixXd pts(n, n + 1);
    Eigen::VectorXd w(n + 1);
    for (int p = 0; p <= n; ++p) {
      pts.col(p) = he.points.col(he.top_to_col[side][p]);
      w(p) = m.w.at(cx.simplex(n, top).corners[p]);
    }
    auto [c, cw] = weighted_center(pts, w);
    (side == 0 ? hc.c1 : hc.c2) = std::move(c);
    (side == 0 ? hc.w1 : hc.w2) = cw;
  }
  {
    Eigen::MatrixXd pts = he.points.leftCols(n);
    Eigen::VectorXd w(n);
    for (int p = 0; p < n; ++p) w(p) = m.w.at(shared.corners[p]);
    hc.c_shared = weighted_center(pts, w).first;
  }
  return regularity_from_centers(he, hc, m.w.at(h.apex1), m.w.at(h.apex2), tol);
}

RegularityResult is_locally_regular(const SimplicialComplex& cx, const Hinge& h,
                                    const DualityMetric& m, double tol) {
  const int n = cx.dimension();
  const HingeEmbedding he = embed_hinge(cx, h, induced_lengths(cx, m));
  const std::vector<double> wloc = hinge_local_weights(cx, he, m);

  HingeCenters hc;
  const std::array<Index, 2> tops{h.top1, h.top2};
  for (int side = 0; side < 2; ++side) {
    Eigen::MatrixXd pts(n, n + 1);
    Eigen::MatrixXd dloc = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int p = 0; p <= n; ++p) {
      pts.col(p) = he.points.col(he.top_to_col[side][p]);
      for (int q = 0; q <= n; ++q)
        if (p != q) dloc(p, q) = directed_between(cx, m, n, tops[side], p, q);
    }
    Eigen::VectorXd c = duality_center(pts, dloc).first;
    // center weight in the hinge gauge (column 0 has weight 0)
    const double cw = (c - he.points.col(0)).squaredNorm() - wloc[0];
    (side == 0 ? hc.c1 : hc.c2) = std::move(c);
    (side == 0 ? hc.w1 : hc.w2) = cw;
  }
  {
    Eigen::MatrixXd pts = he.points.leftCols(n);
    Eigen::MatrixXd dloc = Eigen::MatrixXd::Zero(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (p != q) dloc(p, q) = directed_between(cx, m, n - 1, h.shared, p, q);
    hc.c_shared = duality_center(pts, dloc).first;
  }
  return regularity_from_centers(he, hc, wloc[n], wloc[n + 1], tol);
}

bool is_flippable(const HingeEmbedding& he, double tol) {
  if (he.n != 2) throw Error("flippability is a 2D predicate");
  const std::array<int, 4> quad{0, 2, 1, 3};  // shared tail, apex1, shared head, apex2
  double scale = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      scale = std::max(scale, (he.points.col(a) - he.points.col(b)).squaredNorm());
  int sign = 0;
  for (int t = 0; t < 4; ++t) {
    const Eigen::Vector2d pa = he.points.col(quad[t]);
    const Eigen::Vector2d pb = he.points.col(quad[(t + 1) % 4]);
    const Eigen::Vector2d pc = he.points.col(quad[(t + 2) % 4]);
    const double cr = cross2(pb - pa, pc - pb);
    if (!(std::abs(cr) > tol * scale)) return false;
    const int s = cr > 0 ? 1 : -1;
    if (sign == 0)
      sign = s;
    else if (s != sign)
      return false;
  }
  return true;
}

bool is_flippable(const SimplicialComplex& cx, const Hinge& h, const EuclideanMetric& m,
                  double tol) {
  return is_flippable(embed_hinge(cx, h, m), tol);
}

FlipRecord flip_edge(SimplicialComplex& cx, DualityMetric& m, Index edge, double tol) {
  if (cx.dimension() != 2) throw Error("edge flips require a 2-dimensional complex");
  if (edge < 0 || edge >= cx.table_size(1) || !cx.alive(1, edge))
    throw UnknownSimplex("flip_edge: no such edge " + std::to_string(edge));
  if (!cx.interior(edge)) throw NotFlippable("boundary edge cannot be flipped");

  const Hinge h = cx.hinge_of(edge);
  const EuclideanMetric len = induced_lengths(cx, m);
  const HingeEmbedding he = embed_hinge(cx, h, len);
  if (!is_flippable(he)) throw NotFlippable("hinge quadrilateral is not strictly convex");

  const RegularityResult before = is_locally_regular(cx, h, m, tol);
  const std::vector<double> wloc = hinge_local_weights(cx, he, m);
  const PhiParts parts = phi_parts(he, wloc);
  const auto pos_of = column_positions(he);

  const double lkl = parts.l34;
  const double dki = directed_between(cx, m, 2, h.top1, h.drop1, pos_of[0][0]);
  const double dik = directed_between(cx, m, 2, h.top1, pos_of[0][0], h.drop1);
  const double dil = directed_between(cx, m, 2, h.top2, pos_of[1][0], h.drop2);
  const double dli = directed_between(cx, m, 2, h.top2, h.drop2, pos_of[1][0]);
  const double diff = (dki * dki + dil * dil - dli * dli - dik * dik) / lkl;
  const double dkl = 0.5 * (lkl + diff);
  const double dlk = lkl - dkl;

  // Realizability of the two replacement triangles before touching anything.
  for (int side = 0; side < 2; ++side) {
    const Eigen::VectorXd ps = he.points.col(side);  // shared tail then head
    const double la = (he.points.col(2) - ps).norm();
    const double lb = (he.points.col(3) - ps).norm();
    std::vector<std::vector<double>> d2{{0.0, lkl * lkl, la * la},
                                        {lkl * lkl, 0.0, lb * lb},
                                        {la * la, lb * lb, 0.0}};
    const double maxl = std::max({lkl, la, lb});
    if (!(cm_squared_volume(d2) > 1e-12 * std::pow(maxl, 4.0)))
      throw DegenerateFlip("flip would create a degenerate triangle");
  }

  const Index label_k = cx.simplex(2, h.top1).labels[h.drop1];
  const Index label_l = cx.simplex(2, h.top2).labels[h.drop2];
  const bool swap = label_k > label_l;

  const SimplicialComplex::FlipTopology topo = cx.flip(edge);
  m.d_fwd.resize(cx.table_size(1), std::numeric_limits<double>::quiet_NaN());
  m.d_rev.resize(cx.table_size(1), std::numeric_limits<double>::quiet_NaN());
  m.d_fwd[topo.new_edge] = swap ? dlk : dkl;
  m.d_rev[topo.new_edge] = swap ? dkl : dlk;

  FlipRecord rec;
  rec.removed_edge = edge;
  rec.new_edge = topo.new_edge;
  rec.new_tri1 = topo.new_tri1;
  rec.new_tri2 = topo.new_tri2;
  rec.d_new_fwd = m.d_fwd[topo.new_edge];
  rec.d_new_rev = m.d_rev[topo.new_edge];
  rec.margin_before = before.margin;
  rec.phi = parts.phi;
  rec.margin_after = is_locally_regular(cx, cx.hinge_of(topo.new_edge), m, tol).margin;
  return rec;
}

EdgePositivityReport is_edge_positive(const SimplicialComplex& cx, const DualityMetric& m) {
  EdgePositivityReport report;
  for (Index e : cx.alive_ids(1)) {
    const double df = m.d_fwd.at(e), dr = m.d_rev.at(e);
    if (!(df > 0.0) || !(dr > 0.0)) report.nonpositive_edges.push_back(e);
  }

  EuclideanMetric len;
  len.len.assign(cx.table_size(1), std::numeric_limits<double>::quiet_NaN());
  for (Index e : cx.alive_ids(1)) len.len[e] = m.d_fwd[e] + m.d_rev[e];

  for (Index e : cx.alive_ids(1)) {
    if (!cx.interior(e)) continue;
    const Hinge h = cx.hinge_of(e);
    HingeEmbedding he;
    try {
      he = embed_hinge(cx, h, len);
    } catch (const Error&) {
      continue;  // not embeddable, no flip to examine
    }
    if (!is_flippable(he)) continue;
    const auto pos_of = column_positions(he);
    const double lkl = (he.points.col(2) - he.points.col(3)).norm();
    const double dki = directed_between(cx, m, 2, h.top1, h.drop1, pos_of[0][0]);
    const double dik = directed_between(cx, m, 2, h.top1, pos_of[0][0], h.drop1);
    const double dil = directed_between(cx, m, 2, h.top2, pos_of[1][0], h.drop2);
    const double dli = directed_between(cx, m, 2, h.top2, h.drop2, pos_of[1][0]);
    const double diff = (dki * dki + dil * dil - dli * dli - dik * dik) / lkl;
    const double dkl = 0.5 * (lkl + diff);
    if (!(dkl > 0.0) || !(lkl - dkl > 0.0)) report.flip_violations.push_back(e);
  }
  report.positive = report.nonpositive_edges.empty() && report.flip_violations.empty();
  return report;
}

CentralityReport is_m_central(const DualGeometry& g, int m, double tol) {
  const SimplicialComplex& cx = g.complex();
  const int n = g.dimension();
  const int mm = n + 1;
  CentralityReport report;
  std::set<std::pair<int, Index>> seen;
  for (Index t : cx.alive_ids(n)) {
    const Eigen::MatrixXd& pts = g.top_points(t);
    for (unsigned mask = 1; mask < (1u << mm); ++mask) {
      const int k = std::popcount(mask) - 1;
      if (k < 1 || k > std::min(m, n)) continue;
      const Index id = cx.sub_id(t, mask);
      if (seen.count({k, id})) continue;
      Eigen::MatrixXd p(n, k + 1);
      int col = 0;
      for (int c = 0; c < mm; ++c)
        if (mask & (1u << c)) p.col(col++) = pts.col(c);
      const Eigen::MatrixXd D = p.rightCols(k).colwise() - p.col(0);
      const Eigen::VectorXd y =
          (D.transpose() * D).llt().solve(D.transpose() * (g.center(t, mask) - p.col(0)));
      bool inside = 1.0 - y.sum() > tol;
      for (int i = 0; i < k; ++i) inside = inside && y(i) > tol;
      seen.insert({k, id});
      if (!inside) {
        report.central = false;
        report.violations.emplace_back(k, id);
      }
    }
  }
  std::sort(report.violations.begin(), report.violations.end());
  return report;
}

RegularizeReport regularize(SimplicialComplex& cx, DualityMetric& m, const std::vector<double>& f,
                            const RegularizeOptions& opt, const FlipObserver& observer) {
  if (cx.dimension() != 2) throw Error("regularize requires a 2-dimensional complex");
  RegularizeReport report;
  report.edge_positive_input = is_edge_positive(cx, m).positive;
  double energy = complex_energy(cx, m, f);
  report.initial_energy = energy;

  std::deque<Index> queue;
  std::vector<char> queued(cx.table_size(1), 0);
  auto enqueue = [&](Index e) {
    if (e < static_cast<Index>(queued.size()) && queued[e]) return;
    if (static_cast<Index>(queued.size()) <= e) queued.resize(e + 1, 0);
    queued[e] = 1;
    queue.push_back(e);
  };
  for (Index e : cx.alive_ids(1)) {
    if (!cx.interior(e)) continue;
    if (!is_locally_regular(cx, cx.hinge_of(e), m, opt.tol).regular) enqueue(e);
  }

  while (!queue.empty()) {
    const Index e = queue.front();
    queue.pop_front();
    queued[e] = 0;
    if (!cx.alive(1, e) || !cx.interior(e)) continue;
    if (is_locally_regular(cx, cx.hinge_of(e), m, opt.tol).regular) continue;
    if (static_cast<long>(report.flips.size()) >= opt.max_flips) {
      report.saturated = true;
      break;
    }
    FlipRecord rec;
    try {
      rec = flip_edge(cx, m, e, opt.tol);
    } catch (const NotFlippable&) {
      if (report.edge_positive_input)
        throw Error("non-regular edge " + std::to_string(e) +
                    " is not flippable on edge-positive input");
      report.stalled_edges.push_back(e);
      continue;
    }
    rec.energy_before = energy;
    energy = complex_energy(cx, m, f);
    rec.energy_after = energy;
    report.flips.push_back(rec);
    if (observer) observer(rec);
    enqueue(rec.new_edge);
    for (Index t : {rec.new_tri1, rec.new_tri2}) {
      enqueue(cx.simplex(2, t).faces[0]);
      enqueue(cx.simplex(2, t).faces[1]);
    }
  }
  report.final_energy = energy;
  return report;
}

RippaResult rippa_delta(const SimplicialComplex& cx, const Hinge& h, const DualityMetric& m,
                        const std::array<double, 4>& f) {
  if (cx.dimension() != 2) throw Error("the flip energy factorization is a 2D computation");
  const HingeEmbedding he = embed_hinge(cx, h, induced_lengths(cx, m));
  const std::vector<double> w = hinge_local_weights(cx, he, m);
  const PhiParts parts = phi_parts(he, w);

  RippaResult out;
  out.phi = parts.phi;
  out.f_t_c = (parts.r1 * f[1] + parts.r2 * f[0]) / parts.l12;
  out.f_tp_c = (parts.r3 * f[3] + parts.r4 * f[2]) / parts.l34;
  const double dc = out.f_tp_c - out.f_t_c;
  out.factorized = dc * dc * parts.a1234 * parts.a1234 * parts.phi;

  auto tri = [&](int a, int b, int c) {
    Eigen::MatrixXd pts(2, 3);
    pts << he.points.col(a), he.points.col(b), he.points.col(c);
    const Eigen::Vector3d wt(w[a], w[b], w[c]);
    const Eigen::Vector3d ft(f[a], f[b], f[c]);
    return triangle_energy(pts, wt, ft);
  };
  const double before = tri(0, 1, 2) + tri(0, 1, 3);
  const double after = tri(0, 2, 3) + tri(1, 2, 3);
  out.direct = after - before;
  return out;
}

}  // namespace dtri
