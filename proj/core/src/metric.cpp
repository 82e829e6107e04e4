#include "dtri/metric.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace dtri {

namespace {

double metric_entry(const std::vector<double>& v, Index id) {
  if (id < 0 || id >= static_cast<Index>(v.size())) return std::numeric_limits<double>::quiet_NaN();
  return v[id];
}

}  // namespace

Index edge_between(const SimplicialComplex& cx, int k, Index id, int a, int b) {
  if (k == 1) return id;
  if (k == 2) return cx.simplex(2, id).faces[3 - a - b];
  return cx.sub_id(id, (1u << a) | (1u << b));
}

double directed_between(const SimplicialComplex& cx, const DualityMetric& m, int k, Index id,
                        int a, int b) {
  if (k == 1) return a == 0 ? metric_entry(m.d_fwd, id) : metric_entry(m.d_rev, id);
  if (k == 2) return directed_local(cx, m, id, a, b);
  const unsigned mask = (1u << a) | (1u << b);
  const Index e = cx.sub_id(id, mask);
  const CornerPerm& perm = cx.sub_perm(id, mask);
  const int pos_a = (a < b) ? perm[0] : perm[1];
  return pos_a == 0 ? metric_entry(m.d_fwd, e) : metric_entry(m.d_rev, e);
}

double directed_local(const SimplicialComplex& cx, const DualityMetric& m, Index tri, int a, int b) {
  const auto& s = cx.simplex(2, tri);
  const int o = 3 - a - b;
  const Index e = s.faces[o];
  const int ua = a - (a > o ? 1 : 0);
  const int pos = s.face_perms[o][ua];
  return pos == 0 ? metric_entry(m.d_fwd, e) : metric_entry(m.d_rev, e);
}

double cm_squared_volume(const std::vector<std::vector<double>>& d2) {
  const int k = static_cast<int>(d2.size()) - 1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k + 2, k + 2);
  for (int i = 0; i <= k; ++i) {
    B(0, i + 1) = 1.0;
    B(i + 1, 0) = 1.0;
    for (int j = 0; j <= k; ++j) B(i + 1, j + 1) = d2[i][j];
  }
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  const double sign = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^(k+1)
  return sign * B.determinant() / (std::pow(2.0, k) * fact * fact);
}

RealizabilityReport validate_euclidean(const SimplicialComplex& cx, const EuclideanMetric& m,
                                       double tol) {
  RealizabilityReport report;
  for (Index e : cx.alive_ids(1)) {
    const double l = metric_entry(m.len, e);
    if (std::isnan(l)) throw MissingLength("no length for edge " + std::to_string(e));
    if (!(l > 0.0)) {
      report.entries.push_back({1, e, l * std::abs(l), false});
      report.pass = false;
    }
  }
  const int n = cx.dimension();
  for (int k = 2; k <= n; ++k) {
    for (Index id : cx.alive_ids(k)) {
      std::vector<std::vector<double>> d2(k + 1, std::vector<double>(k + 1, 0.0));
      double max_len = 0.0;
      for (int a = 0; a <= k; ++a)
        for (int b = a + 1; b <= k; ++b) {
          const double l = metric_entry(m.len, edge_between(cx, k, id, a, b));
          if (std::isnan(l))
            throw MissingLength("no length for an edge of simplex " + std::to_string(id));
          d2[a][b] = d2[b][a] = l * l;
          max_len = std::max(max_len, std::abs(l));
        }
      const double vol2 = cm_squared_volume(d2);
      const double threshold = tol * std::pow(max_len, 2.0 * k);
      const bool ok = vol2 > threshold;
      report.entries.push_back({k, id, vol2, ok});
      if (!ok) report.pass = false;
    }
  }
  return report;
}

CompatibilityReport check_compatibility(const SimplicialComplex& cx, const DualityMetric& m,
                                        double tol) {
  CompatibilityReport report;
  for (Index t : cx.alive_ids(2)) {
    double lhs = 0.0, rhs = 0.0;
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3;
      const double dab = directed_local(cx, m, t, a, b);
      const double dba = directed_local(cx, m, t, b, a);
      if (std::isnan(dab) || std::isnan(dba))
        throw MissingLocalLength("no local length within triangle " + std::to_string(t));
      lhs += dab * dab;
      rhs += dba * dba;
    }
    const double r = lhs - rhs;
    report.entries.push_back({t, r});
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(r));
    if (std::abs(r) > tol) report.pass = false;
  }
  return report;
}

EuclideanMetric induced_lengths(const SimplicialComplex& cx, const ThurstonMetric& m) {
  EuclideanMetric out;
  out.len.assign(cx.table_size(1), std::numeric_limits<double>::quiet_NaN());
  for (Index e : cx.alive_ids(1)) {
    const auto& s = cx.simplex(1, e);
    const double wi = metric_entry(m.w, s.corners[0]);
    const double wj = metric_entry(m.w, s.corners[1]);
    const double c = metric_entry(m.c, e);
    if (std::isnan(wi) || std::isnan(wj) || std::isnan(c))
      throw MissingLength("no Thurston data for edge " + std::to_string(e));
    const double arg = wi + wj - c;
    if (!(arg > 0.0))
      throw ValidationError("Thurston constraint c < w_i + w_j violated at edge " +
                            std::to_string(e));
    out.len[e] = std::sqrt(arg);
  }
  return out;
}

EuclideanMetric induced_lengths(const SimplicialComplex& cx, const DualityMetric& m) {
  EuclideanMetric out;
  out.len.assign(cx.table_size(1), std::numeric_limits<double>::quiet_NaN());
  for (Index e : cx.alive_ids(1)) {
    const double df = metric_entry(m.d_fwd, e), dr = metric_entry(m.d_rev, e);
    if (std::isnan(df) || std::isnan(dr))
      throw MissingLocalLength("no local length for edge " + std::to_string(e));
    const double l = df + dr;
    if (!(l > 0.0))
      throw ValidationError("induced length nonpositive at edge " + std::to_string(e));
    out.len[e] = l;
  }
  return out;
}

ThurstonMetric weighted_to_thurston(const SimplicialComplex& cx, const WeightedMetric& m) {
  ThurstonMetric out;
  out.w = m.w;
  out.c.assign(cx.table_size(1), std::numeric_limits<double>::quiet_NaN());
  for (Index e : cx.alive_ids(1)) {
    const auto& s = cx.simplex(1, e);
    const double l = metric_entry(m.base.len, e);
    if (std::isnan(l)) throw MissingLength("no length for edge " + std::to_string(e));
    out.c[e] = m.w[s.corners[0]] + m.w[s.corners[1]] - l * l;
  }
  return out;
}

WeightedMetric thurston_to_weighted(const SimplicialComplex& cx, const ThurstonMetric& m) {
  WeightedMetric out;
  out.base = induced_lengths(cx, m);
  out.w = m.w;
  return out;
}

DualityMetric weighted_to_duality(const SimplicialComplex& cx, const WeightedMetric& m) {
  DualityMetric out;
  out.d_fwd.assign(cx.table_size(1), std::numeric_limits<double>::quiet_NaN());
  out.d_rev.assign(cx.table_size(1), std::numeric_limits<double>::quiet_NaN());
  for (Index e : cx.alive_ids(1)) {
    const auto& s = cx.simplex(1, e);
    const double l = metric_entry(m.base.len, e);
    if (std::isnan(l)) throw MissingLength("no length for edge " + std::to_string(e));
    const double wi = m.w[s.corners[0]], wj = m.w[s.corners[1]];
    const double df = (l * l + wi - wj) / (2.0 * l);
    out.d_fwd[e] = df;
    out.d_rev[e] = l - df;  // keeps d_fwd + d_rev = l exact
  }
  return out;
}

std::variant<WeightedMetric, LoopObstruction> duality_to_weighted(const SimplicialComplex& cx,
                                                                  const DualityMetric& m,
                                                                  Index base_vertex, double w0,
                                                                  double tol) {
  if (base_vertex < 0 || base_vertex >= cx.vertex_count())
    throw UnknownVertex("no vertex class " + std::to_string(base_vertex));

  const Index nv = cx.vertex_count();
  std::vector<double> w(nv, std::numeric_limits<double>::quiet_NaN());
  std::vector<Index> parent_edge(nv, kInvalid);
  std::vector<Index> parent_vertex(nv, kInvalid);
  std::vector<char> in_tree(cx.table_size(1), 0);

  auto fwd = [&](Index e) {
    const double d = metric_entry(m.d_fwd, e);
    if (std::isnan(d)) throw MissingLocalLength("no local length for edge " + std::to_string(e));
    return d;
  };
  auto rev = [&](Index e) {
    const double d = metric_entry(m.d_rev, e);
    if (std::isnan(d)) throw MissingLocalLength("no local length for edge " + std::to_string(e));
    return d;
  };

  w[base_vertex] = w0;
  std::deque<Index> queue{base_vertex};
  while (!queue.empty()) {
    const Index v = queue.front();
    queue.pop_front();
    for (const Use& u : cx.simplex(0, v).cofaces) {
      const Index e = u.parent;
      if (!cx.alive(1, e)) continue;
      const auto& es = cx.simplex(1, e);
      const Index other = es.corners[0] == v ? es.corners[1] : es.corners[0];
      if (!std::isnan(w[other])) continue;
      const double df = fwd(e), dr = rev(e);
      w[other] = (other == es.corners[1]) ? (dr * dr - df * df + w[v])
                                          : (df * df - dr * dr + w[v]);
      parent_edge[other] = e;
      parent_vertex[other] = v;
      in_tree[e] = 1;
      queue.push_back(other);
    }
  }
  for (Index v = 0; v < nv; ++v)
    if (std::isnan(w[v]) && !cx.simplex(0, v).cofaces.empty())
      throw ValidationError("complex is not connected; weight propagation cannot reach vertex " +
                            std::to_string(v));
  for (Index v = 0; v < nv; ++v)
    if (std::isnan(w[v])) w[v] = w0;  // isolated vertex, any weight works

  Index worst_edge = kInvalid;
  double worst = 0.0;
  for (Index e : cx.alive_ids(1)) {
    if (in_tree[e]) continue;
    const auto& es = cx.simplex(1, e);
    const double df = fwd(e), dr = rev(e);
    const double r = std::abs(dr * dr - df * df + w[es.corners[0]] - w[es.corners[1]]);
    if (r > worst) {
      worst = r;
      worst_edge = e;
    }
  }

  if (worst <= tol) {
    WeightedMetric out;
    out.base = induced_lengths(cx, m);
    out.w = std::move(w);
    return out;
  }

  LoopObstruction ob;
  ob.witness_edge = worst_edge;
  ob.residual = worst;
  ob.cycle_edges.push_back(worst_edge);
  const auto& es = cx.simplex(1, worst_edge);
  auto ancestors = [&](Index v) {
    std::vector<Index> path{v};
    while (parent_vertex[path.back()] != kInvalid) path.push_back(parent_vertex[path.back()]);
    return path;
  };
  std::vector<Index> pa = ancestors(es.corners[1]);
  std::vector<Index> pb = ancestors(es.corners[0]);
  // Trim the common tail so both branches end at the cycle's meeting point.
  while (pa.size() > 1 && pb.size() > 1 && pa[pa.size() - 2] == pb[pb.size() - 2]) {
    pa.pop_back();
    pb.pop_back();
  }
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) ob.cycle_edges.push_back(parent_edge[pa[i]]);
  for (std::size_t i = pb.size() - 1; i > 0; --i) ob.cycle_edges.push_back(parent_edge[pb[i - 1]]);
  return ob;
}

}  // namespace dtri
