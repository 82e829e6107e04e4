#include "dtri/fixtures.hpp"

#include <array>
#include <cmath>
#include <random>

namespace dtri {

namespace {

using Point = std::array<double, 3>;

double dist(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Index edge_by_labels(const SimplicialComplex& cx, Index a, Index b) {
  for (Index e : cx.alive_ids(1)) {
    const auto& l = cx.simplex(1, e).labels;
    if ((l[0] == a && l[1] == b) || (l[0] == b && l[1] == a)) return e;
  }
  throw Error("fixture edge lookup failed");
}

MeshData from_points(const std::vector<Point>& pts, const std::vector<std::vector<Index>>& tops,
                     std::vector<double> w) {
  MeshData mesh;
  mesh.complex = build_complex(tops, 2);
  WeightedMetric m;
  m.base.len.assign(mesh.complex.table_size(1), 0.0);
  for (Index e : mesh.complex.alive_ids(1)) {
    const auto& l = mesh.complex.simplex(1, e).labels;
    m.base.len[e] = dist(pts[l[0]], pts[l[1]]);
  }
  m.w = std::move(w);
  mesh.metric = std::move(m);
  return mesh;
}

MeshData unit_length_surface(const std::vector<std::vector<Index>>& tops, Index nv) {
  MeshData mesh;
  mesh.complex = build_complex(tops, 2);
  WeightedMetric m;
  m.base.len.assign(mesh.complex.table_size(1), 1.0);
  m.w.assign(nv, 0.0);
  mesh.metric = std::move(m);
  return mesh;
}

MeshData flat_torus_grid(int k) {
  if (k < 3) throw Error("flat_torus_grid needs k >= 3");
  auto v = [k](int i, int j) { return static_cast<Index>(((i + k) % k) * k + (j + k) % k); };
  std::vector<std::vector<Index>> tops;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      tops.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1)});
      tops.push_back({v(i, j), v(i + 1, j + 1), v(i, j + 1)});
    }
  return unit_length_surface(tops, static_cast<Index>(k) * k);
}

MeshData tetrahedron_boundary() {
  return unit_length_surface({{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}, 4);
}

MeshData icosahedron_boundary() {
  const std::vector<std::vector<Index>> tops{
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},  {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},  {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},  {9, 8, 1}};
  return unit_length_surface(tops, 12);
}

MeshData thin_hinge() {
  const std::vector<Point> pts{{0, 0, 0}, {1, 0, 0}, {0.5, 0.1, 0}, {0.5, -0.1, 0}};
  return from_points(pts, {{0, 1, 2}, {0, 1, 3}}, {0, 0, 0, 0});
}

MeshData square_hinge() {
  const std::vector<Point> pts{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  return from_points(pts, {{0, 1, 2}, {0, 2, 3}}, {0, 0, 0, 0});
}

MeshData paper_torus(double epsilon) {
  // One square, two triangles, opposite sides identified. Faces of
  // simplex (0,1,2): {1,2} the vertical side, {0,2} the diagonal, {0,1} the
  // horizontal side; the horizontal identification reverses orientation.
  std::vector<TopSpec> specs(2);
  specs[0].labels = {0, 1, 2};
  specs[0].glue = {"gv", "gd", "gh"};
  specs[1].labels = {0, 2, 3};
  specs[1].glue = {"gh~", "gv", "gd"};
  MeshData mesh;
  mesh.complex = build_complex(specs, 2);
  DualityMetric m;
  m.d_fwd.assign(mesh.complex.table_size(1), 0.0);
  m.d_rev.assign(mesh.complex.table_size(1), 0.0);
  auto set = [&](Index a, Index b, double fwd, double rev) {
    const Index e = edge_by_labels(mesh.complex, a, b);
    m.d_fwd[e] = fwd;
    m.d_rev[e] = rev;
  };
  set(1, 2, 1.0 - epsilon, epsilon);
  set(0, 2, 0.5, 0.5);
  set(0, 1, epsilon, 1.0 - epsilon);
  mesh.metric = std::move(m);
  return mesh;
}

MeshData random_surface(int vertices, double weight_spread, std::uint64_t seed) {
  if (vertices < 4) throw Error("random_surface needs at least 4 vertices");
  std::mt19937_64 rng(seed);
  const double s = 1.0 / std::sqrt(3.0);
  std::vector<Point> pts{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<std::array<Index, 3>> tris{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  while (static_cast<int>(pts.size()) < vertices) {
    std::uniform_int_distribution<size_t> pick(0, tris.size() - 1);
    const size_t i = pick(rng);
    const auto [a, b, c] = tris[i];
    Point p{};
    for (int d = 0; d < 3; ++d) p[d] = (pts[a][d] + pts[b][d] + pts[c][d]) / 3.0;
    const double nrm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    for (double& x : p) x /= nrm;
    const auto nv = static_cast<Index>(pts.size());
    pts.push_back(p);
    tris[i] = {a, b, nv};
    tris.push_back({b, c, nv});
    tris.push_back({c, a, nv});
  }
  std::vector<std::vector<Index>> tops;
  for (const auto& t : tris) tops.push_back({t[0], t[1], t[2]});
  MeshData mesh = from_points(pts, tops, std::vector<double>(pts.size(), 0.0));
  auto& m = std::get<WeightedMetric>(mesh.metric);
  double lmin = m.base.len[mesh.complex.alive_ids(1).front()];
  for (Index e : mesh.complex.alive_ids(1)) lmin = std::min(lmin, m.base.len[e]);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& w : m.w) w = weight_spread * lmin * lmin * u(rng);
  return mesh;
}

MeshData sphere_packing_s3(std::uint64_t seed) {
  std::vector<std::vector<Index>> tops{
      {0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 3, 4}, {0, 2, 3, 4}, {1, 2, 3, 4}};
  MeshData mesh;
  mesh.complex = build_complex(tops, 3);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  std::array<double, 5> radius{};
  for (double& r : radius) r = u(rng);
  DualityMetric m;
  m.d_fwd.assign(mesh.complex.table_size(1), 0.0);
  m.d_rev.assign(mesh.complex.table_size(1), 0.0);
  for (Index e : mesh.complex.alive_ids(1)) {
    const auto& l = mesh.complex.simplex(1, e).labels;
    m.d_fwd[e] = radius[l[0]];
    m.d_rev[e] = radius[l[1]];
  }
  mesh.metric = std::move(m);
  return mesh;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{
      "flat_torus_grid", "tetrahedron_boundary", "icosahedron_boundary", "thin_hinge",
      "square_hinge",    "paper_torus",          "random_surface",       "sphere_packing_s3"};
  return names;
}

MeshData make_fixture(const std::string& name, const FixtureParams& params, std::uint64_t seed) {
  if (name == "flat_torus_grid") return flat_torus_grid(params.k);
  if (name == "tetrahedron_boundary") return tetrahedron_boundary();
  if (name == "icosahedron_boundary") return icosahedron_boundary();
  if (name == "thin_hinge") return thin_hinge();
  if (name == "square_hinge") return square_hinge();
  if (name == "paper_torus") return paper_torus(params.epsilon);
  if (name == "random_surface") return random_surface(params.vertices, params.weight_spread, seed);
  if (name == "sphere_packing_s3") return sphere_packing_s3(seed);
  throw UnknownFixture("unknown fixture '" + name + "'");
}

}  // namespace dtri
