#include <doctest.h>

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "dtri/complex.hpp"
#include "dtri/fixtures.hpp"

using namespace dtri;

namespace {

Index edge_with_corners(const SimplicialComplex& cx, Index a, Index b) {
  for (Index e : cx.alive_ids(1)) {
    const auto& c = cx.simplex(1, e).corners;
    if ((c[0] == a && c[1] == b) || (c[0] == b && c[1] == a)) return e;
  }
  return kInvalid;
}

int count_edges_with_corners(const SimplicialComplex& cx, Index a, Index b) {
  int n = 0;
  for (Index e : cx.alive_ids(1)) {
    auto c = cx.simplex(1, e).corners;
    std::sort(c.begin(), c.end());
    if (c[0] == std::min(a, b) && c[1] == std::max(a, b)) ++n;
  }
  return n;
}

void check_navigation(const SimplicialComplex& cx) {
  const int m = cx.dimension() + 1;
  for (Index t : cx.alive_ids(cx.dimension())) {
    const auto& top = cx.simplex(cx.dimension(), t);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      const int bits = static_cast<int>(__builtin_popcount(mask));
      if (bits < 2) continue;
      const Index id = cx.sub_id(t, mask);
      const CornerPerm& perm = cx.sub_perm(t, mask);
      const auto& sub = cx.simplex(bits - 1, id);
      int u = 0;
      for (int c = 0; c < m; ++c) {
        if (!(mask & (1u << c))) continue;
        CHECK(sub.corners[perm[u]] == top.corners[c]);
        ++u;
      }
    }
  }
}

}  // namespace

TEST_CASE("tetrahedron boundary: tables, euler characteristic, stars") {
  const SimplicialComplex cx =
      build_complex(std::vector<std::vector<Index>>{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}, 2);
  CHECK(cx.vertex_count() == 4);
  CHECK(cx.count_alive(1) == 6);
  CHECK(cx.count_alive(2) == 4);
  CHECK(cx.euler_characteristic() == 2);
  CHECK(cx.closed());
  CHECK_NOTHROW(cx.validate());
  CHECK(cx.hinges().size() == 6);

  // every vertex pair carries exactly one edge
  std::set<std::pair<Index, Index>> pairs;
  for (Index e : cx.alive_ids(1)) {
    auto c = cx.simplex(1, e).corners;
    std::sort(c.begin(), c.end());
    CHECK(pairs.emplace(c[0], c[1]).second);
  }
  CHECK(pairs.size() == 6);

  // star of a vertex: itself, three edges, three triangles
  const auto star = cx.vertex_star(0);
  int by_dim[3] = {0, 0, 0};
  for (const auto& [k, id] : star) ++by_dim[k];
  CHECK(by_dim[0] == 1);
  CHECK(by_dim[1] == 3);
  CHECK(by_dim[2] == 3);
  CHECK_THROWS_AS((void)cx.vertex_star(4), UnknownVertex);

  check_navigation(cx);
}

TEST_CASE("hinge reports the apexes opposite the shared edge") {
  const SimplicialComplex cx =
      build_complex(std::vector<std::vector<Index>>{{0, 1, 2}, {0, 1, 3}}, 2);
  const Index shared = edge_with_corners(cx, 0, 1);
  REQUIRE(shared != kInvalid);
  CHECK(cx.interior(shared));
  const Hinge h = cx.hinge_of(shared);
  CHECK(((h.apex1 == 2 && h.apex2 == 3) || (h.apex1 == 3 && h.apex2 == 2)));
  CHECK(h.top1 != h.top2);

  const Index rim = edge_with_corners(cx, 0, 2);
  CHECK_FALSE(cx.interior(rim));
  CHECK_THROWS_AS((void)cx.hinge_of(rim), UnknownSimplex);
}

TEST_CASE("flipping a tetrahedron edge yields parallel edges and stays valid") {
  SimplicialComplex cx =
      build_complex(std::vector<std::vector<Index>>{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}, 2);
  const Index e01 = edge_with_corners(cx, 0, 1);
  REQUIRE(e01 != kInvalid);
  const auto rec = cx.flip(e01);

  CHECK_FALSE(cx.alive(1, rec.removed_edge));
  CHECK_FALSE(cx.alive(2, rec.removed_tri1));
  CHECK_FALSE(cx.alive(2, rec.removed_tri2));
  CHECK(cx.alive(1, rec.new_edge));
  CHECK(cx.count_alive(1) == 6);
  CHECK(cx.count_alive(2) == 4);
  CHECK(cx.euler_characteristic() == 2);
  CHECK(cx.closed());
  CHECK_NOTHROW(cx.validate());

  // two distinct edge identifiers now join vertices 2 and 3
  CHECK(count_edges_with_corners(cx, 2, 3) == 2);
  auto nc = cx.simplex(1, rec.new_edge).corners;
  std::sort(nc.begin(), nc.end());
  CHECK(nc == std::vector<Index>{2, 3});

  // the replacement triangles are {2,3,0} and {2,3,1}
  auto t1 = cx.simplex(2, rec.new_tri1).corners;
  auto t2 = cx.simplex(2, rec.new_tri2).corners;
  std::sort(t1.begin(), t1.end());
  std::sort(t2.begin(), t2.end());
  CHECK(t1 == std::vector<Index>{0, 2, 3});
  CHECK(t2 == std::vector<Index>{1, 2, 3});

  check_navigation(cx);
}

TEST_CASE("boundary and self-glued edges refuse to flip") {
  SimplicialComplex tri = build_complex(std::vector<std::vector<Index>>{{0, 1, 2}}, 2);
  CHECK_FALSE(tri.closed());
  CHECK_NOTHROW(tri.validate());
  CHECK_THROWS_AS((void)tri.flip(0), NotFlippable);
  CHECK_THROWS_AS((void)tri.flip(17), UnknownSimplex);
}

TEST_CASE("non-manifold and malformed inputs are rejected") {
  using V = std::vector<std::vector<Index>>;
  CHECK_THROWS_AS((void)build_complex(V{{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}, 2), NonManifold);
  // two triangles pinched at a vertex: the link there is disconnected
  CHECK_THROWS_AS((void)build_complex(V{{0, 1, 2}, {0, 3, 4}}, 2), NonManifold);
  CHECK_THROWS_AS((void)build_complex(V{{0, 1}}, 2), MalformedInput);
  CHECK_THROWS_AS((void)build_complex(V{}, 2), MalformedInput);
  CHECK_THROWS_AS((void)build_complex(V{{0, 0, 1}}, 2), MalformedInput);

  TopSpec bad;
  bad.labels = {0, 1, 2};
  bad.glue = {"a", "-"};  // wrong arity
  CHECK_THROWS_AS((void)build_complex(std::vector<TopSpec>{bad}, 2), MalformedInput);

  TopSpec once;
  once.labels = {0, 1, 2};
  once.glue = {"a", "", ""};
  CHECK_THROWS_AS((void)build_complex(std::vector<TopSpec>{once}, 2), MalformedInput);

  TopSpec t3;
  t3.labels = {0, 1, 2, 3};
  t3.glue = {"a", "a", "", ""};
  CHECK_THROWS_AS((void)build_complex(std::vector<TopSpec>{t3}, 3), MalformedInput);
}

TEST_CASE("two glued triangles make a torus with one vertex class") {
  const MeshData mesh = make_fixture("paper_torus");
  const SimplicialComplex& cx = mesh.complex;
  CHECK(cx.has_explicit_gluing());
  CHECK(cx.label_count() == 4);
  CHECK(cx.vertex_count() == 1);
  CHECK(cx.count_alive(1) == 3);
  CHECK(cx.count_alive(2) == 2);
  CHECK(cx.euler_characteristic() == 0);
  CHECK(cx.closed());
  CHECK_NOTHROW(cx.validate());
  for (Index e : cx.alive_ids(1)) {
    CHECK(cx.edge_tail(e) == 0);
    CHECK(cx.edge_head(e) == 0);
  }
  for (const Hinge& h : cx.hinges()) CHECK(h.top1 != h.top2);
  check_navigation(cx);
}

TEST_CASE("flat torus grid has the right counts") {
  const MeshData mesh = make_fixture("flat_torus_grid", FixtureParams{.k = 3});
  const SimplicialComplex& cx = mesh.complex;
  CHECK(cx.vertex_count() == 9);
  CHECK(cx.count_alive(1) == 27);
  CHECK(cx.count_alive(2) == 18);
  CHECK(cx.euler_characteristic() == 0);
  CHECK(cx.closed());
  CHECK_NOTHROW(cx.validate());
  check_navigation(cx);
}

TEST_CASE("icosahedron boundary is a closed sphere") {
  const MeshData mesh = make_fixture("icosahedron_boundary");
  const SimplicialComplex& cx = mesh.complex;
  CHECK(cx.vertex_count() == 12);
  CHECK(cx.count_alive(1) == 30);
  CHECK(cx.count_alive(2) == 20);
  CHECK(cx.euler_characteristic() == 2);
  CHECK(cx.closed());
  CHECK_NOTHROW(cx.validate());
}

TEST_CASE("solid tetrahedra share triangles correctly") {
  const SimplicialComplex cx =
      build_complex(std::vector<std::vector<Index>>{{0, 1, 2, 3}, {0, 1, 2, 4}}, 3);
  CHECK(cx.vertex_count() == 5);
  CHECK(cx.count_alive(1) == 9);
  CHECK(cx.count_alive(2) == 7);
  CHECK(cx.count_alive(3) == 2);
  CHECK(cx.hinges().size() == 1);
  const Hinge h = cx.hinges()[0];
  CHECK(((h.apex1 == 3 && h.apex2 == 4) || (h.apex1 == 4 && h.apex2 == 3)));
  CHECK_NOTHROW(cx.validate());
  check_navigation(cx);
}

TEST_CASE("flip inside the square reuses the rim") {
  const MeshData mesh = make_fixture("square_hinge");
  SimplicialComplex cx = mesh.complex;
  const Index diag = edge_with_corners(cx, 0, 2);
  REQUIRE(diag != kInvalid);
  REQUIRE(cx.interior(diag));
  const auto rec = cx.flip(diag);
  CHECK(cx.count_alive(1) == 5);
  CHECK(cx.count_alive(2) == 2);
  auto nc = cx.simplex(1, rec.new_edge).corners;
  std::sort(nc.begin(), nc.end());
  CHECK(nc == std::vector<Index>{1, 3});
  CHECK_NOTHROW(cx.validate());
  CHECK_FALSE(cx.closed());
  check_navigation(cx);
}
