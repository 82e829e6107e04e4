#include "dtri/complex.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <map>
#include <numeric>

namespace dtri {

namespace {

struct UnionFind {
  std::vector<Index> parent;
  explicit UnionFind(Index size) : parent(size) { std::iota(parent.begin(), parent.end(), 0); }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

struct GlueSide {
  Index top;
  int face;
  bool reversed;
};

CornerPerm identity_perm(int len) {
  CornerPerm p{};
  for (int i = 0; i < len; ++i) p[i] = static_cast<std::int8_t>(i);
  return p;
}

std::vector<Index> induced_labels(const std::vector<Index>& labels, int drop) {
  std::vector<Index> out;
  out.reserve(labels.size() - 1);
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (i != drop) out.push_back(labels[i]);
  return out;
}

}  // namespace

std::vector<Index> SimplicialComplex::alive_ids(int k) const {
  std::vector<Index> out;
  for (Index id = 0; id < table_size(k); ++id)
    if (tables_[k][id].alive) out.push_back(id);
  return out;
}

Index SimplicialComplex::count_alive(int k) const {
  Index c = 0;
  for (const auto& s : tables_.at(k))
    if (s.alive) ++c;
  return c;
}

bool SimplicialComplex::interior(Index shared) const {
  return tables_.at(n_ - 1).at(shared).cofaces.size() == 2;
}

Hinge SimplicialComplex::hinge_of(Index shared) const {
  const Simplex& s = tables_.at(n_ - 1).at(shared);
  if (s.cofaces.size() != 2) throw UnknownSimplex("hinge_of: simplex is not interior");
  Hinge h;
  h.shared = shared;
  h.top1 = s.cofaces[0].parent;
  h.drop1 = s.cofaces[0].drop;
  h.top2 = s.cofaces[1].parent;
  h.drop2 = s.cofaces[1].drop;
  h.apex1 = tables_[n_][h.top1].corners[h.drop1];
  h.apex2 = tables_[n_][h.top2].corners[h.drop2];
  return h;
}

std::vector<Hinge> SimplicialComplex::hinges() const {
  std::vector<Hinge> out;
  for (Index id = 0; id < table_size(n_ - 1); ++id) {
    const Simplex& s = tables_[n_ - 1][id];
    if (s.alive && s.cofaces.size() == 2) out.push_back(hinge_of(id));
  }
  return out;
}

std::vector<std::pair<int, Index>> SimplicialComplex::vertex_star(Index v) const {
  if (v < 0 || v >= vertex_count()) throw UnknownVertex("vertex_star: no vertex class " + std::to_string(v));
  std::vector<std::pair<int, Index>> out;
  out.emplace_back(0, v);
  for (int k = 1; k <= n_; ++k)
    for (Index id = 0; id < table_size(k); ++id) {
      const Simplex& s = tables_[k][id];
      if (!s.alive) continue;
      if (std::find(s.corners.begin(), s.corners.end(), v) != s.corners.end()) out.emplace_back(k, id);
    }
  return out;
}

long SimplicialComplex::euler_characteristic() const {
  long chi = 0;
  for (int k = 0; k <= n_; ++k) chi += (k % 2 == 0 ? 1L : -1L) * count_alive(k);
  return chi;
}

bool SimplicialComplex::closed() const {
  for (const auto& s : tables_[n_ - 1])
    if (s.alive && s.cofaces.size() != 2) return false;
  return true;
}

void SimplicialComplex::check_pseudomanifold() const {
  for (Index id = 0; id < table_size(n_ - 1); ++id) {
    const Simplex& s = tables_[n_ - 1][id];
    if (!s.alive) continue;
    if (s.cofaces.size() > 2)
      throw NonManifold("(n-1)-simplex " + std::to_string(id) + " has " +
                        std::to_string(s.cofaces.size()) + " cofaces");
    if (s.cofaces.empty())
      throw NonManifold("(n-1)-simplex " + std::to_string(id) + " has no cofaces");
  }
}

void SimplicialComplex::check_vertex_links() const {
  if (n_ < 2 || n_ > 3) return;
  const int m = n_ + 1;
  const Index ntop = table_size(n_);
  UnionFind uf(ntop * m);
  auto wedge = [m](Index top, int corner) { return top * m + corner; };

  for (Index sid = 0; sid < table_size(n_ - 1); ++sid) {
    const Simplex& s = tables_[n_ - 1][sid];
    if (!s.alive || s.cofaces.size() != 2) continue;
    const Use &u1 = s.cofaces[0], &u2 = s.cofaces[1];
    const CornerPerm& fp1 = tables_[n_][u1.parent].face_perms[u1.drop];
    const CornerPerm& fp2 = tables_[n_][u2.parent].face_perms[u2.drop];
    for (int p = 0; p < n_; ++p) {
      int c1 = -1, c2 = -1;
      for (int u = 0; u < n_; ++u) {
        if (fp1[u] == p) c1 = (u < u1.drop) ? u : u + 1;
        if (fp2[u] == p) c2 = (u < u2.drop) ? u : u + 1;
      }
      assert(c1 >= 0 && c2 >= 0);
      uf.unite(wedge(u1.parent, c1), wedge(u2.parent, c2));
    }
  }

  std::vector<Index> rep(vertex_count(), kInvalid);
  for (Index t = 0; t < ntop; ++t) {
    if (!tables_[n_][t].alive) continue;
    for (int c = 0; c < m; ++c) {
      const Index v = tables_[n_][t].corners[c];
      const Index r = uf.find(wedge(t, c));
      if (rep[v] == kInvalid)
        rep[v] = r;
      else if (rep[v] != r)
        throw NonManifold("vertex link disconnected at vertex class " + std::to_string(v));
    }
  }
}

void SimplicialComplex::validate() const {
  check_pseudomanifold();
  check_vertex_links();
}

void SimplicialComplex::build_top_tables(Index top) {
  const int m = n_ + 1;
  const unsigned full = (1u << m) - 1u;
  if (static_cast<Index>(top_sub_.size()) <= top) {
    top_sub_.resize(top + 1);
    top_perm_.resize(top + 1);
  }
  auto& sub = top_sub_[top];
  auto& perm = top_perm_[top];
  sub.assign(1u << m, kInvalid);
  perm.assign(1u << m, CornerPerm{});
  sub[full] = top;
  perm[full] = identity_perm(m);

  for (int size = m; size >= 2; --size) {
    for (unsigned mask = 0; mask <= full; ++mask) {
      if (std::popcount(mask) != size || sub[mask] == kInvalid) continue;
      const int k = size - 1;
      const Index id = sub[mask];
      const Simplex& sx = tables_[k][id];
      const CornerPerm& P = perm[mask];
      std::vector<int> bits;
      for (int c = 0; c < m; ++c)
        if (mask & (1u << c)) bits.push_back(c);
      for (int t = 0; t < size; ++t) {
        const unsigned mask2 = mask & ~(1u << bits[t]);
        const int p = P[t];
        const Index fid = sx.faces[p];
        CornerPerm perm2{};
        if (k == 1) {
          perm2[0] = 0;
        } else {
          const CornerPerm& fp = sx.face_perms[p];
          int t2 = 0;
          for (int s2 = 0; s2 < size; ++s2) {
            if (s2 == t) continue;
            const int q = P[s2];
            const int u = q - (q > p ? 1 : 0);
            perm2[t2++] = fp[u];
          }
        }
        if (sub[mask2] == kInvalid) {
          sub[mask2] = fid;
          perm[mask2] = perm2;
        } else {
          assert(sub[mask2] == fid);
          assert(perm[mask2] == perm2);
        }
      }
    }
  }
}

SimplicialComplex build_complex(const std::vector<std::vector<Index>>& tops, int n) {
  std::vector<TopSpec> specs;
  specs.reserve(tops.size());
  for (const auto& t : tops) specs.push_back(TopSpec{t, {}});
  return build_complex(specs, n);
}

SimplicialComplex build_complex(const std::vector<TopSpec>& tops, int n) {
  if (n < 1) throw MalformedInput("dimension must be at least 1");
  if (tops.empty()) throw MalformedInput("no top simplices");

  const int m = n + 1;
  Index label_count = 0;
  bool any_glue = false;
  for (const auto& t : tops) {
    if (static_cast<int>(t.labels.size()) != m)
      throw MalformedInput("top simplex needs " + std::to_string(m) + " vertices");
    if (!t.glue.empty() && static_cast<int>(t.glue.size()) != m)
      throw MalformedInput("glue list needs one entry per face");
    for (Index l : t.labels) {
      if (l < 0) throw MalformedInput("negative vertex index");
      label_count = std::max(label_count, l + 1);
    }
    for (const auto& g : t.glue)
      if (!g.empty()) any_glue = true;
  }
  if (any_glue && n != 2) throw MalformedInput("glued faces are supported in dimension 2 only");

  // Repeated vertices within one simplex are representable only when the edge
  // structure is pinned down by explicit gluings on every face.
  for (const auto& t : tops) {
    std::vector<Index> s = t.labels;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      bool all_glued = !t.glue.empty();
      for (const auto& g : t.glue)
        if (g.empty()) all_glued = false;
      if (!all_glued)
        throw MalformedInput("simplex with repeated vertices requires glue labels on all faces");
    }
  }

  // Collect glue pairings.
  std::map<std::string, std::vector<GlueSide>> glue_map;
  for (Index ti = 0; ti < static_cast<Index>(tops.size()); ++ti) {
    const auto& g = tops[ti].glue;
    for (int f = 0; f < static_cast<int>(g.size()); ++f) {
      if (g[f].empty()) continue;
      std::string name = g[f];
      bool rev = false;
      if (name.back() == '~') {
        rev = true;
        name.pop_back();
      }
      if (name.empty()) throw MalformedInput("empty glue label");
      glue_map[name].push_back(GlueSide{ti, f, rev});
    }
  }
  for (const auto& [name, sides] : glue_map)
    if (sides.size() != 2)
      throw MalformedInput("glue label '" + name + "' used " + std::to_string(sides.size()) +
                           " times (needs exactly 2)");

  // Vertex classes from the gluing identifications.
  UnionFind label_uf(label_count);
  for (const auto& [name, sides] : glue_map) {
    std::vector<Index> a = induced_labels(tops[sides[0].top].labels, sides[0].face);
    std::vector<Index> b = induced_labels(tops[sides[1].top].labels, sides[1].face);
    if (sides[0].reversed) std::reverse(a.begin(), a.end());
    if (sides[1].reversed) std::reverse(b.begin(), b.end());
    for (int i = 0; i < n; ++i) label_uf.unite(a[i], b[i]);
  }

  SimplicialComplex cx;
  cx.n_ = n;
  cx.label_count_ = label_count;
  cx.has_explicit_gluing_ = any_glue;
  cx.label_class_.assign(label_count, kInvalid);
  {
    std::vector<Index> roots;
    for (Index l = 0; l < label_count; ++l)
      if (label_uf.find(l) == l) roots.push_back(l);
    // Roots are minimal labels of their classes (UnionFind keeps the smaller id
    // as root), so ascending root order = ascending representative order.
    for (Index ci = 0; ci < static_cast<Index>(roots.size()); ++ci) cx.class_label_.push_back(roots[ci]);
    std::vector<Index> root_class(label_count, kInvalid);
    for (Index ci = 0; ci < static_cast<Index>(roots.size()); ++ci) root_class[roots[ci]] = ci;
    for (Index l = 0; l < label_count; ++l) cx.label_class_[l] = root_class[label_uf.find(l)];
  }

  cx.tables_.resize(m);
  for (Index v = 0; v < cx.vertex_count(); ++v) {
    SimplicialComplex::Simplex s;
    s.corners = {v};
    s.labels = {cx.class_label_[v]};
    cx.tables_[0].push_back(std::move(s));
  }
  for (const auto& t : tops) {
    SimplicialComplex::Simplex s;
    s.labels = t.labels;
    if (n == 1 && s.labels[0] > s.labels[1]) std::swap(s.labels[0], s.labels[1]);
    for (Index l : s.labels) s.corners.push_back(cx.label_class_[l]);
    if (n == 1) {
      // Top edges are not produced by the face-identification pass below, so
      // they take the edge face convention (face d drops corner d) here.
      s.faces = {s.corners[1], s.corners[0]};
      s.face_perms.assign(m, CornerPerm{});
    } else {
      s.faces.assign(m, kInvalid);
      s.face_perms.assign(m, CornerPerm{});
    }
    cx.tables_[n].push_back(std::move(s));
  }

  // Explicit pairings apply at level n-1; use indices are parent*(k+2)+drop.
  for (int k = n - 1; k >= 1; --k) {
    const int arity = k + 2;  // corners of a (k+1)-simplex
    const Index nparents = cx.table_size(k + 1);
    const Index nuses = nparents * arity;
    UnionFind uf(nuses);
    std::vector<char> is_explicit(nuses, 0);
    std::vector<char> rev_flag(nuses, 0);

    if (k == n - 1) {
      for (const auto& [name, sides] : glue_map) {
        const Index ua = sides[0].top * arity + sides[0].face;
        const Index ub = sides[1].top * arity + sides[1].face;
        uf.unite(ua, ub);
        is_explicit[ua] = is_explicit[ub] = 1;
        rev_flag[ua] = sides[0].reversed;
        rev_flag[ub] = sides[1].reversed;
      }
    }

    std::vector<std::vector<Index>> use_labels(nuses);
    for (Index p = 0; p < nparents; ++p)
      for (int d = 0; d < arity; ++d)
        use_labels[p * arity + d] = induced_labels(cx.tables_[k + 1][p].labels, d);

    std::map<std::vector<Index>, Index> dedup;
    for (Index u = 0; u < nuses; ++u) {
      if (is_explicit[u]) continue;
      std::vector<Index> key = use_labels[u];
      std::sort(key.begin(), key.end());
      if (std::adjacent_find(key.begin(), key.end()) != key.end())
        throw MalformedInput("face with repeated vertices outside glued structure");
      auto [it, inserted] = dedup.try_emplace(std::move(key), u);
      if (!inserted) uf.unite(it->second, u);
    }

    std::vector<std::vector<Index>> members(nuses);
    for (Index u = 0; u < nuses; ++u) members[uf.find(u)].push_back(u);

    for (Index u = 0; u < nuses; ++u) {
      const Index root = uf.find(u);
      if (members[root].empty() || members[root][0] != u) continue;  // created at first member only
      const auto& group = members[root];
      if (k == n - 1 && group.size() > 2)
        throw NonManifold("(n-1)-face shared by " + std::to_string(group.size()) + " simplices");

      std::vector<Index> canonical = use_labels[u];
      const bool explicit_group = is_explicit[u];
      if (explicit_group && rev_flag[u]) std::reverse(canonical.begin(), canonical.end());
      bool flipped = false;
      if (k == 1 && canonical[0] > canonical[1]) {
        std::swap(canonical[0], canonical[1]);
        flipped = true;
      }

      SimplicialComplex::Simplex s;
      s.labels = canonical;
      for (Index l : canonical) s.corners.push_back(cx.label_class_[l]);
      if (k == 1) {
        s.faces = {s.corners[1], s.corners[0]};
        s.face_perms.assign(2, CornerPerm{});
      } else {
        s.faces.assign(k + 1, kInvalid);
        s.face_perms.assign(k + 1, CornerPerm{});
      }
      const Index id = cx.table_size(k);
      cx.tables_[k].push_back(std::move(s));

      for (Index mu : group) {
        const Index parent = mu / arity;
        const int drop = static_cast<int>(mu % arity);
        CornerPerm perm{};
        if (explicit_group) {
          const int len = k + 1;
          for (int i = 0; i < len; ++i) {
            int pos = rev_flag[mu] ? (len - 1 - i) : i;
            if (flipped) pos = len - 1 - pos;
            perm[i] = static_cast<std::int8_t>(pos);
            assert(cx.label_class_[use_labels[mu][i]] ==
                   cx.tables_[k][id].corners[perm[i]]);
          }
        } else {
          for (int i = 0; i <= k; ++i) {
            const auto& cl = cx.tables_[k][id].labels;
            const auto it = std::find(cl.begin(), cl.end(), use_labels[mu][i]);
            assert(it != cl.end());
            perm[i] = static_cast<std::int8_t>(it - cl.begin());
          }
        }
        cx.tables_[k + 1][parent].faces[drop] = id;
        cx.tables_[k + 1][parent].face_perms[drop] = perm;
        cx.tables_[k][id].cofaces.push_back(Use{parent, drop});
      }
    }
  }

  for (Index e = 0; e < cx.table_size(1); ++e) {
    const auto& es = cx.tables_[1][e];
    cx.tables_[0][es.corners[1]].cofaces.push_back(Use{e, 0});
    cx.tables_[0][es.corners[0]].cofaces.push_back(Use{e, 1});
  }

  for (Index t = 0; t < cx.table_size(n); ++t) cx.build_top_tables(t);
  cx.validate();
  return cx;
}

SimplicialComplex::FlipTopology SimplicialComplex::flip(Index edge) {
  if (n_ != 2) throw Error("edge flips require a 2-dimensional complex");
  if (edge < 0 || edge >= table_size(1) || !tables_[1][edge].alive)
    throw UnknownSimplex("flip: no such edge " + std::to_string(edge));
  Simplex& es = tables_[1][edge];
  if (es.cofaces.size() != 2) throw NotFlippable("boundary edge cannot be flipped");
  const Use u1 = es.cofaces[0], u2 = es.cofaces[1];
  if (u1.parent == u2.parent) throw NotFlippable("self-glued hinge cannot be flipped");

  const Index t1 = u1.parent, t2 = u2.parent;
  const int d1 = u1.drop, d2 = u2.drop;
  auto side_corner = [&](Index t, int drop, int canon) {
    const CornerPerm& fp = tables_[2][t].face_perms[drop];
    for (int u = 0; u < 2; ++u)
      if (fp[u] == canon) return (u < drop) ? u : u + 1;
    assert(false);
    return -1;
  };
  const int ci1 = side_corner(t1, d1, 0), cj1 = side_corner(t1, d1, 1);
  const int ci2 = side_corner(t2, d2, 0), cj2 = side_corner(t2, d2, 1);

  const Simplex tri1 = tables_[2][t1];  // copies; surgery mutates the tables
  const Simplex tri2 = tables_[2][t2];
  const Index li = es.labels[0], lj = es.labels[1];
  const Index i = es.corners[0], j = es.corners[1];
  const Index lk = tri1.labels[d1], ll = tri2.labels[d2];
  const Index kcl = tri1.corners[d1], lcl = tri2.corners[d2];

  // Edge use of (a-corner, b-corner) inside triangle t, dropping corner o.
  struct EdgeUse {
    Index id;
    int pa, pb;  // canonical positions of the two corners within the edge
  };
  auto edge_use = [&](const Simplex& tri, int o, int a, int b) {
    const Index id = tri.faces[o];
    const CornerPerm& fp = tri.face_perms[o];
    const int ua = a - (a > o ? 1 : 0), ub = b - (b > o ? 1 : 0);
    return EdgeUse{id, fp[ua], fp[ub]};
  };
  const EdgeUse eki = edge_use(tri1, cj1, d1, ci1);
  const EdgeUse ekj = edge_use(tri1, ci1, d1, cj1);
  const EdgeUse eli = edge_use(tri2, cj2, d2, ci2);
  const EdgeUse elj = edge_use(tri2, ci2, d2, cj2);

  FlipTopology out;
  out.removed_edge = edge;
  out.removed_tri1 = t1;
  out.removed_tri2 = t2;

  // New edge between the apexes, lower label first.
  Simplex fnew;
  const bool swap_f = lk > ll;
  fnew.labels = swap_f ? std::vector<Index>{ll, lk} : std::vector<Index>{lk, ll};
  fnew.corners = swap_f ? std::vector<Index>{lcl, kcl} : std::vector<Index>{kcl, lcl};
  fnew.faces = {fnew.corners[1], fnew.corners[0]};
  fnew.face_perms.assign(2, CornerPerm{});
  const Index f = table_size(1);
  const int fk = swap_f ? 1 : 0, fl = swap_f ? 0 : 1;  // canonical positions of k and l
  tables_[1].push_back(std::move(fnew));

  auto make_tri = [&](const EdgeUse& el_, const EdgeUse& ek_, Index vcl, Index vlb) {
    Simplex tri;
    tri.corners = {kcl, lcl, vcl};
    tri.labels = {lk, ll, vlb};
    tri.faces = {el_.id, ek_.id, f};
    tri.face_perms.assign(3, CornerPerm{});
    tri.face_perms[0] = CornerPerm{static_cast<std::int8_t>(el_.pa), static_cast<std::int8_t>(el_.pb)};
    tri.face_perms[1] = CornerPerm{static_cast<std::int8_t>(ek_.pa), static_cast<std::int8_t>(ek_.pb)};
    tri.face_perms[2] = CornerPerm{static_cast<std::int8_t>(fk), static_cast<std::int8_t>(fl)};
    const Index id = table_size(2);
    tables_[2].push_back(std::move(tri));
    return id;
  };
  const Index ta = make_tri(eli, eki, i, li);  // {k, l, i}
  const Index tb = make_tri(elj, ekj, j, lj);  // {k, l, j}
  out.new_edge = f;
  out.new_tri1 = ta;
  out.new_tri2 = tb;

  // Retire the old pieces and rewire incidence.
  tables_[1][edge].alive = false;
  tables_[1][edge].cofaces.clear();
  tables_[2][t1].alive = false;
  tables_[2][t2].alive = false;

  auto drop_use = [&](std::vector<Use>& uses, Index parent, int drop) {
    for (auto it = uses.begin(); it != uses.end(); ++it)
      if (it->parent == parent && it->drop == drop) {
        uses.erase(it);
        return;
      }
    assert(false);
  };
  drop_use(tables_[1][eki.id].cofaces, t1, cj1);
  drop_use(tables_[1][ekj.id].cofaces, t1, ci1);
  drop_use(tables_[1][eli.id].cofaces, t2, cj2);
  drop_use(tables_[1][elj.id].cofaces, t2, ci2);
  tables_[1][eli.id].cofaces.push_back(Use{ta, 0});
  tables_[1][eki.id].cofaces.push_back(Use{ta, 1});
  tables_[1][elj.id].cofaces.push_back(Use{tb, 0});
  tables_[1][ekj.id].cofaces.push_back(Use{tb, 1});
  tables_[1][f].cofaces.push_back(Use{ta, 2});
  tables_[1][f].cofaces.push_back(Use{tb, 2});

  drop_use(tables_[0][j].cofaces, edge, 0);
  drop_use(tables_[0][i].cofaces, edge, 1);
  tables_[0][tables_[1][f].corners[1]].cofaces.push_back(Use{f, 0});
  tables_[0][tables_[1][f].corners[0]].cofaces.push_back(Use{f, 1});

  build_top_tables(ta);
  build_top_tables(tb);
  return out;
}

}  // namespace dtri
