#include "dtri/mesh_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace dtri {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void fail(int line, const std::string& msg) { throw ParseError(line, msg); }

long to_int(const std::string& s, int line, const char* what) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || errno != 0 || end != s.c_str() + s.size())
    fail(line, std::string("expected an integer ") + what + ", got '" + s + "'");
  return v;
}

double to_double(const std::string& s, int line, const char* what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || errno != 0 || end != s.c_str() + s.size())
    fail(line, std::string("expected a number ") + what + ", got '" + s + "'");
  if (!std::isfinite(v)) fail(line, std::string("non-finite ") + what);
  return v;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Line {
  std::vector<std::string> words;
  int no = 0;
};

struct PendingValue {
  Index id = kInvalid;
  double a = 0.0, b = 0.0;
  int line = 0;
};

void store_edge_value(std::vector<double>& slot, const PendingValue& p,
                      const SimplicialComplex& cx, const char* what) {
  if (p.id < 0 || p.id >= cx.table_size(1) || !cx.alive(1, p.id))
    fail(p.line, std::string("unknown edge ") + std::to_string(p.id) + " in " + what + " line");
  if (!std::isnan(slot[p.id]))
    fail(p.line, std::string("duplicate ") + what + " line for edge " + std::to_string(p.id));
  slot[p.id] = p.a;
}

void store_vertex_value(std::vector<double>& slot, const PendingValue& p,
                        const SimplicialComplex& cx, const char* what) {
  if (p.id < 0 || p.id >= cx.vertex_count())
    fail(p.line, std::string("unknown vertex ") + std::to_string(p.id) + " in " + what + " line");
  if (!std::isnan(slot[p.id]))
    fail(p.line, std::string("duplicate ") + what + " line for vertex " + std::to_string(p.id));
  slot[p.id] = p.a;
}

void require_edges_covered(const SimplicialComplex& cx, const std::vector<double>& v,
                           const char* what) {
  for (Index e : cx.alive_ids(1))
    if (std::isnan(v[e]))
      throw ValidationError(std::string("edge ") + std::to_string(e) + " has no " + what +
                            " entry");
}

void require_vertices_covered(const SimplicialComplex& cx, const std::vector<double>& v,
                              const char* what) {
  for (Index i = 0; i < cx.vertex_count(); ++i)
    if (std::isnan(v[i]))
      throw ValidationError(std::string("vertex ") + std::to_string(i) + " has no " + what +
                            " entry");
}

void validate_lengths(const SimplicialComplex& cx, const EuclideanMetric& m) {
  const RealizabilityReport report = validate_euclidean(cx, m);
  if (!report.pass)
    for (const auto& entry : report.entries)
      if (!entry.ok)
        throw ValidationError("simplex " + std::to_string(entry.id) + " of dimension " +
                              std::to_string(entry.dim) + " is not realizable");
}

}  // namespace

MeshData parse_mesh(const std::string& text) {
  std::vector<Line> lines;
  {
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
      std::istringstream ls(raw);
      Line l;
      l.no = no;
      std::string w;
      while (ls >> w) l.words.push_back(std::move(w));
      if (!l.words.empty()) lines.push_back(std::move(l));
    }
  }
  const int eof_line = lines.empty() ? 1 : lines.back().no;
  auto header = [&](size_t i, const char* what) -> const Line& {
    if (i >= lines.size()) fail(eof_line, std::string("unexpected end of document, expected ") + what);
    return lines[i];
  };

  {
    const Line& l = header(0, "'dtri mesh 1'");
    if (l.words != std::vector<std::string>{"dtri", "mesh", "1"})
      fail(l.no, "expected header 'dtri mesh 1'");
  }
  int n = 0;
  {
    const Line& l = header(1, "'dim <n>'");
    if (l.words.size() != 2 || l.words[0] != "dim") fail(l.no, "expected 'dim <n>'");
    n = static_cast<int>(to_int(l.words[1], l.no, "dimension"));
    if (n < 2 || n > 3) fail(l.no, "unsupported dimension " + std::to_string(n));
  }
  std::string kind;
  {
    const Line& l = header(2, "'kind <kind>'");
    if (l.words.size() != 2 || l.words[0] != "kind") fail(l.no, "expected 'kind <kind>'");
    kind = l.words[1];
    if (kind != "euclidean" && kind != "weighted" && kind != "thurston" && kind != "duality")
      fail(l.no, "unknown metric kind '" + kind + "'");
  }
  long declared_vertices = 0;
  {
    const Line& l = header(3, "'vertices <count>'");
    if (l.words.size() != 2 || l.words[0] != "vertices") fail(l.no, "expected 'vertices <count>'");
    declared_vertices = to_int(l.words[1], l.no, "vertex count");
    if (declared_vertices < 1) fail(l.no, "vertex count must be positive");
  }

  std::vector<TopSpec> specs;
  std::vector<PendingValue> len_lines, weight_lines, c_lines, dloc_lines, f_lines;
  for (size_t i = 4; i < lines.size(); ++i) {
    const Line& l = lines[i];
    const std::string& key = l.words[0];
    if (key == "simplex") {
      TopSpec spec;
      size_t w = 1;
      for (int c = 0; c <= n; ++c, ++w) {
        if (w >= l.words.size()) fail(l.no, "simplex line needs " + std::to_string(n + 1) + " vertices");
        const long v = to_int(l.words[w], l.no, "vertex label");
        if (v < 0 || v >= declared_vertices)
          fail(l.no, "vertex label " + std::to_string(v) + " out of range");
        spec.labels.push_back(static_cast<Index>(v));
      }
      if (w < l.words.size()) {
        if (l.words[w] != "glue") fail(l.no, "unexpected token '" + l.words[w] + "' after simplex");
        ++w;
        for (int c = 0; c <= n; ++c, ++w) {
          if (w >= l.words.size()) fail(l.no, "glue block needs " + std::to_string(n + 1) + " names");
          spec.glue.push_back(l.words[w] == "-" ? std::string() : l.words[w]);
        }
      }
      if (w != l.words.size()) fail(l.no, "trailing tokens on simplex line");
      specs.push_back(std::move(spec));
      continue;
    }

    PendingValue p;
    p.line = l.no;
    auto one_value = [&](std::vector<PendingValue>& sink, const char* what) {
      if (l.words.size() != 3) fail(l.no, std::string("expected '") + key + " <id> <value>'");
      p.id = static_cast<Index>(to_int(l.words[1], l.no, "identifier"));
      p.a = to_double(l.words[2], l.no, what);
      sink.push_back(p);
    };
    if (key == "len")
      one_value(len_lines, "length");
    else if (key == "weight")
      one_value(weight_lines, "weight");
    else if (key == "c")
      one_value(c_lines, "parameter");
    else if (key == "f")
      one_value(f_lines, "value");
    else if (key == "dloc") {
      if (l.words.size() != 4) fail(l.no, "expected 'dloc <edge> <d_fwd> <d_rev>'");
      p.id = static_cast<Index>(to_int(l.words[1], l.no, "edge id"));
      p.a = to_double(l.words[2], l.no, "local length");
      p.b = to_double(l.words[3], l.no, "local length");
      dloc_lines.push_back(p);
    } else {
      fail(l.no, "unknown keyword '" + key + "'");
    }
  }
  if (specs.empty()) fail(eof_line, "document declares no simplices");

  MeshData mesh;
  try {
    mesh.complex = build_complex(specs, n);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  const SimplicialComplex& cx = mesh.complex;
  if (cx.label_count() != static_cast<Index>(declared_vertices))
    throw ValidationError("declared vertex count " + std::to_string(declared_vertices) +
                          " does not match the " + std::to_string(cx.label_count()) +
                          " labels in use");

  auto reject = [&](const std::vector<PendingValue>& v, const char* what) {
    if (!v.empty())
      fail(v.front().line,
           std::string("'") + what + "' lines do not belong in a " + kind + " document");
  };

  const auto ts = static_cast<size_t>(cx.table_size(1));
  if (kind == "euclidean" || kind == "weighted") {
    reject(c_lines, "c");
    reject(dloc_lines, "dloc");
    if (kind == "euclidean") reject(weight_lines, "weight");
    EuclideanMetric base;
    base.len.assign(ts, kNaN);
    for (const auto& p : len_lines) store_edge_value(base.len, p, cx, "len");
    require_edges_covered(cx, base.len, "len");
    validate_lengths(cx, base);
    if (kind == "euclidean") {
      mesh.metric = std::move(base);
    } else {
      WeightedMetric m;
      m.base = std::move(base);
      m.w.assign(cx.vertex_count(), kNaN);
      for (const auto& p : weight_lines) store_vertex_value(m.w, p, cx, "weight");
      require_vertices_covered(cx, m.w, "weight");
      mesh.metric = std::move(m);
    }
  } else if (kind == "thurston") {
    reject(len_lines, "len");
    reject(dloc_lines, "dloc");
    ThurstonMetric m;
    m.w.assign(cx.vertex_count(), kNaN);
    m.c.assign(ts, kNaN);
    for (const auto& p : weight_lines) store_vertex_value(m.w, p, cx, "weight");
    for (const auto& p : c_lines) store_edge_value(m.c, p, cx, "c");
    require_vertices_covered(cx, m.w, "weight");
    require_edges_covered(cx, m.c, "c");
    validate_lengths(cx, induced_lengths(cx, m));
    mesh.metric = std::move(m);
  } else {
    reject(len_lines, "len");
    reject(weight_lines, "weight");
    reject(c_lines, "c");
    DualityMetric m;
    m.d_fwd.assign(ts, kNaN);
    m.d_rev.assign(ts, kNaN);
    std::vector<double> seen(ts, kNaN);
    for (const auto& p : dloc_lines) {
      store_edge_value(seen, p, cx, "dloc");
      m.d_fwd[p.id] = p.a;
      m.d_rev[p.id] = p.b;
    }
    require_edges_covered(cx, m.d_fwd, "dloc");
    induced_lengths(cx, m);  // positive total lengths
    const CompatibilityReport report = check_compatibility(cx, m);
    if (!report.pass) {
      Index worst = report.entries.front().triangle;
      for (const auto& ent : report.entries)
        if (std::abs(ent.residual) == report.max_abs_residual) {
          worst = ent.triangle;
          break;
        }
      throw ValidationError("per-triangle compatibility violated at triangle " +
                            std::to_string(worst) + " (residual " +
                            fmt(report.max_abs_residual) + ")");
    }
    mesh.metric = std::move(m);
  }

  if (!f_lines.empty()) {
    std::vector<double> f(cx.vertex_count(), kNaN);
    for (const auto& p : f_lines) store_vertex_value(f, p, cx, "f");
    require_vertices_covered(cx, f, "f");
    mesh.f = std::move(f);
  }
  return mesh;
}

std::string write_mesh(const SimplicialComplex& cx, const MetricStructure& metric,
                       const std::optional<std::vector<double>>& f) {
  const int n = cx.dimension();
  const std::vector<Index> tops = cx.alive_ids(n);
  if (tops.empty()) throw Error("cannot serialize an empty complex");

  bool explicit_mode = cx.has_explicit_gluing();
  for (Index t : tops) {
    auto labels = cx.simplex(n, t).labels;
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) explicit_mode = true;
  }
  {
    std::map<std::pair<Index, Index>, Index> seen;
    for (Index e : cx.alive_ids(1)) {
      const auto& labels = cx.simplex(1, e).labels;
      const auto key = std::minmax(labels[0], labels[1]);
      const auto [it, fresh] = seen.emplace(key, e);
      if (!fresh && it->second != e) explicit_mode = true;
    }
  }
  if (explicit_mode && n != 2)
    throw Error("explicit gluing serialization is only supported in dimension 2");

  std::vector<Index> top_pos(cx.table_size(n), kInvalid);
  for (size_t i = 0; i < tops.size(); ++i) top_pos[tops[i]] = static_cast<Index>(i);

  std::vector<std::vector<std::string>> glue(tops.size());
  if (explicit_mode) {
    for (auto& g : glue) g.assign(n + 1, "-");
    int counter = 0;
    for (Index t : tops)
      for (int o = 0; o <= n; ++o) {
        const Index e = cx.simplex(n, t).faces[o];
        if (!cx.interior(e)) continue;
        if (glue[top_pos[t]][o] != "-") continue;
        const auto& uses = cx.simplex(n - 1, e).cofaces;
        const auto& u1 = uses[0];
        const auto& u2 = uses[1];
        const int p1 = cx.simplex(n, u1.parent).face_perms[u1.drop][0];
        const int p2 = cx.simplex(n, u2.parent).face_perms[u2.drop][0];
        const std::string name = "g" + std::to_string(counter++);
        glue[top_pos[u1.parent]][u1.drop] = name;
        glue[top_pos[u2.parent]][u2.drop] = name + (p1 != p2 ? "~" : "");
      }
  }

  const char* kind = std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, EuclideanMetric>) return "euclidean";
        if constexpr (std::is_same_v<T, WeightedMetric>) return "weighted";
        if constexpr (std::is_same_v<T, ThurstonMetric>) return "thurston";
        if constexpr (std::is_same_v<T, DualityMetric>) return "duality";
      },
      metric);

  std::string out;
  out += "dtri mesh 1\n";
  out += "dim " + std::to_string(n) + "\n";
  out += std::string("kind ") + kind + "\n";
  out += "vertices " + std::to_string(cx.label_count()) + "\n";
  std::vector<TopSpec> specs;
  for (size_t i = 0; i < tops.size(); ++i) {
    TopSpec spec;
    spec.labels = cx.simplex(n, tops[i]).labels;
    out += "simplex";
    for (Index l : spec.labels) out += " " + std::to_string(l);
    if (explicit_mode) {
      spec.glue = glue[i];
      out += " glue";
      for (const auto& g : glue[i]) out += " " + g;
    }
    out += "\n";
    specs.push_back(std::move(spec));
  }

  // Rebuild from the exact lines just emitted: identifiers and stored edge
  // orientations below are then the ones the parser will reproduce.
  const SimplicialComplex fresh = build_complex(specs, n);
  std::vector<Index> edge_map(cx.table_size(1), kInvalid);
  std::vector<char> edge_swapped(cx.table_size(1), 0);
  for (size_t i = 0; i < tops.size(); ++i) {
    const Index t = tops[i];
    const auto t2 = static_cast<Index>(i);
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) {
        const unsigned mask = (1u << a) | (1u << b);
        const Index e = cx.sub_id(t, mask);
        const Index e2 = fresh.sub_id(t2, mask);
        const bool sw = cx.sub_perm(t, mask)[0] != fresh.sub_perm(t2, mask)[0];
        if (edge_map[e] != kInvalid && (edge_map[e] != e2 || edge_swapped[e] != (sw ? 1 : 0)))
          throw Error("inconsistent edge correspondence while serializing");
        edge_map[e] = e2;
        edge_swapped[e] = sw ? 1 : 0;
      }
  }

  auto edge_lines = [&](const char* key, const std::vector<double>& values) {
    std::vector<std::string> rows(fresh.table_size(1));
    for (Index e : cx.alive_ids(1)) {
      const double v = values.at(e);
      if (std::isnan(v))
        throw MissingLength("edge " + std::to_string(e) + " has no value to serialize");
      rows[edge_map[e]] = std::string(key) + " " + std::to_string(edge_map[e]) + " " + fmt(v) + "\n";
    }
    for (const auto& r : rows) out += r;
  };
  auto vertex_lines = [&](const char* key, const std::vector<double>& values) {
    for (Index v = 0; v < cx.vertex_count(); ++v)
      out += std::string(key) + " " + std::to_string(v) + " " + fmt(values.at(v)) + "\n";
  };

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, EuclideanMetric>) {
          edge_lines("len", m.len);
        } else if constexpr (std::is_same_v<T, WeightedMetric>) {
          edge_lines("len", m.base.len);
          vertex_lines("weight", m.w);
        } else if constexpr (std::is_same_v<T, ThurstonMetric>) {
          vertex_lines("weight", m.w);
          edge_lines("c", m.c);
        } else {
          std::vector<std::string> rows(fresh.table_size(1));
          for (Index e : cx.alive_ids(1)) {
            double df = m.d_fwd.at(e), dr = m.d_rev.at(e);
            if (std::isnan(df) || std::isnan(dr))
              throw MissingLocalLength("edge " + std::to_string(e) +
                                       " has no local lengths to serialize");
            if (edge_swapped[e]) std::swap(df, dr);
            rows[edge_map[e]] = "dloc " + std::to_string(edge_map[e]) + " " + fmt(df) + " " +
                                fmt(dr) + "\n";
          }
          for (const auto& r : rows) out += r;
        }
      },
      metric);

  if (f) vertex_lines("f", *f);
  return out;
}

}  // namespace dtri
