// Command line front door: validate, convert, dualize, regularize, laplace
// and gen subcommands over the text mesh format.
//
// Exit codes: 0 success, 1 validation failure, 2 parse failure, 3 solver
// failure.

#include <CLI11.hpp>
#include <Eigen/Sparse>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dtri/complex.hpp"
#include "dtri/dual_geometry.hpp"
#include "dtri/fixtures.hpp"
#include "dtri/laplace.hpp"
#include "dtri/mesh_io.hpp"
#include "dtri/metric.hpp"
#include "dtri/regularity.hpp"
#include "dtri/types.hpp"

using namespace dtri;

namespace {

struct FileUnreadable : std::runtime_error {
  explicit FileUnreadable(const std::string& path)
      : std::runtime_error("cannot read '" + path + "'") {}
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileUnreadable(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileUnreadable(path);
  out << text;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* kind_name(const MetricStructure& m) {
  switch (m.index()) {
    case 0: return "euclidean";
    case 1: return "weighted";
    case 2: return "thurston";
    default: return "duality";
  }
}

// Values keyed by vertex class, one `vertex value` pair per line.
std::vector<double> read_vertex_values(const std::string& path, Index n_classes) {
  std::istringstream in(slurp(path));
  std::vector<double> values(n_classes, 0.0);
  std::vector<bool> seen(n_classes, false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long v;
    double x;
    if (!(ls >> v)) continue;  // blank
    if (!(ls >> x)) throw ParseError(lineno, "expected `vertex value`");
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "trailing tokens after value");
    if (v < 0 || v >= n_classes) throw ParseError(lineno, "vertex out of range");
    values[static_cast<size_t>(v)] = x;
    seen[static_cast<size_t>(v)] = true;
  }
  for (Index v = 0; v < n_classes; ++v)
    if (!seen[static_cast<size_t>(v)])
      throw ValidationError("no value given for vertex " + std::to_string(v));
  return values;
}

WeightedMetric as_weighted(const SimplicialComplex& cx, const MetricStructure& m, Index base,
                           double w0, double tol) {
  if (const auto* e = std::get_if<EuclideanMetric>(&m))
    return WeightedMetric{*e, std::vector<double>(static_cast<size_t>(cx.vertex_count()), 0.0)};
  if (const auto* w = std::get_if<WeightedMetric>(&m)) return *w;
  if (const auto* t = std::get_if<ThurstonMetric>(&m)) return thurston_to_weighted(cx, *t);
  const auto& d = std::get<DualityMetric>(m);
  auto res = duality_to_weighted(cx, d, base, w0, tol);
  if (const auto* ob = std::get_if<LoopObstruction>(&res))
    throw ValidationError("local lengths admit no vertex weights: cycle through edge " +
                          std::to_string(ob->witness_edge) + " has residual " +
                          num(ob->residual));
  return std::get<WeightedMetric>(std::move(res));
}

DualityMetric as_duality(const SimplicialComplex& cx, const MetricStructure& m, Index base,
                         double w0, double tol) {
  if (const auto* d = std::get_if<DualityMetric>(&m)) return *d;
  return weighted_to_duality(cx, as_weighted(cx, m, base, w0, tol));
}

// Geometry and Laplacians accept weights or local lengths directly; local
// lengths are kept as-is so structures with no weighted form still work.
DualGeometry geometry_of(const SimplicialComplex& cx, const MetricStructure& m, Index base,
                         double w0, double tol) {
  if (const auto* d = std::get_if<DualityMetric>(&m)) return compute_dual_geometry(cx, *d);
  return compute_dual_geometry(cx, as_weighted(cx, m, base, w0, tol));
}

LaplaceSystem system_of(const SimplicialComplex& cx, const MetricStructure& m, Index base,
                        double w0, double tol) {
  if (const auto* d = std::get_if<DualityMetric>(&m)) return assemble_laplacian(cx, *d);
  return assemble_laplacian(cx, as_weighted(cx, m, base, w0, tol));
}

struct Settings {
  std::string mesh_path;
  std::string output;
  double tolerance = 0.0;  // 0 keeps each operation's own default
  // convert
  std::string to_kind;
  Index base_vertex = 0;
  double w0 = 0.0;
  // regularize
  std::uint64_t seed = 0;
  std::string energy_log;
  long max_flips = 100000;
  // laplace
  std::string action;
  std::string rhs_path;
  std::string u0_path;
  double t_end = 1.0;
  double dt = 0.05;
  bool explicit_euler = false;
  // gen
  std::string fixture;
  FixtureParams params;

  double tol_or(double fallback) const { return tolerance > 0.0 ? tolerance : fallback; }
};

MeshData load(const Settings& s) { return parse_mesh(slurp(s.mesh_path)); }

int cmd_validate(const Settings& s) {
  const MeshData mesh = load(s);  // parsing already runs every validator
  const SimplicialComplex& cx = mesh.complex;
  std::ostringstream out;
  out << "ok: dim " << cx.dimension() << ", kind " << kind_name(mesh.metric) << ", "
      << cx.vertex_count() << " vertices";
  for (int k = 1; k <= cx.dimension(); ++k) out << ", " << cx.count_alive(k) << " " << k << "-simplices";
  out << "\n";
  out << "closed: " << (cx.closed() ? "yes" : "no") << ", euler characteristic "
      << cx.euler_characteristic() << ", vertex labels " << cx.label_count() << "\n";
  if (mesh.f) out << "function block: present\n";
  emit(s.output, out.str());
  return 0;
}

int cmd_convert(const Settings& s) {
  MeshData mesh = load(s);
  const SimplicialComplex& cx = mesh.complex;
  const double tol = s.tol_or(1e-10);
  MetricStructure converted;
  if (s.to_kind == "euclidean") {
    if (const auto* e = std::get_if<EuclideanMetric>(&mesh.metric))
      converted = *e;
    else if (const auto* w = std::get_if<WeightedMetric>(&mesh.metric))
      converted = w->base;
    else if (const auto* t = std::get_if<ThurstonMetric>(&mesh.metric))
      converted = induced_lengths(cx, *t);
    else
      converted = induced_lengths(cx, std::get<DualityMetric>(mesh.metric));
  } else if (s.to_kind == "weighted") {
    converted = as_weighted(cx, mesh.metric, s.base_vertex, s.w0, tol);
  } else if (s.to_kind == "thurston") {
    converted = weighted_to_thurston(cx, as_weighted(cx, mesh.metric, s.base_vertex, s.w0, tol));
  } else {
    converted = as_duality(cx, mesh.metric, s.base_vertex, s.w0, tol);
  }
  emit(s.output, write_mesh(cx, converted, mesh.f));
  return 0;
}

int cmd_dualize(const Settings& s) {
  const MeshData mesh = load(s);
  const SimplicialComplex& cx = mesh.complex;
  const DualGeometry g = geometry_of(cx, mesh.metric, s.base_vertex, s.w0, s.tol_or(1e-10));
  const TotalVolumeReport rep = total_volume_check(g, s.tol_or(1e-9));
  const int n = cx.dimension();
  std::ostringstream out;
  out << "total simplex volume " << num(rep.sum_simplex) << "\n";
  out << "total dual vertex volume " << num(rep.sum_dual_vertex) << "\n";
  out << "difference " << num(rep.difference) << "\n";
  out << "volume identity " << (rep.pass ? "pass" : "fail")
      << (rep.boundary ? " (boundary present, identity not expected)" : "") << "\n";
  out << "dual volumes (dim id value):\n";
  for (int k = 0; k < n; ++k)
    for (Index id : cx.alive_ids(k)) out << k << " " << id << " " << num(g.dual_volume(k, id)) << "\n";
  out << "centers (top simplex, then one coordinate per column):\n";
  const unsigned full = (1u << (n + 1)) - 1u;
  for (Index top : cx.alive_ids(n)) {
    const Eigen::VectorXd& c = g.center(top, full);
    out << top;
    for (int i = 0; i < c.size(); ++i) out << " " << num(c(i));
    out << "\n";
  }
  emit(s.output, out.str());
  return 0;
}

int cmd_regularize(const Settings& s) {
  MeshData mesh = load(s);
  SimplicialComplex& cx = mesh.complex;
  DualityMetric d = as_duality(cx, mesh.metric, s.base_vertex, s.w0, s.tol_or(1e-10));

  std::vector<double> f;
  if (mesh.f) {
    f = *mesh.f;
  } else {
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> uf(-1.0, 1.0);
    f.resize(static_cast<size_t>(cx.vertex_count()));
    for (double& x : f) x = uf(rng);
  }

  RegularizeOptions opt;
  opt.tol = s.tol_or(opt.tol);
  opt.max_flips = s.max_flips;
  const RegularizeReport rep = regularize(cx, d, f, opt);

  if (!s.energy_log.empty()) {
    std::ostringstream log;
    log << "flip,edge,phi,energy_before,energy_after\n";
    int i = 0;
    for (const FlipRecord& fr : rep.flips)
      log << ++i << "," << fr.removed_edge << "," << num(fr.phi) << ","
          << num(fr.energy_before) << "," << num(fr.energy_after) << "\n";
    emit(s.energy_log, log.str());
  }

  std::cerr << rep.flips.size() << " flips, energy " << num(rep.initial_energy) << " -> "
            << num(rep.final_energy) << (rep.edge_positive_input ? "" : ", input not edge-positive")
            << (rep.saturated ? ", flip budget exhausted" : "") << "\n";
  if (!rep.stalled_edges.empty()) {
    std::cerr << "stalled edges:";
    for (Index e : rep.stalled_edges) std::cerr << " " << e;
    std::cerr << "\n";
  }

  emit(s.output, write_mesh(cx, MetricStructure{d}, mesh.f ? mesh.f : std::optional<std::vector<double>>{}));
  return 0;
}

int cmd_laplace(const Settings& s) {
  const MeshData mesh = load(s);
  const SimplicialComplex& cx = mesh.complex;
  const LaplaceSystem sys = system_of(cx, mesh.metric, s.base_vertex, s.w0, s.tol_or(1e-10));
  const Index nv = cx.vertex_count();
  std::ostringstream out;

  if (s.action == "assemble") {
    out << "# laplacian triplets: row col value\n";
    for (int k = 0; k < sys.L.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.L, k); it; ++it)
        out << it.row() << " " << it.col() << " " << num(it.value()) << "\n";
    out << "# dual vertex volumes: vertex value\n";
    for (Index v = 0; v < nv; ++v) out << v << " " << num(sys.volumes(v)) << "\n";
  } else if (s.action == "poisson") {
    std::vector<double> f;
    if (!s.rhs_path.empty())
      f = read_vertex_values(s.rhs_path, nv);
    else if (mesh.f)
      f = *mesh.f;
    else
      throw ValidationError("poisson needs --rhs or a mesh function block");
    const Eigen::VectorXd u = solve_poisson(sys, f, s.tol_or(1e-9));
    for (Index v = 0; v < nv; ++v) out << v << " " << num(u(v)) << "\n";
  } else if (s.action == "heat") {
    std::vector<double> u0;
    if (!s.u0_path.empty())
      u0 = read_vertex_values(s.u0_path, nv);
    else if (mesh.f)
      u0 = *mesh.f;
    else
      throw ValidationError("heat needs --u0 or a mesh function block");
    HeatOptions opt;
    opt.explicit_euler = s.explicit_euler;
    const HeatResult hr = heat_evolve(sys, u0, s.t_end, s.dt, opt);
    out << "time,mass,min,max";
    for (Index v = 0; v < nv; ++v) out << ",u" << v;
    out << "\n";
    for (size_t i = 0; i < hr.times.size(); ++i) {
      out << num(hr.times[i]) << "," << num(hr.mass[i]) << "," << num(hr.min_value[i]) << ","
          << num(hr.max_value[i]);
      for (Index v = 0; v < nv; ++v) out << "," << num(hr.states[i](v));
      out << "\n";
    }
  } else if (s.action == "spectrum") {
    const SemidefinitenessReport rep = check_semidefiniteness(sys, "", s.tol_or(1e-9));
    out << "# " << (rep.pass ? "pass" : "fail") << ": max eigenvalue " << num(rep.max_eigenvalue)
        << ", scale " << num(rep.scale) << ", near-zero count " << rep.near_zero_count
        << ", kernel " << (rep.kernel_constant ? "constant" : "not constant") << "\n";
    for (double ev : rep.eigenvalues) out << num(ev) << "\n";
  } else {
    const double lambda = entropy_lambda(sys);
    out << num(lambda) << "\n";
  }
  emit(s.output, out.str());
  return 0;
}

int cmd_gen(const Settings& s) {
  const MeshData mesh = make_fixture(s.fixture, s.params, s.seed);
  emit(s.output, write_mesh(mesh));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simplicial meshes with duality structures: validation, conversion, dual geometry, flips and Laplacians"};
  app.require_subcommand(1);

  Settings s;
  app.add_option("--output,-o", s.output, "write the primary result to this file instead of stdout");
  app.add_option("--tolerance", s.tolerance, "override the per-operation default tolerances")
      ->check(CLI::PositiveNumber);

  std::function<int(const Settings&)> task;

  auto* validate = app.add_subcommand("validate", "parse a mesh and report its structure");
  validate->add_option("mesh", s.mesh_path, "mesh file")->required();
  validate->callback([&] { task = cmd_validate; });

  auto* convert = app.add_subcommand("convert", "convert between metric structures");
  convert->add_option("mesh", s.mesh_path, "mesh file")->required();
  convert->add_option("--to", s.to_kind, "target structure")
      ->required()
      ->check(CLI::IsMember({"euclidean", "weighted", "thurston", "duality"}));
  convert->add_option("--base-vertex", s.base_vertex, "root vertex for weight propagation");
  convert->add_option("--w0", s.w0, "weight assigned to the root vertex");
  convert->callback([&] { task = cmd_convert; });

  auto* dualize = app.add_subcommand("dualize", "report dual volumes and simplex centers");
  dualize->add_option("mesh", s.mesh_path, "mesh file")->required();
  dualize->callback([&] { task = cmd_dualize; });

  auto* reg = app.add_subcommand("regularize", "flip non-regular edges until none remain");
  reg->add_option("mesh", s.mesh_path, "mesh file")->required();
  reg->add_option("--seed", s.seed, "seed for the instrumentation function when the mesh has none");
  reg->add_option("--energy-log", s.energy_log, "write a per-flip energy CSV to this file");
  reg->add_option("--max-flips", s.max_flips, "stop after this many flips")
      ->check(CLI::PositiveNumber);
  reg->callback([&] { task = cmd_regularize; });

  auto* lap = app.add_subcommand("laplace", "assemble and apply the dual Laplacian");
  lap->add_option("action", s.action, "assemble | poisson | heat | spectrum | entropy")
      ->required()
      ->check(CLI::IsMember({"assemble", "poisson", "heat", "spectrum", "entropy"}));
  lap->add_option("mesh", s.mesh_path, "mesh file")->required();
  lap->add_option("--rhs", s.rhs_path, "right-hand side file (`vertex value` lines)");
  lap->add_option("--u0", s.u0_path, "initial state file (`vertex value` lines)");
  lap->add_option("--t-end", s.t_end, "integration end time");
  lap->add_option("--dt", s.dt, "time step");
  lap->add_flag("--explicit", s.explicit_euler, "use explicit Euler instead of the implicit midpoint rule");
  lap->callback([&] { task = cmd_laplace; });

  std::string fixture_list;
  for (const std::string& name : fixture_names())
    fixture_list += (fixture_list.empty() ? "" : " | ") + name;
  auto* gen = app.add_subcommand("gen", "generate a named fixture mesh");
  gen->add_option("fixture", s.fixture, fixture_list)->required();
  gen->add_option("--seed", s.seed, "generator seed");
  gen->add_option("--k", s.params.k, "grid cells per side (flat_torus_grid)");
  gen->add_option("--epsilon", s.params.epsilon, "foot offset (paper_torus)");
  gen->add_option("--vertices", s.params.vertices, "target vertex count (random_surface)");
  gen->add_option("--weight-spread", s.params.weight_spread, "weight scale (random_surface)");
  gen->callback([&] { task = cmd_gen; });

  for (CLI::App* sub : {validate, convert, dualize, reg, lap, gen}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return task(s);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FileUnreadable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IncompatibleRHS& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const SingularBeyondConstants& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const UnstableStep& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
