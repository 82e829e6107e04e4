// End-to-end checks of the command line tool: exit codes, file plumbing and
// report shapes. The binary path comes in through DTRI_CLI_PATH.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dtri/fixtures.hpp"
#include "dtri/laplace.hpp"
#include "dtri/mesh_io.hpp"
#include "dtri/metric.hpp"
#include "dtri/regularity.hpp"

namespace fs = std::filesystem;
using namespace dtri;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "dtri_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = std::string("\"") + DTRI_CLI_PATH + "\" " + args;
  if (!stdout_file.empty()) cmd += " > \"" + stdout_file + "\"";
  cmd += " 2> \"" + path_of("stderr.txt") + "\"";
  const int raw = std::system(cmd.c_str());
#ifdef _WIN32
  return raw;
#else
  return WEXITSTATUS(raw);
#endif
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("gen and validate succeed for every fixture") {
  for (const std::string& name : fixture_names()) {
    CAPTURE(name);
    const std::string mesh = path_of(name + ".mesh");
    CHECK(run("gen " + name + " --seed 3 --output " + mesh) == 0);
    const std::string report = path_of("validate.txt");
    CHECK(run("validate " + mesh, report) == 0);
    CHECK(read_file(report).find("ok: dim") == 0);
  }
}

TEST_CASE("generation through the tool matches the library") {
  const std::string mesh = path_of("gen_icosa.mesh");
  REQUIRE(run("gen icosahedron_boundary --output " + mesh) == 0);
  CHECK(read_file(mesh) == write_mesh(make_fixture("icosahedron_boundary")));
}

TEST_CASE("convert changes kind and preserves the complex") {
  const std::string mesh = path_of("tetra.mesh");
  REQUIRE(run("gen tetrahedron_boundary --output " + mesh) == 0);
  const std::string dual = path_of("tetra_duality.mesh");
  REQUIRE(run("convert " + mesh + " --to duality --output " + dual) == 0);
  const MeshData converted = parse_mesh(read_file(dual));
  CHECK(std::holds_alternative<DualityMetric>(converted.metric));
  CHECK(converted.complex.count_alive(2) == 4);

  const std::string back = path_of("tetra_back.mesh");
  REQUIRE(run("convert " + dual + " --to weighted --output " + back) == 0);
  CHECK(read_file(back) == read_file(mesh));
}

TEST_CASE("converting the torus local lengths to weights fails validation") {
  const std::string mesh = path_of("torus.mesh");
  REQUIRE(run("gen paper_torus --output " + mesh) == 0);
  CHECK(run("convert " + mesh + " --to weighted --output " + path_of("t.mesh")) == 1);
  // but its dual geometry is still available
  const std::string report = path_of("torus_dual.txt");
  CHECK(run("dualize " + mesh, report) == 0);
  CHECK(read_file(report).find("volume identity pass") != std::string::npos);
}

TEST_CASE("missing and malformed files are parse failures") {
  CHECK(run("validate " + path_of("no_such.mesh")) == 2);
  const std::string bad = path_of("bad.mesh");
  write_file(bad, "dtri mesh 1\ndim 2\nkind euclidean\nvertices 3\nsimplex 0 1\n");
  CHECK(run("validate " + bad) == 2);
}

TEST_CASE("invalid metric data is a validation failure") {
  const std::string mesh = path_of("unrealizable.mesh");
  write_file(mesh,
             "dtri mesh 1\ndim 2\nkind euclidean\nvertices 3\nsimplex 0 1 2\n"
             "len 0 1\nlen 1 1\nlen 2 3\n");
  CHECK(run("validate " + mesh) == 1);
}

TEST_CASE("regularize flips the thin hinge and logs the energy") {
  const std::string mesh = path_of("hinge.mesh");
  REQUIRE(run("gen thin_hinge --output " + mesh) == 0);
  const std::string out = path_of("hinge_reg.mesh");
  const std::string log = path_of("hinge_energy.csv");
  REQUIRE(run("regularize " + mesh + " --seed 1 --energy-log " + log + " --output " + out) == 0);

  const std::string csv = read_file(log);
  CHECK(csv.find("flip,edge,phi,energy_before,energy_after\n") == 0);
  CHECK(csv.find("\n1,") != std::string::npos);

  const MeshData reg = parse_mesh(read_file(out));
  const auto& d = std::get<DualityMetric>(reg.metric);
  for (const Hinge& h : reg.complex.hinges())
    CHECK(is_locally_regular(reg.complex, h, d).regular);
}

TEST_CASE("laplace actions produce their reports") {
  const std::string mesh = path_of("grid.mesh");
  REQUIRE(run("gen flat_torus_grid --k 3 --output " + mesh) == 0);

  const std::string triplets = path_of("L.txt");
  REQUIRE(run("laplace assemble " + mesh, triplets) == 0);
  CHECK(read_file(triplets).find("# laplacian triplets") == 0);

  const std::string rhs = path_of("rhs.txt");
  {
    std::ostringstream ss;
    for (int v = 0; v < 9; ++v) ss << v << " " << (v == 0 ? 1.0 : (v == 1 ? -1.0 : 0.0)) << "\n";
    write_file(rhs, ss.str());
  }
  const std::string sol = path_of("u.txt");
  REQUIRE(run("laplace poisson " + mesh + " --rhs " + rhs, sol) == 0);
  int solved_lines = 0;
  std::istringstream su(read_file(sol));
  for (std::string line; std::getline(su, line);) ++solved_lines;
  CHECK(solved_lines == 9);

  const std::string heat = path_of("heat.csv");
  REQUIRE(run("laplace heat " + mesh + " --u0 " + rhs + " --t-end 0.5 --dt 0.1", heat) == 0);
  CHECK(read_file(heat).find("time,mass,min,max,u0,") == 0);

  const std::string spectrum = path_of("spec.txt");
  REQUIRE(run("laplace spectrum " + mesh, spectrum) == 0);
  CHECK(read_file(spectrum).find("# pass") == 0);

  const std::string entropy = path_of("lambda.txt");
  REQUIRE(run("laplace entropy " + mesh, entropy) == 0);
  CHECK(std::stod(read_file(entropy)) > 0.0);
}

TEST_CASE("solver failures exit with code 3") {
  const std::string mesh = path_of("tetra3.mesh");
  REQUIRE(run("gen tetrahedron_boundary --output " + mesh) == 0);

  const std::string rhs = path_of("bad_rhs.txt");
  write_file(rhs, "0 1\n1 0\n2 0\n3 0\n");
  CHECK(run("laplace poisson " + mesh + " --rhs " + rhs) == 3);

  // explicit stepping past the stability bound
  CHECK(run("laplace heat " + mesh + " --u0 " + rhs + " --explicit --dt 0.3 --t-end 0.9") == 3);
  CHECK(run("laplace heat " + mesh + " --u0 " + rhs + " --explicit --dt 0.2 --t-end 0.6") == 0);
}

TEST_CASE("usage errors are parse failures") {
  CHECK(run("gen no_such_fixture --output " + path_of("x.mesh")) == 1);  // unknown fixture name
  CHECK(run("convert") == 2);                                            // missing arguments
  CHECK(run("laplace warp " + path_of("grid.mesh")) == 2);               // unknown action
}
