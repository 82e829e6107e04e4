#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtri/mesh_io.hpp"

namespace dtri {

struct FixtureParams {
  int k = 4;                 // flat_torus_grid: k x k cells
  double epsilon = 0.1;      // paper_torus: foot offset along the square edges
  int vertices = 20;         // random_surface: target vertex count (>= 4)
  double weight_spread = 0.1;  // random_surface: weight scale relative to min edge^2
};

// Deterministic mesh generators:
//   flat_torus_grid       equilateral unit triangles on a k x k torus, weights 0
//   tetrahedron_boundary  boundary of the regular tetrahedron, unit lengths
//   icosahedron_boundary  boundary of the icosahedron, unit lengths
//   thin_hinge            two nearly flat triangles over a unit base; the
//                         shared edge is non-regular and flippable
//   square_hinge          unit square split along a diagonal; the diagonal's
//                         dual edge has exactly zero length
//   paper_torus           two-triangle torus carrying a duality structure
//                         that is not induced by any vertex weights
//   random_surface        randomized sphere triangulation by repeated face
//                         subdivision, chord lengths, seeded random weights
//   sphere_packing_s3     boundary of the 4-simplex with sphere-packing
//                         local lengths d_ij = r_i from seeded radii
MeshData make_fixture(const std::string& name, const FixtureParams& params = {},
                      std::uint64_t seed = 0);

const std::vector<std::string>& fixture_names();

}  // namespace dtri
