#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "dtri/complex.hpp"
#include "dtri/dual_geometry.hpp"
#include "dtri/metric.hpp"

namespace dtri {

// Vertex Laplacian assembled from dual volumes. Off-diagonal entries are
// |star e| / |e| summed over every edge identifier joining a vertex pair
// (self-loop edges contribute nothing to differences of vertex functions and
// are skipped); each diagonal entry is the negated sum of its row, so row
// sums vanish by construction. `volumes` holds the dual vertex volumes.
struct LaplaceSystem {
  Eigen::SparseMatrix<double> L;
  Eigen::VectorXd volumes;
};

LaplaceSystem assemble_laplacian(const DualGeometry& g, const EuclideanMetric& len);
LaplaceSystem assemble_laplacian(const SimplicialComplex& cx, const WeightedMetric& m);
LaplaceSystem assemble_laplacian(const SimplicialComplex& cx, const DualityMetric& m);

// Per-edge weights 0.5 * (cot(angle at one apex) + cot(angle at the other)),
// summed over the triangles containing the edge. 2D, and every vertex weight
// must be zero (throws RequiresZeroWeights otherwise); equals the assembled
// coefficients in that regime.
std::vector<double> cotan_weights(const SimplicialComplex& cx, const WeightedMetric& m);

// E(f) = 0.5 * sum_e (|star e| / |e|) (f_j - f_i)^2, equal to -0.5 f^T L f.
double dirichlet_energy(const LaplaceSystem& sys, const std::vector<double>& f);
double dirichlet_energy(const DualGeometry& g, const EuclideanMetric& len,
                        const std::vector<double>& f);

// Solves L u = f .* volumes with the mean-zero normalization sum(u) = 0.
// Requires the compatibility condition sum_i f_i V_i ~ 0 (IncompatibleRHS
// otherwise); residual worse than `tol` * ||fV|| reports
// SingularBeyondConstants (nullspace larger than the constants).
Eigen::VectorXd solve_poisson(const LaplaceSystem& sys, const std::vector<double>& f,
                              double tol = 1e-9);

struct HeatOptions {
  bool explicit_euler = false;  // default integrator is the implicit midpoint rule
};

struct HeatResult {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;   // includes the initial state
  std::vector<double> mass;              // sum_i V_i u_i per sample
  std::vector<double> min_value, max_value;
};

// Integrates du/dt = D^{-1} L u with D = diag(volumes) from t = 0 to t_end in
// steps of dt (last step truncated). All volumes must be positive
// (NonpositiveDualVolume). Explicit stepping past dt = 1/max|D^{-1}L|_ii
// throws UnstableStep; the implicit midpoint rule has no step bound and
// conserves sum V_i u_i.
HeatResult heat_evolve(const LaplaceSystem& sys, const std::vector<double>& u0, double t_end,
                       double dt, const HeatOptions& opt = {});

// Minimum Dirichlet energy over unit-norm mean-zero vertex functions: the
// smallest eigenvalue of -L/2 restricted to the mean-zero subspace.
double entropy_lambda(const LaplaceSystem& sys);

struct SemidefinitenessReport {
  bool pass = false;
  double max_eigenvalue = 0.0;
  double scale = 0.0;              // max diagonal magnitude, sets the tolerance
  int near_zero_count = 0;         // eigenvalues within tol * scale of zero
  bool kernel_constant = false;    // the near-zero eigenvector is constant
  std::vector<double> eigenvalues; // ascending
  std::string hypothesis;          // caller-verified regime this run certifies
};

// Dense eigenvalue audit: passes iff the spectrum is nonpositive up to
// tol * scale and the kernel is exactly the constants. The hypothesis tag is
// carried through to the report untouched.
SemidefinitenessReport check_semidefiniteness(const LaplaceSystem& sys,
                                              const std::string& hypothesis = "",
                                              double tol = 1e-9);

}  // namespace dtri
