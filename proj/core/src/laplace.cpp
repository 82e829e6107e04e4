#include "dtri/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dtri {

namespace {

LaplaceSystem system_from_edge_weights(const SimplicialComplex& cx,
                                       const std::vector<double>& w,
                                       const Eigen::VectorXd& volumes) {
  const Index nv = cx.vertex_count();
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(nv);
  for (Index e : cx.alive_ids(1)) {
    const auto& corners = cx.simplex(1, e).corners;
    const Index i = corners[0], j = corners[1];
    if (i == j) continue;
    trips.emplace_back(i, j, w[e]);
    trips.emplace_back(j, i, w[e]);
    diag(i) -= w[e];
    diag(j) -= w[e];
  }
  for (Index v = 0; v < nv; ++v) trips.emplace_back(v, v, diag(v));
  LaplaceSystem sys;
  sys.L.resize(nv, nv);
  sys.L.setFromTriplets(trips.begin(), trips.end());
  sys.volumes = volumes;
  return sys;
}

}  // namespace

LaplaceSystem assemble_laplacian(const DualGeometry& g, const EuclideanMetric& len) {
  const SimplicialComplex& cx = g.complex();
  if (g.dimension() < 2) throw Error("laplacian needs dimension >= 2");
  std::vector<double> w(cx.table_size(1), 0.0);
  for (Index e : cx.alive_ids(1)) w[e] = g.dual_volume(1, e) / len.len.at(e);
  Eigen::VectorXd vol(cx.vertex_count());
  for (Index v = 0; v < cx.vertex_count(); ++v) vol(v) = g.dual_volume(0, v);
  return system_from_edge_weights(cx, w, vol);
}

LaplaceSystem assemble_laplacian(const SimplicialComplex& cx, const WeightedMetric& m) {
  return assemble_laplacian(compute_dual_geometry(cx, m), m.base);
}

LaplaceSystem assemble_laplacian(const SimplicialComplex& cx, const DualityMetric& m) {
  return assemble_laplacian(compute_dual_geometry(cx, m), induced_lengths(cx, m));
}

std::vector<double> cotan_weights(const SimplicialComplex& cx, const WeightedMetric& m) {
  if (cx.dimension() != 2) throw Error("cotangent weights are a 2D formula");
  for (double w : m.w)
    if (w != 0.0) throw RequiresZeroWeights("cotangent weights need all vertex weights zero");
  std::vector<double> out(cx.table_size(1), 0.0);
  for (Index t : cx.alive_ids(2)) {
    const auto& tri = cx.simplex(2, t);
    std::array<double, 3> l2;
    for (int o = 0; o < 3; ++o) {
      const double l = m.base.len.at(tri.faces[o]);
      l2[o] = l * l;
    }
    // Heron, via the squared lengths
    const double s16 = 2.0 * (l2[0] * l2[1] + l2[1] * l2[2] + l2[2] * l2[0]) -
                       (l2[0] * l2[0] + l2[1] * l2[1] + l2[2] * l2[2]);
    if (!(s16 > 0.0)) throw Degenerate("degenerate triangle in cotangent assembly");
    const double area = 0.25 * std::sqrt(s16);
    for (int o = 0; o < 3; ++o) {
      const double other1 = l2[(o + 1) % 3], other2 = l2[(o + 2) % 3];
      out[tri.faces[o]] += 0.5 * (other1 + other2 - l2[o]) / (4.0 * area);
    }
  }
  return out;
}

double dirichlet_energy(const LaplaceSystem& sys, const std::vector<double>& f) {
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  return -0.5 * fv.dot(sys.L * fv);
}

double dirichlet_energy(const DualGeometry& g, const EuclideanMetric& len,
                        const std::vector<double>& f) {
  const SimplicialComplex& cx = g.complex();
  double acc = 0.0;
  for (Index e : cx.alive_ids(1)) {
    const auto& corners = cx.simplex(1, e).corners;
    if (corners[0] == corners[1]) continue;
    const double df = f.at(corners[1]) - f.at(corners[0]);
    acc += 0.5 * (g.dual_volume(1, e) / len.len.at(e)) * df * df;
  }
  return acc;
}

Eigen::VectorXd solve_poisson(const LaplaceSystem& sys, const std::vector<double>& f,
                              double tol) {
  const Eigen::Index nv = sys.L.rows();
  if (static_cast<Eigen::Index>(f.size()) != nv)
    throw Error("poisson right-hand side has the wrong size");
  Eigen::VectorXd rhs(nv);
  for (Eigen::Index i = 0; i < nv; ++i) rhs(i) = f[i] * sys.volumes(i);
  const double nrm = rhs.norm();
  if (std::abs(rhs.sum()) > 1e-10 * std::max(nrm, 1e-300))
    throw IncompatibleRHS("right-hand side is not orthogonal to constants");
  if (nrm == 0.0) return Eigen::VectorXd::Zero(nv);

  // Pin vertex 0 to select one representative, then recenter.
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < sys.L.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.L, k); it; ++it)
      if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
  trips.emplace_back(0, 0, 1.0);
  Eigen::SparseMatrix<double> pinned(nv, nv);
  pinned.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd b = rhs;
  b(0) = 0.0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(pinned);
  if (lu.info() != Eigen::Success)
    throw SingularBeyondConstants("poisson system is singular beyond the constants");
  Eigen::VectorXd u = lu.solve(b);
  u.array() -= u.mean();
  if ((sys.L * u - rhs).norm() > tol * nrm)
    throw SingularBeyondConstants("poisson residual exceeds tolerance");
  return u;
}

HeatResult heat_evolve(const LaplaceSystem& sys, const std::vector<double>& u0, double t_end,
                       double dt, const HeatOptions& opt) {
  const Eigen::Index nv = sys.L.rows();
  if (static_cast<Eigen::Index>(u0.size()) != nv)
    throw Error("heat initial state has the wrong size");
  if (!(dt > 0.0)) throw Error("heat step must be positive");
  for (Eigen::Index i = 0; i < nv; ++i)
    if (!(sys.volumes(i) > 0.0))
      throw NonpositiveDualVolume("dual volume of vertex " + std::to_string(i) +
                                  " is not positive");

  double rate_bound = 0.0;  // max |(D^{-1} L)_ii|
  for (Eigen::Index i = 0; i < nv; ++i)
    rate_bound = std::max(rate_bound, std::abs(sys.L.coeff(i, i)) / sys.volumes(i));

  Eigen::VectorXd u(nv);
  for (Eigen::Index i = 0; i < nv; ++i) u(i) = u0[i];

  HeatResult out;
  auto record = [&](double t) {
    out.times.push_back(t);
    out.states.push_back(u);
    out.mass.push_back(sys.volumes.dot(u));
    out.min_value.push_back(u.minCoeff());
    out.max_value.push_back(u.maxCoeff());
  };
  record(0.0);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double factored_dt = -1.0;
  const Eigen::VectorXd D = sys.volumes;
  double t = 0.0;
  while (t < t_end - 1e-15 * std::max(1.0, t_end)) {
    const double step = std::min(dt, t_end - t);
    if (opt.explicit_euler) {
      if (rate_bound > 0.0 && step > 1.0 / rate_bound + 1e-15)
        throw UnstableStep("explicit step exceeds the stability bound");
      u += step * (sys.L * u).cwiseQuotient(D);
    } else {
      if (step != factored_dt) {
        Eigen::SparseMatrix<double> A(nv, nv);
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < sys.L.outerSize(); ++k)
          for (Eigen::SparseMatrix<double>::InnerIterator it(sys.L, k); it; ++it)
            trips.emplace_back(it.row(), it.col(), -0.5 * step * it.value());
        for (Eigen::Index i = 0; i < nv; ++i) trips.emplace_back(i, i, D(i));
        A.setFromTriplets(trips.begin(), trips.end());
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw Error("heat step matrix is singular");
        factored_dt = step;
      }
      const Eigen::VectorXd b = D.cwiseProduct(u) + 0.5 * step * (sys.L * u);
      u = lu.solve(b);
    }
    t += step;
    record(t);
  }
  return out;
}

double entropy_lambda(const LaplaceSystem& sys) {
  const Eigen::Index nv = sys.L.rows();
  if (nv < 2) return std::numeric_limits<double>::infinity();
  // Orthonormal basis of the mean-zero subspace from a Householder frame.
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(nv, 1);
  const Eigen::MatrixXd full = Eigen::HouseholderQR<Eigen::MatrixXd>(ones).householderQ();
  const Eigen::MatrixXd basis = full.rightCols(nv - 1);
  const Eigen::MatrixXd reduced =
      basis.transpose() * (-0.5 * Eigen::MatrixXd(sys.L)) * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
  return eig.eigenvalues().minCoeff();
}

SemidefinitenessReport check_semidefiniteness(const LaplaceSystem& sys,
                                              const std::string& hypothesis, double tol) {
  SemidefinitenessReport report;
  report.hypothesis = hypothesis;
  const Eigen::Index nv = sys.L.rows();
  const Eigen::MatrixXd dense(sys.L);
  for (Eigen::Index i = 0; i < nv; ++i)
    report.scale = std::max(report.scale, std::abs(dense(i, i)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  report.eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + nv);
  report.max_eigenvalue = report.eigenvalues.back();
  const double cutoff = tol * std::max(report.scale, 1e-300);
  int zero_index = -1;
  for (Eigen::Index i = 0; i < nv; ++i)
    if (std::abs(report.eigenvalues[i]) <= cutoff) {
      ++report.near_zero_count;
      zero_index = static_cast<int>(i);
    }
  if (report.near_zero_count == 1) {
    const Eigen::VectorXd v = eig.eigenvectors().col(zero_index);
    report.kernel_constant = (v.array() - v.mean()).abs().maxCoeff() <= 1e-6;
  }
  report.pass = report.max_eigenvalue <= cutoff && report.near_zero_count == 1 &&
                report.kernel_constant;
  return report;
}

}  // namespace dtri
