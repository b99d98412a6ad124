#include "cjt/phonon_modes.hpp"

#include "cjt/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace cjt {

namespace {

constexpr double cluster_tolerance = 1e-9;
constexpr double tie_tolerance = 1e-10;

// Index of the largest entry of `values`; near-ties resolve to the lowest index.
Eigen::Index pivot(const Eigen::VectorXd& values) {
  const double top = values.maxCoeff();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) >= top - tie_tolerance * std::max(1.0, std::abs(top))) return i;
  }
  return 0;
}

// Canonical orthonormal basis of span(q): pivoted Gram-Schmidt on the
// columns of the projector q q^T, which does not depend on how q was chosen.
Eigen::MatrixXd canonical_cluster_basis(const Eigen::MatrixXd& q) {
  Eigen::MatrixXd residual = q * q.transpose();
  Eigen::MatrixXd basis(q.rows(), q.cols());
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Eigen::Index col = pivot(residual.colwise().norm().transpose());
    Eigen::VectorXd v = residual.col(col);
    v /= v.norm();
    // Re-orthogonalize against earlier vectors to keep rounding out.
    for (Eigen::Index i = 0; i < k; ++i) v -= basis.col(i).dot(v) * basis.col(i);
    v /= v.norm();
    basis.col(k) = v;
    residual -= v * (v.transpose() * residual);
  }
  return basis;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const Eigen::Index i = pivot(v.cwiseAbs());
  if (v(i) < 0.0) v = -v;
}

}  // namespace

PhononSpectrum diagonalize_bath(const CouplingMatrix& c) {
  const Eigen::MatrixXd m = c.one_body();
  if (!m.isApprox(m.transpose(), 1e-12)) {
    throw ConfigError("coupling", "hop matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw SolverError("bath eigendecomposition failed");

  const Eigen::VectorXd energies = solver.eigenvalues();
  Eigen::MatrixXd vectors = solver.eigenvectors();
  const double scale = std::max(1.0, energies.cwiseAbs().maxCoeff());

  const Eigen::Index n = energies.size();
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index end = start + 1;
    while (end < n && energies(end) - energies(end - 1) <= cluster_tolerance * scale) ++end;
    if (end - start > 1) {
      vectors.middleCols(start, end - start) =
          canonical_cluster_basis(vectors.middleCols(start, end - start));
    }
    start = end;
  }
  for (Eigen::Index k = 0; k < n; ++k) fix_sign(vectors.col(k));

  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(energies(k) > 0.0)) throw UnstableBath("collective mode", static_cast<int>(k), energies(k));
  }

  PhononSpectrum spec;
  spec.energies = energies;
  spec.wavefunctions = vectors.transpose();
  return spec;
}

}  // namespace cjt
