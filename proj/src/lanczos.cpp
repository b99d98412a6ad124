#include "cjt/lanczos.hpp"

#include "cjt/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cjt {

namespace {

constexpr Eigen::Index dense_limit = 400;

LanczosResult dense_eigenpairs(const SparseMatrix& h, int n_eigen) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (dense + dense.transpose()));
  LanczosResult out;
  const int k = std::min<int>(n_eigen, static_cast<int>(dense.rows()));
  out.eigenvalues = es.eigenvalues().head(k);
  out.eigenvectors = es.eigenvectors().leftCols(k);
  out.residuals.resize(k);
  for (int i = 0; i < k; ++i) {
    out.residuals(i) = (h * out.eigenvectors.col(i) - out.eigenvalues(i) * out.eigenvectors.col(i)).norm();
  }
  out.converged = true;
  return out;
}

// Removes components along the columns of `basis` (twice, for stability).
void orthogonalize(Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index cols) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd c = basis.leftCols(cols).transpose() * v;
    v.noalias() -= basis.leftCols(cols) * c;
  }
}

struct Pair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  bool converged = false;
};

// Thick-restart Lanczos for the lowest eigenpair orthogonal to `locked`.
Pair lowest_deflated(const SparseMatrix& h, const Eigen::MatrixXd& locked, Eigen::Index n_locked,
                     const LanczosOptions& options, std::mt19937_64& rng, int& matvecs) {
  const Eigen::Index n = h.rows();
  const Eigen::Index free_dim = n - n_locked;
  const Eigen::Index m = std::clamp<Eigen::Index>(options.krylov_dim, 4, free_dim);
  const Eigen::Index keep = std::max<Eigen::Index>(1, m / 2);

  std::normal_distribution<double> normal;
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
  };

  Eigen::MatrixXd v(n, m);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd start = random_vector();
  orthogonalize(start, locked, n_locked);
  v.col(0) = start.normalized();
  Eigen::Index filled = 0;  // columns of v already carrying a valid projection in t
  Eigen::VectorXd residual_vector;
  Pair best;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    double beta = 0.0;
    for (Eigen::Index j = filled; j < m; ++j) {
      Eigen::VectorXd w = h * v.col(j);
      ++matvecs;
      orthogonalize(w, locked, n_locked);
      const Eigen::VectorXd coeffs = v.leftCols(j + 1).transpose() * w;
      w.noalias() -= v.leftCols(j + 1) * coeffs;
      const Eigen::VectorXd again = v.leftCols(j + 1).transpose() * w;
      w.noalias() -= v.leftCols(j + 1) * again;
      for (Eigen::Index i = 0; i <= j; ++i) t(i, j) = t(j, i) = coeffs(i) + again(i);
      beta = w.norm();
      if (beta < 1e-12 * std::max(1.0, t.topLeftCorner(j + 1, j + 1).cwiseAbs().maxCoeff())) {
        // Invariant subspace: continue with a fresh direction carrying no coupling.
        w = random_vector();
        orthogonalize(w, locked, n_locked);
        orthogonalize(w, v, j + 1);
        beta = 0.0;
        residual_vector = w.normalized();
      } else {
        residual_vector = w / beta;
      }
      if (j + 1 < m) {
        v.col(j + 1) = residual_vector;
        if (beta != 0.0) {
          // Entry refreshed by the next column's projection; set for completeness.
          t(j + 1, j) = t(j, j + 1) = beta;
        }
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd theta = es.eigenvalues();
    const Eigen::MatrixXd& s = es.eigenvectors();
    best.value = theta(0);
    best.residual = std::abs(beta * s(m - 1, 0));
    if (best.residual < options.tolerance * std::max(1.0, std::abs(theta(0)))) {
      best.vector = (v * s.col(0)).normalized();
      best.residual = (h * best.vector - best.value * best.vector).norm();
      ++matvecs;
      if (best.residual < options.tolerance * std::max(1.0, std::abs(best.value))) {
        best.converged = true;
        return best;
      }
    }
    if (restart == options.max_restarts) break;

    // Thick restart: keep the lowest Ritz vectors plus the residual direction.
    const Eigen::MatrixXd ritz = v * s.leftCols(keep);
    v.leftCols(keep) = ritz;
    t.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) {
      t(i, i) = theta(i);
      t(i, keep) = t(keep, i) = beta * s(m - 1, i);
    }
    v.col(keep) = residual_vector;
    filled = keep;
  }
  best.vector = (v * Eigen::MatrixXd(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvectors()).col(0)).normalized();
  best.residual = (h * best.vector - best.value * best.vector).norm();
  return best;
}

}  // namespace

LanczosResult lowest_eigenpairs(const SparseMatrix& h, const LanczosOptions& options) {
  if (h.rows() != h.cols()) throw SolverError("lanczos: matrix is not square");
  if (options.n_eigen < 1) throw SolverError("lanczos: n_eigen must be positive");
  if (h.rows() <= std::max<Eigen::Index>(dense_limit, 4 * options.krylov_dim)) return dense_eigenpairs(h, options.n_eigen);

  const int k = static_cast<int>(std::min<Eigen::Index>(options.n_eigen, h.rows()));
  std::mt19937_64 rng(options.seed);
  LanczosResult out;
  out.eigenvalues.resize(k);
  out.eigenvectors.resize(h.rows(), k);
  out.residuals.resize(k);
  out.converged = true;
  for (int i = 0; i < k; ++i) {
    Pair p = lowest_deflated(h, out.eigenvectors, i, options, rng, out.matvecs);
    if (!p.converged) {
      throw SolverError("lanczos: eigenpair " + std::to_string(i) + " did not converge (residual " +
                        std::to_string(p.residual) + " after " + std::to_string(out.matvecs) +
                        " matrix-vector products)");
    }
    out.eigenvalues(i) = p.value;
    out.eigenvectors.col(i) = p.vector;
    out.residuals(i) = p.residual;
  }
  return out;
}

}  // namespace cjt
