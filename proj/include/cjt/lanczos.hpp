// lanczos.hpp — restarted Lanczos for the lowest eigenpairs of a real
// symmetric sparse matrix.

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>

namespace cjt {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LanczosOptions {
  int n_eigen = 1;
  int krylov_dim = 40;  // vectors kept before a thick restart
  double tolerance = 1e-10;  // ||H x - lambda x|| for every returned pair
  int max_restarts = 500;
  std::uint64_t seed = 7;
};

struct LanczosResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, unit norm
  Eigen::VectorXd residuals;
  int matvecs = 0;
  bool converged = false;
};

// Dense fallback is used below a few hundred rows. Throws SolverError if the
// requested pairs do not reach tolerance.
LanczosResult lowest_eigenpairs(const SparseMatrix& h, const LanczosOptions& options = {});

}  // namespace cjt
