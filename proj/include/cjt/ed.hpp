// ed.hpp — exact diagonalization of the truncated cJT Hamiltonian
//
//   H = (omega_z/2) sum_j sigma^z_j + sum_{eps,j,l} M_{j,l} a^dag_{eps,j} a_{eps,l}
//       + g sum_j [ sigma^+_j (a_{r,j} + a^dag_{l,j}) + h.c. ]
//
// with M = diag(Delta_j) + t, in the chiral product basis of basis.hpp.

#pragma once

#include "cjt/basis.hpp"
#include "cjt/coupling_matrix.hpp"
#include "cjt/lanczos.hpp"
#include "cjt/model.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace cjt {

struct EdConfig {
  int boson_cutoff = 4;
  Truncation truncation = Truncation::per_species;
  std::size_t max_dimension = ProductBasis::default_max_dimension;
  int excited_states = 0;
  double tolerance = 1e-10;
  double truncation_threshold = 1e-6;  // shell weight above this flags the cutoff

  bool operator==(const EdConfig&) const = default;
};

struct EdProblem {
  ProductBasis basis;
  SparseMatrix hamiltonian;
  double omega_z = 1.0;
};

EdProblem build_hamiltonian(const ModelParams& params, const CouplingMatrix& coupling,
                            const EdConfig& config);

// The same model assembled from x/y bosons,
//   H_c = (g/sqrt 2) sum_j [sigma^x_j (a_x + a_x^dag) + sigma^y_j (a_y + a_y^dag)],
// over the product basis (spin, n_x, n_y).
Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> build_cartesian_hamiltonian(
    const ModelParams& params, const CouplingMatrix& coupling, const ProductBasis& basis);

struct EdResult {
  std::size_t dimension = 0;
  int boson_cutoff = 0;
  double ground_energy = 0.0;
  std::vector<double> excited_energies;
  double order_parameter = 0.0;
  double mean_phonons = 0.0;
  Eigen::VectorXd spin_z;
  double charge = 0.0;
  double commutator_norm = 0.0;  // Frobenius norm of [H, C]
  double truncation_weight = 0.0;
  bool cutoff_converged = false;
  bool degenerate_ground = false;  // lowest two levels closer than 1e-8 (relative)
  double residual = 0.0;
  int matvecs = 0;
  Eigen::VectorXd ground_state;
};

EdResult ground_state(const EdProblem& problem, const EdConfig& config);

// ||[H, C]||_F for a Hamiltonian expressed in `basis`.
double charge_commutator_norm(const SparseMatrix& h, const ProductBasis& basis);

// sum_{j,k,eps} <a^dag_{eps,j} a_{eps,k}> / N^2 on a normalized state.
double two_point_order_parameter(const Eigen::VectorXd& state, const ProductBasis& basis);

struct ConvergencePoint {
  int cutoff = 0;
  double energy = 0.0;
  double order_parameter = 0.0;
  double truncation_weight = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergencePoint> points;
  std::optional<int> converged_at;  // smallest cutoff reproduced by the next one
  double tolerance = 1e-6;
};

ConvergenceReport convergence_scan(const ModelParams& params, const CouplingMatrix& coupling,
                                   EdConfig config, const std::vector<int>& cutoffs,
                                   double tolerance = 1e-6);

// Eigenvector dump, little-endian:
//   char[4] "CJTV" | u32 version (1) | u32 n_sites | u32 cutoff | u32 truncation
//   (0 per_species, 1 total) | u32 local_dim | u64 dimension |
//   dimension x (f64 real, f64 imag)
void write_eigenvector(const std::filesystem::path& path, const ProductBasis& basis,
                       const Eigen::VectorXcd& state);

struct EigenvectorDump {
  int n_sites = 0;
  int cutoff = 0;
  Truncation truncation = Truncation::per_species;
  int local_dim = 0;
  Eigen::VectorXcd state;
};

EigenvectorDump read_eigenvector(const std::filesystem::path& path);

}  // namespace cjt
