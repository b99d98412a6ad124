// geometry.hpp — ion equilibrium positions and boson coupling matrices

#pragma once

#include "cjt/coupling_matrix.hpp"
#include "cjt/model.hpp"

#include <Eigen/Core>

#include <optional>

namespace cjt {

// Dimensionless positions u_j = r_j / l with l^3 = e^2 / (4 pi eps0 m omega_ax^2).
struct ChainGeometry {
  Eigen::VectorXd positions;  // ascending
  // spacings(j) = positions(j) - positions(j-1); spacings(0) is 0.
  Eigen::VectorXd spacings;
  std::optional<double> length_unit;  // metres per dimensionless unit

  int size() const { return static_cast<int>(positions.size()); }
};

struct EquilibriumOptions {
  double tolerance = 1e-12;  // max per-ion force residual
  int max_iterations = 200;
};

// Force balance u_j = sum_{k<j} (u_j-u_k)^-2 - sum_{k>j} (u_j-u_k)^-2, solved by
// damped Newton from a uniform seed. Throws SolverError on non-convergence.
ChainGeometry equilibrium_positions(int n_sites, const EquilibriumOptions& options = {});

// Largest |force| over ions at `positions`.
double force_balance_residual(const Eigen::VectorXd& positions);

// Coulomb chain couplings t_{j,l} ∝ |u_j - u_l|^-3, local shift and staggering
// per `params`. `params.coupling` must hold a CoulombCoupling.
CouplingMatrix coulomb_couplings(const ChainGeometry& geometry, const ModelParams& params);

// Homogeneous (dipolar or nearest) and short-range couplings.
CouplingMatrix homogeneous_couplings(const ModelParams& params);

// Dispatches on params.coupling; Coulomb chains solve their own geometry.
CouplingMatrix build_couplings(const ModelParams& params);

// Index pair (0-based) of the bond used as the chain's centre bond.
std::pair<int, int> center_bond(int n_sites);

}  // namespace cjt
