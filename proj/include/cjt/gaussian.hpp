// gaussian.hpp — quadratic fluctuations around a mean-field solution
//
// Fluctuation operators are ordered psi = (s_0..s_{N-1}, l_0..l_{N-1}, r_0..r_{N-1})
// where s are Holstein-Primakoff spin waves about the local spin direction and
// l, r are chiral boson fluctuations (collective modes or sites, see
// FluctuationBasis). The quadratic Hamiltonian is
//
//   H_G = psi^dag A psi + (1/2) (psi^T B psi + h.c.) + constant
//
// with real symmetric A and B. Bogoliubov quasiparticles c_m satisfy
// psi = U c + V c^dag and H_G = sum_m omega_m c^dag_m c_m + const'.

#pragma once

#include "cjt/mean_field.hpp"
#include "cjt/model.hpp"
#include "cjt/phonon_modes.hpp"

#include <Eigen/Core>

#include <vector>

namespace cjt {

enum class Species { spin = 0, left = 1, right = 2 };

enum class FluctuationBasis { modes, sites };

struct QuadraticForm {
  int n_sites = 0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  double constant = 0.0;  // mean-field energy

  int dim() const { return static_cast<int>(A.rows()); }
};

QuadraticForm build_gaussian_hamiltonian(const ModelParams& params,
                                         const PhononSpectrum& spectrum,
                                         const MeanFieldSolution& mf,
                                         FluctuationBasis basis = FluctuationBasis::modes);

struct GaussianOptions {
  double zero_mode_tolerance = 1e-6;  // omega_m below this is a zero mode
  double stability_tolerance = 1e-9;  // allowed negative curvature, relative to ||M||

  bool operator==(const GaussianOptions&) const = default;
};

struct GaussianSpectrum {
  int n_sites = 0;
  Eigen::VectorXd energies;  // all 3N omega_m, ascending
  // Column m belongs to energies(m); columns of zero modes are left zero.
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
  int zero_mode_count = 0;
  double f_spin = 0.0;
  double f_left = 0.0;
  double f_right = 0.0;
  double gap = 0.0;               // smallest omega_m above the zero-mode tolerance
  double zero_point_shift = 0.0;  // (sum omega_m - tr A) / 2
  double constant = 0.0;

  Eigen::Block<const Eigen::MatrixXd> u_block(Species s) const {
    return U.middleRows(static_cast<int>(s) * n_sites, n_sites);
  }
  Eigen::Block<const Eigen::MatrixXd> v_block(Species s) const {
    return V.middleRows(static_cast<int>(s) * n_sites, n_sites);
  }
};

// Throws SolverError ("unstable expansion point") if the stability matrix has
// a negative eigenvalue beyond tolerance.
GaussianSpectrum bogoliubov_diagonalize(const QuadraticForm& form,
                                        const GaussianOptions& options = {});

struct FluctuationVariances {
  double spin = 0.0;
  double left = 0.0;
  double right = 0.0;
  int excluded_zero_modes = 0;
};

// F_gamma = (1/N) sum_{n,m} |V^gamma_{n,m}|^2 over non-zero modes.
FluctuationVariances fluctuation_variances(const GaussianSpectrum& spectrum);

double adiabatic_gap(const GaussianSpectrum& spectrum);

// max over non-zero modes of | |U_m|^2 - |V_m|^2 - 1 |
double symplectic_normalization_error(const GaussianSpectrum& spectrum);

struct GaussianSweepPoint {
  double g = 0.0;
  MeanFieldSolution mean_field;
  GaussianSpectrum spectrum;
};

struct GaussianSweep {
  std::vector<GaussianSweepPoint> points;
  double min_gap = 0.0;
  double min_gap_at = 0.0;
};

// Mean-field solutions are warm-started in ascending g; the Gaussian step for
// each point runs on up to `workers` threads.
GaussianSweep sweep_fluctuations(const ModelParams& params, const PhononSpectrum& spectrum,
                                 const std::vector<double>& g_values,
                                 const MeanFieldOptions& mf_options = {},
                                 const GaussianOptions& options = {}, int workers = 1);

}  // namespace cjt
