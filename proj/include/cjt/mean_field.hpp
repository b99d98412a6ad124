// mean_field.hpp — product-state variational solution of the cJT model
//
// For spins |theta_j> = cos(theta_j/2)|0> + sin(theta_j/2)|1> (phi = 0) and
// real coherent amplitudes alpha_{eps,n}, minimising over alpha gives
//
//   alpha_{eps,n} = -(g / 2 Delta_n) sum_j b_{n,j} sin(theta_j)
//   E(theta)      = -(omega_z/2) sum_j cos(theta_j) - (1/4) sum_{j,l} J_{j,l} sin(theta_j) sin(theta_l)
//
// whose stationary points satisfy omega_z tan(theta_j) = sum_l J_{j,l} sin(theta_l).

#pragma once

#include "cjt/model.hpp"
#include "cjt/phonon_modes.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace cjt {

// J_{j,l} = 2 sum_n (g^2 / Delta_n) b_{n,j} b_{n,l}
Eigen::MatrixXd exchange_matrix(const PhononSpectrum& spectrum, double g);

struct MeanFieldOptions {
  double tolerance = 1e-10;  // residual of the stationarity equations
  int max_iterations = 20000;
  double damping = 0.5;  // weight of the new iterate in the fixed-point update
  double initial_angle = 0.3;
  int random_restarts = 4;
  std::uint64_t seed = 20120401;
  std::optional<Eigen::VectorXd> warm_start;

  bool operator==(const MeanFieldOptions&) const = default;
};

struct MeanFieldSolution {
  Eigen::VectorXd theta;
  double phi = 0.0;
  Eigen::VectorXd alpha_r;  // per mode n
  Eigen::VectorXd alpha_l;
  double energy = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;

  bool is_normal(double tol = 1e-12) const { return theta.cwiseAbs().maxCoeff() <= tol; }
};

// E(theta) with alpha at its optimum.
double mean_field_energy(const Eigen::VectorXd& theta, const Eigen::MatrixXd& exchange,
                         double omega_z);

// Full variational energy <Psi_MF|H|Psi_MF> for arbitrary real amplitudes.
double variational_energy(const Eigen::VectorXd& theta, const Eigen::VectorXd& alpha_r,
                          const Eigen::VectorXd& alpha_l, const PhononSpectrum& spectrum,
                          double g, double omega_z);

// max_j |omega_z sin(theta_j) - cos(theta_j) (J sin theta)_j|
double stationarity_residual(const Eigen::VectorXd& theta, const Eigen::MatrixXd& exchange,
                             double omega_z);

MeanFieldSolution solve_mean_field(const ModelParams& params, const PhononSpectrum& spectrum,
                                   const MeanFieldOptions& options = {});

struct SiteObservables {
  Eigen::VectorXd amplitude_r;  // <a_{r,j}>
  Eigen::VectorXd amplitude_l;
  Eigen::VectorXd phonons_per_site;
  Eigen::VectorXd spin_x;
  Eigen::VectorXd spin_z;
  double total_phonons = 0.0;
  double order_parameter = 0.0;
};

SiteObservables mf_observables(const MeanFieldSolution& solution, const PhononSpectrum& spectrum);

struct CriticalCoupling {
  double lowest_mode = 0.0;  // Delta_0
  double homogeneous = 0.0;  // sqrt(Delta_0 omega_z / 2)
  double linearized = 0.0;   // from the largest eigenvalue of J / g^2
};

CriticalCoupling critical_coupling_estimate(const PhononSpectrum& spectrum, double omega_z);

// Strictly increasing grid of `points` values from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, int points);

struct MeanFieldSweepPoint {
  double g = 0.0;
  MeanFieldSolution solution;
  SiteObservables observables;
};

struct MeanFieldSweep {
  std::vector<MeanFieldSweepPoint> points;
  std::optional<double> transition;  // midpoint of first interval crossing the threshold
};

inline constexpr double transition_phonon_threshold = 1e-6;

// Ascending sweep with warm starts from the previous point.
MeanFieldSweep sweep_mean_field(ModelParams params, const PhononSpectrum& spectrum,
                                const std::vector<double>& g_values,
                                const MeanFieldOptions& options = {});

std::optional<double> detect_transition(const std::vector<double>& g_values,
                                        const std::vector<double>& total_phonons,
                                        double threshold = transition_phonon_threshold);

}  // namespace cjt
