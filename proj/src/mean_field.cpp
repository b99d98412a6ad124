#include "cjt/mean_field.hpp"

#include "cjt/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace cjt {

namespace {

struct Candidate {
  Eigen::VectorXd theta;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const Eigen::MatrixXd& j, double omega_z) {
  const Eigen::VectorXd field = j * theta.array().sin().matrix();
  return 0.5 * (omega_z * theta.array().sin() - theta.array().cos() * field.array()).matrix();
}

Eigen::MatrixXd hessian(const Eigen::VectorXd& theta, const Eigen::MatrixXd& j, double omega_z) {
  const Eigen::VectorXd s = theta.array().sin();
  const Eigen::VectorXd c = theta.array().cos();
  const Eigen::VectorXd field = j * s;
  Eigen::MatrixXd h = -0.5 * c.asDiagonal() * j * c.asDiagonal();
  h.diagonal().array() += 0.5 * (omega_z * c.array() + s.array() * field.array());
  return h;
}

// Newton step for the stationarity equations; empty when it fails to reduce the residual.
std::optional<Eigen::VectorXd> newton_step(const Eigen::VectorXd& theta, const Eigen::MatrixXd& j,
                                           double omega_z, double residual, bool require_minimum) {
  const Eigen::MatrixXd h = hessian(theta, j, omega_z);
  const Eigen::VectorXd grad = gradient(theta, j, omega_z);
  Eigen::VectorXd step;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() == Eigen::Success) {
    step = -llt.solve(grad);
  } else if (require_minimum) {
    return std::nullopt;
  } else {
    step = -h.fullPivLu().solve(grad);
  }
  if (!step.allFinite()) return std::nullopt;
  double mu = 1.0;
  for (int k = 0; k < 12; ++k, mu *= 0.5) {
    Eigen::VectorXd trial = theta + mu * step;
    if (stationarity_residual(trial, j, omega_z) < residual) return trial;
  }
  return std::nullopt;
}

Candidate run_seed(Eigen::VectorXd theta, const Eigen::MatrixXd& j, double omega_z,
                   const MeanFieldOptions& options) {
  Candidate out;
  double lambda = std::clamp(options.damping, 1.0 / 64.0, 1.0);
  double previous_update = std::numeric_limits<double>::infinity();
  int growth = 0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const double r = stationarity_residual(theta, j, omega_z);
    if (r < options.tolerance) {
      // Polish towards machine precision; downstream Gaussian modes need it.
      double current = r;
      for (int k = 0; k < 8 && current > 1e-15; ++k) {
        auto next = newton_step(theta, j, omega_z, current, false);
        if (!next) break;
        theta = *next;
        current = stationarity_residual(theta, j, omega_z);
      }
      out.converged = true;
      break;
    }
    if (auto next = newton_step(theta, j, omega_z, r, true)) {
      theta = *next;
      continue;
    }
    const Eigen::VectorXd field = j * theta.array().sin().matrix();
    Eigen::VectorXd target(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) target(i) = std::atan2(field(i), omega_z);
    const Eigen::VectorXd updated = (1.0 - lambda) * theta + lambda * target;
    const double update = (updated - theta).cwiseAbs().maxCoeff();
    if (update > previous_update) {
      if (++growth >= 5) {
        lambda = std::max(lambda * 0.5, 1.0 / 64.0);
        growth = 0;
      }
    } else {
      growth = 0;
    }
    previous_update = update;
    theta = updated;
  }
  out.theta = theta;
  out.iterations = it;
  out.residual = stationarity_residual(theta, j, omega_z);
  out.energy = mean_field_energy(theta, j, omega_z);
  return out;
}

}  // namespace

Eigen::MatrixXd exchange_matrix(const PhononSpectrum& spectrum, double g) {
  for (int n = 0; n < spectrum.size(); ++n) {
    if (!(spectrum.energies(n) > 0.0)) throw UnstableBath("collective mode", n, spectrum.energies(n));
  }
  const Eigen::MatrixXd& b = spectrum.wavefunctions;
  return 2.0 * g * g * b.transpose() * spectrum.energies.cwiseInverse().asDiagonal() * b;
}

double mean_field_energy(const Eigen::VectorXd& theta, const Eigen::MatrixXd& exchange,
                         double omega_z) {
  const Eigen::VectorXd s = theta.array().sin();
  return -0.5 * omega_z * theta.array().cos().sum() - 0.25 * s.dot(exchange * s);
}

double variational_energy(const Eigen::VectorXd& theta, const Eigen::VectorXd& alpha_r,
                          const Eigen::VectorXd& alpha_l, const PhononSpectrum& spectrum,
                          double g, double omega_z) {
  const Eigen::MatrixXd& b = spectrum.wavefunctions;
  const Eigen::VectorXd site_r = b.transpose() * alpha_r;
  const Eigen::VectorXd site_l = b.transpose() * alpha_l;
  const Eigen::VectorXd s = theta.array().sin();
  // <sigma^+> = sin(theta)/2 pairs with a_r and a_l^dag; both amplitudes are real.
  return -0.5 * omega_z * theta.array().cos().sum() +
         spectrum.energies.dot((alpha_r.array().square() + alpha_l.array().square()).matrix()) +
         g * s.dot(site_r + site_l);
}

double stationarity_residual(const Eigen::VectorXd& theta, const Eigen::MatrixXd& exchange,
                             double omega_z) {
  if (theta.size() == 0) return 0.0;
  return (2.0 * gradient(theta, exchange, omega_z)).cwiseAbs().maxCoeff();
}

MeanFieldSolution solve_mean_field(const ModelParams& params, const PhononSpectrum& spectrum,
                                   const MeanFieldOptions& options) {
  const int n = spectrum.size();
  if (n != params.n_sites) throw ConfigError("n_sites", "spectrum size does not match n_sites");
  const Eigen::MatrixXd j = exchange_matrix(spectrum, params.g);
  const double omega_z = params.omega_z;

  std::vector<Eigen::VectorXd> seeds;
  if (options.warm_start && options.warm_start->size() == n) {
    // A normal-phase warm start carries no direction; nudge it off the fixed point.
    Eigen::VectorXd w = *options.warm_start;
    if (w.cwiseAbs().maxCoeff() < 1e-8) w.setConstant(1e-3);
    seeds.push_back(w);
  }
  seeds.push_back(Eigen::VectorXd::Constant(n, options.initial_angle));
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> angle(0.05, 1.5);
  for (int k = 0; k < options.random_restarts; ++k) {
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = angle(rng);
    seeds.push_back(s);
  }

  std::optional<Candidate> best;
  int total_iterations = 0;
  double worst_residual = 0.0;
  for (const auto& seed : seeds) {
    Candidate c = run_seed(seed, j, omega_z, options);
    total_iterations += c.iterations;
    if (!c.converged) {
      worst_residual = std::max(worst_residual, c.residual);
      continue;
    }
    if (!best || c.energy < best->energy - 1e-14 * std::max(1.0, std::abs(best->energy))) {
      best = std::move(c);
    }
  }

  // The normal state is always stationary; it competes like any other candidate.
  Candidate normal;
  normal.theta = Eigen::VectorXd::Zero(n);
  normal.energy = mean_field_energy(normal.theta, j, omega_z);
  normal.converged = true;
  const bool normal_stable =
      (0.5 * omega_z * Eigen::MatrixXd::Identity(n, n) - 0.5 * j).llt().info() == Eigen::Success;
  if (!best) {
    if (!normal_stable) {
      throw SolverError("mean-field: no seed converged (worst residual " +
                        std::to_string(worst_residual) + ", g = " + std::to_string(params.g) +
                        ") and the normal state is unstable");
    }
    best = normal;
  } else if (normal.energy < best->energy - 1e-14 * std::max(1.0, std::abs(best->energy)) ||
             best->theta.cwiseAbs().maxCoeff() < 1e-10) {
    // seeds that collapsed onto the normal fixed point report it exactly
    best = normal;
  }

  MeanFieldSolution sol;
  sol.theta = best->theta;
  if (sol.theta.array().sin().sum() < 0.0) sol.theta = -sol.theta;
  sol.energy = best->energy;
  sol.converged = true;
  sol.iterations = total_iterations;
  sol.residual = stationarity_residual(sol.theta, j, omega_z);

  const Eigen::VectorXd projected = spectrum.wavefunctions * sol.theta.array().sin().matrix();
  sol.alpha_r = -(params.g * 0.5) * projected.cwiseQuotient(spectrum.energies);
  sol.alpha_l = sol.alpha_r;
  return sol;
}

SiteObservables mf_observables(const MeanFieldSolution& solution, const PhononSpectrum& spectrum) {
  SiteObservables obs;
  const Eigen::MatrixXd& b = spectrum.wavefunctions;
  const auto n = static_cast<double>(spectrum.size());
  obs.amplitude_r = b.transpose() * solution.alpha_r;
  obs.amplitude_l = b.transpose() * solution.alpha_l;
  obs.phonons_per_site = obs.amplitude_r.array().square() + obs.amplitude_l.array().square();
  obs.spin_x = solution.theta.array().sin();
  obs.spin_z = -solution.theta.array().cos();
  obs.total_phonons = obs.phonons_per_site.sum();
  const double sum_r = obs.amplitude_r.sum();
  const double sum_l = obs.amplitude_l.sum();
  obs.order_parameter = (sum_r * sum_r + sum_l * sum_l) / (n * n);
  return obs;
}

CriticalCoupling critical_coupling_estimate(const PhononSpectrum& spectrum, double omega_z) {
  CriticalCoupling out;
  const Eigen::MatrixXd kernel = exchange_matrix(spectrum, 1.0);
  out.lowest_mode = spectrum.energies.minCoeff();
  out.homogeneous = std::sqrt(out.lowest_mode * omega_z / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel, Eigen::EigenvaluesOnly);
  out.linearized = std::sqrt(omega_z / solver.eigenvalues().maxCoeff());
  return out;
}

std::vector<double> linear_grid(double start, double stop, int points) {
  if (points < 2) throw ConfigError("sweep.points", "a sweep needs at least two points");
  if (!(stop > start)) throw ConfigError("sweep.stop", "must exceed sweep.start");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double span = stop - start;
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = start + (i * span) / (points - 1);
  grid.back() = stop;
  return grid;
}

std::optional<double> detect_transition(const std::vector<double>& g_values,
                                        const std::vector<double>& total_phonons,
                                        double threshold) {
  for (std::size_t i = 1; i < g_values.size() && i < total_phonons.size(); ++i) {
    if (total_phonons[i] > threshold && total_phonons[i - 1] <= threshold) {
      return 0.5 * (g_values[i - 1] + g_values[i]);
    }
  }
  return std::nullopt;
}

MeanFieldSweep sweep_mean_field(ModelParams params, const PhononSpectrum& spectrum,
                                const std::vector<double>& g_values,
                                const MeanFieldOptions& options) {
  for (std::size_t i = 1; i < g_values.size(); ++i) {
    if (!(g_values[i] > g_values[i - 1])) throw ConfigError("sweep", "g grid must be strictly increasing");
  }
  MeanFieldSweep sweep;
  MeanFieldOptions opts = options;
  std::vector<double> phonons;
  for (double g : g_values) {
    params.g = g;
    MeanFieldSweepPoint p;
    p.g = g;
    p.solution = solve_mean_field(params, spectrum, opts);
    p.observables = mf_observables(p.solution, spectrum);
    opts.warm_start = p.solution.theta;
    phonons.push_back(p.observables.total_phonons);
    sweep.points.push_back(std::move(p));
  }
  sweep.transition = detect_transition(g_values, phonons);
  return sweep;
}

}  // namespace cjt
