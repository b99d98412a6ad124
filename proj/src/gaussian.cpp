#include "cjt/gaussian.hpp"

#include "cjt/errors.hpp"
#include "cjt/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace cjt {

namespace {

struct SymmetricRoots {
  Eigen::MatrixXd sqrt;
  Eigen::MatrixXd inv_sqrt;
  double min_eigenvalue = 0.0;
};

SymmetricRoots roots(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  SymmetricRoots out;
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.sqrt = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd inv(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) inv(i) = ev(i) > 0.0 ? 1.0 / std::sqrt(ev(i)) : 0.0;
  out.inv_sqrt = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return out;
}

double infinity_norm(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

QuadraticForm build_gaussian_hamiltonian(const ModelParams& params,
                                         const PhononSpectrum& spectrum,
                                         const MeanFieldSolution& mf, FluctuationBasis basis) {
  const int n = spectrum.size();
  if (mf.theta.size() != n) throw ConfigError("n_sites", "mean-field solution size does not match");
  const double g = params.g;
  const Eigen::VectorXd c = mf.theta.array().cos();

  // Boson block and site-to-row projector for the l and r fluctuations.
  Eigen::MatrixXd boson;
  Eigen::MatrixXd proj;  // proj(row, site)
  if (basis == FluctuationBasis::modes) {
    boson = spectrum.energies.asDiagonal();
    proj = spectrum.wavefunctions;
  } else {
    boson = spectrum.reconstruct();
    proj = Eigen::MatrixXd::Identity(n, n);
  }

  QuadraticForm q;
  q.n_sites = n;
  q.A = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  q.B = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  q.constant = mf.energy;
  for (int i = 0; i < n; ++i) {
    if (std::abs(c(i)) < 1e-12) {
      throw SolverError("gaussian expansion: cos(theta) vanishes at site " + std::to_string(i) +
                        "; the spin-wave energy omega_z / cos(theta) diverges at theta = pi/2");
    }
    q.A(i, i) = params.omega_z / c(i);
  }
  q.A.block(n, n, n, n) = boson;
  q.A.block(2 * n, 2 * n, n, n) = boson;
  for (int row = 0; row < n; ++row) {
    for (int site = 0; site < n; ++site) {
      const double w = 0.5 * g * proj(row, site);
      const double left_a = w * (c(site) - 1.0), left_b = w * (c(site) + 1.0);
      const double right_a = w * (c(site) + 1.0), right_b = w * (c(site) - 1.0);
      q.A(site, n + row) = q.A(n + row, site) = left_a;
      q.B(site, n + row) = q.B(n + row, site) = left_b;
      q.A(site, 2 * n + row) = q.A(2 * n + row, site) = right_a;
      q.B(site, 2 * n + row) = q.B(2 * n + row, site) = right_b;
    }
  }
  return q;
}

GaussianSpectrum bogoliubov_diagonalize(const QuadraticForm& form, const GaussianOptions& options) {
  const int dim = form.dim();
  const Eigen::MatrixXd k = form.A + form.B;  // position curvature
  const Eigen::MatrixXd l = form.A - form.B;  // momentum curvature
  const SymmetricRoots rk = roots(k);
  const SymmetricRoots rl = roots(l);
  const double scale = std::max(1.0, infinity_norm(form.A) + infinity_norm(form.B));
  const double worst = std::min(rk.min_eigenvalue, rl.min_eigenvalue);
  if (worst < -options.stability_tolerance * scale) {
    throw SolverError("unstable expansion point: Gaussian stability matrix has eigenvalue " +
                      std::to_string(worst));
  }

  // Invert the better conditioned of the two curvature matrices.
  const bool via_l = rl.min_eigenvalue >= rk.min_eigenvalue;
  const SymmetricRoots& outer = via_l ? rl : rk;
  const Eigen::MatrixXd& inner = via_l ? k : l;
  Eigen::MatrixXd q = outer.sqrt * inner * outer.sqrt;
  q = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  const Eigen::MatrixXd& w = es.eigenvectors();

  GaussianSpectrum out;
  out.n_sites = form.n_sites;
  out.constant = form.constant;
  out.energies = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  out.U = Eigen::MatrixXd::Zero(dim, dim);
  out.V = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::MatrixXd a = outer.sqrt * w;
  const Eigen::MatrixXd b = outer.inv_sqrt * w;
  out.gap = std::numeric_limits<double>::infinity();
  for (int m = 0; m < dim; ++m) {
    const double om = out.energies(m);
    if (om < options.zero_mode_tolerance) {
      ++out.zero_mode_count;
      continue;
    }
    out.gap = std::min(out.gap, om);
    const double root = std::sqrt(om);
    // via L: U = (L^1/2 W w^-1/2 + L^-1/2 W w^1/2)/2; via K the roles of the two terms swap.
    const Eigen::VectorXd first = via_l ? Eigen::VectorXd(a.col(m) / root) : Eigen::VectorXd(b.col(m) * root);
    const Eigen::VectorXd second = via_l ? Eigen::VectorXd(b.col(m) * root) : Eigen::VectorXd(a.col(m) / root);
    out.U.col(m) = 0.5 * (first + second);
    out.V.col(m) = 0.5 * (first - second);
  }
  if (!std::isfinite(out.gap)) out.gap = 0.0;
  out.zero_point_shift = 0.5 * (out.energies.sum() - form.A.trace());
  const FluctuationVariances f = fluctuation_variances(out);
  out.f_spin = f.spin;
  out.f_left = f.left;
  out.f_right = f.right;
  return out;
}

FluctuationVariances fluctuation_variances(const GaussianSpectrum& spectrum) {
  FluctuationVariances f;
  const double n = spectrum.n_sites;
  f.spin = spectrum.v_block(Species::spin).squaredNorm() / n;
  f.left = spectrum.v_block(Species::left).squaredNorm() / n;
  f.right = spectrum.v_block(Species::right).squaredNorm() / n;
  f.excluded_zero_modes = spectrum.zero_mode_count;
  return f;
}

double adiabatic_gap(const GaussianSpectrum& spectrum) { return spectrum.gap; }

double symplectic_normalization_error(const GaussianSpectrum& spectrum) {
  double worst = 0.0;
  for (Eigen::Index m = 0; m < spectrum.U.cols(); ++m) {
    const double u = spectrum.U.col(m).squaredNorm();
    const double v = spectrum.V.col(m).squaredNorm();
    if (u == 0.0 && v == 0.0) continue;
    worst = std::max(worst, std::abs(u - v - 1.0));
  }
  return worst;
}

GaussianSweep sweep_fluctuations(const ModelParams& params, const PhononSpectrum& spectrum,
                                 const std::vector<double>& g_values,
                                 const MeanFieldOptions& mf_options, const GaussianOptions& options,
                                 int workers) {
  MeanFieldSweep mf = sweep_mean_field(params, spectrum, g_values, mf_options);
  GaussianSweep out;
  out.points.resize(mf.points.size());
  parallel_for(mf.points.size(), workers, [&](std::size_t i) {
    ModelParams p = params;
    p.g = mf.points[i].g;
    GaussianSweepPoint& pt = out.points[i];
    pt.g = p.g;
    pt.mean_field = mf.points[i].solution;
    pt.spectrum = bogoliubov_diagonalize(build_gaussian_hamiltonian(p, spectrum, pt.mean_field), options);
  });
  out.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& pt : out.points) {
    if (pt.spectrum.gap < out.min_gap) {
      out.min_gap = pt.spectrum.gap;
      out.min_gap_at = pt.g;
    }
  }
  if (out.points.empty()) out.min_gap = 0.0;
  return out;
}

}  // namespace cjt
