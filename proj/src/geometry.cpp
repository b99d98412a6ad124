#include "cjt/geometry.hpp"

#include "cjt/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdlib>

namespace cjt {

namespace {

Eigen::VectorXd forces(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd f = -u;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const double d = u(j) - u(k);
      f(j) += (d > 0.0 ? 1.0 : -1.0) / (d * d);
    }
  }
  return f;
}

// dF/du, negative definite for ordered positions.
Eigen::MatrixXd force_jacobian(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    jac(j, j) = -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const double c = 2.0 / std::pow(std::abs(u(j) - u(k)), 3);
      jac(j, j) -= c;
      jac(j, k) = c;
    }
  }
  return jac;
}

bool strictly_increasing(const Eigen::VectorXd& u) {
  for (Eigen::Index j = 1; j < u.size(); ++j) {
    if (!(u(j) > u(j - 1))) return false;
  }
  return true;
}

int site_distance(int j, int l, int n, Boundary boundary) {
  int d = std::abs(j - l);
  if (boundary == Boundary::periodic) d = std::min(d, n - d);
  return d;
}

CouplingMatrix finish(Eigen::MatrixXd hop, const ModelParams& params) {
  CouplingMatrix c;
  c.delta_local = Eigen::VectorXd::Constant(params.n_sites, params.delta_bare);
  if (params.include_local_shift) c.delta_local -= hop.rowwise().sum();
  c.hop = std::move(hop);
  if (params.staggered) c = apply_staggered_transform(c);
  require_positive_local_energies(c);
  return c;
}

}  // namespace

double force_balance_residual(const Eigen::VectorXd& positions) {
  if (positions.size() == 0) return 0.0;
  return forces(positions).cwiseAbs().maxCoeff();
}

ChainGeometry equilibrium_positions(int n_sites, const EquilibriumOptions& options) {
  if (n_sites < 1) throw ConfigError("n_sites", "must be >= 1");
  ChainGeometry geom;
  const Eigen::Index n = n_sites;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);

  if (n > 1) {
    const double half_length = 0.85 * std::pow(static_cast<double>(n), 0.56);
    u = Eigen::VectorXd::LinSpaced(n, -half_length, half_length);

    Eigen::VectorXd f = forces(u);
    double residual = f.cwiseAbs().maxCoeff();
    int iter = 0;
    for (; iter < options.max_iterations && residual >= options.tolerance; ++iter) {
      const Eigen::VectorXd step = (-force_jacobian(u)).llt().solve(f);
      double lambda = 1.0;
      bool accepted = false;
      for (int halving = 0; halving < 60; ++halving, lambda *= 0.5) {
        const Eigen::VectorXd trial = u + lambda * step;
        if (!strictly_increasing(trial)) continue;
        const Eigen::VectorXd ft = forces(trial);
        const double rt = ft.cwiseAbs().maxCoeff();
        if (rt < residual || rt < options.tolerance) {
          u = trial;
          f = ft;
          residual = rt;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    if (residual >= options.tolerance) {
      throw SolverError("equilibrium positions did not converge for N = " +
                        std::to_string(n_sites) + ": residual " + std::to_string(residual) +
                        " after " + std::to_string(iter) + " iterations");
    }
  }

  geom.positions = u;
  geom.spacings = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 1; j < n; ++j) geom.spacings(j) = u(j) - u(j - 1);
  return geom;
}

std::pair<int, int> center_bond(int n_sites) {
  if (n_sites < 2) throw ConfigError("n_sites", "a chain of one ion has no bonds");
  // Odd chains: both central bonds are equal by mirror symmetry.
  const int right = n_sites / 2;
  return {right - 1, right};
}

CouplingMatrix coulomb_couplings(const ChainGeometry& geometry, const ModelParams& params) {
  const auto* scheme = std::get_if<CoulombCoupling>(&params.coupling);
  if (scheme == nullptr) throw ConfigError("coupling.scheme", "expected a coulomb scheme");
  if (geometry.size() != params.n_sites) {
    throw ConfigError("n_sites", "geometry size does not match n_sites");
  }
  const int n = params.n_sites;
  Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      if (j != l) hop(j, l) = 1.0 / std::pow(std::abs(geometry.positions(j) - geometry.positions(l)), 3);
    }
  }
  double scale = 1.0;
  if (scheme->center_hop) {
    if (n < 2) throw ConfigError("coupling.center_hop", "needs at least two ions");
    const auto [a, b] = center_bond(n);
    scale = *scheme->center_hop / hop(a, b);
  } else if (scheme->hop_scale) {
    scale = *scheme->hop_scale;
  } else {
    throw ConfigError("coupling", "coulomb scheme needs center_hop or hop_scale");
  }
  return finish(scale * hop, params);
}

CouplingMatrix homogeneous_couplings(const ModelParams& params) {
  const int n = params.n_sites;
  Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(n, n);
  if (const auto* h = std::get_if<HomogeneousCoupling>(&params.coupling)) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        if (j == l) continue;
        const int d = site_distance(j, l, n, params.boundary);
        if (h->range == HopRange::dipolar) {
          hop(j, l) = h->t / (static_cast<double>(d) * d * d);
        } else if (d == 1) {
          hop(j, l) = h->t;
        }
      }
    }
  } else if (const auto* s = std::get_if<ShortRangeCoupling>(&params.coupling)) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        if (j != l && site_distance(j, l, n, params.boundary) == 1) hop(j, l) = -s->t;
      }
    }
  } else {
    throw ConfigError("coupling.scheme", "expected a homogeneous or short_range scheme");
  }
  return finish(std::move(hop), params);
}

CouplingMatrix build_couplings(const ModelParams& params) {
  params.validate();
  if (std::holds_alternative<CoulombCoupling>(params.coupling)) {
    return coulomb_couplings(equilibrium_positions(params.n_sites), params);
  }
  return homogeneous_couplings(params);
}

}  // namespace cjt
