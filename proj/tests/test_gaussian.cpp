#include "cjt/errors.hpp"
#include "cjt/gaussian.hpp"
#include "cjt/geometry.hpp"
#include "cjt/phonon_modes.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>

using namespace cjt;

namespace {

ModelParams fig2(double g) {
  ModelParams p;
  p.n_sites = 20;
  p.delta_bare = 2.2;
  p.g = g;
  p.coupling = HomogeneousCoupling{0.5, HopRange::nearest};
  p.staggered = true;
  p.include_local_shift = true;
  return p;
}

ModelParams ring(int n, double g) {
  ModelParams p = fig2(g);
  p.n_sites = n;
  p.boundary = Boundary::periodic;
  return p;
}

struct Setup {
  PhononSpectrum spec;
  MeanFieldSolution mf;
  QuadraticForm form;
  GaussianSpectrum gs;
};

Setup setup(const ModelParams& p, FluctuationBasis basis = FluctuationBasis::modes) {
  Setup s;
  s.spec = diagonalize_bath(build_couplings(p));
  s.mf = solve_mean_field(p, s.spec);
  s.form = build_gaussian_hamiltonian(p, s.spec, s.mf, basis);
  s.gs = bogoliubov_diagonalize(s.form);
  return s;
}

// Positive half of the spectrum of Sigma M, M = [[A, B], [B, A]], plus the
// largest imaginary part encountered.
std::pair<std::vector<double>, double> sigma_m_frequencies(const QuadraticForm& q) {
  const int d = q.dim();
  Eigen::MatrixXd m(2 * d, 2 * d);
  m << q.A, q.B, q.B, q.A;
  Eigen::MatrixXd sigma_m = m;
  sigma_m.bottomRows(d) *= -1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(sigma_m, false);
  std::vector<double> re;
  double imag = 0.0;
  for (int k = 0; k < 2 * d; ++k) {
    re.push_back(es.eigenvalues()(k).real());
    imag = std::max(imag, std::abs(es.eigenvalues()(k).imag()));
  }
  std::sort(re.begin(), re.end());
  return {std::vector<double>(re.begin() + d, re.end()), imag};
}

}  // namespace

TEST_CASE("decoupled limit g = 0") {
  const Setup s = setup(fig2(0.0));
  const int n = 20;
  CHECK(s.form.B.cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.form.A.topLeftCorner(n, n) - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0);
  std::vector<double> expected(n, 1.0);
  for (int k = 0; k < n; ++k) {
    expected.push_back(s.spec.energies(k));
    expected.push_back(s.spec.energies(k));
  }
  std::sort(expected.begin(), expected.end());
  for (int m = 0; m < 3 * n; ++m) CHECK(s.gs.energies(m) == doctest::Approx(expected[m]).epsilon(1e-12));
  CHECK(s.gs.V.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.gs.f_spin == doctest::Approx(0.0));
  CHECK(s.gs.f_left == doctest::Approx(0.0));
  CHECK(s.gs.f_right == doctest::Approx(0.0));
  CHECK(adiabatic_gap(s.gs) == doctest::Approx(std::min(1.0, s.spec.energies(0))).epsilon(1e-12));
  CHECK(s.gs.zero_point_shift == doctest::Approx(0.0).epsilon(1e-12));
  // U is a permutation of the identity
  CHECK((s.gs.U.transpose() * s.gs.U - Eigen::MatrixXd::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single site in the normal phase matches the 3x3 equations of motion") {
  ModelParams p;
  p.n_sites = 1;
  p.delta_bare = 2.0;
  p.g = 0.4;
  p.coupling = ShortRangeCoupling{0.0};
  const Setup s = setup(p);
  REQUIRE(s.mf.is_normal());
  // i d/dt (s, r, l^dag) = D (s, r, l^dag)
  Eigen::Matrix3d d;
  d << 1.0, p.g, p.g, p.g, 2.0, 0.0, -p.g, 0.0, -2.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(d, false);
  std::vector<double> freqs;
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(es.eigenvalues()(k).imag()) < 1e-12);
    freqs.push_back(std::abs(es.eigenvalues()(k).real()));
  }
  std::sort(freqs.begin(), freqs.end());
  for (int k = 0; k < 3; ++k) CHECK(s.gs.energies(k) == doctest::Approx(freqs[k]).epsilon(1e-12));
}

TEST_CASE("Bogoliubov spectrum agrees with the Sigma M eigenvalues and is real") {
  for (double g : {0.1, 0.3, 0.36, 0.5}) {
    const Setup s = setup(fig2(g));
    const auto [freqs, imag] = sigma_m_frequencies(s.form);
    CHECK(imag < 1e-6);  // the Goldstone Jordan block splits at sqrt(machine eps)
    for (int m = 0; m < 60; ++m) {
      if (s.gs.energies(m) < 1e-6) continue;
      CHECK(s.gs.energies(m) == doctest::Approx(freqs[m]).epsilon(1e-8));
    }
  }
}

TEST_CASE("U and V solve the Bogoliubov equations with canonical normalization") {
  for (double g : {0.2, 0.45}) {
    const Setup s = setup(fig2(g));
    const auto& A = s.form.A;
    const auto& B = s.form.B;
    for (int m = 0; m < 60; ++m) {
      const double w = s.gs.energies(m);
      if (w < 1e-6) {
        CHECK(s.gs.U.col(m).norm() == 0.0);
        continue;
      }
      CHECK((A * s.gs.U.col(m) + B * s.gs.V.col(m) - w * s.gs.U.col(m)).norm() < 1e-9);
      CHECK((A * s.gs.V.col(m) + B * s.gs.U.col(m) + w * s.gs.V.col(m)).norm() < 1e-9);
    }
    CHECK(symplectic_normalization_error(s.gs) < 1e-8);
    // Zero point: ground energy from the explicit form equals (sum w - tr A)/2.
    double sum = 0.0;
    for (int m = 0; m < 60; ++m) sum += s.gs.energies(m);
    CHECK(s.gs.zero_point_shift == doctest::Approx(0.5 * (sum - A.trace())));
  }
}

TEST_CASE("variances do not depend on the boson basis") {
  for (double g : {0.2, 0.3, 0.4, 0.55}) {
    const Setup a = setup(fig2(g), FluctuationBasis::modes);
    const Setup b = setup(fig2(g), FluctuationBasis::sites);
    CHECK(std::abs(a.gs.f_spin - b.gs.f_spin) < 1e-8);
    CHECK(std::abs(a.gs.f_left - b.gs.f_left) < 1e-8);
    CHECK(std::abs(a.gs.f_right - b.gs.f_right) < 1e-8);
    // Goldstone frequencies are sqrt(round-off); compare them by count only.
    REQUIRE(a.gs.zero_mode_count == b.gs.zero_mode_count);
    const int z = a.gs.zero_mode_count;
    const int rest = static_cast<int>(a.gs.energies.size()) - z;
    CHECK((a.gs.energies.tail(rest) - b.gs.energies.tail(rest)).cwiseAbs().maxCoeff() < 1e-8);
    const FluctuationVariances f = fluctuation_variances(a.gs);
    CHECK(f.spin == a.gs.f_spin);
    CHECK(f.excluded_zero_modes == a.gs.zero_mode_count);
  }
}

TEST_CASE("exactly one Goldstone mode in the broken phase of the ring") {
  const double gc = std::sqrt(0.1);
  for (double ratio : {1.1, 1.5, 2.0}) {
    const Setup s = setup(ring(16, ratio * gc));
    REQUIRE_FALSE(s.mf.is_normal());
    CHECK(s.gs.zero_mode_count == 1);
    CHECK(s.gs.energies(0) < 1e-6);
    CHECK(s.gs.energies(1) > 1e-3);
  }
  const Setup normal = setup(ring(16, 0.8 * gc));
  CHECK(normal.gs.zero_mode_count == 0);
}

TEST_CASE("continuity at g = 1e-6") {
  const Setup s = setup(fig2(1e-6));
  const Setup z = setup(fig2(0.0));
  CHECK(s.gs.V.cwiseAbs().maxCoeff() < 1e-5);
  CHECK((s.gs.energies - z.gs.energies).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unstable expansion points and the singular angle are rejected") {
  const ModelParams p = fig2(0.5);
  const PhononSpectrum spec = diagonalize_bath(build_couplings(p));
  MeanFieldSolution normal;
  normal.theta = Eigen::VectorXd::Zero(20);
  try {
    bogoliubov_diagonalize(build_gaussian_hamiltonian(p, spec, normal));
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("unstable expansion point") != std::string::npos);
  }
  MeanFieldSolution flat;
  flat.theta = Eigen::VectorXd::Constant(20, std::acos(-1.0) / 2.0);
  CHECK_THROWS_AS(build_gaussian_hamiltonian(p, spec, flat), SolverError);
}

TEST_CASE("fluctuation sweep: normalization, peaks and gap minimum at the transition") {
  const ModelParams p = fig2(0.0);
  const PhononSpectrum spec = diagonalize_bath(build_couplings(p));
  const auto grid = linear_grid(0.05, 0.6, 50);
  const GaussianSweep sweep = sweep_fluctuations(p, spec, grid, {}, {}, 2);
  REQUIRE(sweep.points.size() == 50);
  for (const auto& pt : sweep.points) CHECK(symplectic_normalization_error(pt.spectrum) < 1e-8);

  const auto fine = linear_grid(0.0, 0.6, 601);
  const GaussianSweep dense = sweep_fluctuations(p, spec, fine);
  std::vector<double> nph;
  for (const auto& pt : dense.points) nph.push_back(mf_observables(pt.mean_field, spec).total_phonons);
  const auto gc = detect_transition(fine, nph);
  REQUIRE(gc.has_value());
  CHECK(std::abs(dense.min_gap_at - *gc) <= 1e-3);
  double best[3] = {0, 0, 0}, at[3] = {0, 0, 0};
  for (const auto& pt : dense.points) {
    const double f[3] = {pt.spectrum.f_spin, pt.spectrum.f_left, pt.spectrum.f_right};
    for (int k = 0; k < 3; ++k) {
      if (f[k] > best[k]) {
        best[k] = f[k];
        at[k] = pt.g;
      }
    }
  }
  for (int k = 0; k < 3; ++k) CHECK(std::abs(at[k] - *gc) < 0.05);
}
