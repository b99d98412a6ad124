#include "cjt/errors.hpp"
#include "cjt/geometry.hpp"
#include "cjt/phonon_modes.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace cjt;

namespace {

const double pi = std::acos(-1.0);

CouplingMatrix uniform_chain(int n, double delta, double t) {
  CouplingMatrix c;
  c.delta_local = Eigen::VectorXd::Constant(n, delta);
  c.hop = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) c.hop(j, j + 1) = c.hop(j + 1, j) = t;
  return c;
}

}  // namespace

TEST_CASE("open uniform chain matches the tridiagonal spectrum") {
  for (int n : {1, 2, 7, 20}) {
    const double delta = 2.2, t = 0.37;
    const PhononSpectrum s = diagonalize_bath(uniform_chain(n, delta, t));
    std::vector<double> expected;
    for (int k = 1; k <= n; ++k) expected.push_back(delta + 2.0 * t * std::cos(k * pi / (n + 1)));
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < n; ++k) CHECK(s.energies(k) == doctest::Approx(expected[k]).epsilon(1e-12));
  }
}

TEST_CASE("single mode, orthonormality, reconstruction and trace") {
  CouplingMatrix one;
  one.delta_local = Eigen::VectorXd::Constant(1, 1.7);
  one.hop = Eigen::MatrixXd::Zero(1, 1);
  const PhononSpectrum s1 = diagonalize_bath(one);
  CHECK(s1.energies(0) == 1.7);
  CHECK(s1.wavefunctions(0, 0) == 1.0);

  ModelParams p;
  p.n_sites = 20;
  p.delta_bare = 2.2;
  p.include_local_shift = true;
  p.staggered = true;
  p.coupling = CoulombCoupling{0.5, std::nullopt};
  const CouplingMatrix c = build_couplings(p);
  const PhononSpectrum s = diagonalize_bath(c);
  const Eigen::MatrixXd& b = s.wavefunctions;
  CHECK((b * b.transpose() - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.reconstruct() - c.one_body()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(s.energies.sum() == doctest::Approx(c.delta_local.sum()).epsilon(1e-12));
  for (int k = 1; k < 20; ++k) CHECK(s.energies(k) >= s.energies(k - 1));
}

TEST_CASE("periodic chain: plane waves and q = 0 lowest for negative hopping") {
  const int n = 12;
  CouplingMatrix c = uniform_chain(n, 2.0, -0.3);
  c.hop(0, n - 1) = c.hop(n - 1, 0) = -0.3;
  const PhononSpectrum s = diagonalize_bath(c);
  CHECK(s.energies(0) == doctest::Approx(2.0 - 0.6).epsilon(1e-12));
  for (int j = 0; j < n; ++j) CHECK(s.wavefunctions(0, j) == doctest::Approx(1.0 / std::sqrt(double(n))).epsilon(1e-12));
  // Each degenerate +-q pair spans the cos/sin plane waves of that momentum.
  for (int k = 1; k < n; ++k) {
    const Eigen::VectorXd v = s.wavefunctions.row(k);
    const double e = s.energies(k);
    const double q = std::acos(std::clamp((e - 2.0) / (-0.6), -1.0, 1.0));
    double proj = 0.0;
    Eigen::VectorXd cq(n), sq(n);
    for (int j = 0; j < n; ++j) {
      cq(j) = std::cos(q * j);
      sq(j) = std::sin(q * j);
    }
    if (cq.norm() > 1e-8) proj += std::pow(v.dot(cq.normalized()), 2);
    if (sq.norm() > 1e-8) proj += std::pow(v.dot(sq.normalized()), 2);
    CHECK(proj == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("degenerate modes are deterministic and sign fixed") {
  CouplingMatrix c;
  c.delta_local = Eigen::VectorXd::Constant(6, 1.0);
  c.hop = Eigen::MatrixXd::Zero(6, 6);
  const PhononSpectrum s = diagonalize_bath(c);
  // Fully degenerate: the canonical basis, in site order.
  CHECK((s.wavefunctions - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  const PhononSpectrum again = diagonalize_bath(c);
  CHECK(again.wavefunctions == s.wavefunctions);
  for (int k = 0; k < 6; ++k) {
    Eigen::Index arg;
    s.wavefunctions.row(k).cwiseAbs().maxCoeff(&arg);
    CHECK(s.wavefunctions(k, arg) > 0.0);
  }
}

TEST_CASE("spectrum is invariant under site relabelling") {
  ModelParams p;
  p.n_sites = 10;
  p.delta_bare = 3.0;
  p.coupling = HomogeneousCoupling{0.4, HopRange::dipolar};
  p.include_local_shift = true;
  const CouplingMatrix c = build_couplings(p);
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  CouplingMatrix q;
  q.delta_local.resize(10);
  q.hop.resize(10, 10);
  for (int j = 0; j < 10; ++j) {
    q.delta_local(j) = c.delta_local(perm[j]);
    for (int l = 0; l < 10; ++l) q.hop(j, l) = c.hop(perm[j], perm[l]);
  }
  const PhononSpectrum a = diagonalize_bath(c);
  const PhononSpectrum b = diagonalize_bath(q);
  CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("staggering leaves the spectrum unchanged (bipartite and dipolar)") {
  const CouplingMatrix c = uniform_chain(9, 2.0, 0.5);
  const PhononSpectrum a = diagonalize_bath(c);
  const PhononSpectrum b = diagonalize_bath(apply_staggered_transform(c));
  CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-12);

  ModelParams p;
  p.n_sites = 9;
  p.delta_bare = 3.0;
  p.coupling = HomogeneousCoupling{0.5, HopRange::dipolar};
  const CouplingMatrix d = build_couplings(p);
  const PhononSpectrum x = diagonalize_bath(d);
  const PhononSpectrum y = diagonalize_bath(apply_staggered_transform(d));
  CHECK((x.energies - y.energies).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("non-positive collective modes raise an unstable-bath error") {
  const CouplingMatrix c = uniform_chain(4, 1.0, 0.9);
  try {
    diagonalize_bath(c);
    FAIL("expected UnstableBath");
  } catch (const UnstableBath& e) {
    CHECK(e.index() == 0);
    CHECK(e.energy() < 0.0);
  }
}
