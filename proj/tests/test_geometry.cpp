#include "cjt/errors.hpp"
#include "cjt/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace cjt;

namespace {

// Force on ion j computed directly from the dimensionless potential.
double direct_force(const Eigen::VectorXd& u, int j) {
  double f = -u(j);
  for (int k = 0; k < u.size(); ++k) {
    if (k == j) continue;
    const double d = u(j) - u(k);
    f += (d > 0 ? 1.0 : -1.0) / (d * d);
  }
  return f;
}

ModelParams coulomb_params(int n, double center_hop) {
  ModelParams p;
  p.n_sites = n;
  p.delta_bare = 2.2;
  p.coupling = CoulombCoupling{center_hop, std::nullopt};
  return p;
}

}  // namespace

TEST_CASE("equilibrium positions: analytic small chains") {
  const auto g1 = equilibrium_positions(1);
  REQUIRE(g1.size() == 1);
  CHECK(g1.positions(0) == 0.0);

  const auto g2 = equilibrium_positions(2);
  const double a2 = std::cbrt(0.25);
  CHECK(g2.positions(0) == doctest::Approx(-a2).epsilon(1e-12));
  CHECK(g2.positions(1) == doctest::Approx(a2).epsilon(1e-12));

  const auto g3 = equilibrium_positions(3);
  const double a3 = std::cbrt(1.25);
  CHECK(g3.positions(0) == doctest::Approx(-a3).epsilon(1e-12));
  CHECK(std::abs(g3.positions(1)) < 1e-12);
  CHECK(g3.positions(2) == doctest::Approx(a3).epsilon(1e-12));
  CHECK(g3.spacings(0) == 0.0);
  CHECK(g3.spacings(1) == doctest::Approx(a3));
}

TEST_CASE("equilibrium positions: balance, symmetry and spacing profile up to N = 100") {
  for (int n : {2, 5, 10, 20, 37, 64, 100}) {
    const auto g = equilibrium_positions(n);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(direct_force(g.positions, j)));
    CHECK(worst < 1e-12);
    CHECK(force_balance_residual(g.positions) < 1e-12);
    CHECK(std::abs(g.positions.sum()) < 1e-10);
    for (int j = 0; j < n; ++j) CHECK(std::abs(g.positions(j) + g.positions(n - 1 - j)) < 1e-10);
    for (int j = 1; j < n; ++j) CHECK(g.spacings(j) > 0.0);
    // spacings grow from the centre outwards
    for (int j = 2; j <= n / 2; ++j) CHECK(g.spacings(j) < g.spacings(j - 1) + 1e-12);
  }
  CHECK_THROWS_AS(equilibrium_positions(0), ConfigError);
  EquilibriumOptions tight;
  tight.max_iterations = 0;
  CHECK_THROWS_AS(equilibrium_positions(10, tight), SolverError);
}

TEST_CASE("Coulomb couplings: centre scaling, shift, staggering") {
  ModelParams p = coulomb_params(20, 0.5);
  const CouplingMatrix c = build_couplings(p);
  CHECK(c.hop(9, 10) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.hop.isApprox(c.hop.transpose(), 0.0));
  CHECK(c.hop.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.delta_local.array() == 2.2).all());

  p.include_local_shift = true;
  const CouplingMatrix s = build_couplings(p);
  for (int j = 0; j < 20; ++j) CHECK(s.delta_local(j) == doctest::Approx(2.2 - c.hop.row(j).sum()).epsilon(1e-14));

  p.staggered = true;
  const CouplingMatrix st = build_couplings(p);
  CHECK(st.hop(9, 10) == doctest::Approx(-0.5));
  CHECK(st.hop(9, 11) == doctest::Approx(s.hop(9, 11)));
  CHECK(st.delta_local == s.delta_local);

  CHECK_THROWS_AS(build_couplings(coulomb_params(1, 0.5)), ConfigError);
  ModelParams big = coulomb_params(20, 3.0);
  big.include_local_shift = true;
  CHECK_THROWS_AS(build_couplings(big), UnstableBath);
}

TEST_CASE("Coulomb couplings on equally spaced positions equal the dipolar chain") {
  const int n = 9;
  ChainGeometry geom;
  geom.positions = Eigen::VectorXd::LinSpaced(n, -4.0, 4.0);
  geom.spacings = Eigen::VectorXd::Ones(n);
  ModelParams p = coulomb_params(n, 0.7);
  p.include_local_shift = true;
  const CouplingMatrix a = coulomb_couplings(geom, p);
  ModelParams h = p;
  h.coupling = HomogeneousCoupling{0.7, HopRange::dipolar};
  const CouplingMatrix b = homogeneous_couplings(h);
  CHECK((a.hop - b.hop).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a.delta_local - b.delta_local).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("homogeneous and short-range couplings") {
  ModelParams p;
  p.n_sites = 20;
  p.delta_bare = 2.0;
  p.coupling = ShortRangeCoupling{0.2};
  const CouplingMatrix sr = build_couplings(p);
  for (int j = 0; j < 20; ++j) {
    CHECK(sr.delta_local(j) == 2.0);
    for (int l = 0; l < 20; ++l) CHECK(sr.hop(j, l) == (std::abs(j - l) == 1 ? -0.2 : 0.0));
  }

  p.coupling = HomogeneousCoupling{0.5, HopRange::dipolar};
  const CouplingMatrix d = build_couplings(p);
  CHECK(d.hop(3, 5) == 0.0625);
  CHECK(d.hop(3, 4) == 0.5);

  p.n_sites = 2;
  const CouplingMatrix two = build_couplings(p);
  CHECK(two.hop(0, 1) == 0.5);
  CHECK(two.hop(1, 0) == 0.5);

  p.n_sites = 8;
  p.boundary = Boundary::periodic;
  const CouplingMatrix ring = build_couplings(p);
  CHECK(ring.hop(0, 7) == 0.5);
  CHECK(ring.hop(0, 6) == 0.0625);
  CHECK(ring.hop(0, 4) == doctest::Approx(0.5 / 64.0));

  p.coupling = HomogeneousCoupling{0.5, HopRange::nearest};
  const CouplingMatrix near = build_couplings(p);
  CHECK(near.hop(0, 7) == 0.5);
  CHECK(near.hop(0, 2) == 0.0);
}

TEST_CASE("dipolar local shift approaches -2 zeta(3) t in the bulk") {
  // zeta(3) by direct summation with an integral tail bound
  double zeta3 = 0.0;
  for (int k = 1; k <= 200000; ++k) zeta3 += 1.0 / (double(k) * k * k);
  zeta3 += 1.0 / (2.0 * 200000.0 * 200000.0);
  ModelParams p;
  p.n_sites = 401;
  p.delta_bare = 3.0;
  p.include_local_shift = true;
  p.coupling = HomogeneousCoupling{0.5, HopRange::dipolar};
  const CouplingMatrix c = build_couplings(p);
  const double shift = c.delta_local(200) - 3.0;
  CHECK(shift == doctest::Approx(-2.0 * zeta3 * 0.5).epsilon(2e-5));
  CHECK(2.0 * zeta3 == doctest::Approx(2.404).epsilon(1e-4));
}

TEST_CASE("centre bond convention") {
  CHECK(center_bond(20) == std::pair<int, int>{9, 10});
  CHECK(center_bond(2) == std::pair<int, int>{0, 1});
  const auto [a, b] = center_bond(7);
  const auto g = equilibrium_positions(7);
  CHECK(g.positions(b) - g.positions(a) == doctest::Approx(g.positions(a + 2) - g.positions(a + 1)));
}
