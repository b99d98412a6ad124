#include "cjt/basis.hpp"
#include "cjt/coupling_matrix.hpp"
#include "cjt/errors.hpp"
#include "cjt/geometry.hpp"
#include "cjt/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace cjt;

namespace {

constexpr double two_pi = 2.0 * 3.14159265358979323846;

// Independent SI evaluation of the lab mapping, written out from the formulas.
struct LabOracle {
  double omega_z, delta, g, hop;
};

LabOracle lab_oracle(const LabParams& lab) {
  const double hbar = 1.054571817e-34;
  const double k = 8.9875517923e9;  // 1 / (4 pi eps0)
  LabOracle o;
  o.omega_z = lab.internal_splitting - (lab.drive_blue + lab.drive_red) / 2.0;
  o.delta = lab.trap_radial_freq - (lab.drive_blue - lab.drive_red) / 2.0;
  const double rbar = std::sqrt(hbar / (2.0 * lab.ion_mass * lab.trap_radial_freq));
  o.g = lab.magnetic_moment * lab.gradient * rbar / std::sqrt(2.0) / hbar;
  const double d = *lab.ion_spacing;
  o.hop = k * lab.charge * lab.charge / (2.0 * lab.ion_mass * lab.trap_radial_freq * d * d * d);
  return o;
}

}  // namespace

TEST_CASE("model params validation names the offending field") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.n_sites = 0;
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "n_sites");
  }
  p = ModelParams{};
  p.g = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.omega_z = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.coupling = CoulombCoupling{0.5, 1.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.coupling = CoulombCoupling{0.5, std::nullopt};
  p.n_sites = 4;
  p.boundary = Boundary::periodic;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ModelParams{};
  p.n_sites = 5;
  p.boundary = Boundary::periodic;
  p.staggered = true;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("40Ca lab preset maps to the published dimensionless parameters") {
  const LabParams lab = ca40_lab_params(20);
  const LabConversion conv = from_lab_params(lab);
  const LabOracle o = lab_oracle(lab);
  CHECK(conv.omega_z_phys == doctest::Approx(two_pi * 20e3).epsilon(1e-9));
  CHECK(conv.model.delta_bare == doctest::Approx(2.2).epsilon(1e-9));
  CHECK(conv.omega_z_phys == doctest::Approx(o.omega_z).epsilon(1e-12));
  CHECK(conv.g_phys == doctest::Approx(o.g).epsilon(1e-9));
  CHECK(conv.hop_phys == doctest::Approx(o.hop).epsilon(1e-9));
  const auto* h = std::get_if<HomogeneousCoupling>(&conv.model.coupling);
  REQUIRE(h != nullptr);
  CHECK(h->range == HopRange::dipolar);
  // 0.5 omega_z to the precision with which the spacing is quoted (16 um, 2 digits).
  CHECK(h->t > 0.5 * std::pow(16.0 / 16.5, 3));
  CHECK(h->t < 0.5 * std::pow(16.0 / 15.5, 3));
  CHECK(std::abs(conv.model.g - 0.2) < 0.15 * 0.2);
  CHECK(conv.model.omega_z == 1.0);
}

TEST_CASE("lab mapping: zero gradient, scale consistency, drive errors, rwa warnings") {
  LabParams lab = ca40_lab_params(4);
  lab.gradient = 0.0;
  CHECK(from_lab_params(lab).model.g == 0.0);

  lab = ca40_lab_params(4);
  const double g1 = from_lab_params(lab).g_phys;
  lab.gradient *= 3.0;
  CHECK(from_lab_params(lab).g_phys == doctest::Approx(3.0 * g1).epsilon(1e-15));

  lab = ca40_lab_params(4);
  lab.drive_blue = lab.drive_red = lab.internal_splitting + 1.0;
  try {
    from_lab_params(lab);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "drive_blue");
  }

  lab = ca40_lab_params(4);
  CHECK(from_lab_params(lab).warnings.empty());
  lab.rwa_threshold = 1e-4;
  const auto conv = from_lab_params(lab);
  CHECK(conv.warnings.size() == 2);
  CHECK(conv.rwa_ratio_g == doctest::Approx(conv.g_phys / lab.trap_radial_freq));

  lab = ca40_lab_params(4);
  lab.ion_spacing.reset();
  CHECK_THROWS_AS(from_lab_params(lab), ConfigError);
}

TEST_CASE("axial-frequency lab chains become scaled Coulomb chains") {
  LabParams lab = ca40_lab_params(6);
  lab.ion_spacing.reset();
  lab.axial_freq = two_pi * 200e3;
  const LabConversion conv = from_lab_params(lab);
  const auto* c = std::get_if<CoulombCoupling>(&conv.model.coupling);
  REQUIRE(c != nullptr);
  REQUIRE(c->hop_scale.has_value());
  const double k = 8.9875517923e9;
  const double ell = std::cbrt(k * lab.charge * lab.charge / (lab.ion_mass * *lab.axial_freq * *lab.axial_freq));
  CHECK(conv.length_unit == doctest::Approx(ell).epsilon(1e-12));
  // Centre-bond hop equals the coupling matrix entry built from the scale.
  ModelParams m = conv.model;
  m.staggered = false;
  m.include_local_shift = false;
  const CouplingMatrix cm = build_couplings(m);
  CHECK(cm.hop(2, 3) * conv.omega_z_phys == doctest::Approx(conv.hop_phys).epsilon(1e-10));
}

TEST_CASE("drive frequencies invert the detuning relations") {
  const auto d = drive_frequencies(100.0, 10.0, 2.0, 3.0);
  CHECK(d.blue == doctest::Approx(100.0 - 2.0 + (10.0 - 3.0)));
  CHECK(d.red == doctest::Approx(100.0 - 2.0 - (10.0 - 3.0)));
}

TEST_CASE("staggered transform flips odd separations and is an involution") {
  CouplingMatrix c;
  c.delta_local = Eigen::VectorXd::Constant(4, 2.0);
  c.hop = Eigen::MatrixXd::Zero(4, 4);
  c.hop(0, 1) = c.hop(1, 0) = 0.5;
  c.hop(0, 2) = c.hop(2, 0) = 0.3;
  c.hop(0, 3) = c.hop(3, 0) = 0.1;
  const CouplingMatrix s = apply_staggered_transform(c);
  CHECK(s.hop(0, 1) == -0.5);
  CHECK(s.hop(0, 2) == 0.3);
  CHECK(s.hop(3, 0) == -0.1);
  CHECK(s.delta_local == c.delta_local);
  const CouplingMatrix back = apply_staggered_transform(s);
  CHECK(back.hop == c.hop);
  CHECK(back.delta_local == c.delta_local);
}

TEST_CASE("positive local energies are enforced") {
  CouplingMatrix c;
  c.delta_local = Eigen::Vector3d(1.0, -0.5, 1.0);
  c.hop = Eigen::MatrixXd::Zero(3, 3);
  try {
    require_positive_local_energies(c);
    FAIL("expected UnstableBath");
  } catch (const UnstableBath& e) {
    CHECK(e.index() == 1);
    CHECK(e.energy() == -0.5);
  }
}

TEST_CASE("U(1) charge operator") {
  const ProductBasis basis(1, 1);
  const Eigen::VectorXd c = u1_charge_diagonal(basis);
  CHECK(c(basis.local_index(0, 1, 0)) == 0.5);
  CHECK(c(basis.local_index(0, 0, 0)) == -0.5);
  CHECK(c(basis.local_index(1, 0, 1)) == -0.5);

  for (int n = 1; n <= 3; ++n) {
    const auto op = u1_charge_operator(n, 1);
    const ProductBasis b(n, 1);
    CHECK(op.coeff(0, 0) == doctest::Approx(-0.5 * n));  // vacuum, all spins down
    CHECK(static_cast<std::size_t>(op.rows()) == b.size());
    CHECK(op.nonZeros() <= op.rows());
  }
  CHECK_THROWS_AS(u1_charge_operator(1, 0), ConfigError);
  CHECK_THROWS_AS(u1_charge_operator(8, 4, 1000), DimensionError);
}

TEST_CASE("product basis ordering and truncation") {
  const ProductBasis b(2, 2);
  CHECK(b.local_dim() == 18);
  CHECK(b.size() == 324);
  CHECK(b.stride(0) == 18);
  CHECK(b.stride(1) == 1);
  // site 0 is the most significant digit
  CHECK(b.local_at(18 * 5 + 7, 0) == 5);
  CHECK(b.local_at(18 * 5 + 7, 1) == 7);
  const auto& s = b.local_states()[5];
  CHECK(b.local_index(s.spin, s.n_a, s.n_b) == 5);
  CHECK(b.local_states()[0].spin == 0);

  const ProductBasis t(1, 3, Truncation::total);
  CHECK(t.local_dim() == 2 * 10);
  CHECK(t.local_index(0, 2, 2) == -1);
  CHECK(ProductBasis::dimension_for(3, 2, Truncation::total) == 12u * 12u * 12u);
  CHECK(ProductBasis::dimension_for(100, 10, Truncation::per_species) == std::numeric_limits<std::size_t>::max());
}
