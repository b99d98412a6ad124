#include "cjt/model.hpp"

#include "cjt/errors.hpp"
#include "cjt/geometry.hpp"

#include <cmath>

namespace cjt {

namespace {

void require(bool ok, const char* path, const char* message) {
  if (!ok) throw ConfigError(path, message);
}

}  // namespace

void ModelParams::validate() const {
  require(n_sites >= 1, "n_sites", "must be >= 1");
  require(omega_z > 0.0, "omega_z", "must be > 0");
  require(delta_bare > 0.0, "delta", "must be > 0");
  require(g >= 0.0, "g", "must be >= 0");
  if (const auto* c = std::get_if<CoulombCoupling>(&coupling)) {
    require(c->center_hop.has_value() != c->hop_scale.has_value(), "coupling",
            "coulomb scheme needs exactly one of center_hop or hop_scale");
    require(boundary == Boundary::open, "boundary", "coulomb chains are open");
    if (c->center_hop) require(n_sites >= 2, "coupling.center_hop", "needs at least two ions");
  }
  if (boundary == Boundary::periodic && staggered) {
    require(n_sites % 2 == 0, "staggered", "staggering a periodic chain needs even n_sites");
  }
}

void LabParams::validate() const {
  require(n_sites >= 1, "n_sites", "must be >= 1");
  require(ion_mass > 0.0, "ion_mass", "must be > 0");
  require(charge > 0.0, "charge", "must be > 0");
  require(trap_radial_freq > 0.0, "trap_radial_freq", "must be > 0");
  require(internal_splitting > 0.0, "internal_splitting", "must be > 0");
  require(gradient >= 0.0, "gradient", "must be >= 0");
  require(magnetic_moment > 0.0, "magnetic_moment", "must be > 0");
  require(drive_blue > 0.0, "drive_blue", "must be > 0");
  require(drive_red > 0.0, "drive_red", "must be > 0");
  require(ion_spacing.has_value() != axial_freq.has_value(), "ion_spacing",
          "exactly one of ion_spacing or axial_freq must be given");
  if (ion_spacing) require(*ion_spacing > 0.0, "ion_spacing", "must be > 0");
  if (axial_freq) require(*axial_freq > 0.0, "axial_freq", "must be > 0");
  require(rwa_threshold > 0.0, "rwa_threshold", "must be > 0");
}

DrivePair drive_frequencies(double internal_splitting, double trap_radial_freq, double omega_z,
                            double delta) {
  const double base = internal_splitting - omega_z;
  const double side = trap_radial_freq - delta;
  return {base + side, base - side};
}

double zero_point_length(double ion_mass, double trap_radial_freq) {
  return std::sqrt(phys::hbar / (2.0 * ion_mass * trap_radial_freq));
}

double coulomb_hop(double ion_mass, double charge, double trap_radial_freq, double distance) {
  const double coulomb = charge * charge / (4.0 * phys::pi * phys::epsilon0);
  // (J m) / (kg s^-1 m^3) = s^-1
  return coulomb / (2.0 * ion_mass * trap_radial_freq * distance * distance * distance);
}

LabConversion from_lab_params(const LabParams& lab) {
  lab.validate();
  LabConversion out;

  out.omega_z_phys = lab.internal_splitting - 0.5 * (lab.drive_blue + lab.drive_red);
  out.delta_phys = lab.trap_radial_freq - 0.5 * (lab.drive_blue - lab.drive_red);
  if (!(out.omega_z_phys > 0.0) || !(out.delta_phys > 0.0)) {
    throw ConfigError("drive_blue",
                      "inconsistent drive frequencies: derived omega_z = " +
                          std::to_string(out.omega_z_phys) +
                          ", Delta = " + std::to_string(out.delta_phys) + " must both be > 0");
  }

  const double rbar = zero_point_length(lab.ion_mass, lab.trap_radial_freq);
  out.g_phys = std::abs(lab.magnetic_moment * lab.gradient * rbar) / std::sqrt(2.0) / phys::hbar;

  ModelParams& m = out.model;
  m.n_sites = lab.n_sites;
  m.omega_z = 1.0;
  m.delta_bare = out.delta_phys / out.omega_z_phys;
  m.g = out.g_phys / out.omega_z_phys;
  m.boundary = lab.boundary;
  m.staggered = lab.staggered;
  m.include_local_shift = lab.include_local_shift;

  if (lab.ion_spacing) {
    out.hop_phys = coulomb_hop(lab.ion_mass, lab.charge, lab.trap_radial_freq, *lab.ion_spacing);
    out.length_unit = *lab.ion_spacing;
    m.coupling = HomogeneousCoupling{out.hop_phys / out.omega_z_phys, HopRange::dipolar};
  } else {
    const double coulomb = lab.charge * lab.charge / (4.0 * phys::pi * phys::epsilon0);
    out.length_unit = std::cbrt(coulomb / (lab.ion_mass * *lab.axial_freq * *lab.axial_freq));
    const double scale = coulomb_hop(lab.ion_mass, lab.charge, lab.trap_radial_freq, out.length_unit);
    m.coupling = CoulombCoupling{std::nullopt, scale / out.omega_z_phys};
    if (lab.n_sites >= 2) {
      const auto geom = equilibrium_positions(lab.n_sites);
      const auto [a, b] = center_bond(lab.n_sites);
      const double d = std::abs(geom.positions(b) - geom.positions(a));
      out.hop_phys = scale / (d * d * d);
    }
  }
  m.validate();

  out.rwa_ratio_g = out.g_phys / lab.trap_radial_freq;
  out.rwa_ratio_hop = out.hop_phys / lab.trap_radial_freq;
  if (out.rwa_ratio_g > lab.rwa_threshold) {
    out.warnings.push_back("g / omega_t = " + std::to_string(out.rwa_ratio_g) +
                           " exceeds the rotating-wave threshold");
  }
  if (out.rwa_ratio_hop > lab.rwa_threshold) {
    out.warnings.push_back("t_coul / omega_t = " + std::to_string(out.rwa_ratio_hop) +
                           " exceeds the rotating-wave threshold");
  }
  return out;
}

LabParams ca40_lab_params(int n_sites) {
  constexpr double two_pi = 2.0 * phys::pi;
  LabParams lab;
  lab.n_sites = n_sites;
  lab.ion_mass = phys::ca40_mass;
  lab.charge = phys::elementary_charge;
  lab.trap_radial_freq = two_pi * 1e6;
  lab.internal_splitting = two_pi * 20e6;
  lab.gradient = 35.0;
  lab.magnetic_moment = phys::bohr_magneton * phys::lande_s12 / 2.0;
  const double omega_z = two_pi * 20e3;
  const auto drives =
      drive_frequencies(lab.internal_splitting, lab.trap_radial_freq, omega_z, 2.2 * omega_z);
  lab.drive_blue = drives.blue;
  lab.drive_red = drives.red;
  lab.ion_spacing = 16e-6;
  return lab;
}

}  // namespace cjt
