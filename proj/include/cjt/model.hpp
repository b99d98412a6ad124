// model.hpp — cooperative Jahn-Teller model definition, unit conventions and
// conversion from trapped-ion laboratory parameters.
//
// Conventions used throughout the library:
//   * hbar = 1; energies are in units of the spin splitting omega_z unless a
//     quantity is explicitly physical (LabParams, LabConversion::*_phys).
//   * Spin state |0> is the sigma^z = -1 eigenstate, so the g = 0 ground state
//     is all spins in |0> with energy -N omega_z / 2.
//   * Sites are indexed from 0.

#pragma once

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cjt {

enum class Boundary { open, periodic };
enum class HopRange { dipolar, nearest };

// t_{j,l} = scale / |u_j - u_l|^3 over Coulomb-crystal equilibrium positions.
// Exactly one of `center_hop` (target value of the central bond) or
// `hop_scale` (the dimensionless prefactor itself) must be set.
struct CoulombCoupling {
  std::optional<double> center_hop;
  std::optional<double> hop_scale;
  bool operator==(const CoulombCoupling&) const = default;
};

// Constant ion spacing: t_{j,l} = t / |j - l|^3 (dipolar) or t for |j-l| = 1.
struct HomogeneousCoupling {
  double t = 0.0;
  HopRange range = HopRange::dipolar;
  bool operator==(const HomogeneousCoupling&) const = default;
};

// t_{j,l} = -t for |j - l| = 1.
struct ShortRangeCoupling {
  double t = 0.0;
  bool operator==(const ShortRangeCoupling&) const = default;
};

using CouplingScheme = std::variant<CoulombCoupling, HomogeneousCoupling, ShortRangeCoupling>;

struct ModelParams {
  int n_sites = 1;
  double omega_z = 1.0;
  double delta_bare = 1.0;
  double g = 0.0;
  CouplingScheme coupling = ShortRangeCoupling{};
  Boundary boundary = Boundary::open;
  bool staggered = false;
  bool include_local_shift = false;

  // Throws ConfigError (paths relative to the model object).
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

// Physical trapped-ion parameters, SI units with angular frequencies in rad/s.
struct LabParams {
  int n_sites = 1;
  double ion_mass = 0.0;            // kg
  double charge = 0.0;              // C
  double trap_radial_freq = 0.0;    // omega_t
  double internal_splitting = 0.0;  // omega_0
  double gradient = 0.0;            // b, T/m
  double magnetic_moment = 0.0;     // mu, J/T
  double drive_blue = 0.0;          // nu_b
  double drive_red = 0.0;           // nu_r
  // Exactly one of these sets the chain geometry.
  std::optional<double> ion_spacing;  // m, homogeneous dipolar chain
  std::optional<double> axial_freq;   // rad/s, harmonic Coulomb chain
  Boundary boundary = Boundary::open;
  bool staggered = true;
  bool include_local_shift = true;
  double rwa_threshold = 0.1;

  void validate() const;
  bool operator==(const LabParams&) const = default;
};

struct LabConversion {
  ModelParams model;
  double omega_z_phys = 0.0;  // rad/s
  double delta_phys = 0.0;    // rad/s
  double g_phys = 0.0;        // rad/s
  double hop_phys = 0.0;      // nearest-neighbour (or central) t^coul, rad/s
  double length_unit = 0.0;   // m per dimensionless position unit (Coulomb chains)
  double rwa_ratio_g = 0.0;   // g / omega_t
  double rwa_ratio_hop = 0.0; // t^coul / omega_t
  std::vector<std::string> warnings;
};

namespace phys {
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double epsilon0 = 8.8541878128e-12;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;
inline constexpr double bohr_magneton = 9.2740100783e-24;
inline constexpr double pi = 3.14159265358979323846;
// Ground-state S_1/2 Lande factor used for mu = mu_B g_L / 2.
inline constexpr double lande_s12 = 2.0;
inline constexpr double ca40_mass = 39.962590863 * atomic_mass_unit;
}  // namespace phys

// Drive frequencies nu_{b/r} = omega_0 - omega_z +/- (omega_t - Delta).
struct DrivePair {
  double blue;
  double red;
};
DrivePair drive_frequencies(double internal_splitting, double trap_radial_freq, double omega_z,
                            double delta);

// Radial zero-point length sqrt(hbar / (2 m omega_t)).
double zero_point_length(double ion_mass, double trap_radial_freq);

// e^2 / (4 pi eps0 2 m omega_t d^3) in rad/s.
double coulomb_hop(double ion_mass, double charge, double trap_radial_freq, double distance);

LabConversion from_lab_params(const LabParams& lab);

// 40Ca+ chain: omega_t = 2pi 1 MHz, omega_0 = 2pi 20 MHz, drives set for
// omega_z = 2pi 20 kHz and Delta = 2.2 omega_z, 16 um spacing, b = 35 T/m.
LabParams ca40_lab_params(int n_sites = 20);

}  // namespace cjt
