// constants.hpp — pinned physical constants (CODATA 2018 / exact SI) and unit conversions
//
// Everything downstream works in SI internally (energies in joule); the
// domain-native units (eV, Debye, GHz, cm^-3) pass through the converters here
// so there is exactly one place where the numbers live.

#pragma once

#include <cmath>

namespace acceptorloss::constants {

inline constexpr double planck = 6.62607015e-34;             // J s (exact)
inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double boltzmann = 1.380649e-23;            // J/K (exact)
inline constexpr double bohr_magneton = 9.2740100783e-24;    // J/T
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double elementary_charge = 1.602176634e-19; // C (exact)
inline constexpr double speed_of_light = 299792458.0;        // m/s (exact)
inline constexpr double electron_volt = elementary_charge;   // J
inline constexpr double debye = 1e-21 / speed_of_light;      // C m (3.33564e-30)

// Dielectric constant of silicon. The analysis uses this as the default
// epsilon_r; override through DopantSpec where a different substrate applies.
inline constexpr double silicon_epsilon_r = 11.7;

constexpr double joules_to_hz(double e) { return e / planck; }
constexpr double hz_to_joules(double f) { return f * planck; }
constexpr double joules_to_ev(double e) { return e / electron_volt; }
constexpr double ev_to_joules(double e) { return e * electron_volt; }
constexpr double debye_to_coulomb_meter(double p) { return p * debye; }
constexpr double per_cm3_to_per_m3(double n) { return n * 1e6; }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

} // namespace acceptorloss::constants
