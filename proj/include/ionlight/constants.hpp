#pragma once

namespace ionlight::constants {

// Reduced Planck constant (J s), CODATA 2018 exact-definition era value.
inline constexpr double hbar = 1.054571817e-34;

// Unified atomic mass unit (kg).
inline constexpr double atomic_mass_unit = 1.66054e-27;

// Mass of 171Yb+ (kg); single-species chains only.
inline constexpr double yb171_mass = 171.0 * atomic_mass_unit;

// Natural linewidth of the 2S1/2 - 2P1/2 cycling transition of Yb+ (rad/s),
// used for Doppler-limit estimates.
inline constexpr double yb171_linewidth = 2.0 * 3.14159265358979323846 * 19.6e6;

inline constexpr double pi = 3.14159265358979323846;

// Elementary charge (C) and vacuum permittivity (F/m) for the Coulomb
// interaction between chain ions.
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double vacuum_permittivity = 8.8541878128e-12;

}  // namespace ionlight::constants
