#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ionlight/beam.hpp"

namespace ionlight::modes {

// Beam-frame axes: the chain lies along x (the tight waist direction), the
// beams propagate along y, and z is the loose waist direction.
enum Axis : int { kAxisX = 0, kAxisY = 1, kAxisZ = 2 };

enum class ModeDirection { axial, horizontal, vertical };

// Normal modes of a single-species linear chain. Columns of mode_matrix are
// orthonormal mode vectors; row (axis * N + ion) holds the projection of a
// mode onto a beam-frame axis at one ion. With uniform masses the inverse of
// the mode-vector matrix is its transpose, which fixes the projection
// convention used everywhere downstream. A measured mode table may carry
// fewer columns than 3N.
struct ChainModes {
  int ion_count = 0;
  double ion_mass = 0.0;                 // kg
  std::vector<double> frequencies;       // rad/s, one per mode column
  Eigen::MatrixXd mode_matrix;           // (3N) x (mode count)
  std::vector<ModeDirection> direction;  // per mode column
  std::vector<double> equilibrium;       // chain-axis ion positions (m)

  int mode_count() const { return static_cast<int>(frequencies.size()); }
  double projection(int mode, Axis axis, int ion) const {
    return mode_matrix(static_cast<int>(axis) * ion_count + ion, mode);
  }
};

// Zero-point wavepacket spread sqrt(hbar / (2 m omega)).
double zero_point_spread(double mass, double omega);

// Doppler-limit mean phonon number Gamma / (2 omega).
double doppler_nbar(double linewidth, double omega);

// Equilibrium positions and normal modes of N ions in a harmonic axial well
// with the given center-of-mass frequency plus two transverse confinements.
// Throws if the equilibrium solve fails or the transverse confinement is too
// weak for a linear chain (zipper instability).
ChainModes chain_normal_modes(int ion_count, double ion_mass,
                              double axial_com, double horizontal,
                              double vertical);

// Per-element alignment predicate: every off-dominant projection magnitude
// must stay below epsilon / sqrt(N).
bool check_alignment(const ChainModes& chain, double epsilon);

// Rigid rotation of every mode vector by `angle` in the (axis_a, axis_b)
// plane, applied identically at each ion. A rigid rotation is orthogonal on
// the full space, so the columns stay orthonormal without re-normalization.
ChainModes rotate_modes(const ChainModes& chain, Axis axis_a, Axis axis_b,
                        double angle);

// Dimensionless couplings for one beam. Sign convention: displacements along
// the lab propagation axis enter through the beam-local y, so c_beta and
// c_lambda carry the beam's propagation sign; transverse couplings do not.
struct BeamCoupling {
  double gamma0_x = 0.0;   // transverse offset over waist, x
  double gamma0_z = 0.0;   // transverse offset over waist, z
  double lambda0_x = 0.0;  // defocus over Rayleigh range of the x axis
  double lambda0_z = 0.0;  // defocus over Rayleigh range of the z axis
  std::vector<double> c_beta;      // k * zeta * nu_y  (signed)
  std::vector<double> c_gamma_x;   // zeta * nu_x / waist_x
  std::vector<double> c_gamma_z;   // zeta * nu_z / waist_z
  std::vector<double> c_lambda_x;  // zeta * nu_y / rayleigh_x  (signed)
  std::vector<double> c_lambda_z;  // zeta * nu_y / rayleigh_z  (signed)
};

struct CouplingParams {
  BeamCoupling beam1;
  BeamCoupling beam2;
  int propagation_sign1 = +1;
  int propagation_sign2 = +1;
  std::vector<std::string> warnings;  // soft alignment notices
};

// Builds all dimensionless couplings for an addressed ion. `eq1`/`eq2` are
// the ion equilibrium expressed in each beam's frame. Defocus magnitudes of
// 0.5 or more are rejected; above 0.1 a warning is recorded.
CouplingParams coupling_params(const beam::BeamGeometry& beam1,
                               const beam::BeamGeometry& beam2,
                               const beam::BeamFramePoint& eq1,
                               const beam::BeamFramePoint& eq2,
                               const ChainModes& chain, int ion);

}  // namespace ionlight::modes
