#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ionlight/bigint.hpp"
#include "ionlight/constants.hpp"
#include "ionlight/expansion.hpp"

namespace ionlight::dynamics {

// Thrown when an iterative numerical procedure exhausts its budget; the CLI
// maps this onto its non-convergence exit status.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carrier rotation angle for Fock level n. `series_terms` reports how many
// series orders were needed when the alternating series was used (the index
// past which every partial sum stays within a relative 1e-3 of the final
// value); it is empty when the quadrature path was taken instead.
struct ThetaResult {
  double theta = 0.0;
  std::optional<int> series_terms;
};

// Rotation angle at beam offset xi (in waists) and Lamb-Dicke factor eta.
// Dispatches on the cancellation severity 2 eta^2 (2n + 1) between the
// Hermite series (severity <= 32.5) and a 512-node Gauss-Hermite quadrature
// of the equivalent Laguerre transform.  Measured accuracy against the
// aligned closed form: series at machine precision for severity <= 16,
// degrading smoothly to ~5e-7 relative at the handover; quadrature ~1e-9
// relative through eta <= 0.1, n <= 3e4.
ThetaResult theta_n(int n, double eta, double xi, double omega0_t,
                    int m_cap = 2000);

// Closed-form angle for a beam-centered ion (xi = 0), evaluated with an
// extended-precision hypergeometric recurrence.
double theta_n_aligned(int n, double eta, double omega0_t);

// All beam-centered angle rates Theta_n / (Omega_0 t) for n = 0..n_max in a
// single recurrence pass; entry n equals theta_n_aligned(n, eta, 1.0).
std::vector<double> theta_profile_aligned(int n_max, double eta);

// Exact diagonal moments <n|(a + a^dag)^(2m)|n>, scaled by 2^m so both
// evaluation paths are integers: a three-term recurrence and a finite
// binomial sum. They must agree exactly.
util::BigInt fock_moment_scaled_recurrence(int n, int m);
util::BigInt fock_moment_scaled_sum(int n, int m);
double fock_moment(int n, int m);

// Thermal occupation weight nbar^n / (1 + nbar)^(n + 1).
double thermal_weight(double nbar, int n);

// Thermal bright-state probability sum_n w_n sin^2(Theta_n), truncated where
// the residual thermal mass drops below `tail` and renormalized over the
// retained levels (so the eta = 0 limit is exactly sin^2(omega0_t)).
double p_up(double nbar, double eta, double xi, double omega0_t,
            double tail = 1e-6);

// --- composite pulse sequences ----------------------------------------------
// One resolved pi-scale pulse of a composite sequence. `area` is the nominal
// Bloch rotation angle, `gate_index` counts the logical rotations the
// sequence is built from (a 2 pi rotation realized as two pi halves shares
// one index).
struct Pulse {
  double area = 0.0;
  double phase = 0.0;
  int gate_index = 0;
};

// How the per-gate phase offset accumulates across a sequence.
enum class SlewIndexing { by_gate, by_pulse };

// SK1 compensation of a target rotation (default pi): the bare rotation
// followed by two 2 pi rotations at phases +-acos(-theta / 4 pi).
std::vector<Pulse> sk1_sequence(double theta = constants::pi);

// Tycko symmetrizing sequence of three pi rotations at 120-degree phases.
std::vector<Pulse> tycko_sequence();

// Two-level rotation cos(a/2) I - i sin(a/2) (cos phi X + sin phi Y).
Eigen::Matrix2cd rotation(double bloch_angle, double phase);

// Thermal bright probability after a composite sequence whose pulse areas
// are scaled by the level-dependent Rabi factor. `base_area` is the
// calibrated half-angle of a nominal pi pulse; `phase_slew` adds
// index * slew to each pulse phase.
double sequence_p_up(const std::vector<Pulse>& sequence, double nbar,
                     double eta, double xi, double base_area,
                     double phase_slew,
                     SlewIndexing indexing = SlewIndexing::by_gate,
                     double tail = 1e-6);

// Operator-norm distance of a multi-mode displacement from the identity:
// || exp(i sum_p kappa_p (a_p + a_p^dag)) - 1 || on the truncated spaces.
double debye_waller_norm(const std::vector<double>& kappa,
                         const std::vector<int>& cutoffs);

// Direct unitary evolution of the secular carrier Hamiltonian on a truncated
// Fock space: bright probability per initial level n after a pulse of area
// omega0_t. Cross-validates the rotation-angle series against ladder-matrix
// arithmetic. `series_order` caps the operator series for the coupling.
std::vector<double> brute_force_evolve(double eta, double xi, double omega0_t,
                                       const expansion::FockSpace& space,
                                       int series_order = 24,
                                       double psi0 = 0.0);

}  // namespace ionlight::dynamics
