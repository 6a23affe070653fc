#pragma once

#include <array>
#include <vector>

// Pulse-area calibration against axial heating, and the two fits an
// experiment runs on the resulting data: a joint heating-rate fit to the
// probe curves, and a power-law fit of heating rate against mode frequency.
namespace ionlight::calibration {

// Result of maximizing the thermally averaged bright probability over the
// resonant pulse area Omega_0 t.
struct RabiCalibration {
  double omega0_t = 0.0;  // maximizing pulse area
  double p_up = 0.0;      // bright probability achieved there
};

// Maximize the thermally averaged bright probability over the pulse area on
// [pi/4, 3 pi/2].  The bracket is first sampled to locate the first maximum
// and to verify the probability rises monotonically into it (multi-pi
// solutions past the first peak are deliberately ignored); a non-unimodal
// rise throws dynamics::ConvergenceError.  The peak is then refined by
// golden-section search and a safeguarded Newton polish on the derivative,
// landing within `tol` of the maximizer (typically far closer).  Limits:
// eta = 0 gives exactly pi/2; nbar = 0 gives (pi/2) sqrt(1 + 2 eta^2).
RabiCalibration optimize_rabi(double nbar, double eta, double xi = 0.0,
                              double tail = 1e-6, double tol = 1e-8);

// The static calibration an experiment performs once, with no heating delay:
// identical to optimize_rabi at the initial occupation.
RabiCalibration static_rabi(double nbar0, double eta, double xi = 0.0,
                            double tail = 1e-6, double tol = 1e-8);

// One probe per delay: the ion heats freely for `delay` seconds, then a
// single resonant pulse is applied.  `p_up_static` is measured with the
// pulse area frozen at its zero-delay optimum, `p_up_optimized` with the
// area re-optimized at each delay, and `rabi_ratio` is the re-optimized
// area divided by the zero-delay optimum.  The sigma vectors are optional
// per-point uncertainties (leave empty for uniform weighting).
struct HeatingData {
  std::vector<double> delay;  // seconds
  std::vector<double> p_up_static;
  std::vector<double> p_up_optimized;
  std::vector<double> rabi_ratio;
  std::vector<double> sigma_static;
  std::vector<double> sigma_optimized;
};

struct HeatingFitConfig {
  double nbar0 = 0.0;  // occupation at zero delay (known, held fixed)
  double eta = 0.0;    // Lamb-Dicke factor of the probed mode
  double xi = 0.0;     // beam offset during the probe pulses, in waists
  // Per-point noise scale; every residual is weighted by 1/max(sigma, 0.01).
  double sigma = 0.01;
  // Initial search scale for the heating rate in quanta/s: the coarse seed
  // grid spans {0.2, 0.6, 1.0, 1.4} times this value.
  double ndot_scale = 1e5;
  // Stop once the scale-normalized simplex diameter drops below this.
  double simplex_tol = 1e-6;
  int max_iterations = 10000;
  double tail = 1e-6;      // thermal truncation inside the model
  double rabi_tol = 1e-8;  // area tolerance for the per-delay recalibration
};

struct HeatingFitResult {
  double ndot = 0.0;         // fitted heating rate, quanta/s
  double p_up_offset = 0.0;  // fitted constant offset on both P curves
  double chi2 = 0.0;         // weighted sum of squared residuals at the fit
  int iterations = 0;
  bool converged = false;    // false when the iteration cap was hit first
  // Covariance proxy: finite-difference curvature of the weighted residual
  // sum at the optimum, ordered (ndot, p_up_offset).
  std::array<std::array<double, 2>, 2> curvature = {{{0.0, 0.0}, {0.0, 0.0}}};
};

// Joint least-squares fit of (ndot, p_up_offset) to the three measured
// curves, modeling nbar(t) = nbar0 + ndot * t and regenerating each curve
// with the same calibration machinery as optimize_rabi.  The offset is
// subtracted from both modeled probability curves; the area ratio carries
// no offset.  Minimized by Nelder-Mead from the best coarse-grid seed.
// Throws std::invalid_argument for mismatched curve lengths, fewer than
// three samples, or no spread in the delays (constant-delay data leaves the
// heating rate unidentifiable).
HeatingFitResult fit_heating(const HeatingData& data,
                             const HeatingFitConfig& config);

// rate = amplitude * omega^(-exponent), fitted by straight-line least
// squares in log-log coordinates.  Exact through two points; the exponent
// is invariant under rescaling of either axis.
struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double residual_norm = 0.0;  // L2 norm of the log-space residuals
};

// Throws std::invalid_argument unless both vectors match in length with at
// least two samples, all entries are positive, and the frequencies are not
// all identical.
PowerLawFit fit_power_law(const std::vector<double>& omega,
                          const std::vector<double>& rate);

}  // namespace ionlight::calibration
