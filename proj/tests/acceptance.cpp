// Acceptance harness: evaluates the twelve release criteria end to end and
// prints exactly one PASS/FAIL line per criterion, with the measured numbers
// and the pinned tolerances in the detail text.  Exits nonzero if any
// criterion fails.
//
// Usage: acceptance <path-to-ionlight-cli> <source-dir>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ionlight/calibration.hpp"
#include "ionlight/constants.hpp"
#include "ionlight/dynamics.hpp"
#include "ionlight/expansion.hpp"
#include "ionlight/modes.hpp"
#include "ionlight/scenario.hpp"
#include "ionlight/util.hpp"

using namespace ionlight;

namespace {

constexpr double kTwoPi = 2.0 * constants::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

// --- criterion 1 -------------------------------------------------------------
// Series convergence counts on the beam axis must be exactly {4, 11, 92} at
// (eta, n) = (0.01, 2000), (0.02, 2000), (0.02, 20000), inside 1 s.
Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  const auto r1 = dynamics::theta_n(2000, 0.01, 0.0, 1.0);
  const auto r2 = dynamics::theta_n(2000, 0.02, 0.0, 1.0);
  const auto r3 = dynamics::theta_n(20000, 0.02, 0.0, 1.0);
  const double elapsed = seconds_since(start);
  if (!r1.series_terms || !r2.series_terms || !r3.series_terms)
    return {false, "a probe point left the series path"};
  const int m1 = *r1.series_terms, m2 = *r2.series_terms,
            m3 = *r3.series_terms;
  const bool pass =
      m1 == 4 && m2 == 11 && m3 == 92 && elapsed < 1.0;
  return {pass, fmt("measured m = {%d, %d, %d}, required {4, 11, 92}, %.2f s "
                    "(budget 1 s)",
                    m1, m2, m3, elapsed)};
}

// --- criterion 2 -------------------------------------------------------------
// theta_n at xi = 0 within 1e-8 relative of the aligned closed form over
// n in {0, 1, 10, 100, 1e3, 1e4} x eta in {0.005, 0.02, 0.1}, inside 10 s.
Outcome criterion2() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int worst_n = 0;
  double worst_eta = 0.0;
  for (const double eta : {0.005, 0.02, 0.1}) {
    for (const int n : {0, 1, 10, 100, 1000, 10000}) {
      const double aligned = dynamics::theta_n_aligned(n, eta, 1.0);
      const double theta = dynamics::theta_n(n, eta, 0.0, 1.0).theta;
      const double rel = std::abs(theta - aligned) / std::abs(aligned);
      if (rel > worst) {
        worst = rel;
        worst_n = n;
        worst_eta = eta;
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst <= 1e-8 && elapsed < 10.0;
  return {pass, fmt("worst relative error %.2e (tol 1e-8) at n=%d eta=%g, "
                    "%.2f s (budget 10 s)",
                    worst, worst_n, worst_eta, elapsed)};
}

// --- criterion 3 -------------------------------------------------------------
// Both exact Fock-moment paths agree exactly for all n, m <= 30, and the
// moments match the X^(2m) diagonal on a 64-level space to 1e-9 relative.
Outcome criterion3() {
  int exact_mismatch = 0;
  double worst = 0.0;
  expansion::FockSpace space;
  space.n_max = 63;
  for (int m = 0; m <= 30; ++m) {
    const auto x2m = expansion::ladder_monomial_matrix(2 * m, space);
    for (int n = 0; n <= 30; ++n) {
      if (!(dynamics::fock_moment_scaled_recurrence(n, m) ==
            dynamics::fock_moment_scaled_sum(n, m)))
        ++exact_mismatch;
      const double ref = dynamics::fock_moment(n, m);
      const double rel = std::abs(x2m(n, n) - ref) / std::max(ref, 1.0);
      worst = std::max(worst, rel);
    }
  }
  const bool pass = exact_mismatch == 0 && worst <= 1e-9;
  return {pass, fmt("%d exact mismatches (need 0); worst diagonal deviation "
                    "%.2e (tol 1e-9)",
                    exact_mismatch, worst)};
}

// --- criterion 4 -------------------------------------------------------------
// Direct unitary evolution reproduces sin^2(Theta_n) per level to 1e-6 for
// n <= 50, eta in {0.01, 0.05}, xi in {0, 0.2}, inside 60 s.
Outcome criterion4() {
  const auto start = std::chrono::steady_clock::now();
  const double area = constants::pi / 2.0;
  expansion::FockSpace space;
  space.n_max = 200;
  double worst = 0.0;
  for (const double eta : {0.01, 0.05}) {
    for (const double xi : {0.0, 0.2}) {
      const auto bright = dynamics::brute_force_evolve(eta, xi, area, space);
      for (int n = 0; n <= 50; ++n) {
        const double theta = dynamics::theta_n(n, eta, xi, area).theta;
        const double ref = std::sin(theta) * std::sin(theta);
        worst = std::max(worst,
                         std::abs(bright[static_cast<std::size_t>(n)] - ref));
      }
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst <= 1e-6 && elapsed < 60.0;
  return {pass, fmt("worst per-level deviation %.2e (tol 1e-6), %.1f s "
                    "(budget 60 s)",
                    worst, elapsed)};
}

// --- criterion 5 -------------------------------------------------------------
// Doppler-limit occupations: 64 +- 1 at 2 pi x 153 kHz and 3.9 +- 0.1 at
// 2 pi x 2.5 MHz.
Outcome criterion5() {
  const double n_axial =
      modes::doppler_nbar(constants::yb171_linewidth, kTwoPi * 153e3);
  const double n_radial =
      modes::doppler_nbar(constants::yb171_linewidth, kTwoPi * 2.5e6);
  const bool pass =
      std::abs(n_axial - 64.0) <= 1.0 && std::abs(n_radial - 3.9) <= 0.1;
  return {pass, fmt("nbar(153 kHz) = %.3f (need 64 +- 1), nbar(2.5 MHz) = "
                    "%.3f (need 3.9 +- 0.1)",
                    n_axial, n_radial)};
}

// --- criterion 6 -------------------------------------------------------------
// Regenerated coupling magnitudes sit within a factor of 2 of every quoted
// bound of the reference table (355 nm, 1 x 5 um waists, worst-case
// projections with the 0.05 alignment bound).
Outcome criterion6() {
  beam::BeamGeometry b;
  b.power = 1e-3;
  b.wavelength = 355e-9;
  b.waist_x = 1.0e-6;
  b.waist_z = 5.0e-6;

  const std::vector<double> freqs = {kTwoPi * 150e3, kTwoPi * 600e3,
                                     kTwoPi * 2.0e6, kTwoPi * 3.0e6,
                                     kTwoPi * 2.5e6};
  const std::vector<modes::ModeDirection> dirs = {
      modes::ModeDirection::axial, modes::ModeDirection::axial,
      modes::ModeDirection::axial, modes::ModeDirection::horizontal,
      modes::ModeDirection::vertical};
  modes::ChainModes chain;
  chain.ion_count = 1;
  chain.ion_mass = constants::yb171_mass;
  chain.frequencies = freqs;
  chain.direction = dirs;
  chain.mode_matrix = Eigen::MatrixXd(3, 5);
  for (int p = 0; p < 5; ++p) {
    const int dom = dirs[static_cast<std::size_t>(p)] ==
                            modes::ModeDirection::axial
                        ? 0
                        : dirs[static_cast<std::size_t>(p)] ==
                                  modes::ModeDirection::horizontal
                              ? 1
                              : 2;
    for (int a = 0; a < 3; ++a)
      chain.mode_matrix(a, p) = a == dom ? 1.0 : 0.05;
  }
  chain.equilibrium = {0.0};
  const beam::BeamFramePoint eq{0.0, 0.0, 0.0};
  const auto cp = modes::coupling_params(b, b, eq, eq, chain, 0);

  // Quoted per-mode bounds: rows beta, gamma_x, gamma_z, lambda_x, lambda_z.
  const double bound[5][5] = {{1e-2, 6e-3, 3e-3, 6e-2, 3e-3},
                              {1e-2, 7e-3, 4e-3, 2e-4, 2e-4},
                              {1e-4, 7e-5, 4e-5, 3e-5, 7e-4},
                              {7e-5, 4e-5, 2e-5, 3e-4, 2e-5},
                              {4e-6, 2e-6, 1e-6, 2e-5, 9e-7}};
  double ratio_min = 1e9, ratio_max = 0.0;
  for (int p = 0; p < 5; ++p) {
    const double vals[5] = {std::abs(cp.beam1.c_beta[static_cast<std::size_t>(p)]),
                            std::abs(cp.beam1.c_gamma_x[static_cast<std::size_t>(p)]),
                            std::abs(cp.beam1.c_gamma_z[static_cast<std::size_t>(p)]),
                            std::abs(cp.beam1.c_lambda_x[static_cast<std::size_t>(p)]),
                            std::abs(cp.beam1.c_lambda_z[static_cast<std::size_t>(p)])};
    for (int r = 0; r < 5; ++r) {
      const double q = vals[r] / bound[r][p];
      ratio_min = std::min(ratio_min, q);
      ratio_max = std::max(ratio_max, q);
    }
  }
  const bool pass = ratio_min >= 0.5 && ratio_max <= 2.0;
  return {pass, fmt("value/bound ratios span [%.3f, %.3f] (need within "
                    "[0.5, 2.0])",
                    ratio_min, ratio_max)};
}

// --- criterion 7 -------------------------------------------------------------
// The truncation report on the tight-focus scenario keeps exactly the
// simplified structure: the tight-axis Gaussian through q^4 with no defocus
// power, every other expanded factor at (0,0) only, the plane-wave factor
// exact (all rows kept).
Outcome criterion7(const std::string& src_dir) {
  const auto cfg = scenario::load_config(
      src_dir + "/configs/truncation_tight_focus.ini");
  const auto csv = scenario::run_truncation_report(
      cfg, std::numeric_limits<double>::quiet_NaN());

  std::map<std::string, std::set<std::pair<int, int>>> kept, all;
  std::istringstream in(csv);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream fl(line);
    std::string field;
    while (std::getline(fl, field, ',')) f.push_back(field);
    if (f.size() != 6) return {false, "malformed report row: " + line};
    const std::pair<int, int> key{std::stoi(f[1]), std::stoi(f[2])};
    all[f[0]].insert(key);
    if (f[5] == "1") kept[f[0]].insert(key);
  }

  const std::set<std::pair<int, int>> constant = {{0, 0}};
  std::set<std::pair<int, int>> gaussian;
  for (int lq = 0; lq <= 4; ++lq) gaussian.insert({0, lq});

  std::vector<std::string> wrong;
  for (const char* name : {"A1x", "A1z", "A2z", "B1x", "B1z", "B2x", "B2z"})
    if (kept[name] != constant) wrong.push_back(name);
  if (kept["A2x"] != gaussian) wrong.push_back("A2x");
  if (kept["B0"] != all["B0"] || all["B0"].size() != 9) wrong.push_back("B0");

  if (wrong.empty())
    return {true,
            "kept sets match: A2x = {q^0..q^4}, B0 exact (9 rows), all other "
            "factors constant"};
  std::string detail = "kept-set mismatch in:";
  for (const auto& name : wrong) detail += " " + name;
  return {false, detail};
}

// --- criterion 8 -------------------------------------------------------------
// Scaling of the recalibrated gate error at nbar = 64: log-log slope of the
// infidelity versus eta within 2.0 +- 0.2, and doubling the mode frequency
// (eta /= sqrt 2, Doppler nbar /= 2) halves the infidelity within 15%.
Outcome criterion8() {
  const double nbar = 64.0;
  std::vector<double> log_eta, log_inf;
  for (const double eta : {0.005, 0.0070710678, 0.01, 0.0141421356, 0.02}) {
    const double infidelity =
        1.0 - calibration::optimize_rabi(nbar, eta).p_up;
    log_eta.push_back(std::log(eta));
    log_inf.push_back(std::log(infidelity));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < log_eta.size(); ++i) {
    mx += log_eta[i];
    my += log_inf[i];
  }
  mx /= static_cast<double>(log_eta.size());
  my /= static_cast<double>(log_eta.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < log_eta.size(); ++i) {
    sxx += (log_eta[i] - mx) * (log_eta[i] - mx);
    sxy += (log_eta[i] - mx) * (log_inf[i] - my);
  }
  const double slope = sxy / sxx;

  const double eta0 = 0.014039500903836105;  // single-ion operating point
  const double nbar0 = 64.05228758169935;    // Doppler limit at 153 kHz
  const double base = 1.0 - calibration::optimize_rabi(nbar0, eta0).p_up;
  const double doubled =
      1.0 -
      calibration::optimize_rabi(nbar0 / 2.0, eta0 / std::sqrt(2.0)).p_up;
  const double ratio = doubled / base;

  const bool slope_ok = std::abs(slope - 2.0) <= 0.2;
  const bool ratio_ok = std::abs(ratio - 0.5) <= 0.15 * 0.5;
  return {slope_ok && ratio_ok,
          fmt("log-log slope %.3f (need 2.0 +- 0.2); frequency-doubling "
              "infidelity ratio %.3f (need 0.5 +- 0.075)",
              slope, ratio)};
}

// --- criterion 9 -------------------------------------------------------------
// 25-ion operating point (eta = 3.249e-3), nbar grid up to 1e3.  With a
// 0.4 rad per-gate phase slew: Tycko >= SK1 >= recalibrated >= static at
// every grid point.  With zero slew: both sequences beat the recalibrated
// pulse wherever heating matters.
Outcome criterion9() {
  const double eta = 3.249e-3;
  const double slew = 0.4;
  const auto sk1 = dynamics::sk1_sequence();
  const auto tycko = dynamics::tycko_sequence();

  std::vector<double> grid;
  for (int i = 0; i < 7; ++i)
    grid.push_back(66.2 * std::pow(1000.0 / 66.2, i / 6.0));
  const auto base = calibration::optimize_rabi(grid.front(), eta);

  int order_violations = 0, zero_slew_violations = 0;
  for (const double nbar : grid) {
    const auto opt = calibration::optimize_rabi(nbar, eta);
    const double p_static =
        dynamics::p_up(nbar, eta, 0.0, base.omega0_t);
    const double p_sk1 =
        dynamics::sequence_p_up(sk1, nbar, eta, 0.0, opt.omega0_t, slew,
                                dynamics::SlewIndexing::by_gate);
    const double p_tycko =
        dynamics::sequence_p_up(tycko, nbar, eta, 0.0, opt.omega0_t, slew,
                                dynamics::SlewIndexing::by_gate);
    if (!(p_tycko >= p_sk1 - 1e-12 && p_sk1 >= opt.p_up - 1e-12 &&
          opt.p_up >= p_static - 1e-12))
      ++order_violations;

    const double q_sk1 =
        dynamics::sequence_p_up(sk1, nbar, eta, 0.0, opt.omega0_t, 0.0);
    const double q_tycko =
        dynamics::sequence_p_up(tycko, nbar, eta, 0.0, opt.omega0_t, 0.0);
    if (!(q_sk1 > opt.p_up && q_tycko > opt.p_up)) ++zero_slew_violations;
  }
  const bool pass = order_violations == 0 && zero_slew_violations == 0;
  return {pass, fmt("slewed ordering violations %d/7, zero-slew violations "
                    "%d/7 (need 0)",
                    order_violations, zero_slew_violations)};
}

// Deterministic standard-normal draws: Box-Muller over the standard-pinned
// mt19937_64 stream.  std::normal_distribution's algorithm is
// implementation-defined, which would make the Monte-Carlo criteria depend
// on the C++ standard library; this generator produces the same draws
// everywhere.
class PinnedNormal {
 public:
  explicit PinnedNormal(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 =
        (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// --- criterion 10 ------------------------------------------------------------
// (a) The joint heating fit recovers ndot = 96e3 within 5% under 1%
//     Gaussian noise on both probability curves for all of 100 seeds.
// (b) The power-law fit recovers alpha = 1.8 within +-0.2 in at least 90%
//     of 1000 trials under 10% multiplicative noise.
Outcome criterion10() {
  const double eta = 1.404e-2, nbar0 = 64.0, ndot = 96e3, offset = 0.02;
  calibration::HeatingData truth;
  for (int j = 0; j < 25; ++j) {
    const double t = 6e-3 * j / 24.0;
    truth.delay.push_back(t);
  }
  const auto base = calibration::optimize_rabi(nbar0, eta);
  for (const double t : truth.delay) {
    const double nbar = nbar0 + ndot * t;
    const auto opt = calibration::optimize_rabi(nbar, eta);
    truth.p_up_static.push_back(
        dynamics::p_up(nbar, eta, 0.0, base.omega0_t) - offset);
    truth.p_up_optimized.push_back(opt.p_up - offset);
    truth.rabi_ratio.push_back(opt.omega0_t / base.omega0_t);
  }

  calibration::HeatingFitConfig cfg;
  cfg.nbar0 = nbar0;
  cfg.eta = eta;

  int heating_failures = 0;
  double worst_rel = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    PinnedNormal noise(static_cast<std::uint64_t>(seed));
    auto data = truth;
    for (auto& v : data.p_up_static) v += 0.01 * noise();
    for (auto& v : data.p_up_optimized) v += 0.01 * noise();
    const auto fitted = calibration::fit_heating(data, cfg);
    const double rel = std::abs(fitted.ndot - ndot) / ndot;
    worst_rel = std::max(worst_rel, rel);
    if (!(fitted.converged && rel <= 0.05)) ++heating_failures;
  }

  const double alpha = 1.8;
  std::vector<double> omega(8);
  for (int j = 0; j < 8; ++j)
    omega[static_cast<std::size_t>(j)] =
        kTwoPi * 184e3 * std::pow(513.0 / 184.0, j / 7.0);
  PinnedNormal log_noise(12345);
  int power_hits = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> rate(omega.size());
    for (std::size_t j = 0; j < omega.size(); ++j)
      rate[j] = 5e6 * std::pow(omega[j] / omega[0], -alpha) *
                std::exp(0.1 * log_noise());
    const auto fitted = calibration::fit_power_law(omega, rate);
    if (std::abs(fitted.exponent - alpha) <= 0.2) ++power_hits;
  }

  const bool pass = heating_failures == 0 && power_hits >= 900;
  return {pass, fmt("heating: %d/100 seeds outside 5%% (worst %.2f%%); "
                    "power-law: %d/1000 within +-0.2 (need >= 900)",
                    heating_failures, 100.0 * worst_rel, power_hits)};
}

// --- criterion 11 ------------------------------------------------------------
// Every emitted term list reproduces its closed scalar form to 1e-8 at the
// pinned probe points, and the ordered second-order coefficients match the
// collected series coefficients to 1e-10.
Outcome criterion11() {
  using std::complex;
  const auto coeff = [](const std::vector<expansion::SeriesTerm>& terms,
                        int lp, int lq) {
    for (const auto& t : terms)
      if (t.power_p == lp && t.power_q == lq) return t.coefficient;
    return complex<double>(0.0, 0.0);
  };

  // A factors are O(1) and checked relative; B factors absolute, matching
  // the closed-form contracts.
  double worst_a = 0.0, worst_b = 0.0;
  struct Point {
    double p0, q0, p1, q1;
  };
  for (const Point pt : {Point{0.05, 0.1, 0.01, 0.02},
                         Point{0.08, 0.06, 0.03, 0.02}}) {
    const auto a1 = expansion::a1_terms(pt.p0, 12);
    const auto a2 = expansion::a2_terms(pt.p0, pt.q0, 12, 12);
    const double a1_ref = expansion::a1_closed(pt.p0, pt.p1);
    const double a2_ref = expansion::a2_closed(pt.p0, pt.p1, pt.q0, pt.q1);
    worst_a = std::max(
        worst_a, std::abs(expansion::evaluate_terms(a1, pt.p1, 0.0) - a1_ref) /
                     std::abs(a1_ref));
    worst_a = std::max(
        worst_a,
        std::abs(expansion::evaluate_terms(a2, pt.p1, pt.q1) - a2_ref) /
            std::abs(a2_ref));
    for (const int sign : {+1, -1}) {
      const auto b0 = expansion::b0_terms(sign, 12);
      const auto b1 = expansion::b1_terms(sign, pt.p0, 12);
      const auto b2 = expansion::b2_terms(sign, pt.p0, pt.q0, 12, 12);
      worst_b = std::max(
          worst_b, std::abs(expansion::evaluate_terms(b0, pt.p1, 0.0) -
                            expansion::b0_closed(sign, pt.p1)));
      worst_b = std::max(
          worst_b, std::abs(expansion::evaluate_terms(b1, pt.p1, 0.0) -
                            expansion::b1_closed(sign, pt.p0, pt.p1)));
      worst_b = std::max(
          worst_b,
          std::abs(expansion::evaluate_terms(b2, pt.p1, pt.q1) -
                   expansion::b2_closed(sign, pt.p0, pt.p1, pt.q0, pt.q1)));
    }
  }

  double worst_ordered = 0.0;
  for (const double p0 : {0.0, 0.05, 0.2}) {
    const auto a1 = expansion::a1_terms(p0, 8);
    const auto fa = expansion::a1_ordered(p0);
    worst_ordered =
        std::max({worst_ordered, std::abs(coeff(a1, 0, 0) - fa.order0),
                  std::abs(coeff(a1, 1, 0) - fa.order1),
                  std::abs(coeff(a1, 2, 0) - fa.order2)});
    for (const int sign : {+1, -1}) {
      const auto b1 = expansion::b1_terms(sign, p0, 8);
      const auto fb = expansion::b1_ordered(sign, p0);
      worst_ordered =
          std::max({worst_ordered, std::abs(coeff(b1, 0, 0) - fb.order0),
                    std::abs(coeff(b1, 1, 0) - fb.order1),
                    std::abs(coeff(b1, 2, 0) - fb.order2)});
    }
  }
  for (const auto& [p0, q0] :
       {std::pair{0.05, 0.1}, std::pair{0.2, 0.25}}) {
    const auto a2 = expansion::a2_terms(p0, q0, 8, 10);
    for (int lq = 0; lq <= 6; ++lq)
      for (int order = 0; order <= 2; ++order)
        worst_ordered = std::max(
            worst_ordered, std::abs(expansion::a2_ordered(p0, q0, lq, order) -
                                    coeff(a2, order, lq)));
  }

  const bool pass =
      worst_a <= 1e-8 && worst_b <= 1e-8 && worst_ordered <= 1e-10;
  return {pass, fmt("closed-form deviations A %.2e rel, B %.2e abs (tol "
                    "1e-8); ordered coefficients %.2e (tol 1e-10)",
                    worst_a, worst_b, worst_ordered)};
}

// --- criterion 12 ------------------------------------------------------------
// The delayed-gate CLI writes byte-identical output for 1 and 8 worker
// threads.
Outcome criterion12(const std::string& cli, const std::string& src_dir) {
  if (cli.empty()) return {false, "CLI path not supplied on the command line"};
  const auto tmp =
      std::filesystem::temp_directory_path() / "ionlight_acceptance";
  std::filesystem::create_directories(tmp);
  const auto out1 = tmp / "threads1.csv";
  const auto out8 = tmp / "threads8.csv";
  const std::string config = src_dir + "/configs/single_ion.ini";
  const auto run = [&](const std::filesystem::path& out, int threads) {
    const std::string cmd = "\"" + cli + "\" delayed-gate --config \"" +
                            config + "\" --out \"" + out.string() +
                            "\" --threads " + std::to_string(threads);
    return std::system(cmd.c_str());
  };
  if (run(out1, 1) != 0) return {false, "single-thread CLI run failed"};
  if (run(out8, 8) != 0) return {false, "eight-thread CLI run failed"};
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string a = slurp(out1), b = slurp(out8);
  if (a.empty()) return {false, "CLI produced no output"};
  const bool pass = a == b;
  return {pass, fmt("%zu bytes vs %zu bytes, %s", a.size(), b.size(),
                    pass ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::string src = argc > 2 ? argv[2] : ".";

  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {"series convergence counts", criterion1},
      {"angle evaluator vs closed form", criterion2},
      {"exact Fock moments", criterion3},
      {"direct evolution cross-check", criterion4},
      {"Doppler occupations", criterion5},
      {"coupling bound table", criterion6},
      {"truncation report structure", [&] { return criterion7(src); }},
      {"infidelity scaling in eta and frequency", criterion8},
      {"composite-sequence ordering", criterion9},
      {"heating and power-law fit recovery", criterion10},
      {"series vs closed forms and ordered coefficients", criterion11},
      {"delayed-gate thread determinism",
       [&] { return criterion12(cli, src); }},
  };

  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& err) {
      outcome = {false, std::string("exception: ") + err.what()};
    }
    if (outcome.pass) ++passed;
    std::printf("criterion %2zu: %s  %s — %s\n", i + 1,
                outcome.pass ? "PASS" : "FAIL", criteria[i].name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
