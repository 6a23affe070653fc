#include "ionlight/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "ionlight/constants.hpp"
#include "ionlight/dynamics.hpp"
#include "ionlight/expansion.hpp"
#include "ionlight/util.hpp"

namespace ionlight::calibration {
namespace {

constexpr double kAreaLow = 0.25 * constants::pi;
constexpr double kAreaHigh = 1.5 * constants::pi;

// Thermal state over the retained Fock levels together with the per-level
// rotation rates Theta_n / (Omega_0 t).  The rate vector may extend past the
// weights when it comes from the shared cache.
struct Profile {
  std::vector<double> weight;
  std::shared_ptr<const std::vector<double>> rate;
  double mass = 0.0;
};

// Beam-centered rates are reused heavily across occupations and fit
// iterations; cache one vector per Lamb-Dicke factor and regrow from scratch
// when a longer prefix is needed (the recurrence reproduces the same values).
std::shared_ptr<const std::vector<double>> aligned_rates(double eta,
                                                         int n_max) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const std::vector<double>>> cache;
  const std::scoped_lock lock(mutex);
  auto& slot = cache[eta];
  if (!slot || slot->size() < static_cast<std::size_t>(n_max) + 1) {
    const int grown = std::max(
        {n_max, slot ? 2 * static_cast<int>(slot->size()) : 0, 2048});
    slot = std::make_shared<const std::vector<double>>(
        dynamics::theta_profile_aligned(grown, eta));
  }
  return slot;
}

Profile build_profile(double nbar, double eta, double xi, double tail) {
  Profile profile;
  const int cutoff = expansion::thermal_cutoff(nbar, tail);
  profile.weight.resize(static_cast<std::size_t>(cutoff) + 1);
  util::CompensatedSum mass;
  for (int n = 0; n <= cutoff; ++n) {
    const double w = dynamics::thermal_weight(nbar, n);
    profile.weight[n] = w;
    mass.add(w);
  }
  profile.mass = mass.value();
  if (xi == 0.0) {
    profile.rate = aligned_rates(eta, cutoff);
  } else {
    std::vector<double> rates(static_cast<std::size_t>(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n)
      rates[n] = dynamics::theta_n(n, eta, xi, 1.0).theta;
    profile.rate =
        std::make_shared<const std::vector<double>>(std::move(rates));
  }
  return profile;
}

double bright(const Profile& profile, double area) {
  const auto& rate = *profile.rate;
  util::CompensatedSum sum;
  for (std::size_t n = 0; n < profile.weight.size(); ++n) {
    const double s = std::sin(area * rate[n]);
    sum.add(profile.weight[n] * s * s);
  }
  return sum.value() / profile.mass;
}

struct Curvature {
  double d1 = 0.0;
  double d2 = 0.0;
};

Curvature slope(const Profile& profile, double area) {
  const auto& rate = *profile.rate;
  util::CompensatedSum first, second;
  for (std::size_t n = 0; n < profile.weight.size(); ++n) {
    const double doubled = 2.0 * area * rate[n];
    first.add(profile.weight[n] * rate[n] * std::sin(doubled));
    second.add(2.0 * profile.weight[n] * rate[n] * rate[n] *
               std::cos(doubled));
  }
  return {first.value() / profile.mass, second.value() / profile.mass};
}

// Newton iteration on the derivative from a caller-supplied start.  Succeeds
// only while the curvature stays concave and the iterate stays inside the
// search interval; the caller falls back to the bracketing search otherwise.
bool newton_from(const Profile& profile, double start, RabiCalibration* out) {
  double x = start;
  for (int it = 0; it < 16; ++it) {
    const Curvature g = slope(profile, x);
    if (!(g.d2 < 0.0)) return false;
    const double step = g.d1 / g.d2;
    x -= step;
    if (x <= kAreaLow || x >= kAreaHigh) return false;
    if (std::abs(step) < 1e-11) {
      *out = {x, bright(profile, x)};
      return true;
    }
  }
  return false;
}

RabiCalibration maximize_bright(const Profile& profile, double tol) {
  static const double kInvPhi = 0.5 * (std::sqrt(5.0) - 1.0);

  // Sample the bracket, locate the first maximum, and require a monotone
  // rise into it.  Later humps (multi-pi pulse areas) are out of scope by
  // design, so only the climb to the first peak is asserted.
  constexpr int kSamples = 33;
  std::array<double, kSamples> grid, value;
  double peak_value = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    grid[i] = kAreaLow + (kAreaHigh - kAreaLow) * i / (kSamples - 1);
    value[i] = bright(profile, grid[i]);
    peak_value = std::max(peak_value, value[i]);
  }
  const double eps = 1e-12 * std::max(peak_value, 1.0);
  int peak = kSamples - 1;
  for (int i = 0; i + 1 < kSamples; ++i) {
    if (value[i + 1] < value[i] - eps) {
      peak = i;
      break;
    }
  }
  if (peak == 0)
    throw dynamics::ConvergenceError(
        "bright probability enters the pulse-area bracket falling; no "
        "unimodal maximum to refine");

  double a = grid[peak - 1];
  double b = grid[std::min(peak + 1, kSamples - 1)];
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = bright(profile, c);
  double fd = bright(profile, d);
  const auto shrink_to = [&](double width) {
    while (b - a > width) {
      if (fc < fd) {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = bright(profile, d);
      } else {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = bright(profile, c);
      }
    }
  };
  const double floor = std::max(tol, 1e-12);
  const double coarse = std::max(floor, 1e-3);
  shrink_to(coarse);

  double x = 0.5 * (a + b);
  const double guard = b - a;
  bool polished = false;
  for (int it = 0; it < 16; ++it) {
    const Curvature g = slope(profile, x);
    if (!(g.d2 < 0.0)) break;
    const double step = g.d1 / g.d2;
    const double next = x - step;
    if (next < a - guard || next > b + guard) break;
    x = next;
    if (std::abs(step) < 1e-11) {
      polished = true;
      break;
    }
  }
  if (!polished) {
    shrink_to(floor);
    x = 0.5 * (a + b);
  }
  return {x, bright(profile, x)};
}

}  // namespace

RabiCalibration optimize_rabi(double nbar, double eta, double xi, double tail,
                              double tol) {
  if (nbar < 0.0) throw std::invalid_argument("occupation must be >= 0");
  if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
  return maximize_bright(build_profile(nbar, eta, xi, tail), tol);
}

RabiCalibration static_rabi(double nbar0, double eta, double xi, double tail,
                            double tol) {
  return optimize_rabi(nbar0, eta, xi, tail, tol);
}

HeatingFitResult fit_heating(const HeatingData& data,
                             const HeatingFitConfig& config) {
  const std::size_t count = data.delay.size();
  if (count < 3 || data.p_up_static.size() != count ||
      data.p_up_optimized.size() != count || data.rabi_ratio.size() != count)
    throw std::invalid_argument(
        "heating fit needs at least three samples with matching curve "
        "lengths");
  if ((!data.sigma_static.empty() && data.sigma_static.size() != count) ||
      (!data.sigma_optimized.empty() &&
       data.sigma_optimized.size() != count))
    throw std::invalid_argument(
        "per-point uncertainties must match the sample count");
  const auto [lo, hi] =
      std::minmax_element(data.delay.begin(), data.delay.end());
  if (!(*hi > *lo))
    throw std::invalid_argument("heating fit needs spread in the delays");
  if (config.nbar0 < 0.0 || config.eta < 0.0 || config.ndot_scale <= 0.0 ||
      config.max_iterations < 1)
    throw std::invalid_argument("invalid heating fit configuration");

  const auto point_weight = [&](const std::vector<double>& sigma,
                                std::size_t j) {
    const double s = sigma.empty() ? config.sigma : sigma[j];
    return 1.0 / std::max(s, 0.01);
  };
  const double ratio_weight = 1.0 / std::max(config.sigma, 0.01);
  const RabiCalibration base = optimize_rabi(config.nbar0, config.eta,
                                             config.xi, config.tail,
                                             config.rabi_tol);

  // Per-delay warm starts: the recalibrated area moves slowly between
  // objective evaluations, so Newton usually converges in a couple of steps.
  std::vector<double> warm(count, base.omega0_t);
  const auto objective = [&](double ndot, double offset) -> double {
    if (ndot < 0.0 || offset < 0.0 || offset >= 1.0) return 1e9;
    util::CompensatedSum acc;
    for (std::size_t j = 0; j < count; ++j) {
      const double nb = config.nbar0 + ndot * data.delay[j];
      const Profile profile =
          build_profile(nb, config.eta, config.xi, config.tail);
      const double p_static = bright(profile, base.omega0_t);
      RabiCalibration cal;
      if (!newton_from(profile, warm[j], &cal))
        cal = maximize_bright(profile, config.rabi_tol);
      warm[j] = cal.omega0_t;
      const double rs = (p_static - offset - data.p_up_static[j]) *
                        point_weight(data.sigma_static, j);
      const double ro = (cal.p_up - offset - data.p_up_optimized[j]) *
                        point_weight(data.sigma_optimized, j);
      const double rr =
          (cal.omega0_t / base.omega0_t - data.rabi_ratio[j]) * ratio_weight;
      acc.add(rs * rs);
      acc.add(ro * ro);
      acc.add(rr * rr);
    }
    return acc.value();
  };

  double seed_ndot = 0.2 * config.ndot_scale;
  double seed_offset = 0.0;
  double seed_value = std::numeric_limits<double>::infinity();
  for (double frac : {0.2, 0.6, 1.0, 1.4}) {
    for (double offset : {0.0, 0.05}) {
      const double value = objective(frac * config.ndot_scale, offset);
      if (value < seed_value) {
        seed_value = value;
        seed_ndot = frac * config.ndot_scale;
        seed_offset = offset;
      }
    }
  }

  const std::array<double, 2> scale = {0.1 * config.ndot_scale, 0.01};
  std::array<std::array<double, 2>, 3> pts = {
      {{seed_ndot, seed_offset},
       {seed_ndot + scale[0], seed_offset},
       {seed_ndot, seed_offset + scale[1]}}};
  std::array<double, 3> vals = {seed_value,
                                objective(pts[1][0], pts[1][1]),
                                objective(pts[2][0], pts[2][1])};
  const auto order = [&] {
    if (vals[1] < vals[0]) {
      std::swap(vals[0], vals[1]);
      std::swap(pts[0], pts[1]);
    }
    if (vals[2] < vals[1]) {
      std::swap(vals[1], vals[2]);
      std::swap(pts[1], pts[2]);
    }
    if (vals[1] < vals[0]) {
      std::swap(vals[0], vals[1]);
      std::swap(pts[0], pts[1]);
    }
  };

  int iterations = 0;
  bool converged = false;
  while (iterations < config.max_iterations) {
    order();
    double diameter = 0.0;
    for (int i = 1; i < 3; ++i)
      for (int k = 0; k < 2; ++k)
        diameter = std::max(diameter,
                            std::abs((pts[i][k] - pts[0][k]) / scale[k]));
    if (diameter < config.simplex_tol) {
      converged = true;
      break;
    }
    const std::array<double, 2> centroid = {0.5 * (pts[0][0] + pts[1][0]),
                                            0.5 * (pts[0][1] + pts[1][1])};
    std::array<double, 2> reflect;
    for (int k = 0; k < 2; ++k) reflect[k] = 2.0 * centroid[k] - pts[2][k];
    const double fr = objective(reflect[0], reflect[1]);
    if (fr < vals[0]) {
      std::array<double, 2> expand;
      for (int k = 0; k < 2; ++k)
        expand[k] = centroid[k] + 2.0 * (centroid[k] - pts[2][k]);
      const double fe = objective(expand[0], expand[1]);
      if (fe < fr) {
        pts[2] = expand;
        vals[2] = fe;
      } else {
        pts[2] = reflect;
        vals[2] = fr;
      }
    } else if (fr < vals[1]) {
      pts[2] = reflect;
      vals[2] = fr;
    } else {
      std::array<double, 2> contract;
      for (int k = 0; k < 2; ++k)
        contract[k] = centroid[k] + 0.5 * (pts[2][k] - centroid[k]);
      const double fv = objective(contract[0], contract[1]);
      if (fv < vals[2]) {
        pts[2] = contract;
        vals[2] = fv;
      } else {
        for (int i = 1; i < 3; ++i) {
          for (int k = 0; k < 2; ++k)
            pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
          vals[i] = objective(pts[i][0], pts[i][1]);
        }
      }
    }
    ++iterations;
  }
  order();

  HeatingFitResult result;
  result.ndot = pts[0][0];
  result.p_up_offset = pts[0][1];
  result.chi2 = vals[0];
  result.iterations = iterations;
  result.converged = converged;

  // Covariance proxy: finite-difference curvature at the optimum.  Central
  // differences whenever both probes stay feasible, one-sided otherwise
  // (e.g. a fitted rate or offset of exactly zero).
  const std::array<double, 2> h = {1e-3 * config.ndot_scale, 1e-4};
  const auto feasible = [](double ndot, double offset) {
    return ndot >= 0.0 && offset >= 0.0 && offset < 1.0;
  };
  const auto probe = [&](double dn, double dp) {
    return objective(result.ndot + dn, result.p_up_offset + dp);
  };
  for (int k = 0; k < 2; ++k) {
    const double dn = k == 0 ? h[0] : 0.0;
    const double dp = k == 1 ? h[1] : 0.0;
    if (feasible(result.ndot - dn, result.p_up_offset - dp)) {
      result.curvature[k][k] =
          (probe(dn, dp) - 2.0 * vals[0] + probe(-dn, -dp)) / (h[k] * h[k]);
    } else {
      result.curvature[k][k] =
          (probe(2.0 * dn, 2.0 * dp) - 2.0 * probe(dn, dp) + vals[0]) /
          (h[k] * h[k]);
    }
  }
  if (feasible(result.ndot - h[0], result.p_up_offset - h[1])) {
    const double cross = (probe(h[0], h[1]) - probe(h[0], -h[1]) -
                          probe(-h[0], h[1]) + probe(-h[0], -h[1])) /
                         (4.0 * h[0] * h[1]);
    result.curvature[0][1] = cross;
    result.curvature[1][0] = cross;
  }
  return result;
}

PowerLawFit fit_power_law(const std::vector<double>& omega,
                          const std::vector<double>& rate) {
  const std::size_t count = omega.size();
  if (count < 2 || rate.size() != count)
    throw std::invalid_argument(
        "power-law fit needs at least two matching samples");
  for (std::size_t i = 0; i < count; ++i)
    if (!(omega[i] > 0.0) || !(rate[i] > 0.0))
      throw std::invalid_argument(
          "power-law fit needs positive frequencies and rates");

  std::vector<long double> x(count), y(count);
  long double mx = 0.0L, my = 0.0L;
  for (std::size_t i = 0; i < count; ++i) {
    x[i] = std::log((long double)omega[i]);
    y[i] = std::log((long double)rate[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  long double sxx = 0.0L, sxy = 0.0L;
  for (std::size_t i = 0; i < count; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0L)
    throw std::invalid_argument(
        "power-law fit needs at least two distinct frequencies");
  const long double b = sxy / sxx;
  const long double a = my - b * mx;
  long double ss = 0.0L;
  for (std::size_t i = 0; i < count; ++i) {
    const long double r = y[i] - (a + b * x[i]);
    ss += r * r;
  }
  return {double(std::exp(a)), double(-b), double(std::sqrt(ss))};
}

}  // namespace ionlight::calibration
