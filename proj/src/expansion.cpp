#include "ionlight/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ionlight::expansion {

namespace {

using cplx = std::complex<double>;
using cplxl = std::complex<long double>;

constexpr long kMaxIterations = 1'000'000;
constexpr long double kRelTol = 1e-18L;

[[noreturn]] void fail_convergence(const char* what) {
  throw std::runtime_error(std::string("series did not converge: ") + what);
}

// Tracks an alternating/oscillating sum; finished once four consecutive
// terms are negligible against the largest magnitude seen.
struct Accumulator {
  cplxl sum{0.0L, 0.0L};
  long double scale = 0.0L;
  int quiet = 0;
  long iterations = 0;

  bool absorb(cplxl term, const char* what) {
    sum += term;
    scale = std::max({scale, std::abs(term), std::abs(sum)});
    quiet = std::abs(term) <= kRelTol * (scale + 1e-300L) ? quiet + 1 : 0;
    if (++iterations > kMaxIterations) fail_convergence(what);
    return quiet >= 4;
  }
};

// C(2n, l) for the smallest admissible n = ceil(l / 2).
long double binom_2n_l_start(int n0, int l) {
  long double c = 1.0L;
  for (int j = 0; j < l; ++j) c *= (2.0L * n0 - j) / (j + 1.0L);
  return c;
}

// Advance C(2n, l) -> C(2n + 2, l).
long double binom_2n_l_step(long double c, int n, int l) {
  return c * ((2.0L * n + 1.0L) * (2.0L * n + 2.0L)) /
         ((2.0L * n + 1.0L - l) * (2.0L * n + 2.0L - l));
}

// Inner defocus sum shared by the Gaussian and curvature-phase series:
//   sum_{m >= ceil(lp/2)} (-1)^m C(n+m-1, m) C(2m, lp) p0^(2m-lp),  n >= 1.
long double defocus_inner_sum(int n, int lp, double p0) {
  const int m0 = (lp + 1) / 2;
  long double cnm = 1.0L;  // C(n + m - 1, m) at m = m0
  for (int i = 1; i <= m0; ++i) cnm *= (n + i - 1.0L) / i;
  long double c2m = binom_2n_l_start(m0, lp);
  long double pp = 1.0L;
  for (int e = 0; e < 2 * m0 - lp; ++e) pp *= p0;
  Accumulator acc;
  for (int m = m0;; ++m) {
    const long double sgn = (m % 2) ? -1.0L : 1.0L;
    if (acc.absorb(sgn * cnm * c2m * pp, "defocus inner sum")) break;
    cnm *= (n + m) / (m + 1.0L);
    c2m = binom_2n_l_step(c2m, m, lp);
    pp *= (long double)p0 * p0;
  }
  return acc.sum.real();
}

std::vector<cplx> b1_polynomial(int sign, double p0, int lp_max);

}  // namespace

void FockSpace::validate() const {
  if (n_max < 1) throw std::invalid_argument("Fock cutoff must be at least 1");
  if (mode_count < 1)
    throw std::invalid_argument("mode count must be at least 1");
}

double hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("Hermite order must be non-negative");
  double hm = 1.0, h = 2.0 * x;
  if (n == 0) return hm;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * h - 2.0 * k * hm;
    hm = h;
    h = next;
  }
  return h;
}

std::complex<double> hermite(int n, std::complex<double> x) {
  if (n < 0) throw std::invalid_argument("Hermite order must be non-negative");
  cplx hm = 1.0, h = 2.0 * x;
  if (n == 0) return hm;
  for (int k = 1; k < n; ++k) {
    const cplx next = 2.0 * x * h - 2.0 * double(k) * hm;
    hm = h;
    h = next;
  }
  return h;
}

std::vector<SeriesTerm> a1_terms(double p0, int lp_max) {
  if (lp_max < 0) throw std::invalid_argument("negative series cap");
  std::vector<SeriesTerm> out;
  out.reserve(lp_max + 1);
  for (int lp = 0; lp <= lp_max; ++lp) {
    const int n0 = (lp + 1) / 2;
    // Generalized binomial (-1/4 choose n), advanced from n0.
    long double gb = 1.0L;
    for (int i = 1; i <= n0; ++i) gb *= (-0.25L - i + 1.0L) / i;
    long double c2n = binom_2n_l_start(n0, lp);
    long double pp = 1.0L;
    for (int e = 0; e < 2 * n0 - lp; ++e) pp *= p0;
    Accumulator acc;
    for (int n = n0;; ++n) {
      if (acc.absorb(gb * c2n * pp, "quartic-root amplitude")) break;
      gb *= (-0.25L - n) / (n + 1.0L);
      c2n = binom_2n_l_step(c2n, n, lp);
      pp *= (long double)p0 * p0;
    }
    out.push_back({cplx(double(acc.sum.real()), 0.0), lp, 0});
  }
  return out;
}

std::vector<SeriesTerm> a2_terms(double p0, double q0, int lp_max, int lq_max) {
  if (lp_max < 0 || lq_max < 0)
    throw std::invalid_argument("negative series cap");
  std::vector<SeriesTerm> out;
  out.reserve((lp_max + 1) * (lq_max + 1));
  for (int lp = 0; lp <= lp_max; ++lp) {
    for (int lq = 0; lq <= lq_max; ++lq) {
      const int n0 = (lq + 1) / 2;
      long double inv_fact = 1.0L;  // 1 / n!
      for (int i = 1; i <= n0; ++i) inv_fact /= i;
      long double c2n = binom_2n_l_start(n0, lq);
      long double qq = 1.0L;
      for (int e = 0; e < 2 * n0 - lq; ++e) qq *= q0;
      Accumulator acc;
      for (int n = n0;; ++n) {
        const long double sgn = (n % 2) ? -1.0L : 1.0L;
        const long double inner =
            n == 0 ? (lp == 0 ? 1.0L : 0.0L) : defocus_inner_sum(n, lp, p0);
        if (acc.absorb(sgn * inv_fact * c2n * qq * inner,
                       "Gaussian amplitude"))
          break;
        inv_fact /= (n + 1.0L);
        c2n = binom_2n_l_step(c2n, n, lq);
        qq *= (long double)q0 * q0;
      }
      out.push_back({cplx(double(acc.sum.real()), 0.0), lp, lq});
    }
  }
  return out;
}

std::vector<SeriesTerm> b0_terms(int sign, int order_max) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  if (order_max < 0) throw std::invalid_argument("negative series cap");
  std::vector<SeriesTerm> out;
  out.reserve(order_max + 1);
  const cplx unit(0.0, -double(sign));
  cplx phase(1.0, 0.0);
  long double fact = 1.0L;
  for (int n = 0; n <= order_max; ++n) {
    if (n > 0) {
      phase *= unit;
      fact *= n;
    }
    out.push_back({phase / double(fact), n, 0});
  }
  return out;
}

namespace {

// Coefficients of p1^0..p1^lp_max for exp[(sign i / 2) arctan(p0 + p1)].
std::vector<cplx> b1_polynomial(int sign, double p0, int lp_max) {
  // arctan(p0 + p1) - arctan(p0) = Im sum_j (-1)^(j-1) (i/(1+i p0))^j p1^j / j.
  const cplxl z = cplxl(0.0L, 1.0L) / cplxl(1.0L, (long double)p0);
  std::vector<cplxl> arg(lp_max + 1, cplxl(0.0L, 0.0L));
  cplxl zj(1.0L, 0.0L);
  for (int j = 1; j <= lp_max; ++j) {
    zj *= z;
    const long double sgn = (j % 2) ? 1.0L : -1.0L;
    const long double tj = (sgn * zj / (long double)j).imag();
    arg[j] = cplxl(0.0L, 0.5L * sign) * tj;
  }
  // exp of a power series with zero constant term.
  std::vector<cplxl> e(lp_max + 1, cplxl(0.0L, 0.0L));
  e[0] = 1.0L;
  for (int l = 1; l <= lp_max; ++l) {
    cplxl s(0.0L, 0.0L);
    for (int j = 1; j <= l; ++j) s += (long double)j * arg[j] * e[l - j];
    e[l] = s / (long double)l;
  }
  const cplxl phase = std::exp(cplxl(0.0L, 0.5L * sign) *
                               (long double)std::atan((long double)p0));
  std::vector<cplx> out(lp_max + 1);
  for (int l = 0; l <= lp_max; ++l) out[l] = cplx(phase * e[l]);
  return out;
}

}  // namespace

std::vector<SeriesTerm> b1_terms(int sign, double p0, int lp_max) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  if (lp_max < 0) throw std::invalid_argument("negative series cap");
  const auto poly = b1_polynomial(sign, p0, lp_max);
  std::vector<SeriesTerm> out;
  out.reserve(lp_max + 1);
  for (int l = 0; l <= lp_max; ++l) out.push_back({poly[l], l, 0});
  return out;
}

std::vector<SeriesTerm> b2_terms(int sign, double p0, double q0, int lp_max,
                                 int lq_max) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  if (lp_max < 0 || lq_max < 0)
    throw std::invalid_argument("negative series cap");
  const cplxl unit(0.0L, -(long double)sign);
  std::vector<SeriesTerm> out;
  out.reserve((lp_max + 1) * (lq_max + 1));
  for (int big_l = 0; big_l <= lp_max; ++big_l) {
    for (int lq = 0; lq <= lq_max; ++lq) {
      cplxl total(0.0L, 0.0L);
      // Split the total defocus power between the curvature prefactor
      // (p0 + p1)^n (power j) and the Lorentzian denominator series (lp).
      for (int j = 0; j <= big_l; ++j) {
        const int lp = big_l - j;
        const int n_start = std::max((lq + 1) / 2, j);
        // Running factors at n = n_start.
        long double inv_fact = 1.0L;
        for (int i = 1; i <= n_start; ++i) inv_fact /= i;
        long double c2n = binom_2n_l_start(n_start, lq);
        long double cnj = 1.0L;  // C(n, j)
        for (int i = 0; i < j; ++i)
          cnj *= (n_start - i) / (long double)(j - i);
        long double qq = 1.0L;
        for (int e = 0; e < 2 * n_start - lq; ++e) qq *= q0;
        long double pn = 1.0L;  // p0^(n - j)
        for (int e = 0; e < n_start - j; ++e) pn *= p0;
        cplxl phase = std::pow(unit, (long double)n_start);
        Accumulator acc;
        for (int n = n_start;; ++n) {
          const long double inner =
              n == 0 ? (lp == 0 ? 1.0L : 0.0L) : defocus_inner_sum(n, lp, p0);
          if (acc.absorb(phase * inv_fact * c2n * cnj * qq * pn * inner,
                         "curvature phase"))
            break;
          phase *= unit;
          inv_fact /= (n + 1.0L);
          c2n = binom_2n_l_step(c2n, n, lq);
          cnj *= (n + 1.0L) / (n + 1.0L - j);
          qq *= (long double)q0 * q0;
          pn *= p0;
        }
        total += acc.sum;
      }
      out.push_back({cplx(total), big_l, lq});
    }
  }
  return out;
}

double a1_closed(double p0, double p1) {
  const double u = p0 + p1;
  return std::pow(1.0 + u * u, -0.25);
}

double a2_closed(double p0, double p1, double q0, double q1) {
  const double u = p0 + p1, v = q0 + q1;
  return std::exp(-v * v / (1.0 + u * u));
}

std::complex<double> b0_closed(int sign, double p1) {
  return std::exp(cplx(0.0, -double(sign) * p1));
}

std::complex<double> b1_closed(int sign, double p0, double p1) {
  return std::exp(cplx(0.0, 0.5 * sign * std::atan(p0 + p1)));
}

std::complex<double> b2_closed(int sign, double p0, double p1, double q0,
                               double q1) {
  const double u = p0 + p1, v = q0 + q1;
  return std::exp(cplx(0.0, -double(sign) * u * v * v / (1.0 + u * u)));
}

std::complex<double> evaluate_terms(const std::vector<SeriesTerm>& terms,
                                    double p1, double q1) {
  cplxl sum(0.0L, 0.0L);
  for (const auto& t : terms) {
    long double w = 1.0L;
    for (int e = 0; e < t.power_p; ++e) w *= p1;
    for (int e = 0; e < t.power_q; ++e) w *= q1;
    sum += cplxl(t.coefficient) * w;
  }
  return cplx(sum);
}

OrderedForm a1_ordered(double p0) {
  const double s0sq = 1.0 / (1.0 + p0 * p0);
  const double base = std::pow(s0sq, 0.25);
  OrderedForm f;
  f.order0 = base;
  f.order1 = base * (-0.5 * p0) * s0sq;
  f.order2 = base * ((3.0 * p0 * p0 - 2.0) / 8.0) * s0sq * s0sq;
  return f;
}

OrderedForm b1_ordered(int sign, double p0) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  const double s0sq = 1.0 / (1.0 + p0 * p0);
  const cplx phase = std::exp(cplx(0.0, 0.5 * sign * std::atan(p0)));
  OrderedForm f;
  f.order0 = phase;
  f.order1 = phase * cplx(0.0, 0.5 * sign) * s0sq;
  f.order2 = phase * (-(cplx(1.0, 4.0 * sign * p0)) / 8.0) * s0sq * s0sq;
  return f;
}

namespace {

// Shared bracket of the ordered Gaussian forms: coefficients of p1^order for
// the transverse index lq, with the scaled offset x (real or complex).
template <typename T>
T ordered_bracket(double p0, double s0sq, int lq, int order, T x, T h_lq,
                  T h_lq1) {
  switch (order) {
    case 0:
      return h_lq;
    case 1:
      return -s0sq * p0 * ((double)lq * h_lq - x * h_lq1);
    case 2: {
      const T c_lq = (0.5 * p0 * p0) * ((double)lq - 2.0 * x * x) *
                         (lq + 1.0) -
                     0.5 * lq;
      const T c_lq1 = p0 * p0 * x * (x * x - (lq + 1.0)) + 0.5 * x;
      return s0sq * s0sq * (c_lq * h_lq + c_lq1 * h_lq1);
    }
    default:
      throw std::invalid_argument("ordered forms cover orders 0..2");
  }
}

}  // namespace

double a2_ordered(double p0, double q0, int lq, int order) {
  if (lq < 0) throw std::invalid_argument("negative transverse power");
  const double s0sq = 1.0 / (1.0 + p0 * p0);
  const double s0 = std::sqrt(s0sq);
  const double x = s0 * q0;
  double pref = std::exp(-x * x);
  for (int i = 1; i <= lq; ++i) pref *= -s0 / i;
  const double h_lq = hermite(lq, x);
  const double h_lq1 = hermite(lq + 1, x);
  return pref * ordered_bracket(p0, s0sq, lq, order, x, h_lq, h_lq1);
}

std::complex<double> b2_ordered_scalar(int sign, double p0, double q0,
                                       double p1, double q1) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  const double s0sq = 1.0 / (1.0 + p0 * p0);
  const double s0 = std::sqrt(s0sq);
  // s-hat = s0 sqrt(sign * i * (p0 + p1)), principal branch.
  const cplx sh = s0 * std::sqrt(cplx(0.0, double(sign)) * (p0 + p1));
  const cplx x = sh * q0;
  const cplx front = std::exp(cplx(0.0, -double(sign) * s0sq * q0 * q0 *
                                            (p0 + p1)));
  cplx sum(0.0, 0.0);
  cplx lq_pref(1.0, 0.0);  // (-sh q1)^lq / lq!
  for (int lq = 0; lq <= 80; ++lq) {
    if (lq > 0) lq_pref *= -sh * q1 / double(lq);
    const cplx h_lq = hermite(lq, x);
    const cplx h_lq1 = hermite(lq + 1, x);
    cplx bracket(0.0, 0.0);
    double p1_pow = 1.0;
    for (int order = 0; order <= 2; ++order) {
      bracket += ordered_bracket(p0, s0sq, lq, order, x, h_lq, h_lq1) * p1_pow;
      p1_pow *= p1;
    }
    const cplx term = lq_pref * bracket;
    sum += term;
    if (lq > 4 && std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
  }
  return front * sum;
}

std::vector<B2Structure> b2_structure(double q0, int lq_max, int n_scan) {
  std::vector<B2Structure> out;
  out.reserve(lq_max + 1);
  for (int lq = 0; lq <= lq_max; ++lq) {
    B2Structure row;
    row.lq = lq;
    row.min_sqrt_power = -1;
    for (int n = (lq + 1) / 2; n <= n_scan; ++n) {
      long double mag = 1.0L;  // C(2n, lq) q0^(2n - lq)
      for (int j = 0; j < lq; ++j) mag *= (2.0L * n - j) / (j + 1.0L);
      for (int e = 0; e < 2 * n - lq; ++e) mag *= q0;
      if (std::abs((double)mag) > 0.0) {
        if (row.min_sqrt_power < 0) row.min_sqrt_power = 2 * n;
        row.all_even = row.all_even && (2 * n) % 2 == 0;
      }
    }
    out.push_back(row);
  }
  return out;
}

Eigen::MatrixXd ladder_monomial_matrix(int power, const FockSpace& space) {
  space.validate();
  if (power < 0) throw std::invalid_argument("negative ladder power");
  const int d = space.dimension();
  if (power >= d)
    throw std::invalid_argument(
        "ladder power exceeds what the Fock cutoff can represent");
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d, d);
  for (int n = 0; n + 1 < d; ++n)
    x(n, n + 1) = x(n + 1, n) = std::sqrt(n + 1.0);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(d, d);
  for (int i = 0; i < power; ++i) result = result * x;
  return result;
}

double tridiagonal_norm(const std::vector<double>& off_diagonal) {
  const int d = int(off_diagonal.size()) + 1;
  if (d == 1) return 0.0;
  std::vector<double> b2(off_diagonal.size());
  double hi = 0.0;
  for (std::size_t i = 0; i < off_diagonal.size(); ++i) {
    b2[i] = off_diagonal[i] * off_diagonal[i];
    const double left = i == 0 ? 0.0 : std::abs(off_diagonal[i - 1]);
    hi = std::max(hi, left + std::abs(off_diagonal[i]));
  }
  hi = std::max(hi, std::abs(off_diagonal.back()));
  // Count of eigenvalues below x via the Sturm sequence of T - x I.
  const auto count_below = [&](double x) {
    int count = 0;
    double det = 1.0;
    for (int i = 0; i < d; ++i) {
      const double prev = det == 0.0 ? 1e-300 : det;
      det = -x - (i > 0 ? b2[i - 1] / prev : 0.0);
      if (det < 0.0) ++count;
    }
    return count;
  };
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    // With zero diagonal the spectrum is symmetric; the norm is the largest
    // eigenvalue, i.e. the infimum of x with all d eigenvalues below x.
    if (count_below(mid) == d)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double ladder_norm(int n_max) {
  if (n_max < 1) throw std::invalid_argument("Fock cutoff must be at least 1");
  static std::mutex mutex;
  static std::map<int, double> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n_max);
    if (it != cache.end()) return it->second;
  }
  std::vector<double> off(n_max);
  for (int n = 0; n < n_max; ++n) off[n] = std::sqrt(n + 1.0);
  const double norm = tridiagonal_norm(off);
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(n_max, norm);
  return norm;
}

double substitution_norm(const std::vector<double>& coefficients,
                         const std::vector<int>& cutoffs) {
  if (coefficients.size() != cutoffs.size())
    throw std::invalid_argument("one cutoff per mode coefficient required");
  double sum = 0.0;
  for (std::size_t p = 0; p < coefficients.size(); ++p)
    sum += std::abs(coefficients[p]) * ladder_norm(cutoffs[p]);
  return sum;
}

int thermal_cutoff(double nbar, double tail) {
  if (!(tail > 0.0) || tail >= 1.0)
    throw std::invalid_argument("tail mass must lie in (0, 1)");
  if (nbar <= 0.0) return 1;
  const double n = std::ceil(std::log(1.0 / tail) /
                             std::log((nbar + 1.0) / nbar));
  return std::max(1, int(n));
}

std::vector<double> fractional_contribution(const SeriesTerm& term,
                                            double c00_magnitude,
                                            const std::vector<double>& p_norm,
                                            const std::vector<double>& q_norm) {
  if (!(c00_magnitude > 0.0))
    throw std::invalid_argument("constant-term magnitude must be positive");
  if (p_norm.size() != q_norm.size())
    throw std::invalid_argument("scenario norm lists must align");
  std::vector<double> out(p_norm.size());
  for (std::size_t s = 0; s < p_norm.size(); ++s) {
    double v = std::abs(term.coefficient) / c00_magnitude;
    for (int e = 0; e < term.power_p; ++e) v *= p_norm[s];
    for (int e = 0; e < term.power_q; ++e) v *= q_norm[s];
    out[s] = v;
  }
  return out;
}

std::vector<TruncationRow> truncation_report(
    const std::vector<FunctionSpec>& functions,
    const TruncationPolicy& policy) {
  const std::size_t scenarios = policy.scenario_names.size();
  std::vector<TruncationRow> rows;
  for (const auto& fn : functions) {
    if (fn.p_norm.size() != scenarios || fn.q_norm.size() != scenarios)
      throw std::invalid_argument("function '" + fn.name +
                                  "' must carry one norm pair per scenario");
    double c00 = 0.0;
    for (const auto& t : fn.terms)
      if (t.power_p == 0 && t.power_q == 0) c00 = std::abs(t.coefficient);
    if (!(c00 > 0.0))
      throw std::invalid_argument("function '" + fn.name +
                                  "' lacks a constant term to normalize by");
    for (const auto& t : fn.terms) {
      TruncationRow row;
      row.function = fn.name;
      row.power_p = t.power_p;
      row.power_q = t.power_q;
      row.coefficient_magnitude = std::abs(t.coefficient);
      row.contribution = fractional_contribution(t, c00, fn.p_norm, fn.q_norm);
      bool significant = fn.exact;
      for (double c : row.contribution)
        significant = significant || c >= policy.threshold;
      row.kept = significant;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ionlight::expansion
