#include "ionlight/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "ionlight/util.hpp"

namespace ionlight::dynamics {

namespace {

using cplx = std::complex<double>;

// Above this cancellation severity 2 eta^2 (2n + 1) the alternating series
// loses too many digits even in extended precision; hand over to quadrature.
// At the limit the series still carries ~5e-7 relative accuracy; below
// severity ~16 it is at machine precision.
constexpr double kSeriesSeverityLimit = 32.5;
constexpr int kQuadratureDegree = 512;

struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes and weights for integr(exp(-u^2) f(u)) by Golub-Welsch on the
// Jacobi matrix of the Hermite recurrence.
const GaussHermite& gauss_hermite_512() {
  static const GaussHermite table = [] {
    const int deg = kQuadratureDegree;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(deg, deg);
    for (int k = 1; k < deg; ++k)
      j(k - 1, k) = j(k, k - 1) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    GaussHermite out;
    out.nodes.resize(deg);
    out.weights.resize(deg);
    const double sqrt_pi = std::sqrt(constants::pi);
    for (int i = 0; i < deg; ++i) {
      out.nodes[i] = es.eigenvalues()[i];
      const double v0 = es.eigenvectors()(0, i);
      out.weights[i] = sqrt_pi * v0 * v0;
    }
    return out;
  }();
  return table;
}

ThetaResult theta_series(int n, double eta, double xi, double omega0_t,
                         int m_cap) {
  const long double ratio_base = -0.5L * (long double)eta * eta;
  const long double two_n1 = 2.0L * n + 1.0L;
  long double hj = 1.0L;                        // H_{2m}(xi)
  long double hj1 = 2.0L * (long double)xi;     // H_{2m+1}(xi)
  int j = 0;
  long double f_prev = 0.0L, f = 1.0L;          // f_{m-1}, f_m
  long double c = 1.0L;                         // (-eta^2/2)^m / m!
  util::CompensatedSumL sum;
  std::vector<long double> partials;
  partials.reserve(64);
  long double scale = 0.0L;
  int quiet = 0;
  bool converged = false;
  for (int m = 0; m <= m_cap; ++m) {
    const long double term = c * hj * f;
    sum.add(term);
    partials.push_back(sum.value());
    scale = std::max({scale, std::abs(term), std::abs(sum.value())});
    quiet = std::abs(term) <= 1e-20L * (scale + 1e-4000L) ? quiet + 1 : 0;
    if (quiet >= 4) {
      converged = true;
      break;
    }
    // Advance the running factors to order m + 1.
    c *= ratio_base / (m + 1.0L);
    const long double f_next = (m * f_prev - two_n1 * f) / (m + 1.0L);
    f_prev = f;
    f = f_next;
    for (int step = 0; step < 2; ++step) {
      const long double h_next =
          2.0L * (long double)xi * hj1 - 2.0L * (j + 1.0L) * hj;
      hj = hj1;
      hj1 = h_next;
      ++j;
    }
  }
  if (!converged)
    throw ConvergenceError("rotation-angle series exceeded its order budget");
  const long double total = sum.value();
  const long double tol = 1e-3L * std::abs(total);
  int first_settled = int(partials.size()) - 1;
  for (int k = int(partials.size()) - 1;
       k >= 0 && std::abs(partials[k] - total) <= tol; --k)
    first_settled = k;
  ThetaResult out;
  out.theta = double((long double)omega0_t * total);
  out.series_terms = first_settled;
  return out;
}

ThetaResult theta_quadrature(int n, double eta, double xi, double omega0_t) {
  const auto& gh = gauss_hermite_512();
  util::CompensatedSumL sum;
  for (int i = 0; i < kQuadratureDegree; ++i) {
    const cplx z(-2.0 * xi * eta, 2.0 * eta * gh.nodes[i]);
    const cplx x = -z * z;  // Laguerre argument
    cplx lm(1.0, 0.0);
    cplx l = 1.0 - x;
    cplx ln = n == 0 ? lm : l;
    for (int k = 1; k < n; ++k) {
      const cplx next = ((2.0 * k + 1.0 - x) * l - double(k) * lm) /
                        double(k + 1);
      lm = l;
      l = next;
      ln = l;
    }
    const cplx val = std::exp(0.5 * z * z) * ln;
    sum.add((long double)gh.weights[i] * (long double)val.real());
  }
  ThetaResult out;
  out.theta = double((long double)omega0_t * sum.value() /
                     std::sqrt((long double)constants::pi));
  return out;
}

}  // namespace

ThetaResult theta_n(int n, double eta, double xi, double omega0_t, int m_cap) {
  if (n < 0) throw std::invalid_argument("Fock index must be non-negative");
  if (eta < 0.0) throw std::invalid_argument("Lamb-Dicke factor must be >= 0");
  if (m_cap < 1) throw std::invalid_argument("series budget must be >= 1");
  const double severity = 2.0 * eta * eta * (2.0 * n + 1.0);
  if (severity <= kSeriesSeverityLimit)
    return theta_series(n, eta, xi, omega0_t, m_cap);
  return theta_quadrature(n, eta, xi, omega0_t);
}

double theta_n_aligned(int n, double eta, double omega0_t) {
  if (n < 0) throw std::invalid_argument("Fock index must be non-negative");
  const long double e2 = (long double)eta * eta;
  const long double s = 1.0L + 2.0L * e2;
  const long double z = 4.0L * e2 / s;
  long double g_prev = 1.0L;            // g_0
  long double g = 1.0L - 0.5L * z;      // g_1
  if (n == 0) g = g_prev;
  for (int k = 1; k < n; ++k) {
    const long double g_next =
        ((2.0L * k + 1.0L - (k + 0.5L) * z) * g - k * (1.0L - z) * g_prev) /
        (k + 1.0L);
    g_prev = g;
    g = g_next;
  }
  return double((long double)omega0_t * g / std::sqrt(s));
}

std::vector<double> theta_profile_aligned(int n_max, double eta) {
  if (n_max < 0) throw std::invalid_argument("Fock index must be non-negative");
  const long double e2 = (long double)eta * eta;
  const long double s = 1.0L + 2.0L * e2;
  const long double z = 4.0L * e2 / s;
  const long double root = std::sqrt(s);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
  long double g_prev = 1.0L;            // g_0
  long double g = 1.0L - 0.5L * z;      // g_1
  out[0] = double(1.0L * g_prev / root);
  if (n_max >= 1) out[1] = double(1.0L * g / root);
  for (int k = 1; k < n_max; ++k) {
    const long double g_next =
        ((2.0L * k + 1.0L - (k + 0.5L) * z) * g - k * (1.0L - z) * g_prev) /
        (k + 1.0L);
    g_prev = g;
    g = g_next;
    out[static_cast<std::size_t>(k) + 1] = double(1.0L * g / root);
  }
  return out;
}

util::BigInt fock_moment_scaled_recurrence(int n, int m) {
  if (n < 0 || m < 0) throw std::invalid_argument("indices must be >= 0");
  const std::int64_t two_n1 = 2LL * n + 1LL;
  util::BigInt f_prev = 1;          // F_0
  util::BigInt f = -two_n1;         // F_1
  if (m == 0) return util::BigInt(1);
  for (int k = 1; k < m; ++k) {
    util::BigInt f_next = f_prev * (std::int64_t(k) * k) - f * two_n1;
    f_prev = f;
    f = f_next;
  }
  util::BigInt result = util::BigInt::binomial(2 * m, m) * f;
  if (m % 2 == 1) result *= -1;
  return result;
}

util::BigInt fock_moment_scaled_sum(int n, int m) {
  if (n < 0 || m < 0) throw std::invalid_argument("indices must be >= 0");
  util::BigInt total = 0;
  util::BigInt two_pow = 1;  // 2^i
  for (int i = 0; i <= m; ++i) {
    util::BigInt term =
        util::BigInt::binomial(n + i, i) * util::BigInt::binomial(2 * m, m - i);
    for (int k = i + 1; k <= m + i; ++k) term *= k;  // (m + i)! / i!
    term *= two_pow;
    if ((m - i) % 2 == 1) term *= -1;
    total += term;
    two_pow *= 2;
  }
  return total;
}

double fock_moment(int n, int m) {
  const long double scaled =
      fock_moment_scaled_recurrence(n, m).to_long_double();
  return double(std::ldexp(scaled, -m));
}

double thermal_weight(double nbar, int n) {
  if (nbar < 0.0 || n < 0)
    throw std::invalid_argument("occupation and level must be >= 0");
  if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(nbar) - (n + 1.0) * std::log1p(nbar));
}

double p_up(double nbar, double eta, double xi, double omega0_t, double tail) {
  const int cutoff = expansion::thermal_cutoff(nbar, tail);
  util::CompensatedSum sum, mass;
  for (int n = 0; n <= cutoff; ++n) {
    const double w = thermal_weight(nbar, n);
    if (w == 0.0) continue;
    mass.add(w);
    const double th = theta_n(n, eta, xi, omega0_t).theta;
    const double s = std::sin(th);
    sum.add(w * s * s);
  }
  return sum.value() / mass.value();
}

std::vector<Pulse> sk1_sequence(double theta) {
  const double psi = std::acos(-theta / (4.0 * constants::pi));
  return {{theta, 0.0, 0},
          {constants::pi, psi, 1},
          {constants::pi, psi, 1},
          {constants::pi, -psi, 2},
          {constants::pi, -psi, 2}};
}

std::vector<Pulse> tycko_sequence() {
  const double third = 2.0 * constants::pi / 3.0;
  return {{constants::pi, third, 0},
          {constants::pi, 2.0 * third, 1},
          {constants::pi, third, 2}};
}

Eigen::Matrix2cd rotation(double bloch_angle, double phase) {
  const double c = std::cos(0.5 * bloch_angle);
  const double s = std::sin(0.5 * bloch_angle);
  const cplx off_upper = cplx(0.0, -s) * std::exp(cplx(0.0, -phase));
  const cplx off_lower = cplx(0.0, -s) * std::exp(cplx(0.0, phase));
  Eigen::Matrix2cd r;
  r << cplx(c, 0.0), off_upper, off_lower, cplx(c, 0.0);
  return r;
}

double sequence_p_up(const std::vector<Pulse>& sequence, double nbar,
                     double eta, double xi, double base_area,
                     double phase_slew, SlewIndexing indexing, double tail) {
  if (sequence.empty()) throw std::invalid_argument("empty pulse sequence");
  const int cutoff = expansion::thermal_cutoff(nbar, tail);
  util::CompensatedSum sum, mass;
  for (int n = 0; n <= cutoff; ++n) {
    const double w = thermal_weight(nbar, n);
    if (w == 0.0) continue;
    mass.add(w);
    const double rabi = theta_n(n, eta, xi, 1.0).theta;
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (std::size_t k = 0; k < sequence.size(); ++k) {
      const auto& p = sequence[k];
      const int idx =
          indexing == SlewIndexing::by_gate ? p.gate_index : int(k);
      const double half = (p.area / constants::pi) * base_area * rabi;
      u = rotation(2.0 * half, p.phase + idx * phase_slew) * u;
    }
    const double amp = std::abs(u(1, 0));
    sum.add(w * amp * amp);
  }
  return sum.value() / mass.value();
}

double debye_waller_norm(const std::vector<double>& kappa,
                         const std::vector<int>& cutoffs) {
  if (kappa.size() != cutoffs.size())
    throw std::invalid_argument("one cutoff per mode required");
  double phase = 0.0;
  for (std::size_t p = 0; p < kappa.size(); ++p)
    phase += std::abs(kappa[p]) * expansion::ladder_norm(cutoffs[p]);
  if (phase >= constants::pi) return 2.0;
  return 2.0 * std::sin(0.5 * phase);
}

std::vector<double> brute_force_evolve(double eta, double xi, double omega0_t,
                                       const expansion::FockSpace& space,
                                       int series_order, double psi0) {
  space.validate();
  if (series_order < 0 || series_order >= space.dimension())
    throw std::invalid_argument(
        "operator series order must fit inside the Fock cutoff");
  const int d = space.dimension();

  // Diagonal of the coupling operator sum_l (eta^l / l!) H_l(xi) X^l,
  // built from honest truncated ladder-matrix powers.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d, d);
  for (int n = 0; n + 1 < d; ++n)
    x(n, n + 1) = x(n + 1, n) = std::sqrt(n + 1.0);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd coupling = Eigen::VectorXd::Zero(d);
  double factor = 1.0;  // eta^l / l!
  for (int l = 0; l <= series_order; ++l) {
    if (l > 0) {
      power = power * x;
      factor *= eta / l;
    }
    coupling += factor * expansion::hermite(l, xi) * power.diagonal();
  }

  // Secular carrier Hamiltonian: each level couples to its partner through
  // sigma at azimuth psi0, scaled by the level's coupling strength.
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  for (int n = 0; n < d; ++n) {
    const cplx off = coupling[n] * std::exp(cplx(0.0, -psi0));
    h(2 * n, 2 * n + 1) = off;
    h(2 * n + 1, 2 * n) = std::conj(off);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(2 * d);
  for (int i = 0; i < 2 * d; ++i)
    phases[i] = std::exp(cplx(0.0, -omega0_t * es.eigenvalues()[i]));
  const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() *
                             es.eigenvectors().adjoint();

  std::vector<double> bright(d, 0.0);
  for (int n = 0; n < d; ++n) {
    double p = 0.0;
    for (int m = 0; m < d; ++m) p += std::norm(u(2 * m + 1, 2 * n));
    bright[n] = p;
  }
  return bright;
}

}  // namespace ionlight::dynamics
