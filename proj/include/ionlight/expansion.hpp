#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace ionlight::expansion {

// One monomial of an operator-valued power series: coefficient times
// (defocus operator)^power_p times (transverse operator)^power_q. Powers of
// the same operator argument commute, so this collected form is exact.
struct SeriesTerm {
  std::complex<double> coefficient;
  int power_p = 0;
  int power_q = 0;
};

// Truncated single-mode motional space.
struct FockSpace {
  int n_max = 1;       // highest retained Fock level
  int mode_count = 1;  // modes in scope (1 for all matrix operations)

  int dimension() const { return n_max + 1; }
  void validate() const;
};

// Physicists' Hermite polynomial by the three-term recurrence.
double hermite(int n, double x);
std::complex<double> hermite(int n, std::complex<double> x);

// --- series term lists -------------------------------------------------------
// Amplitude factor [1 + (p0 + p1)^2]^(-1/4), collected in powers of p1.
std::vector<SeriesTerm> a1_terms(double p0, int lp_max);

// Gaussian amplitude factor exp[-(q0 + q1)^2 / (1 + (p0 + p1)^2)].
std::vector<SeriesTerm> a2_terms(double p0, double q0, int lp_max, int lq_max);

// Plane-wave phase factor exp(-+ i p1); sign = +1 selects the upper sign.
std::vector<SeriesTerm> b0_terms(int sign, int order_max);

// Half-Gouy phase factor exp[(+-i/2) arctan(p0 + p1)].
std::vector<SeriesTerm> b1_terms(int sign, double p0, int lp_max);

// Curvature phase factor exp[-+ i (p0 + p1)(q0 + q1)^2 / (1 + (p0 + p1)^2)].
std::vector<SeriesTerm> b2_terms(int sign, double p0, double q0, int lp_max,
                                 int lq_max);

// Closed-form scalar oracles for the five functions at scalar (p1, q1).
double a1_closed(double p0, double p1);
double a2_closed(double p0, double p1, double q0, double q1);
std::complex<double> b0_closed(int sign, double p1);
std::complex<double> b1_closed(int sign, double p0, double p1);
std::complex<double> b2_closed(int sign, double p0, double p1, double q0,
                               double q1);

// Sums a collected term list at scalar substitutions (test/diagnostic use).
std::complex<double> evaluate_terms(const std::vector<SeriesTerm>& terms,
                                    double p1, double q1);

// --- ordered second-order forms ----------------------------------------------
// Coefficients of p1^0, p1^1, p1^2 in the ordered expansions, everything
// collected against s0 = 1 / sqrt(1 + p0^2).
struct OrderedForm {
  std::complex<double> order0;
  std::complex<double> order1;
  std::complex<double> order2;
};

OrderedForm a1_ordered(double p0);
OrderedForm b1_ordered(int sign, double p0);

// Ordered A2: coefficient of q1^lq p1^order (order <= 2), via the
// Hermite-structured collected form.
double a2_ordered(double p0, double q0, int lq, int order);

// Ordered B2 evaluated at scalar (p1, q1), truncated after p1^2 in the
// bracket; the square-root prefactors are kept closed-form, so the result
// approximates the closed form to O(p1^3).
std::complex<double> b2_ordered_scalar(int sign, double p0, double q0,
                                       double p1, double q1);

// Structure probe for the B2 series: for a given power lq of the transverse
// operator, the smallest square-root-factor power carrying a nonzero summand
// and its parity. Feeds the structural assertions on the emitted series.
struct B2Structure {
  int lq = 0;
  int min_sqrt_power = 0;  // smallest total power of sqrt(p0 + p1) factors
  bool all_even = true;    // every summand carries an even total power
};
std::vector<B2Structure> b2_structure(double q0, int lq_max, int n_scan = 40);

// --- ladder-operator matrices and norms --------------------------------------
// Dense matrix of (a + a^dag)^power on the truncated space.
Eigen::MatrixXd ladder_monomial_matrix(int power, const FockSpace& space);

// Spectral norm of a symmetric tridiagonal matrix with zero diagonal, given
// its off-diagonal entries (Sturm bisection; scales to very large cutoffs).
double tridiagonal_norm(const std::vector<double>& off_diagonal);

// Spectral norm of (a + a^dag) truncated at n_max.
double ladder_norm(int n_max);

// Triangle-inequality norm bound for sum_p c_p (a_p + a_p^dag) with per-mode
// cutoffs: sum_p |c_p| * ladder_norm(n_max_p). Exact for a single mode.
double substitution_norm(const std::vector<double>& coefficients,
                         const std::vector<int>& cutoffs);

// Cutoff chosen so the thermal occupation mass above it stays below `tail`:
// ceil(ln(1/tail) / ln((nbar + 1) / nbar)), floored at 1.
int thermal_cutoff(double nbar, double tail);

// --- truncation engine --------------------------------------------------------
// One A/B function instance with the operator-norm bounds of its p and q
// substitutions evaluated per scenario.
struct FunctionSpec {
  std::string name;
  std::vector<SeriesTerm> terms;
  std::vector<double> p_norm;  // per scenario
  std::vector<double> q_norm;  // per scenario
  // Retained in closed form rather than series-truncated (the plane-wave
  // factor, which drives the dynamics, is handled this way). Rows are still
  // reported with their contributions, but every one is marked kept.
  bool exact = false;
};

struct TruncationPolicy {
  double threshold = 1e-2;
  std::vector<std::string> scenario_names;
  int chain_size_assumption = 50;  // documented validity cap for the bounds
};

struct TruncationRow {
  std::string function;
  int power_p = 0;
  int power_q = 0;
  double coefficient_magnitude = 0.0;
  std::vector<double> contribution;  // per scenario, normalized to the
                                     // function's constant term
  bool kept = false;
};

// Fractional contribution of one term against the constant term of the same
// function, per scenario.
std::vector<double> fractional_contribution(const SeriesTerm& term,
                                            double c00_magnitude,
                                            const std::vector<double>& p_norm,
                                            const std::vector<double>& q_norm);

// Keep/drop table over all terms of all functions. A term is dropped only if
// its contribution is below threshold in every scenario.
std::vector<TruncationRow> truncation_report(
    const std::vector<FunctionSpec>& functions, const TruncationPolicy& policy);

}  // namespace ionlight::expansion
