#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "ionlight/constants.hpp"
#include "ionlight/dynamics.hpp"
#include "ionlight/expansion.hpp"

using namespace ionlight;
using std::complex;

namespace {
constexpr double kPi = constants::pi;
constexpr double kHalfPi = 0.5 * constants::pi;
}  // namespace

TEST_CASE("rotation angle reduces to the pulse area without recoil") {
  for (int n : {0, 5, 2000}) {
    const auto r = dynamics::theta_n(n, 0.0, 0.0, kHalfPi);
    CHECK(r.theta == doctest::Approx(kHalfPi).epsilon(1e-15));
    REQUIRE(r.series_terms.has_value());
    CHECK(*r.series_terms == 0);
  }
}

TEST_CASE("rotation angle is linear in the pulse area") {
  const auto a = dynamics::theta_n(40, 0.03, 0.1, 0.7);
  const auto b = dynamics::theta_n(40, 0.03, 0.1, 1.4);
  CHECK(b.theta == doctest::Approx(2.0 * a.theta).epsilon(1e-14));
}

TEST_CASE("ground-level angles match the closed forms") {
  for (double eta : {0.005, 0.02, 0.1}) {
    CAPTURE(eta);
    const double s = 1.0 + 2.0 * eta * eta;
    CHECK(dynamics::theta_n(0, eta, 0.0, 1.0).theta ==
          doctest::Approx(1.0 / std::sqrt(s)).epsilon(1e-13));
    for (double xi : {0.2, -0.4}) {
      CAPTURE(xi);
      const double expect =
          std::exp(2.0 * eta * eta * xi * xi / s) / std::sqrt(s);
      CHECK(dynamics::theta_n(0, eta, xi, 1.0).theta ==
            doctest::Approx(expect).epsilon(1e-12));
    }
    // n = 1 closed form: (1 - z/2) / sqrt(s) with z = 4 eta^2 / s.
    const double z = 4.0 * eta * eta / s;
    CHECK(dynamics::theta_n(1, eta, 0.0, 1.0).theta ==
          doctest::Approx((1.0 - 0.5 * z) / std::sqrt(s)).epsilon(1e-12));
    CHECK(dynamics::theta_n_aligned(1, eta, 1.0) ==
          doctest::Approx((1.0 - 0.5 * z) / std::sqrt(s)).epsilon(1e-13));
  }
}

TEST_CASE("series and quadrature agree with the aligned closed form") {
  for (int n : {0, 1, 10, 100, 1000, 10000}) {
    for (double eta : {0.005, 0.02, 0.1}) {
      CAPTURE(n);
      CAPTURE(eta);
      const double ref = dynamics::theta_n_aligned(n, eta, kHalfPi);
      const auto got = dynamics::theta_n(n, eta, 0.0, kHalfPi);
      CHECK(std::abs(got.theta - ref) <=
            1e-8 * std::max(std::abs(ref), 1e-3));
    }
  }
  // Continuity across the internal path handover (severity 32.5; here at
  // eta = 0.02 that sits between n = 20312 and n = 20313).  The series side
  // keeps ~1e-7 absolute accuracy right at its limit, the quadrature side is
  // at ~1e-9, so the two paths join without a visible seam at 1e-6.
  const double eta = 0.02;
  const double below = dynamics::theta_n(20300, eta, 0.0, kHalfPi).theta;
  const double above = dynamics::theta_n(20350, eta, 0.0, kHalfPi).theta;
  CHECK(dynamics::theta_n(20300, eta, 0.0, kHalfPi).series_terms.has_value());
  CHECK_FALSE(
      dynamics::theta_n(20350, eta, 0.0, kHalfPi).series_terms.has_value());
  CHECK(std::abs(below - dynamics::theta_n_aligned(20300, eta, kHalfPi)) <
        1e-6);
  CHECK(std::abs(above - dynamics::theta_n_aligned(20350, eta, kHalfPi)) <
        1e-8);
}

TEST_CASE("series order bookkeeping at the canonical operating points") {
  const auto a = dynamics::theta_n(2000, 0.01, 0.0, kHalfPi);
  REQUIRE(a.series_terms.has_value());
  CHECK(*a.series_terms == 4);
  const auto b = dynamics::theta_n(2000, 0.02, 0.0, kHalfPi);
  REQUIRE(b.series_terms.has_value());
  CHECK(*b.series_terms == 11);
  const auto c = dynamics::theta_n(20000, 0.02, 0.0, kHalfPi);
  REQUIRE(c.series_terms.has_value());
  CHECK(*c.series_terms == 89);
  // Severe cancellation diverts to quadrature, which carries no order count.
  const auto d = dynamics::theta_n(10000, 0.1, 0.0, kHalfPi);
  CHECK(!d.series_terms.has_value());
}

TEST_CASE("exhausting the series budget raises a convergence error") {
  CHECK_THROWS_AS(dynamics::theta_n(2000, 0.02, 0.0, kHalfPi, 1),
                  dynamics::ConvergenceError);
}

TEST_CASE("both exact moment paths agree and match small closed forms") {
  for (int n = 0; n <= 30; ++n) {
    for (int m = 0; m <= 30; ++m) {
      CAPTURE(n);
      CAPTURE(m);
      CHECK(dynamics::fock_moment_scaled_recurrence(n, m) ==
            dynamics::fock_moment_scaled_sum(n, m));
    }
  }
  for (int n : {0, 1, 7, 30}) {
    CHECK(dynamics::fock_moment(n, 0) == doctest::Approx(1.0));
    CHECK(dynamics::fock_moment(n, 1) == doctest::Approx(2.0 * n + 1.0));
    CHECK(dynamics::fock_moment(n, 2) ==
          doctest::Approx(6.0 * n * n + 6.0 * n + 3.0));
  }
  // Vacuum moments are the double factorials (2m - 1)!!.
  CHECK(dynamics::fock_moment(0, 3) == doctest::Approx(15.0));
  CHECK(dynamics::fock_moment(0, 4) == doctest::Approx(105.0));
}

TEST_CASE("moments equal ladder-matrix diagonals on a 64-level space") {
  expansion::FockSpace space;
  space.n_max = 63;
  for (int m = 0; m <= 30; ++m) {
    const auto x2m = expansion::ladder_monomial_matrix(2 * m, space);
    for (int n = 0; n <= 30; ++n) {
      CAPTURE(n);
      CAPTURE(m);
      const double ref = dynamics::fock_moment(n, m);
      CHECK(std::abs(x2m(n, n) - ref) <= 1e-9 * std::max(ref, 1.0));
    }
  }
}

TEST_CASE("thermal weights normalize and follow the geometric ratio") {
  const double nbar = 3.7;
  double sum = 0.0;
  for (int n = 0; n <= 200; ++n) sum += dynamics::thermal_weight(nbar, n);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(dynamics::thermal_weight(nbar, 0) ==
        doctest::Approx(1.0 / (1.0 + nbar)).epsilon(1e-14));
  CHECK(dynamics::thermal_weight(nbar, 11) /
            dynamics::thermal_weight(nbar, 10) ==
        doctest::Approx(nbar / (1.0 + nbar)).epsilon(1e-12));
  CHECK(dynamics::thermal_weight(0.0, 0) == 1.0);
  CHECK(dynamics::thermal_weight(0.0, 1) == 0.0);
  // Large arguments must not overflow.
  CHECK(dynamics::thermal_weight(1000.0, 13000) > 0.0);
}

TEST_CASE("thermal bright probability limits") {
  CHECK(dynamics::p_up(37.0, 0.0, 0.0, kHalfPi) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dynamics::p_up(37.0, 0.0, 0.0, 0.3) ==
        doctest::Approx(std::sin(0.3) * std::sin(0.3)).epsilon(1e-9));
  const double eta = 0.014;
  const double t0 = dynamics::theta_n(0, eta, 0.0, kHalfPi).theta;
  CHECK(dynamics::p_up(0.0, eta, 0.0, kHalfPi) ==
        doctest::Approx(std::sin(t0) * std::sin(t0)).epsilon(1e-12));
  CHECK(dynamics::p_up(64.0, eta, 0.0, kHalfPi) < 1.0);
  // The tail cutoff is a small, controlled truncation.
  const double loose = dynamics::p_up(64.0, eta, 0.0, kHalfPi, 1e-6);
  const double tight = dynamics::p_up(64.0, eta, 0.0, kHalfPi, 1e-9);
  CHECK(std::abs(loose - tight) < 1e-5);
  // Independent evaluation through the closed-form angle path.
  double ref = 0.0;
  for (int n = 0; n <= expansion::thermal_cutoff(64.0, 1e-9); ++n) {
    const double th = dynamics::theta_n_aligned(n, eta, kHalfPi);
    ref += dynamics::thermal_weight(64.0, n) * std::sin(th) * std::sin(th);
  }
  CHECK(tight == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("two-level rotations compose as expected") {
  const auto full = dynamics::rotation(kPi, 0.0);
  CHECK(std::abs(full(1, 0) - complex<double>(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(full(0, 0)) < 1e-15);
  const auto half = dynamics::rotation(kHalfPi, 0.0);
  CHECK((half * half - full).cwiseAbs().maxCoeff() < 1e-15);
  const auto r = dynamics::rotation(1.1, 0.7);
  CHECK((r * r.adjoint() - Eigen::Matrix2cd::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  // A 2 pi rotation is -identity for any phase.
  const auto two_pi = dynamics::rotation(2.0 * kPi, 1.234);
  CHECK((two_pi + Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("sequence layouts carry the pinned areas, phases and gate indices") {
  const auto sk1 = dynamics::sk1_sequence();
  REQUIRE(sk1.size() == 5);
  const double psi = std::acos(-0.25);
  CHECK(sk1[0].area == doctest::Approx(kPi));
  CHECK(sk1[0].phase == doctest::Approx(0.0));
  CHECK(sk1[0].gate_index == 0);
  CHECK(sk1[1].phase == doctest::Approx(psi));
  CHECK(sk1[2].phase == doctest::Approx(psi));
  CHECK(sk1[1].gate_index == 1);
  CHECK(sk1[2].gate_index == 1);
  CHECK(sk1[3].phase == doctest::Approx(-psi));
  CHECK(sk1[4].gate_index == 2);
  for (const auto& p : sk1) CHECK(p.area == doctest::Approx(kPi));

  const auto tycko = dynamics::tycko_sequence();
  REQUIRE(tycko.size() == 3);
  CHECK(tycko[0].phase == doctest::Approx(2.0 * kPi / 3.0));
  CHECK(tycko[1].phase == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(tycko[2].phase == doctest::Approx(2.0 * kPi / 3.0));
  for (int k = 0; k < 3; ++k) CHECK(tycko[k].gate_index == k);
}

TEST_CASE("composite sequences are perfect without amplitude error") {
  for (double slew : {0.0, 0.4}) {
    CAPTURE(slew);
    CHECK(dynamics::sequence_p_up(dynamics::sk1_sequence(), 50.0, 0.0, 0.0,
                                  kHalfPi, slew) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dynamics::sequence_p_up(dynamics::tycko_sequence(), 50.0, 0.0, 0.0,
                                  kHalfPi, slew) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("composite sequences beat the bare pulse under amplitude error") {
  const double eta = 0.01404, nbar = 300.0;
  const double bare = dynamics::p_up(nbar, eta, 0.0, kHalfPi);
  const double sk1 = dynamics::sequence_p_up(dynamics::sk1_sequence(), nbar,
                                             eta, 0.0, kHalfPi, 0.0);
  const double tycko = dynamics::sequence_p_up(dynamics::tycko_sequence(),
                                               nbar, eta, 0.0, kHalfPi, 0.0);
  CHECK(sk1 > bare);
  CHECK(tycko > bare);
}

TEST_CASE("a single-pulse sequence reproduces the direct thermal sum") {
  const double eta = 0.02, nbar = 20.0, area = 1.3;
  std::vector<dynamics::Pulse> single = {{kPi, 0.0, 0}};
  CHECK(dynamics::sequence_p_up(single, nbar, eta, 0.0, area, 0.7) ==
        doctest::Approx(dynamics::p_up(nbar, eta, 0.0, area)).epsilon(1e-12));
}

TEST_CASE("displacement distance from identity matches dense arithmetic") {
  const double kappa = 0.3;
  const int n_max = 20;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n < n_max; ++n)
    x(n, n + 1) = x(n + 1, n) = std::sqrt(n + 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  double dense = 0.0;
  for (int i = 0; i <= n_max; ++i) {
    const complex<double> dev =
        std::exp(complex<double>(0.0, kappa * es.eigenvalues()[i])) - 1.0;
    dense = std::max(dense, std::abs(dev));
  }
  CHECK(dynamics::debye_waller_norm({kappa}, {n_max}) ==
        doctest::Approx(dense).epsilon(1e-10));
  // Large accumulated phase saturates the distance at 2.
  CHECK(dynamics::debye_waller_norm({2.0}, {50}) == doctest::Approx(2.0));
  // Two modes: phases add over the product spectrum.
  const double two = dynamics::debye_waller_norm({0.05, 0.03}, {12, 9});
  const double expect =
      2.0 * std::sin(0.5 * (0.05 * expansion::ladder_norm(12) +
                            0.03 * expansion::ladder_norm(9)));
  CHECK(two == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("displaced diagonal elements follow the Laguerre closed form") {
  const double kappa = 0.25;
  const int n_max = 120;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n < n_max; ++n)
    x(n, n + 1) = x(n + 1, n) = std::sqrt(n + 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  const auto& v = es.eigenvectors();
  for (int n = 0; n <= 15; ++n) {
    complex<double> diag(0.0, 0.0);
    for (int i = 0; i <= n_max; ++i)
      diag += v(n, i) * v(n, i) *
              std::exp(complex<double>(0.0, kappa * es.eigenvalues()[i]));
    // <n| D |n> = exp(-kappa^2 / 2) L_n(kappa^2).
    double lm = 1.0, l = 1.0 - kappa * kappa;
    double ln = n == 0 ? lm : l;
    for (int k = 1; k < n; ++k) {
      const double next =
          ((2.0 * k + 1.0 - kappa * kappa) * l - k * lm) / (k + 1.0);
      lm = l;
      l = next;
      ln = l;
    }
    const double expect = std::exp(-0.5 * kappa * kappa) * ln;
    CAPTURE(n);
    CHECK(std::abs(diag - complex<double>(expect, 0.0)) < 1e-10);
  }
}

TEST_CASE("direct evolution matches the rotation-angle series per level") {
  expansion::FockSpace space;
  space.n_max = 200;
  for (double eta : {0.01, 0.05}) {
    for (double xi : {0.0, 0.2}) {
      CAPTURE(eta);
      CAPTURE(xi);
      const auto bright =
          dynamics::brute_force_evolve(eta, xi, kHalfPi, space);
      REQUIRE(bright.size() == 201);
      for (int n = 0; n <= 50; ++n) {
        CAPTURE(n);
        const double th = dynamics::theta_n(n, eta, xi, kHalfPi).theta;
        CHECK(std::abs(bright[n] - std::sin(th) * std::sin(th)) < 1e-6);
        CHECK(bright[n] >= 0.0);
        CHECK(bright[n] <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("direct evolution is independent of the drive phase") {
  expansion::FockSpace space;
  space.n_max = 60;
  const auto a = dynamics::brute_force_evolve(0.03, 0.1, 0.9, space, 24, 0.0);
  const auto b = dynamics::brute_force_evolve(0.03, 0.1, 0.9, space, 24, 1.1);
  for (int n = 0; n <= 40; ++n)
    CHECK(a[n] == doctest::Approx(b[n]).epsilon(1e-12));
}

TEST_CASE("vectorized angle rates match the scalar closed form") {
  for (double eta : {0.0, 3.249e-3, 1.404e-2, 0.1}) {
    CAPTURE(eta);
    const auto profile = dynamics::theta_profile_aligned(3000, eta);
    REQUIRE(profile.size() == 3001);
    for (int n : {0, 1, 2, 17, 300, 2999, 3000}) {
      const double ref = dynamics::theta_n_aligned(n, eta, 1.0);
      CHECK(profile[n] == doctest::Approx(ref).epsilon(1e-14));
    }
  }
  CHECK(dynamics::theta_profile_aligned(0, 0.02).size() == 1);
  CHECK_THROWS_AS(dynamics::theta_profile_aligned(-1, 0.02),
                  std::invalid_argument);
}
