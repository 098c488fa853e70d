// SPDX-License-Identifier: MIT
#include <cmath>

#include "doctest.h"
#include "dppmix/errors.hpp"
#include "dppmix/kernels.hpp"

using namespace dppmix;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE("kernels") {

TEST_CASE("gaussian correlation and spectral density") {
  const auto g = CorrelationFamily::gaussian(2, 0.8);
  CHECK(g.correlation(0.0) == doctest::Approx(1.0));
  CHECK(g.correlation(1.1) == doctest::Approx(std::exp(-(1.1 * 1.1) / 0.64)).epsilon(1e-14));
  // c_hat(xi) = (alpha sqrt(pi))^d exp(-pi^2 alpha^2 xi^2)
  CHECK(g.spectral(0.0) == doctest::Approx(0.64 * kPi).epsilon(1e-14));
  CHECK(g.spectral(0.7) ==
        doctest::Approx(0.64 * kPi * std::exp(-kPi * kPi * 0.64 * 0.49)).epsilon(1e-14));
  CHECK(g.spectral_sup() == doctest::Approx(0.64 * kPi).epsilon(1e-14));
  CHECK(g.square_integrable());
  CHECK_THROWS_AS(CorrelationFamily::gaussian(2, 0.0), ValidationError);
  CHECK_THROWS_AS(CorrelationFamily::gaussian(0, 1.0), ValidationError);
}

TEST_CASE("gaussian existence condition is sharp at rho = 1/(pi alpha^2)") {
  const double rho_crit = 1.0 / kPi;
  const auto spec = KernelSpec::homogeneous(CorrelationFamily::gaussian(2, 1.0), rho_crit);
  CHECK(std::abs(spec.existence_margin()) < 1e-12);
  CHECK_THROWS_AS(
      KernelSpec::homogeneous(CorrelationFamily::gaussian(2, 1.0), rho_crit * 1.001),
      ValidationError);
  // unchecked factory accepts it (formula-only usage)
  const auto loose =
      KernelSpec::homogeneous_unchecked(CorrelationFamily::gaussian(2, 1.0), rho_crit * 2);
  CHECK(loose.existence_margin() < 0.0);
}

TEST_CASE("cauchy spectral density matches the Hankel transform") {
  const auto c = CorrelationFamily::cauchy(2, 1.2, 1.6);
  CHECK(c.correlation(0.9) == doctest::Approx(std::pow(1.0 + 0.81 / 1.44, -1.6)).epsilon(1e-14));
  // frozen reference values (30-digit quadrature of 2 pi r J0(2 pi xi r) C(r))
  CHECK(c.spectral(0.0) == doctest::Approx(7.5398223686155038).epsilon(1e-12));
  CHECK(c.spectral(0.3) == doctest::Approx(0.9657126497681682).epsilon(1e-12));
  CHECK(c.spectral(0.8) == doctest::Approx(0.024266100867950534).epsilon(1e-12));
  CHECK(c.spectral_sup() == doctest::Approx(7.5398223686155038).epsilon(1e-12));
  CHECK(c.square_integrable());

  const auto c3 = CorrelationFamily::cauchy(3, 0.9, 2.1);
  CHECK(c3.spectral(0.4) == doctest::Approx(0.73987193031264).epsilon(1e-12));

  // nu <= d/2: the spectral density diverges at 0, no valid process
  const auto shallow = CorrelationFamily::cauchy(2, 1.0, 0.9);
  CHECK_THROWS_AS(static_cast<void>(shallow.spectral(0.1)), ValidationError);
  CHECK_THROWS_AS(CorrelationFamily::cauchy(2, 1.0, 0.4), ValidationError);  // nu <= d/4
}

TEST_CASE("bessel-type correlation matches frozen references") {
  const auto b = CorrelationFamily::bessel_most_repulsive(2, 0.3);
  CHECK(b.correlation(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.correlation(0.001) == doctest::Approx(0.99999952876117598).epsilon(1e-13));
  CHECK(b.correlation(0.5) == doctest::Approx(0.88672687566229101).epsilon(1e-12));
  CHECK(b.correlation(1.0) == doctest::Approx(0.59723500428489728).epsilon(1e-12));
  CHECK(b.correlation(2.5) == doctest::Approx(-0.12676472892033399).epsilon(1e-12));
  // spectral side: indicator of the ball of radius sqrt(rho/pi), height 1/rho
  const double rb = std::sqrt(0.3 / kPi);
  CHECK(b.spectral(0.9 * rb) == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
  CHECK(b.spectral(1.1 * rb) == 0.0);
  CHECK(b.spectral_sup() == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
  CHECK(b.square_integrable());
}

TEST_CASE("bessel envelope dominates the oscillating correlation") {
  const auto b = CorrelationFamily::bessel_most_repulsive(2, 0.3);
  double prev = b.envelope(0.0);
  CHECK(prev == doctest::Approx(1.0));
  for (int i = 1; i <= 1200; ++i) {
    const double r = 0.05 * i;
    const double env = b.envelope(r);
    CHECK(env <= prev + 1e-15);  // monotone decreasing
    CHECK(std::abs(b.correlation(r)) <= env * (1.0 + 1e-12));
    prev = env;
  }
}

TEST_CASE("omega is the intensity-scaled envelope") {
  const auto spec = KernelSpec::homogeneous(CorrelationFamily::gaussian(2, 1.0), 0.25);
  CHECK(spec.omega(1.5) == doctest::Approx(0.25 * std::exp(-2.25)).epsilon(1e-14));
  CHECK(spec.omega_log(1.5) == doctest::Approx(std::log(0.25) - 2.25).epsilon(1e-12));
  // far tail accessible only in log form
  CHECK(spec.omega(40.0) == 0.0);
  CHECK(spec.omega_log(40.0) == doctest::Approx(std::log(0.25) - 1600.0).epsilon(1e-12));
}

TEST_CASE("log-linear intensity") {
  const Window w = Window::box({10.0, 10.0});
  Eigen::VectorXd beta(2);
  beta << std::log(0.15), 0.5;
  const auto z = [](const double* x) {
    Eigen::VectorXd v(2);
    v << 1.0, x[0] / 10.0;
    return v;
  };
  const auto spec =
      KernelSpec::log_linear(CorrelationFamily::gaussian(2, 1.0), beta, z, {"1", "x1s"}, 0.25, w);
  const double p0[2] = {0.0, 5.0};
  const double p1[2] = {10.0, 5.0};
  CHECK(spec.rho_at(p0) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(spec.rho_at(p1) == doctest::Approx(0.15 * std::exp(0.5)).epsilon(1e-14));
  CHECK(spec.kernel(p0, p1) ==
        doctest::Approx(std::sqrt(0.15 * 0.15 * std::exp(0.5)) * std::exp(-100.0)).epsilon(1e-10));
  // intensity exceeding rho_max anywhere on the window is rejected
  Eigen::VectorXd beta_hot(2);
  beta_hot << std::log(0.15), 2.0;  // rho(10) = 0.15 e^2 > 0.25
  CHECK_THROWS_AS(KernelSpec::log_linear(CorrelationFamily::gaussian(2, 1.0), beta_hot, z,
                                         {"1", "x1s"}, 0.25, w),
                  ValidationError);
}

TEST_CASE("family name round trip") {
  CHECK(family_name(Family::Gaussian) == "gaussian");
  CHECK(family_name(Family::Cauchy) == "cauchy");
  CHECK(family_name(Family::BesselMostRepulsive) == "bessel");
  const auto made = CorrelationFamily::make(Family::Cauchy, 2, {1.2, 1.6});
  CHECK(made.correlation(0.9) ==
        doctest::Approx(CorrelationFamily::cauchy(2, 1.2, 1.6).correlation(0.9)));
  CHECK_THROWS_AS(CorrelationFamily::make(Family::Gaussian, 2, {1.0, 2.0}), ValidationError);
}

}  // TEST_SUITE
