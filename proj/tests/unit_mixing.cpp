// SPDX-License-Identifier: MIT
#include <cmath>

#include "doctest.h"
#include "dppmix/dpp_core.hpp"
#include "dppmix/errors.hpp"
#include "dppmix/kernels.hpp"
#include "dppmix/mixing.hpp"

using namespace dppmix;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_SUITE("mixing") {

TEST_CASE("sphere surface areas") {
  CHECK(sphere_surface(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sphere_surface(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(sphere_surface(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK_THROWS_AS(sphere_surface(0), ValidationError);
}

TEST_CASE("volume-pair decay bound follows the kernel envelope") {
  const auto spec = KernelSpec::homogeneous(CorrelationFamily::gaussian(2, 1.0), 0.25);
  // omega(r) = 0.25 e^{-r^2}: bound = p q (0.25 e^{-r^2})^2
  for (double r : {0.5, 1.0, 2.0}) {
    const double w = 0.25 * std::exp(-r * r);
    CHECK(alpha_upper_pq(spec, 3.0, 7.0, r) == doctest::Approx(21.0 * w * w).epsilon(1e-12));
  }
  // monotone decreasing in r, increasing in volumes
  CHECK(alpha_upper_pq(spec, 1.0, 1.0, 2.0) < alpha_upper_pq(spec, 1.0, 1.0, 1.0));
  CHECK(alpha_upper_pq(spec, 2.0, 1.0, 1.0) == doctest::Approx(2.0 * alpha_upper_pq(spec, 1.0, 1.0, 1.0)));
}

TEST_CASE("one-sided tail bound matches the closed-form gaussian integral") {
  // p s_d int_r^inf rho^2 e^{-2t^2} t dt = p 2 pi rho^2 e^{-2 r^2} / 4
  const auto spec = KernelSpec::homogeneous(CorrelationFamily::gaussian(2, 1.0), 0.25);
  CHECK(alpha_upper_p_inf(spec, 1.0, 1.5) ==
        doctest::Approx(0.0010906231847905148).epsilon(1e-6));
  const double closed = 2.0 * kPi * 0.0625 * std::exp(-2.0 * 4.0) / 4.0;
  CHECK(alpha_upper_p_inf(spec, 1.0, 2.0) == doctest::Approx(closed).epsilon(1e-6));
  CHECK(alpha_upper_p_inf(spec, 3.0, 2.0) ==
        doctest::Approx(3.0 * closed).epsilon(1e-6));
}

TEST_CASE("two-sided sandwich brackets the K^2 mass") {
  const auto spec = KernelSpec::homogeneous(CorrelationFamily::gaussian(2, 1.0), 0.25);
  Eigen::Vector2d alo(0, 0), ahi(1, 1), blo(3, 0), bhi(4, 1);
  const Window a(alo, ahi), b(blo, bhi);
  const AlphaSandwich s = alpha_sandwich(spec, a, b);
  CHECK(s.op_norm == doctest::Approx(0.25 * kPi).epsilon(1e-12));
  CHECK(s.op_norm_is_analytic);
  // prefactor (1 - |K|)^{(p+q) rho / |K|} frozen for p = q = 1, rho = 0.25
  CHECK(s.prefactor == doctest::Approx(0.37540895594939224).epsilon(1e-12));
  CHECK(s.lower == doctest::Approx(s.prefactor * s.upper).epsilon(1e-12));
  CHECK(s.lower > 0.0);
  CHECK(s.lower <= s.upper);
  // upper bound is the (negated) count covariance of the two boxes
  CHECK(s.upper == doctest::Approx(-count_covariance_integral(spec, a, b)).epsilon(1e-9));
  // oscillating spectra and supercritical kernels are rejected
  CHECK_THROWS_AS(alpha_sandwich(KernelSpec::bessel(2, 0.3), a, b), ValidationError);
  const auto super = KernelSpec::homogeneous_unchecked(CorrelationFamily::gaussian(2, 1.0), 0.5);
  CHECK_THROWS_AS(alpha_sandwich(super, a, b), ValidationError);
}

TEST_CASE("void-void dependence stays within the K^2 mass bound") {
  const auto spec = KernelSpec::homogeneous(CorrelationFamily::gaussian(2, 1.0), 0.3);
  Eigen::Vector2d alo(0, 0), ahi(1, 1), blo(2, 0), bhi(3, 1);
  const Window a(alo, ahi), b(blo, bhi);
  const VoidAlphaEstimate v = void_alpha(spec, a, b, 8);
  CHECK(v.p_a == doctest::Approx(v.p_b).epsilon(1e-9));  // congruent boxes
  CHECK(v.p_a > 0.0);
  CHECK(v.p_a < 1.0);
  CHECK(v.alpha == doctest::Approx(v.p_a * v.p_b - v.p_ab).epsilon(1e-12));
  CHECK(v.alpha >= -1e-10);  // negative association
  const double k2_mass = -count_covariance_integral(spec, a, b);
  CHECK(v.alpha <= k2_mass * (1.0 + 1e-6) + 1e-10);
  // dependence decays as the boxes separate
  Eigen::Vector2d clo(5, 0), chi(6, 1);
  const VoidAlphaEstimate far = void_alpha(spec, a, Window(clo, chi), 8);
  CHECK(far.alpha < v.alpha + 1e-12);
}

TEST_CASE("covariance inequality holds for capped counts") {
  const auto spec = KernelSpec::homogeneous(CorrelationFamily::gaussian(2, 1.0), 0.25);
  const Window sim = Window::box({7.0, 5.0});
  Eigen::Vector2d alo(1, 1), ahi(2.5, 2.5), blo(4.5, 1), bhi(6, 2.5);
  const Window a(alo, ahi), b(blo, bhi);
  const CovIneqReport rep =
      covariance_inequality_check(spec, sim, a, b, 1.0, 10, 1.0, 10, 400, 7);
  CHECK(rep.holds);
  CHECK(rep.count_cov < 0.0);
  CHECK(rep.bound == doctest::Approx(-rep.count_cov).epsilon(1e-12));
  CHECK(rep.cov_fg_se > 0.0);
  CHECK(std::abs(rep.cov_fg) < 20.0 * rep.cov_fg_se + rep.bound);
  // the bound scales exactly with the two seminorms
  const CovIneqReport scaled =
      covariance_inequality_check(spec, sim, a, b, 2.0, 10, 3.0, 10, 64, 7);
  CHECK(scaled.bound == doctest::Approx(6.0 * rep.bound).epsilon(1e-12));
  // boxes must sit inside the simulation window
  Eigen::Vector2d xlo(6, 4), xhi(8, 6);
  CHECK_THROWS_AS(covariance_inequality_check(spec, sim, a, Window(xlo, xhi), 1, 5, 1, 5, 32, 1),
                  ValidationError);
  CHECK_THROWS_AS(covariance_inequality_check(spec, sim, a, b, 1, 5, 1, 5, 8, 1),
                  ValidationError);
}

}  // TEST_SUITE
