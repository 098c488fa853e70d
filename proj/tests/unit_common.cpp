// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dppmix/errors.hpp"
#include "dppmix/geometry.hpp"
#include "dppmix/quadrature.hpp"
#include "dppmix/rng.hpp"
#include "dppmix/stats.hpp"

using namespace dppmix;

namespace {

constexpr double kPi = 3.14159265358979323846;

PointPattern random_pattern(const Window& w, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  PointPattern pat(w);
  std::vector<double> x(static_cast<std::size_t>(w.dim()));
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < w.dim(); ++k)
      x[static_cast<std::size_t>(k)] = w.lower[k] + rng.uniform01() * (w.upper[k] - w.lower[k]);
    pat.push_back(x.data());
  }
  return pat;
}

}  // namespace

TEST_SUITE("common") {

TEST_CASE("window basics") {
  Window w = Window::box({2.0, 5.0});
  CHECK(w.dim() == 2);
  CHECK(w.volume() == doctest::Approx(10.0));
  CHECK(w.min_side() == doctest::Approx(2.0));
  const double in[2] = {1.0, 4.999};
  const double edge[2] = {2.0, 5.0};
  const double out[2] = {2.1, 1.0};
  CHECK(w.contains(in));
  CHECK(w.contains(edge));
  CHECK(!w.contains(out));
  CHECK(w.contains_half_open(in));
  CHECK(!w.contains_half_open(edge));  // upper face excluded

  Eigen::Vector2d lo(1.0, 1.0), hi(1.0, 2.0);
  CHECK_THROWS_AS(Window(lo, hi), ValidationError);  // empty side
}

TEST_CASE("box distance") {
  Eigen::Vector2d a0(0, 0), a1(1, 1);
  const Window a(a0, a1);
  Eigen::Vector2d b0(2, 0), b1(3, 1);
  CHECK(box_distance(a, Window(b0, b1)) == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::Vector2d c0(2, 2), c1(3, 3);
  CHECK(box_distance(a, Window(c0, c1)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  Eigen::Vector2d d0(0.5, 0.5), d1(2, 2);
  CHECK(box_distance(a, Window(d0, d1)) == 0.0);
}

TEST_CASE("shifted overlap volume") {
  const Window w = Window::box({4.0, 3.0});
  Eigen::Vector2d t(1.0, -0.5);
  CHECK(shifted_overlap_volume(w, t) == doctest::Approx(3.0 * 2.5).epsilon(1e-14));
  Eigen::Vector2d big(5.0, 0.0);
  CHECK(shifted_overlap_volume(w, big) == 0.0);
}

TEST_CASE("boundary dilation volume matches closed forms") {
  // d = 1: [0, L] with r < L/2 has dilation volume 4r.
  Window w1 = Window::box({5.0});
  CHECK(boundary_dilation_volume(w1, 0.75) == doctest::Approx(3.0).epsilon(1e-13));
  // d = 2: (V + P r + pi r^2) - (L1-2r)(L2-2r).
  Window w2 = Window::box({6.0, 4.0});
  const double r2 = 0.5;
  const double outer2 = 24.0 + 20.0 * r2 + kPi * r2 * r2;
  const double inner2 = (6.0 - 2 * r2) * (4.0 - 2 * r2);
  CHECK(boundary_dilation_volume(w2, r2) == doctest::Approx(outer2 - inner2).epsilon(1e-13));
  // d = 3: V + S r + pi r^2 (L1+L2+L3) + 4/3 pi r^3 minus the eroded box
  // (edge term = quarter-cylinders along the 4 copies of each side length).
  Window w3 = Window::box({3.0, 4.0, 5.0});
  const double r3 = 0.4;
  const double vol = 60.0, surf = 2 * (12.0 + 15.0 + 20.0), sumL = 12.0;
  const double outer3 =
      vol + surf * r3 + kPi * r3 * r3 * sumL + 4.0 / 3.0 * kPi * r3 * r3 * r3;
  const double inner3 = (3.0 - 2 * r3) * (4.0 - 2 * r3) * (5.0 - 2 * r3);
  CHECK(boundary_dilation_volume(w3, r3) == doctest::Approx(outer3 - inner3).epsilon(1e-13));
  // large r: erosion empty, dilation equals the full outer volume
  const double rbig = 3.0;
  const double outer_big =
      vol + surf * rbig + kPi * rbig * rbig * sumL + 4.0 / 3.0 * kPi * rbig * rbig * rbig;
  CHECK(boundary_dilation_volume(w3, rbig) == doctest::Approx(outer_big).epsilon(1e-13));
}

TEST_CASE("cell grid neighbor search equals brute force") {
  const Window w = Window::box({7.0, 5.0});
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const PointPattern pat = random_pattern(w, 180, seed);
    for (double r : {0.4, 0.9}) {
      const CellGrid grid(pat, r);
      std::vector<int> nb;
      for (std::size_t i = 0; i < pat.size(); ++i) {
        grid.neighbors_within(i, r, nb);
        std::sort(nb.begin(), nb.end());
        std::vector<int> ref;
        for (std::size_t j = 0; j < pat.size(); ++j)
          if (j != i && pat.distance(i, j) <= r) ref.push_back(static_cast<int>(j));
        REQUIRE(nb == ref);
      }
      std::size_t pairs = 0;
      grid.for_each_close_pair(r, [&](int i, int j) {
        CHECK(i < j);
        ++pairs;
      });
      std::size_t ref_pairs = 0;
      for (std::size_t i = 0; i < pat.size(); ++i)
        for (std::size_t j = i + 1; j < pat.size(); ++j)
          if (pat.distance(i, j) <= r) ++ref_pairs;
      CHECK(pairs == ref_pairs);
    }
  }
}

TEST_CASE("rng determinism and stream separation") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 64; ++i) {
    const double ua = a.uniform01();
    all_equal = all_equal && (ua == b.uniform01());
    any_equal_c = any_equal_c || (ua == c.uniform01());
  }
  CHECK(all_equal);
  CHECK(!any_equal_c);
}

TEST_CASE("rng moments") {
  RngStream rng(2024, 0);
  const int m = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0, sn3 = 0, sn4 = 0;
  for (int i = 0; i < m; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sn3 += z * z * z;
    sn4 += z * z * z * z;
  }
  CHECK(su / m == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / m == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(sn / m == doctest::Approx(0.0).epsilon(1).scale(0.01));
  CHECK(sn2 / m == doctest::Approx(1.0).epsilon(0.02));
  CHECK(sn3 / m == doctest::Approx(0.0).epsilon(1).scale(0.05));
  CHECK(sn4 / m == doctest::Approx(3.0).epsilon(0.05));

  double sp = 0, sp2 = 0;
  const double lambda = 7.3;
  for (int i = 0; i < 50000; ++i) {
    const double k = static_cast<double>(rng.poisson(lambda));
    sp += k;
    sp2 += k * k;
  }
  const double pm = sp / 50000, pv = sp2 / 50000 - pm * pm;
  CHECK(pm == doctest::Approx(lambda).epsilon(0.01));
  CHECK(pv == doctest::Approx(lambda).epsilon(0.05));
}

TEST_CASE("summarize frozen sample") {
  const MomentSummary s = summarize({1.0, 2.0, 2.0, 3.0, 7.0});
  CHECK(s.n == 5);
  CHECK(s.mean == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s.variance == doctest::Approx(5.5).epsilon(1e-15));
  CHECK(s.sd == doctest::Approx(2.3452078799117148).epsilon(1e-15));
  CHECK(s.skewness == doctest::Approx(1.1701586322559542).epsilon(1e-14));
  CHECK(s.excess_kurtosis == doctest::Approx(-0.16942148760330579).epsilon(1e-13));
  CHECK(s.se_mean == doctest::Approx(1.0488088481701515).epsilon(1e-14));
  CHECK(s.se_variance == doctest::Approx(3.003997336882974).epsilon(1e-14));
  CHECK_THROWS_AS(summarize({1.0}), ValidationError);
}

TEST_CASE("normal cdf frozen values") {
  CHECK(normal_cdf(-1.96) == doctest::Approx(0.024997895148220434).epsilon(1e-13));
  CHECK(normal_cdf(-0.5) == doctest::Approx(0.3085375387259869).epsilon(1e-13));
  CHECK(normal_cdf(0.33) == doctest::Approx(0.62930001894065352).epsilon(1e-13));
  CHECK(normal_cdf(2.05) == doctest::Approx(0.9798177845942956).epsilon(1e-13));
}

TEST_CASE("ks distance frozen value") {
  const double d = ks_distance_normal({-1.2, -0.3, 0.1, 0.4, 1.7}, 0.0, 1.0);
  CHECK(d == doctest::Approx(0.18208857781104736).epsilon(1e-13));
}

TEST_CASE("median") {
  CHECK(median({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(median({}), ValidationError);
}

TEST_CASE("slope fits") {
  // exact linear data: slope recovered regardless of weights
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  std::vector<double> y(4);
  for (std::size_t i = 0; i < 4; ++i) y[i] = 2.0 + 3.0 * x[i];
  const SlopeFit wf = wls_slope(x, y, {0.1, 0.2, 0.1, 0.3});
  CHECK(wf.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(wf.intercept == doctest::Approx(2.0).epsilon(1e-12));
  const SlopeFit of = ols_slope(x, y);
  CHECK(of.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(of.se) < 1e-10);  // perfect fit: zero residual SE
  // known-variance SE: equal weights w=1 give se = 1/sqrt(sum (x-xbar)^2) = 1/sqrt(5)
  const SlopeFit kf = wls_slope(x, {1.0, 0.0, 1.0, 0.0}, {1.0, 1.0, 1.0, 1.0});
  CHECK(kf.se == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("box quadrature") {
  const Window w = Window::box({1.0, 1.0});
  const auto f = [](const double* x) {
    return std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1]));
  };
  const QuadResult q = integrate_box(f, w, 1e-7, 8, 10);
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx(0.35777625270483821).epsilon(1e-7));
}

TEST_CASE("simpson and tail quadrature") {
  const double s = simpson([](double t) { return std::sin(t); }, 0.0, kPi, 128);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-8));  // composite rule error ~ 6e-9 at n = 128
  const QuadResult t =
      integrate_tail([](double r) { return r * std::exp(-2.0 * r * r); }, 1.5, 1e-9);
  CHECK(t.value == doctest::Approx(std::exp(-4.5) / 4.0).epsilon(1e-8));
}

TEST_CASE("cumulative integral") {
  const std::vector<double> knots = {0.5, 1.0, 2.0};
  const std::vector<double> vals =
      cumulative_integral([](double t) { return 3.0 * t * t; }, 0.0, knots, 8);
  REQUIRE(vals.size() == 3);
  CHECK(vals[0] == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(vals[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vals[2] == doctest::Approx(8.0).epsilon(1e-12));
}

}  // TEST_SUITE
