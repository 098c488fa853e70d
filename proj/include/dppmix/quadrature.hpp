// SPDX-License-Identifier: MIT
#pragma once

#include <functional>

#include "dppmix/geometry.hpp"

namespace dppmix {

struct QuadResult {
  double value = 0.0;
  double est_error = 0.0;
  bool converged = false;
  long evals = 0;
};

/// Midpoint rule on a tensor grid over a box, refined by doubling the grid
/// and Richardson-extrapolating (midpoint error is O(h^2)). Stops when the
/// extrapolated correction falls below rel_tol * |value| (or abs_floor for
/// integrals near zero). Throws NumericError if max_level refinements do not
/// converge.
QuadResult integrate_box(const std::function<double(const double*)>& f, const Window& box,
                         double rel_tol = 1e-4, int n0 = 8, int max_level = 7,
                         double abs_floor = 1e-14);

/// Tail integral  int_r0^inf f(t) dt  for integrable decaying f: composite
/// Simpson over doubling windows [r0, 2 r0], [2 r0, 4 r0], ..., each refined
/// to rel_tol, stopping when a window adds less than rel_tol * total.
QuadResult integrate_tail(const std::function<double(double)>& f, double r0,
                          double rel_tol = 1e-7);

/// Composite Simpson on [a, b] with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n);

/// Cumulative Simpson antiderivative: values F(t_j) = int_a^{t_j} f, where
/// t_j are the given increasing knots; each knot gap is refined with `sub`
/// Simpson panels.
std::vector<double> cumulative_integral(const std::function<double(double)>& f, double a,
                                        const std::vector<double>& knots, int sub = 8);

}  // namespace dppmix
