// SPDX-License-Identifier: MIT
#include "dppmix/quadrature.hpp"

#include <cmath>
#include <vector>

#include "dppmix/errors.hpp"

namespace dppmix {

namespace {

// Plain midpoint sum with n points per axis.
double midpoint_pass(const std::function<double(const double*)>& f, const Window& box, int n,
                     long& evals) {
  const int d = box.dim();
  std::vector<double> h(static_cast<std::size_t>(d));
  double cell = 1.0;
  for (int k = 0; k < d; ++k) {
    h[static_cast<std::size_t>(k)] = box.side(k) / n;
    cell *= h[static_cast<std::size_t>(k)];
  }
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  double sum = 0.0;
  while (true) {
    for (int k = 0; k < d; ++k)
      x[static_cast<std::size_t>(k)] =
          box.lower[k] + (idx[static_cast<std::size_t>(k)] + 0.5) * h[static_cast<std::size_t>(k)];
    sum += f(x.data());
    ++evals;
    int k = 0;
    for (; k < d; ++k) {
      if (++idx[static_cast<std::size_t>(k)] < n) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
    if (k == d) break;
  }
  return sum * cell;
}

}  // namespace

QuadResult integrate_box(const std::function<double(const double*)>& f, const Window& box,
                         double rel_tol, int n0, int max_level, double abs_floor) {
  QuadResult r;
  int n = n0;
  double prev = midpoint_pass(f, box, n, r.evals);
  for (int level = 0; level < max_level; ++level) {
    n *= 2;
    const double cur = midpoint_pass(f, box, n, r.evals);
    const double extrap = (4.0 * cur - prev) / 3.0;
    const double err = std::abs(extrap - cur);
    r.value = extrap;
    r.est_error = err;
    if (err <= rel_tol * std::abs(extrap) + abs_floor) {
      r.converged = true;
      return r;
    }
    prev = cur;
  }
  throw NumericError("integrate_box: no convergence after max refinements (est_error=" +
                     std::to_string(r.est_error) + ")");
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

namespace {

double simpson_adaptive(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, long& evals) {
  int n = 16;
  double prev = simpson(f, a, b, n);
  evals += n + 1;
  for (int level = 0; level < 20; ++level) {
    n *= 2;
    const double cur = simpson(f, a, b, n);
    evals += n + 1;
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + 1e-300) return cur;
    prev = cur;
  }
  throw NumericError("simpson_adaptive: no convergence on a panel");
}

}  // namespace

QuadResult integrate_tail(const std::function<double(double)>& f, double r0, double rel_tol) {
  if (!(r0 >= 0.0)) throw ValidationError("integrate_tail: r0 must be >= 0");
  QuadResult r;
  double a = r0;
  double width = std::max(1.0, r0);
  double total = 0.0;
  for (int win = 0; win < 90; ++win) {
    const double b = a + width;
    const double piece = simpson_adaptive(f, a, b, rel_tol, r.evals);
    total += piece;
    if (win > 2 && std::abs(piece) <= rel_tol * std::abs(total) + 1e-300) {
      r.value = total;
      r.est_error = std::abs(piece);
      r.converged = true;
      return r;
    }
    a = b;
    width *= 2.0;
  }
  throw NumericError("integrate_tail: tail did not decay; integral may diverge");
}

std::vector<double> cumulative_integral(const std::function<double(double)>& f, double a,
                                        const std::vector<double>& knots, int sub) {
  std::vector<double> out(knots.size());
  double acc = 0.0;
  double left = a;
  for (std::size_t j = 0; j < knots.size(); ++j) {
    if (knots[j] < left) throw ValidationError("cumulative_integral: knots must be increasing");
    if (knots[j] > left) acc += simpson(f, left, knots[j], sub);
    out[j] = acc;
    left = knots[j];
  }
  return out;
}

}  // namespace dppmix
