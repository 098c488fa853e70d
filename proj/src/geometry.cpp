// SPDX-License-Identifier: MIT
#include "dppmix/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "dppmix/errors.hpp"

namespace dppmix {

Window::Window(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw ValidationError("window: lower/upper must have equal positive dimension");
  for (int k = 0; k < lower.size(); ++k)
    if (!(upper[k] > lower[k])) throw ValidationError("window: upper must exceed lower in every axis");
}

Window Window::box(const std::vector<double>& lengths) {
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(static_cast<int>(lengths.size()));
  Eigen::VectorXd hi(lo.size());
  for (int k = 0; k < hi.size(); ++k) hi[k] = lengths[static_cast<std::size_t>(k)];
  return {lo, hi};
}

double Window::min_side() const {
  double m = side(0);
  for (int k = 1; k < dim(); ++k) m = std::min(m, side(k));
  return m;
}

double Window::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim(); ++k) v *= side(k);
  return v;
}

bool Window::contains(const double* x) const {
  for (int k = 0; k < dim(); ++k)
    if (x[k] < lower[k] || x[k] > upper[k]) return false;
  return true;
}

bool Window::contains_half_open(const double* x) const {
  for (int k = 0; k < dim(); ++k)
    if (x[k] < lower[k] || x[k] >= upper[k]) return false;
  return true;
}

double box_distance(const Window& a, const Window& b) {
  if (a.dim() != b.dim()) throw ValidationError("box_distance: dimension mismatch");
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) {
    const double gap = std::max({0.0, a.lower[k] - b.upper[k], b.lower[k] - a.upper[k]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

double shifted_overlap_volume(const Window& w, const Eigen::VectorXd& t) {
  if (t.size() != w.dim()) throw ValidationError("shifted_overlap_volume: dimension mismatch");
  double v = 1.0;
  for (int k = 0; k < w.dim(); ++k) {
    const double s = w.side(k) - std::abs(t[k]);
    if (s <= 0.0) return 0.0;
    v *= s;
  }
  return v;
}

namespace {

// Volume of the unit ball in dimension j.
double unit_ball_volume(int j) {
  return std::pow(3.14159265358979323846, 0.5 * j) / std::tgamma(0.5 * j + 1.0);
}

// e_m(L_1..L_d): elementary symmetric polynomial of the side lengths.
std::vector<double> elementary_symmetric(const Window& w) {
  const int d = w.dim();
  std::vector<double> e(static_cast<std::size_t>(d) + 1, 0.0);
  e[0] = 1.0;
  for (int k = 0; k < d; ++k) {
    const double L = w.side(k);
    for (int m = std::min(k + 1, d); m >= 1; --m) e[static_cast<std::size_t>(m)] += L * e[static_cast<std::size_t>(m) - 1];
  }
  return e;
}

}  // namespace

double boundary_dilation_volume(const Window& w, double r) {
  if (!(r >= 0.0)) throw ValidationError("boundary_dilation_volume: r must be >= 0");
  if (r == 0.0) return 0.0;
  const int d = w.dim();
  // Steiner: |W (+) r| = sum_j e_{d-j}(L) * kappa_j * r^j.
  const auto e = elementary_symmetric(w);
  double outer = 0.0;
  for (int j = 0; j <= d; ++j)
    outer += e[static_cast<std::size_t>(d - j)] * unit_ball_volume(j) * std::pow(r, j);
  double inner = 1.0;
  for (int k = 0; k < d; ++k) inner *= std::max(0.0, w.side(k) - 2.0 * r);
  return outer - inner;
}

double PointPattern::distance(std::size_t i, std::size_t j) const {
  const double* a = point(i);
  const double* b = point(j);
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

CellGrid::CellGrid(const PointPattern& pat, double cell_side) : pat_(pat), side_(cell_side) {
  if (!(cell_side > 0.0)) throw ValidationError("cell grid: cell side must be > 0");
  const int d = pat.dim;
  counts_.resize(d);
  strides_.assign(static_cast<std::size_t>(d), 1);
  long total = 1;
  for (int k = 0; k < d; ++k) {
    counts_[k] = std::max(1, static_cast<int>(std::ceil(pat.window.side(k) / cell_side)));
    strides_[static_cast<std::size_t>(k)] = total;
    total *= counts_[k];
    if (total > 50'000'000L) throw ResourceError("cell grid: too many cells");
  }
  buckets_.assign(static_cast<std::size_t>(total), {});
  cell_of_point_.resize(pat.size());
  for (std::size_t i = 0; i < pat.size(); ++i) {
    const long key = cell_key(pat.point(i));
    cell_of_point_[i] = static_cast<int>(key);
    buckets_[static_cast<std::size_t>(key)].push_back(static_cast<int>(i));
  }
}

long CellGrid::cell_key(const double* x) const {
  long key = 0;
  for (int k = 0; k < pat_.dim; ++k) {
    int c = static_cast<int>(std::floor((x[k] - pat_.window.lower[k]) / side_));
    c = std::clamp(c, 0, counts_[k] - 1);
    key += c * strides_[static_cast<std::size_t>(k)];
  }
  return key;
}

double CellGrid::dist2(std::size_t i, std::size_t j) const {
  const double* a = pat_.point(i);
  const double* b = pat_.point(j);
  double s = 0.0;
  for (int k = 0; k < pat_.dim; ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

void CellGrid::gather(std::size_t i, std::vector<int>& out) const {
  out.clear();
  const int d = pat_.dim;
  long cell = cell_of_point_[i];
  std::vector<int> cc(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    cc[static_cast<std::size_t>(k)] = static_cast<int>(cell / strides_[static_cast<std::size_t>(k)]);
    cell %= strides_[static_cast<std::size_t>(k)];
  }
  // Walk the 3^d block of neighbouring cells.
  std::vector<int> off(static_cast<std::size_t>(d), -1);
  while (true) {
    long key = 0;
    bool ok = true;
    for (int k = 0; k < d; ++k) {
      const int c = cc[static_cast<std::size_t>(k)] + off[static_cast<std::size_t>(k)];
      if (c < 0 || c >= counts_[k]) {
        ok = false;
        break;
      }
      key += c * strides_[static_cast<std::size_t>(k)];
    }
    if (ok) {
      const auto& b = buckets_[static_cast<std::size_t>(key)];
      out.insert(out.end(), b.begin(), b.end());
    }
    int k = 0;
    for (; k < d; ++k) {
      if (++off[static_cast<std::size_t>(k)] <= 1) break;
      off[static_cast<std::size_t>(k)] = -1;
    }
    if (k == d) break;
  }
}

void CellGrid::neighbors_within(std::size_t i, double r, std::vector<int>& out) const {
  std::vector<int> cand;
  gather(i, cand);
  out.clear();
  const double r2 = r * r;
  for (int j : cand) {
    if (static_cast<std::size_t>(j) == i) continue;
    if (dist2(i, static_cast<std::size_t>(j)) <= r2) out.push_back(j);
  }
}

}  // namespace dppmix
