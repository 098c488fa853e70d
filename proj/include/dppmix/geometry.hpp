// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dppmix {

/// Axis-aligned box [lower_1, upper_1] x ... x [lower_d, upper_d].
struct Window {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Window() = default;
  Window(Eigen::VectorXd lo, Eigen::VectorXd hi);

  /// Box [0, L1] x ... x [0, Ld].
  static Window box(const std::vector<double>& lengths);

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] double side(int k) const { return upper[k] - lower[k]; }
  [[nodiscard]] double min_side() const;
  [[nodiscard]] double volume() const;

  /// Closed membership, used for points of a pattern.
  [[nodiscard]] bool contains(const double* x) const;
  /// Half-open membership [lower, upper), used for barycentres so that a
  /// partition into cells assigns each barycentre to exactly one cell.
  [[nodiscard]] bool contains_half_open(const double* x) const;
};

/// Euclidean distance between two boxes (0 if they intersect).
double box_distance(const Window& a, const Window& b);

/// Volume of the overlap of W with its translate W + t:  prod_k (L_k - |t_k|)+.
double shifted_overlap_volume(const Window& w, const Eigen::VectorXd& t);

/// Volume of the closed r-neighbourhood of the boundary of the box,
/// |{x : dist(x, boundary W) <= r}| = |W (+) r| - |W (-) r|, with the outer
/// dilation by a Euclidean ball expanded through the Steiner formula
/// (faces + edge cylinders + corner balls) and the inner erosion in closed
/// form. Exact for any dimension.
double boundary_dilation_volume(const Window& w, double r);

/// Finite point set in a window; coordinates are stored row-major (n x d).
struct PointPattern {
  int dim = 0;
  std::vector<double> coords;
  Window window;

  PointPattern() = default;
  explicit PointPattern(const Window& w) : dim(w.dim()), window(w) {}

  [[nodiscard]] std::size_t size() const {
    return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim);
  }
  [[nodiscard]] const double* point(std::size_t i) const {
    return coords.data() + i * static_cast<std::size_t>(dim);
  }
  void push_back(const double* x) { coords.insert(coords.end(), x, x + dim); }

  [[nodiscard]] double distance(std::size_t i, std::size_t j) const;
};

/// Bucketing of a pattern into cubic cells of a given side; supports the
/// close-pair and local-subset enumeration without the quadratic scan.
class CellGrid {
 public:
  CellGrid(const PointPattern& pat, double cell_side);

  /// Indices of points within Euclidean distance r of point i (candidates are
  /// drawn from the 3^d neighbouring cells; requires r <= cell side).
  void neighbors_within(std::size_t i, double r, std::vector<int>& out) const;

  /// Calls body(i, j) once per unordered pair with |x_i - x_j| <= r, i < j.
  template <typename Body>
  void for_each_close_pair(double r, Body&& body) const {
    std::vector<int> cand;
    for (std::size_t i = 0; i < pat_.size(); ++i) {
      gather(i, cand);
      const double r2 = r * r;
      for (int j : cand) {
        if (static_cast<std::size_t>(j) <= i) continue;
        if (dist2(i, static_cast<std::size_t>(j)) <= r2) body(static_cast<int>(i), j);
      }
    }
  }

  [[nodiscard]] double dist2(std::size_t i, std::size_t j) const;

  /// All points (any index) in cells adjacent to the cell of point i.
  void gather(std::size_t i, std::vector<int>& out) const;

 private:
  [[nodiscard]] long cell_key(const double* x) const;

  const PointPattern& pat_;
  double side_;
  Eigen::VectorXi counts_;
  std::vector<long> strides_;
  std::vector<int> cell_of_point_;
  std::vector<std::vector<int>> buckets_;
  std::vector<long> bucket_keys_;
};

}  // namespace dppmix
