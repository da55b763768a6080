#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hdepth/geometry.hpp"
#include "hdepth/population_depth.hpp"

namespace hdepth {

/// n points in R^d, stored as the rows of an n x d matrix.
class Sample {
 public:
  explicit Sample(Eigen::MatrixXd rows);
  static Sample from_points(const std::vector<Point>& points);
  static Sample from_values(std::span<const double> values);  // d = 1

  std::size_t size() const { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(rows_.cols()); }
  Point point(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)).transpose(); }
  const Eigen::MatrixXd& rows() const { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

/// count / n, the fraction of sample points in the shallowest closed halfspace.
struct DepthValue {
  std::size_t count = 0;
  std::size_t n = 1;

  double value() const { return static_cast<double>(count) / static_cast<double>(n); }
  friend bool operator==(const DepthValue&, const DepthValue&) = default;
};

/// Two-sided enclosure of a sample depth from a finite cover.
struct DepthInterval {
  double lower = 0.0;
  double upper = 1.0;
  double psi = 0.0;
  double radius = 0.0;  // max_i |X_i - q|
};

/// Tolerance (relative to |X_i - q|) under which a point counts as lying on a
/// hyperplane through q.
inline constexpr double kSideTolerance = 1e-12;

DepthValue depth_1d(double q, const Sample& sample);

/// Exact depth in any dimension by enumerating the cells of the central
/// hyperplane arrangement {<X_i - q, v> = 0}. Cost grows like n^{d-1};
/// meant as an oracle for small inputs.
DepthValue depth_brute(const Point& q, const Sample& sample);

/// Exact planar depth via an angular sweep, O(n log n).
DepthValue depth_exact_2d(const Point& q, const Sample& sample);

/// min over cover centers of F_{n,theta}(d_theta(q)); an upper bound on the depth.
DepthValue depth_approx(const Point& q, const Sample& sample, const SphericalCover& cover);

/// Encloses the exact depth using the cover radius and R = max_i |X_i - q|.
DepthInterval depth_certified(const Point& q, const Sample& sample, const SphericalCover& cover);

/// sup_t |F(t) - F_n(t)| for sorted values, attained at the order statistics.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Max over cover centers of the one-dimensional KS statistic between the
/// projected sample and F_theta. Lower-bounds the sup over all directions.
double sup_deviation(const Sample& sample, const DistributionSpec& dist, const SphericalCover& cover);

}  // namespace hdepth
