#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace hdepth {

using Point = Eigen::VectorXd;

/// A unit vector on S^{d-1}. Construction rejects vectors whose norm differs
/// from 1 by more than 1e-12 (relative); use `normalized` for arbitrary input.
class Direction {
 public:
  explicit Direction(Point coordinates);

  static Direction normalized(const Point& v);
  static Direction from_angle(double angle);

  /// Uniform on S^{d-1} via normalized i.i.d. standard Gaussian coordinates.
  static Direction random(std::size_t d, std::mt19937_64& rng);

  const Point& coordinates() const { return u_; }
  std::size_t dimension() const { return static_cast<std::size_t>(u_.size()); }
  double operator[](std::size_t i) const { return u_[static_cast<Eigen::Index>(i)]; }

  Direction operator-() const { return Direction(Point(-u_), Unchecked{}); }

 private:
  struct Unchecked {};
  Direction(Point u, Unchecked) : u_(std::move(u)) {}

  Point u_;
};

/// Signed length of `p` in the direction of `theta`. Throws on dimension mismatch.
double project(const Point& p, const Direction& theta);

/// Central angle between two directions, in [0, pi].
double spherical_distance(const Direction& a, const Direction& b);

/// Finite set of directions, every direction of S^{d-1} within geodesic
/// radius `psi` of some center.
class SphericalCover {
 public:
  SphericalCover(std::size_t d, double psi, std::vector<Direction> centers);

  std::size_t dimension() const { return d_; }
  double radius() const { return psi_; }
  const std::vector<Direction>& centers() const { return centers_; }
  std::size_t size() const { return centers_.size(); }

  /// Centers stacked as rows (size() x d), for batched projections.
  const Eigen::MatrixXd& center_matrix() const { return matrix_; }

 private:
  std::size_t d_;
  double psi_;
  std::vector<Direction> centers_;
  Eigen::MatrixXd matrix_;
};

/// Largest admissible cover radius, arccos(d^{-1/2}).
double max_cover_radius(std::size_t d);

/// Number of centers the d = 2 construction uses: ceil(pi/psi) + 1.
std::size_t circle_cover_count(double psi);

/// Constructs a cover of S^{d-1} with radius psi.
///
/// d = 2 places ceil(pi/psi)+1 equally spaced centers. d = 3 starts from a
/// Fibonacci lattice sized by the simplified covering-count bound (C2 = 1);
/// d >= 4 starts from that many uniform random centers. In both cases the
/// center count grows by 1.3x until a statistical verification with 1e5
/// probes finds no gap above 0.97*psi. Random centers need `seed`; the
/// verification probes of d = 3 use a fixed internal stream.
SphericalCover build_cover(std::size_t d, double psi, std::optional<std::uint64_t> seed = std::nullopt);

/// The exact cover {+1, -1} of S^0 (radius 0).
SphericalCover line_cover();

struct CoverVerification {
  double max_gap = 0.0;
  bool pass = false;
  std::size_t trials = 0;
};

/// Probes `trials` uniform directions and reports the largest distance to the
/// nearest center; passes iff that gap is at most the cover radius.
CoverVerification verify_cover(const SphericalCover& cover, std::size_t trials, std::mt19937_64& rng);

/// Distance from `phi` to the nearest center of `cover`.
double nearest_center_distance(const SphericalCover& cover, const Point& phi);

}  // namespace hdepth
