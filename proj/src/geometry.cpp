#include "hdepth/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hdepth/detail/covering.hpp"

namespace hdepth {

namespace {

constexpr double kUnitTolerance = 1e-12;
constexpr std::size_t kBuildProbes = 100000;
constexpr double kBuildSlack = 0.97;
constexpr double kGrowth = 1.3;
constexpr std::uint64_t kFibonacciProbeSeed = 0x5eed'f1b0'0000'0003ULL;

void require_same_dimension(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

double clamped_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

std::vector<Direction> fibonacci_lattice(std::size_t count) {
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Direction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    Point p(3);
    p << r * std::cos(phi), r * std::sin(phi), z;
    out.push_back(Direction::normalized(p));
  }
  return out;
}

std::vector<Direction> random_centers(std::size_t d, std::size_t count, std::mt19937_64& rng) {
  std::vector<Direction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(Direction::random(d, rng));
  return out;
}

// Max over probes of the nearest-center distance; probes in blocks so the
// dot products run as one matrix product per block.
double max_gap(const SphericalCover& cover, std::size_t trials, std::mt19937_64& rng) {
  constexpr std::size_t kBlock = 2048;
  const auto d = static_cast<Eigen::Index>(cover.dimension());
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst_cos = 1.0;
  Eigen::MatrixXd probes;
  for (std::size_t done = 0; done < trials; done += kBlock) {
    const auto rows = static_cast<Eigen::Index>(std::min(kBlock, trials - done));
    probes.resize(rows, d);
    for (Eigen::Index r = 0; r < rows; ++r) {
      double norm2 = 0.0;
      do {
        for (Eigen::Index c = 0; c < d; ++c) probes(r, c) = gauss(rng);
        norm2 = probes.row(r).squaredNorm();
      } while (norm2 == 0.0);
      probes.row(r) /= std::sqrt(norm2);
    }
    const Eigen::MatrixXd dots = probes * cover.center_matrix().transpose();
    for (Eigen::Index r = 0; r < rows; ++r) worst_cos = std::min(worst_cos, dots.row(r).maxCoeff());
  }
  return clamped_acos(worst_cos);
}

}  // namespace

Direction::Direction(Point coordinates) : u_(std::move(coordinates)) {
  if (u_.size() == 0) throw std::invalid_argument("Direction: empty coordinate vector");
  const double norm = u_.norm();
  if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
    throw std::invalid_argument("Direction: coordinates must have unit norm, got " + std::to_string(norm));
  }
}

Direction Direction::normalized(const Point& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("Direction: cannot normalize a zero vector");
  return Direction(Point(v / norm), Unchecked{});
}

Direction Direction::from_angle(double angle) {
  Point p(2);
  p << std::cos(angle), std::sin(angle);
  return Direction(std::move(p), Unchecked{});
}

Direction Direction::random(std::size_t d, std::mt19937_64& rng) {
  if (d == 0) throw std::invalid_argument("Direction::random: dimension must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Point p(static_cast<Eigen::Index>(d));
  double norm2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = gauss(rng);
    norm2 = p.squaredNorm();
  } while (norm2 == 0.0);
  return Direction(Point(p / std::sqrt(norm2)), Unchecked{});
}

double project(const Point& p, const Direction& theta) {
  require_same_dimension(p.size(), theta.coordinates().size(), "project");
  return p.dot(theta.coordinates());
}

double spherical_distance(const Direction& a, const Direction& b) {
  require_same_dimension(a.coordinates().size(), b.coordinates().size(), "spherical_distance");
  return clamped_acos(a.coordinates().dot(b.coordinates()));
}

SphericalCover::SphericalCover(std::size_t d, double psi, std::vector<Direction> centers)
    : d_(d), psi_(psi), centers_(std::move(centers)) {
  if (d_ == 0) throw std::invalid_argument("SphericalCover: dimension must be positive");
  if (!(psi_ >= 0.0) || !std::isfinite(psi_)) throw std::invalid_argument("SphericalCover: radius must be >= 0");
  if (centers_.empty()) throw std::invalid_argument("SphericalCover: at least one center required");
  matrix_.resize(static_cast<Eigen::Index>(centers_.size()), static_cast<Eigen::Index>(d_));
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (centers_[i].dimension() != d_) {
      throw std::invalid_argument("SphericalCover: center " + std::to_string(i) + " has dimension " +
                                  std::to_string(centers_[i].dimension()) + ", expected " + std::to_string(d_));
    }
    matrix_.row(static_cast<Eigen::Index>(i)) = centers_[i].coordinates().transpose();
  }
}

double max_cover_radius(std::size_t d) { return std::acos(1.0 / std::sqrt(static_cast<double>(d))); }

std::size_t circle_cover_count(double psi) {
  const double ratio = std::numbers::pi / psi;
  // Guard exact multiples (psi = pi/k) against a one-ulp overshoot.
  return static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-14))) + 1;
}

SphericalCover build_cover(std::size_t d, double psi, std::optional<std::uint64_t> seed) {
  if (d < 2) throw std::invalid_argument("build_cover: dimension must be >= 2");
  if (!(psi > 0.0) || !(psi < max_cover_radius(d))) {
    throw std::invalid_argument("build_cover: psi must lie in (0, arccos(d^-1/2)) = (0, " +
                                std::to_string(max_cover_radius(d)) + "), got " + std::to_string(psi));
  }

  if (d == 2) {
    const std::size_t k = circle_cover_count(psi);
    std::vector<Direction> centers;
    centers.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      centers.push_back(Direction::from_angle(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k)));
    }
    return SphericalCover(2, psi, std::move(centers));
  }

  if (d >= 4 && !seed) throw std::invalid_argument("build_cover: d >= 4 uses random centers and needs a seed");

  std::mt19937_64 center_rng(seed.value_or(0));
  std::mt19937_64 probe_rng(seed ? *seed ^ kFibonacciProbeSeed : kFibonacciProbeSeed);

  const double start = detail::covering_count_simplified(d, psi, 1.0);
  auto count = static_cast<std::size_t>(std::ceil(std::max(start, static_cast<double>(d + 1))));
  for (;;) {
    std::vector<Direction> centers = d == 3 ? fibonacci_lattice(count) : random_centers(d, count, center_rng);
    SphericalCover cover(d, psi, std::move(centers));
    if (max_gap(cover, kBuildProbes, probe_rng) <= kBuildSlack * psi) return cover;
    count = static_cast<std::size_t>(std::ceil(static_cast<double>(count) * kGrowth));
  }
}

SphericalCover line_cover() {
  Point plus(1), minus(1);
  plus << 1.0;
  minus << -1.0;
  return SphericalCover(1, 0.0, {Direction(plus), Direction(minus)});
}

CoverVerification verify_cover(const SphericalCover& cover, std::size_t trials, std::mt19937_64& rng) {
  if (trials < 1) throw std::invalid_argument("verify_cover: trials must be >= 1");
  CoverVerification report;
  report.trials = trials;
  report.max_gap = max_gap(cover, trials, rng);
  report.pass = report.max_gap <= cover.radius();
  return report;
}

double nearest_center_distance(const SphericalCover& cover, const Point& phi) {
  require_same_dimension(phi.size(), static_cast<Eigen::Index>(cover.dimension()), "nearest_center_distance");
  return clamped_acos((cover.center_matrix() * phi).maxCoeff());
}

}  // namespace hdepth
