#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "hdepth/geometry.hpp"
#include "hdepth/sample_depth.hpp"

namespace hdepth::testing {

// Integer lattice points; real coordinates are these divided by 8.
struct GridPoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

inline GridPoint random_grid_point(std::mt19937_64& rng, std::int64_t half_width = 16) {
  std::uniform_int_distribution<std::int64_t> u(-half_width, half_width);
  return {u(rng), u(rng)};
}

inline Point to_point(const GridPoint& g) { return Point{{g.x / 8.0, g.y / 8.0}}; }

inline Sample to_sample(const std::vector<GridPoint>& pts) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rows(static_cast<Eigen::Index>(i), 0) = pts[i].x / 8.0;
    rows(static_cast<Eigen::Index>(i), 1) = pts[i].y / 8.0;
  }
  return Sample(std::move(rows));
}

inline std::vector<GridPoint> random_grid_sample(std::mt19937_64& rng, std::size_t n, std::int64_t half_width = 16) {
  std::vector<GridPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(random_grid_point(rng, half_width));
  return pts;
}

inline std::int64_t orient(const GridPoint& a, const GridPoint& b, const GridPoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Exact membership of q in the closed convex hull of pts (Caratheodory in the plane).
inline bool in_hull(const GridPoint& q, const std::vector<GridPoint>& pts) {
  const std::size_t m = pts.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (pts[i] == q) return true;
    for (std::size_t j = i + 1; j < m; ++j) {
      const GridPoint& a = pts[i];
      const GridPoint& b = pts[j];
      if (orient(a, b, q) == 0 && std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
          std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y)) {
        return true;
      }
      for (std::size_t k = j + 1; k < m; ++k) {
        const std::int64_t o1 = orient(a, b, q);
        const std::int64_t o2 = orient(b, pts[k], q);
        const std::int64_t o3 = orient(pts[k], a, q);
        const bool nonneg = o1 >= 0 && o2 >= 0 && o3 >= 0;
        const bool nonpos = o1 <= 0 && o2 <= 0 && o3 <= 0;
        if ((nonneg || nonpos) && orient(a, b, pts[k]) != 0) return true;
      }
    }
  }
  return false;
}

// Fewest points whose removal leaves q outside the closed hull of the rest.
inline std::size_t removal_count(const GridPoint& q, const std::vector<GridPoint>& pts) {
  const std::size_t n = pts.size();
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto removed = static_cast<std::size_t>(std::popcount(mask));
    if (removed >= best) continue;
    std::vector<GridPoint> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) rest.push_back(pts[i]);
    }
    if (!in_hull(q, rest)) best = removed;
  }
  return best;
}

// min over the given directions of #{i : <X_i - q, u> >= 0}, with the
// closed convention applied at the library's side tolerance.
inline std::size_t scan_depth_count(const Point& q, const Sample& s, const Eigen::MatrixXd& dirs) {
  const Eigen::MatrixXd y = s.rows().rowwise() - q.transpose();
  const Eigen::VectorXd norms = y.rowwise().norm();
  std::size_t best = s.size();
  constexpr Eigen::Index kBlock = 4096;
  for (Eigen::Index start = 0; start < dirs.rows(); start += kBlock) {
    const Eigen::Index len = std::min(kBlock, dirs.rows() - start);
    const Eigen::MatrixXd proj = dirs.middleRows(start, len) * y.transpose();
    for (Eigen::Index r = 0; r < len; ++r) {
      std::size_t c = 0;
      for (Eigen::Index i = 0; i < proj.cols(); ++i) {
        if (proj(r, i) >= -kSideTolerance * norms[i]) ++c;
      }
      best = std::min(best, c);
    }
  }
  return best;
}

inline Eigen::MatrixXd circle_directions(std::size_t count, double offset = 0.0) {
  Eigen::MatrixXd dirs(static_cast<Eigen::Index>(count), 2);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = offset + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    dirs(static_cast<Eigen::Index>(k), 0) = std::cos(a);
    dirs(static_cast<Eigen::Index>(k), 1) = std::sin(a);
  }
  return dirs;
}

inline Eigen::MatrixXd random_directions(std::size_t d, std::size_t count, std::mt19937_64& rng) {
  Eigen::MatrixXd dirs(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < count; ++k) {
    dirs.row(static_cast<Eigen::Index>(k)) = Direction::random(d, rng).coordinates().transpose();
  }
  return dirs;
}

inline Sample gaussian_sample(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = g(rng);
  }
  return Sample(std::move(rows));
}

}  // namespace hdepth::testing
