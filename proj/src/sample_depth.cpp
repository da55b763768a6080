#include "hdepth/sample_depth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/SVD>

namespace hdepth {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kAngleTolerance = 1e-12;

void require_dimension(const Sample& sample, Eigen::Index d, const char* what) {
  if (static_cast<Eigen::Index>(sample.dimension()) != d) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (sample " +
                                std::to_string(sample.dimension()) + ", got " + std::to_string(d) + ")");
  }
}

// Rows X_i - q of the points not coincident with q, and the number that are.
struct Centered {
  Eigen::MatrixXd rows;
  std::size_t coincident = 0;
};

Centered center_on(const Point& q, const Sample& sample) {
  const Eigen::MatrixXd& x = sample.rows();
  const double q_norm = q.norm();
  std::vector<Eigen::Index> keep;
  keep.reserve(sample.size());
  Centered out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double y_norm = (x.row(i) - q.transpose()).norm();
    if (y_norm <= kSideTolerance * std::max(x.row(i).norm(), q_norm)) {
      ++out.coincident;
    } else {
      keep.push_back(i);
    }
  }
  out.rows.resize(static_cast<Eigen::Index>(keep.size()), x.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.rows.row(static_cast<Eigen::Index>(r)) = x.row(keep[r]) - q.transpose();
  }
  return out;
}

bool next_combination(std::vector<Eigen::Index>& idx, Eigen::Index m) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < m - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (Eigen::Index j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

Eigen::Index numerical_rank(const Eigen::VectorXd& singular_values) {
  if (singular_values.size() == 0 || singular_values[0] == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < singular_values.size() && singular_values[r] > kRankTolerance * singular_values[0]) ++r;
  return r;
}

// Minimum over generic directions v of #{i : <y_i, v> > 0}, for nonzero rows
// y_i. The minimum is attained on a cell of the arrangement of hyperplanes
// y_i^perp; every cell of an essential arrangement touches a ray cut out by
// k-1 independent hyperplanes, and the cells around such a ray are the cells
// of the points lying on it, one dimension down.
std::size_t min_cell_count(const Eigen::MatrixXd& ys) {
  const Eigen::Index m = ys.rows();
  const Eigen::Index k = ys.cols();
  if (m == 0) return 0;
  if (k == 1) {
    const auto pos = static_cast<std::size_t>((ys.col(0).array() > 0.0).count());
    return std::min(pos, static_cast<std::size_t>(m) - pos);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> full(ys, Eigen::ComputeFullV);
  const Eigen::Index rank = numerical_rank(full.singularValues());
  if (rank < k) return min_cell_count(ys * full.matrixV().leftCols(rank));

  const Eigen::VectorXd norms = ys.rowwise().norm();
  std::size_t best = static_cast<std::size_t>(m);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k - 1));
  for (Eigen::Index i = 0; i < k - 1; ++i) idx[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd touching(k - 1, k);
  do {
    for (Eigen::Index r = 0; r < k - 1; ++r) touching.row(r) = ys.row(idx[static_cast<std::size_t>(r)]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(touching, Eigen::ComputeFullV);
    if (numerical_rank(svd.singularValues()) < k - 1) continue;
    const Eigen::VectorXd ray = svd.matrixV().col(k - 1);
    const Eigen::MatrixXd complement = svd.matrixV().leftCols(k - 1);
    const Eigen::VectorXd dots = ys * ray;

    std::vector<Eigen::Index> on_ray;
    std::size_t above = 0;
    std::size_t below = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(dots[i]) <= kSideTolerance * norms[i]) {
        on_ray.push_back(i);
      } else if (dots[i] > 0.0) {
        ++above;
      } else {
        ++below;
      }
    }
    Eigen::MatrixXd local(static_cast<Eigen::Index>(on_ray.size()), k);
    for (std::size_t r = 0; r < on_ray.size(); ++r) local.row(static_cast<Eigen::Index>(r)) = ys.row(on_ray[r]);
    // The local arrangement is symmetric under w -> -w, so one recursion
    // serves both orientations of the ray.
    const std::size_t local_min = min_cell_count(local * complement);
    best = std::min({best, above + local_min, below + local_min});
  } while (next_combination(idx, m));
  return best;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  return a < 0.0 ? a + two_pi : a;
}

}  // namespace

Sample::Sample(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1) throw std::invalid_argument("Sample: at least one point required");
  if (rows_.cols() < 1) throw std::invalid_argument("Sample: dimension must be at least 1");
  if (!rows_.allFinite()) throw std::invalid_argument("Sample: coordinates must be finite");
}

Sample Sample::from_points(const std::vector<Point>& points) {
  if (points.empty()) throw std::invalid_argument("Sample: at least one point required");
  const Eigen::Index d = points.front().size();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(points.size()), d);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d) {
      throw std::invalid_argument("Sample: point " + std::to_string(i) + " has dimension " +
                                  std::to_string(points[i].size()) + ", expected " + std::to_string(d));
    }
    rows.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  }
  return Sample(std::move(rows));
}

Sample Sample::from_values(std::span<const double> values) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) rows(static_cast<Eigen::Index>(i), 0) = values[i];
  return Sample(std::move(rows));
}

DepthValue depth_1d(double q, const Sample& sample) {
  require_dimension(sample, 1, "depth_1d");
  std::size_t at_most = 0;
  std::size_t at_least = 0;
  for (Eigen::Index i = 0; i < sample.rows().rows(); ++i) {
    const double x = sample.rows()(i, 0);
    const double tol = kSideTolerance * std::max(std::abs(x), std::abs(q));
    if (x - q <= tol) ++at_most;
    if (q - x <= tol) ++at_least;
  }
  return DepthValue{std::min(at_most, at_least), sample.size()};
}

DepthValue depth_brute(const Point& q, const Sample& sample) {
  require_dimension(sample, q.size(), "depth_brute");
  const Centered c = center_on(q, sample);
  return DepthValue{c.coincident + min_cell_count(c.rows), sample.size()};
}

DepthValue depth_exact_2d(const Point& q, const Sample& sample) {
  require_dimension(sample, 2, "depth_exact_2d");
  require_dimension(sample, q.size(), "depth_exact_2d");
  const Centered c = center_on(q, sample);
  const auto m = static_cast<std::size_t>(c.rows.rows());
  if (m == 0) return DepthValue{c.coincident, sample.size()};

  // Point i lies in the closed halfplane with inner normal at angle phi iff
  // |phi - alpha_i| <= pi/2. It enters at alpha_i - pi/2 and leaves at
  // alpha_i + pi/2 as phi increases.
  std::vector<double> alpha(m);
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * m);
  constexpr double half_pi = 0.5 * std::numbers::pi;
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    alpha[i] = std::atan2(c.rows(r, 1), c.rows(r, 0));
    events.emplace_back(wrap_angle(alpha[i] - half_pi), +1);
    events.emplace_back(wrap_angle(alpha[i] + half_pi), -1);
  }
  std::sort(events.begin(), events.end());

  // Start the sweep inside the widest gap between events, so that the
  // starting direction is far from every boundary.
  const std::size_t e = events.size();
  std::size_t widest = e - 1;
  double widest_gap = events.front().first + 2.0 * std::numbers::pi - events.back().first;
  for (std::size_t i = 0; i + 1 < e; ++i) {
    const double gap = events[i + 1].first - events[i].first;
    if (gap > widest_gap) {
      widest_gap = gap;
      widest = i;
    }
  }
  const double start = events[widest].first + 0.5 * widest_gap;

  long count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::cos(start - alpha[i]) > 0.0) ++count;
  }
  long best = count;
  double group_start = 0.0;
  bool in_group = false;
  for (std::size_t step = 1; step <= e; ++step) {
    const std::size_t i = (widest + step) % e;
    double angle = events[i].first;
    if (i <= widest) angle += 2.0 * std::numbers::pi;
    if (in_group && angle - group_start > kAngleTolerance) {
      best = std::min(best, count);
      in_group = false;
    }
    if (!in_group) {
      group_start = angle;
      in_group = true;
    }
    count += events[i].second;
  }
  best = std::min(best, count);
  return DepthValue{c.coincident + static_cast<std::size_t>(best), sample.size()};
}

namespace {

// Counts of #{i : <X_i - q, theta> <= threshold_i} per cover center, minimized.
template <typename Threshold>
std::size_t min_projected_count(const Point& q, const Sample& sample, const SphericalCover& cover,
                                Threshold threshold) {
  const Eigen::MatrixXd centered = sample.rows().rowwise() - q.transpose();
  const Eigen::VectorXd norms = centered.rowwise().norm();
  const Eigen::MatrixXd proj = centered * cover.center_matrix().transpose();
  std::size_t best = sample.size();
  for (Eigen::Index j = 0; j < proj.cols(); ++j) {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < proj.rows(); ++i) {
      if (proj(i, j) <= threshold(norms[i])) ++count;
    }
    best = std::min(best, count);
  }
  return best;
}

}  // namespace

DepthValue depth_approx(const Point& q, const Sample& sample, const SphericalCover& cover) {
  require_dimension(sample, q.size(), "depth_approx");
  require_dimension(sample, static_cast<Eigen::Index>(cover.dimension()), "depth_approx");
  const std::size_t count =
      min_projected_count(q, sample, cover, [](double norm) { return kSideTolerance * norm; });
  return DepthValue{count, sample.size()};
}

DepthInterval depth_certified(const Point& q, const Sample& sample, const SphericalCover& cover) {
  require_dimension(sample, q.size(), "depth_certified");
  require_dimension(sample, static_cast<Eigen::Index>(cover.dimension()), "depth_certified");
  DepthInterval out;
  out.psi = cover.radius();
  out.radius = (sample.rows().rowwise() - q.transpose()).rowwise().norm().maxCoeff();
  const double n = static_cast<double>(sample.size());
  const double shift = out.radius * out.psi;
  out.upper = static_cast<double>(depth_approx(q, sample, cover).count) / n;
  // With every |X_i - q| <= R and |theta - phi| <= psi,
  // F_{n,theta}(d_theta(q) - R psi) <= F_{n,phi}(d_phi(q)).
  const std::size_t lower_count = min_projected_count(q, sample, cover, [shift](double) { return -shift; });
  out.lower = std::max(0.0, static_cast<double>(lower_count) / n);
  return out;
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    worst = std::max({worst, f - below, above - f});
  }
  return worst;
}

double sup_deviation(const Sample& sample, const DistributionSpec& dist, const SphericalCover& cover) {
  require_dimension(sample, static_cast<Eigen::Index>(dist.dimension()), "sup_deviation");
  require_dimension(sample, static_cast<Eigen::Index>(cover.dimension()), "sup_deviation");
  const Eigen::MatrixXd proj = sample.rows() * cover.center_matrix().transpose();
  std::vector<double> values(sample.size());
  double worst = 0.0;
  for (Eigen::Index j = 0; j < proj.cols(); ++j) {
    for (Eigen::Index i = 0; i < proj.rows(); ++i) values[static_cast<std::size_t>(i)] = proj(i, j);
    std::sort(values.begin(), values.end());
    const Direction& theta = cover.centers()[static_cast<std::size_t>(j)];
    worst = std::max(worst, ks_statistic(values, [&](double t) { return cdf_projected(dist, theta, t); }));
  }
  return worst;
}

}  // namespace hdepth
