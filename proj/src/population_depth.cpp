#include "hdepth/population_depth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace hdepth {

namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kSignTolerance = 1e-12;

DistributionConstants gaussian_constants(double c1) {
  return DistributionConstants{1.0, c1, 1.0 / std::sqrt(2.0 * std::numbers::pi), 0.0};
}

void require_dimension(std::size_t expected, Eigen::Index got, const char* what) {
  if (static_cast<Eigen::Index>(expected) != got) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(got) + " vs " +
                                std::to_string(expected) + ")");
  }
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::string to_string(Family family) {
  switch (family) {
    case Family::StandardNormal:
      return "standard_normal";
    case Family::EllipticalNormal:
      return "elliptical_normal";
    case Family::Custom:
      return "custom";
  }
  return "unknown";
}

Point AffineReduction::to_reduced(const Point& x) const {
  return (q.transpose() * (x - mu)).cwiseQuotient(scales);
}

Point AffineReduction::from_reduced(const Point& y) const { return q * scales.cwiseProduct(y) + mu; }

Eigen::MatrixXd AffineReduction::to_reduced_rows(const Eigen::MatrixXd& rows) const {
  Eigen::MatrixXd centered = rows.rowwise() - mu.transpose();
  Eigen::MatrixXd rotated = centered * q;
  return rotated * scales.cwiseInverse().asDiagonal();
}

Eigen::MatrixXd AffineReduction::covariance() const {
  return q * scales.cwiseAbs2().asDiagonal() * q.transpose();
}

AffineReduction affine_reduce(const Eigen::MatrixXd& sigma, const Point& mu) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw std::invalid_argument("affine_reduce: sigma must be a nonempty square matrix");
  }
  require_dimension(static_cast<std::size_t>(sigma.rows()), mu.size(), "affine_reduce");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw std::invalid_argument("affine_reduce: sigma is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (sigma + sigma.transpose()));
  if (solver.info() != Eigen::Success) throw std::invalid_argument("affine_reduce: eigendecomposition failed");

  const Eigen::Index d = sigma.rows();
  const Eigen::VectorXd& values = solver.eigenvalues();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(values[i] > 0.0)) {
      std::ostringstream msg;
      msg << "affine_reduce: sigma is not positive definite (eigenvalue " << values[i] << ")";
      throw std::invalid_argument(msg.str());
    }
  }

  AffineReduction out;
  out.q.resize(d, d);
  out.scales.resize(d);
  out.mu = mu;
  // Descending, with ties kept in the solver's order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    for (Eigen::Index k = 0; k < d; ++k) {
      if (std::abs(v[k]) > kSignTolerance) {
        if (v[k] < 0.0) v = -v;
        break;
      }
    }
    out.q.col(i) = v;
    out.scales[i] = std::sqrt(values[src]);
  }
  return out;
}

DistributionSpec DistributionSpec::standard_normal(std::size_t d, double c1) {
  if (d == 0) throw std::invalid_argument("standard_normal: dimension must be positive");
  DistributionSpec spec;
  const auto n = static_cast<Eigen::Index>(d);
  spec.family_ = Family::StandardNormal;
  spec.name_ = "standard_normal";
  spec.d_ = d;
  spec.mu_ = Point::Zero(n);
  spec.sigma_ = Eigen::MatrixXd::Identity(n, n);
  spec.constants_ = gaussian_constants(c1);
  spec.reduction_ = AffineReduction{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Ones(n), Point::Zero(n)};
  spec.symmetric_ = true;
  return spec;
}

DistributionSpec DistributionSpec::elliptical_normal(Point mu, Eigen::MatrixXd sigma, double c1) {
  DistributionSpec spec;
  spec.reduction_ = affine_reduce(sigma, mu);
  spec.family_ = Family::EllipticalNormal;
  spec.name_ = "elliptical_normal";
  spec.d_ = static_cast<std::size_t>(mu.size());
  spec.mu_ = std::move(mu);
  spec.sigma_ = std::move(sigma);
  spec.constants_ = gaussian_constants(c1);
  spec.symmetric_ = false;
  return spec;
}

DistributionSpec DistributionSpec::custom(std::size_t d, std::string name, DistributionConstants constants,
                                          ProjectedCdf cdf, DepthFunction depth, bool spherically_symmetric) {
  if (d == 0) throw std::invalid_argument("custom distribution: dimension must be positive");
  if (!cdf) throw std::invalid_argument("custom distribution: a projected cdf is required");
  DistributionSpec spec;
  const auto n = static_cast<Eigen::Index>(d);
  spec.family_ = Family::Custom;
  spec.name_ = std::move(name);
  spec.d_ = d;
  spec.mu_ = Point::Zero(n);
  spec.sigma_ = Eigen::MatrixXd::Identity(n, n);
  spec.constants_ = constants;
  spec.reduction_ = AffineReduction{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Ones(n), Point::Zero(n)};
  spec.symmetric_ = spherically_symmetric;
  spec.cdf_ = std::move(cdf);
  spec.depth_ = std::move(depth);
  return spec;
}

DistributionSpec DistributionSpec::with_constants(const DistributionConstants& constants) const {
  DistributionSpec copy = *this;
  copy.constants_ = constants;
  return copy;
}

double cdf_projected(const DistributionSpec& dist, const Direction& theta, double t) {
  require_dimension(dist.dimension(), theta.coordinates().size(), "cdf_projected");
  switch (dist.family()) {
    case Family::StandardNormal:
      return normal_cdf(t);
    case Family::EllipticalNormal: {
      const Point& u = theta.coordinates();
      const double sigma_theta = std::sqrt(u.dot(dist.sigma() * u));
      return normal_cdf((t - dist.mu().dot(u)) / sigma_theta);
    }
    case Family::Custom:
      return dist.custom_cdf()(theta, t);
  }
  throw std::logic_error("cdf_projected: unknown family");
}

double population_depth(const DistributionSpec& dist, const Point& q) {
  require_dimension(dist.dimension(), q.size(), "population_depth");
  switch (dist.family()) {
    case Family::StandardNormal:
      return normal_cdf(-q.norm());
    case Family::EllipticalNormal:
      return normal_cdf(-dist.reduction().to_reduced(q).norm());
    case Family::Custom:
      if (!dist.custom_depth()) {
        throw std::invalid_argument("population_depth: custom family '" + dist.name() + "' has no depth function");
      }
      return dist.custom_depth()(q);
  }
  throw std::logic_error("population_depth: unknown family");
}

double tail_probability_bound(const DistributionSpec& dist, double radius) {
  if (!(radius > 1.0)) throw std::invalid_argument("tail_probability_bound: R must exceed 1");
  const auto& k = dist.constants();
  const double power = 3.0 * static_cast<double>(dist.dimension()) - 5.0;
  return k.c1 * std::exp(power * std::log(radius) - 0.5 * k.lambda * radius * radius);
}

}  // namespace hdepth
