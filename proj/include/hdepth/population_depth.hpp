#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "hdepth/geometry.hpp"

namespace hdepth {

/// Standard normal cdf through erfc.
double normal_cdf(double x);

enum class Family { StandardNormal, EllipticalNormal, Custom };

std::string to_string(Family family);

/// Decay and Lipschitz constants consumed by the convergence bounds.
struct DistributionConstants {
  double lambda = 1.0;   // decay rate
  double c1 = 1.0;       // tail constant
  double l_pi = 0.0;     // projection Lipschitz constant
  double l_theta = 0.0;  // radial Lipschitz constant
};

/// Sigma = Q D^2 Q^T with the whitening map y = D^{-1} Q^T (x - mu).
/// Eigenvalues are sorted in descending order and each eigenvector's first
/// nonzero component is positive.
struct AffineReduction {
  Eigen::MatrixXd q;
  Eigen::VectorXd scales;  // diagonal of D
  Point mu;

  Point to_reduced(const Point& x) const;
  Point from_reduced(const Point& y) const;
  /// Applies to_reduced to every row.
  Eigen::MatrixXd to_reduced_rows(const Eigen::MatrixXd& rows) const;
  Eigen::MatrixXd covariance() const;
};

/// Throws std::invalid_argument when sigma is not symmetric (1e-10) or has a
/// nonpositive eigenvalue.
AffineReduction affine_reduce(const Eigen::MatrixXd& sigma, const Point& mu);

class DistributionSpec {
 public:
  using ProjectedCdf = std::function<double(const Direction&, double)>;
  using DepthFunction = std::function<double(const Point&)>;

  /// N(0, I_d): lambda = 1, L_pi = 1/sqrt(2 pi), L_theta = 0.
  static DistributionSpec standard_normal(std::size_t d, double c1 = 1.0);

  /// N(mu, sigma). Constants describe the whitened variable, where the
  /// family reduces to the standard normal.
  static DistributionSpec elliptical_normal(Point mu, Eigen::MatrixXd sigma, double c1 = 1.0);

  /// A user-registered family. `depth` is optional; without it
  /// population_depth is unavailable for the family.
  static DistributionSpec custom(std::size_t d, std::string name, DistributionConstants constants, ProjectedCdf cdf,
                                 DepthFunction depth = {}, bool spherically_symmetric = false);

  Family family() const { return family_; }
  const std::string& name() const { return name_; }
  std::size_t dimension() const { return d_; }
  const Point& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const DistributionConstants& constants() const { return constants_; }
  const AffineReduction& reduction() const { return reduction_; }

  /// F_theta is independent of theta (so L_theta = 0).
  bool spherically_symmetric() const { return symmetric_; }

  DistributionSpec with_constants(const DistributionConstants& constants) const;

  const ProjectedCdf& custom_cdf() const { return cdf_; }
  const DepthFunction& custom_depth() const { return depth_; }

 private:
  DistributionSpec() = default;

  Family family_ = Family::StandardNormal;
  std::string name_;
  std::size_t d_ = 0;
  Point mu_;
  Eigen::MatrixXd sigma_;
  DistributionConstants constants_;
  AffineReduction reduction_;
  bool symmetric_ = true;
  ProjectedCdf cdf_;
  DepthFunction depth_;
};

/// F_theta(t) = Pr(<X, u_theta> <= t).
double cdf_projected(const DistributionSpec& dist, const Direction& theta, double t);

/// hd(q; X) in closed form.
double population_depth(const DistributionSpec& dist, const Point& q);

/// C1 R^{3d-5} exp(-lambda R^2 / 2); requires R > 1.
double tail_probability_bound(const DistributionSpec& dist, double radius);

}  // namespace hdepth
