#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdepth/population_depth.hpp"
#include "hdepth/sample_depth.hpp"

namespace hdepth {

enum class BoundKind { Vc1, Vc2, Dkw, PropRDelta, CorDelta, Theorem, Bivariate };

std::string to_string(BoundKind kind);
/// Accepts the CLI spellings: vc1, vc2, dkw, prop-r-delta, cor-delta, theorem, bivariate.
BoundKind parse_bound_kind(const std::string& name);

struct BoundParams {
  std::size_t n = 1;
  double eps = 0.1;
  std::size_t d = 2;
  DistributionConstants constants{};
  double c2 = 1.0;
  std::optional<double> radius;
  std::optional<double> delta;
  /// d = 2 only: circle cover of pi/psi + 1 arcs, the exact planar tail
  /// Pr(|X| > R) = C1 exp(-lambda R^2/2), and m(r) = r^2 - r + 2 for vc bounds.
  bool sharp_2d = false;
};

struct Precondition {
  std::string name;
  bool satisfied = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// `value` lower-bounds Pr(sup deviation <= eps); `deviation_bound` = 1 - value
/// upper-bounds Pr(sup deviation >= eps). All products are formed in log space.
struct BoundReport {
  BoundKind kind = BoundKind::Dkw;
  double value = 0.0;
  double deviation_bound = 1.0;
  double log_deviation_bound = 0.0;
  bool vacuous = true;
  bool applicable = true;
  std::vector<Precondition> preconditions;
  std::map<std::string, double> intermediates;
  std::vector<std::string> caveats;
};

/// (3/2) r^{d+1} / (d+1)!
double m_upper(double r, std::size_t d);
double log_m_upper(double r, std::size_t d);

/// r^2 - r + 2. Throws std::overflow_error if the result does not fit.
std::uint64_t m_exact_2d(std::uint64_t r);

/// Number of distinct subsets cut from a planar point set in convex position
/// by closed halfplanes, by enumeration over all combinatorially distinct
/// directions. Throws if the points are not in convex position.
std::uint64_t halfplane_subset_count(const Sample& points);

/// Vertices of a regular r-gon on the unit circle.
Sample regular_polygon(std::size_t r);

BoundReport vc_bound_1(const BoundParams& p);
BoundReport vc_bound_2(const BoundParams& p);

/// 2 exp(-2 n eps^2).
double dkw_bound(std::size_t n, double eps);
BoundReport dkw_report(const BoundParams& p);

struct CoveringCount {
  double exact_form = 0.0;
  double simplified = 0.0;
};
CoveringCount covering_count(std::size_t d, double psi, double c2 = 1.0);

/// Requires p.radius and p.delta.
BoundReport bound_prop_R_delta(const BoundParams& p);
/// Requires p.delta; R is chosen so both exponentials agree.
BoundReport bound_cor_delta(const BoundParams& p);
/// delta = 1/n with the relaxed exponential e^4 e^{-2 n eps^2}.
BoundReport bound_theorem_final(const BoundParams& p);

/// 1 - (2 sqrt(2 pi) n^{3/2} + n + 2) e^4 e^{-2 n eps^2}.
double bound_bivariate_normal(std::size_t n, double eps);
BoundReport bivariate_report(const BoundParams& p);

/// (2d + 2) - 3(d - 1)/2.
double improvement_exponent(std::size_t d);
/// n^{2d+2} / n^{3(d-1)/2}.
double improvement_factor(std::size_t n, std::size_t d);

BoundReport evaluate_bound(BoundKind kind, const BoundParams& p);

/// Smallest n in [lo, hi] with a non-vacuous report, by bisection; assumes
/// the vacuous flag switches once over the range. nullopt if hi is vacuous.
std::optional<std::size_t> first_nonvacuous_n(BoundKind kind, BoundParams p, std::size_t lo, std::size_t hi);

}  // namespace hdepth
