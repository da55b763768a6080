#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdepth/bounds.hpp"
#include "hdepth/geometry.hpp"
#include "hdepth/population_depth.hpp"
#include "hdepth/sample_depth.hpp"

namespace hdepth {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
/// Seed of the RNG stream for one trial; independent of scheduling.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// n i.i.d. draws. Elliptical draws are x = Q D y + mu with y standard normal.
Sample draw_sample(const DistributionSpec& dist, std::size_t n, std::mt19937_64& rng);

/// 25 probes: radii {0, 0.5, 1, 1.5, 2} along 5 fixed directions in whitened
/// coordinates, mapped back through the distribution's affine reduction.
std::vector<Point> auto_queries(const DistributionSpec& dist);

struct ExperimentConfig {
  DistributionSpec dist = DistributionSpec::standard_normal(2);
  std::size_t n = 100;
  double eps = 0.1;
  std::size_t trials = 100;
  /// Cover radius for the sup estimate. Defaults to eps/(10 (L_theta + L_pi 2 sqrt(d)))
  /// in d = 2; required (or `cover`) for d >= 3. Ignored in d = 1.
  std::optional<double> psi;
  std::optional<SphericalCover> cover;
  std::uint64_t seed = 0;
  std::optional<std::vector<Point>> queries;  // nullopt selects auto_queries
  std::vector<BoundKind> kinds;
  double c2 = 1.0;
  bool sharp_2d = false;
  std::optional<double> radius;  // R for prop-r-delta; defaults to the corollary's choice
  std::optional<double> delta;   // defaults to 1
  std::size_t threads = 1;
};

struct TrialResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double sup_deviation = 0.0;
  std::vector<double> query_errors;
  std::vector<double> interval_widths;  // d >= 3 only
  double max_query_error = 0.0;
  /// d = 2: every query error <= sup_deviation + (L_theta + L_pi (R_q + |q|)) psi,
  /// R_q = max_i |Y_i - q| in whitened coordinates. Always true elsewhere.
  bool lipschitz_ok = true;
  double wall_seconds = 0.0;
};

struct BoundComparison {
  BoundReport report;
  double band = 0.0;        // 3-sigma binomial error at the bound
  bool within = true;       // exceedance <= min(1, deviation_bound) + band
  bool proven = false;      // a violation is a validity failure, not a calibration finding
  std::string finding;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;
  double exceedance = 0.0;
  double exceedance_band = 0.0;
  double psi = 0.0;
  std::size_t cover_size = 0;
  std::vector<Point> queries;
  std::vector<BoundComparison> comparisons;
  bool validity_ok = true;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// 3 max(sqrt(p (1-p) / trials), 1/trials) with p clamped into [0, 1].
double mc_band(double p, std::size_t trials);

/// Cover the harness would use for `cfg`; throws ConfigError when none can be chosen.
SphericalCover experiment_cover(const ExperimentConfig& cfg);

/// Bound parameters for `cfg` with the defaults for R and delta filled in.
BoundParams experiment_bound_params(const ExperimentConfig& cfg);

ExperimentResult run_deviation_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  BoundKind kind;
  std::size_t n;
  double eps;
  BoundReport report;
  std::optional<double> improvement;
};

/// One row per (kind, n, eps), kinds outermost. p.n and p.eps are overridden;
/// missing R and delta take the same defaults as the harness.
std::vector<SweepRow> run_bound_sweep(const std::vector<BoundKind>& kinds, const std::vector<std::size_t>& ns,
                                      const std::vector<double>& epss, const BoundParams& p);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string results_csv(const ExperimentResult& result);
std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& result);
/// Bound-vs-n curves over a geometric grid around cfg.n.
std::string plotdata_csv(const ExperimentConfig& cfg);

}  // namespace hdepth
