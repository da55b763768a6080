#include "hdepth/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "hdepth/io.hpp"

namespace hdepth {

namespace {

bool is_normal_family(const DistributionSpec& dist) { return dist.family() != Family::Custom; }

BoundParams with_defaults(BoundParams p) {
  if (!p.delta) p.delta = 1.0;
  if (!p.radius) {
    p.radius = p.eps * 2.0 * std::sqrt(static_cast<double>(p.n)) / (std::sqrt(p.constants.lambda) * (1.0 + *p.delta));
  }
  return p;
}

bool proven_kind(BoundKind kind, std::size_t d) {
  switch (kind) {
    case BoundKind::Dkw:
      return d == 1;
    case BoundKind::Vc1:
    case BoundKind::Vc2:
      return d >= 2;
    default:
      return false;
  }
}

Eigen::MatrixXd whitened_rows(const DistributionSpec& dist, const Sample& sample) {
  if (!is_normal_family(dist)) return sample.rows();
  return dist.reduction().to_reduced_rows(sample.rows());
}

Point whitened(const DistributionSpec& dist, const Point& q) {
  return is_normal_family(dist) ? dist.reduction().to_reduced(q) : q;
}

TrialResult run_trial(const ExperimentConfig& cfg, const SphericalCover& cover, const std::vector<Point>& queries,
                      const DistributionSpec& reference, std::size_t index) {
  const auto t0 = std::chrono::steady_clock::now();
  TrialResult out;
  out.index = index;
  out.seed = trial_seed(cfg.seed, index);
  std::mt19937_64 rng(out.seed);
  const std::size_t d = cfg.dist.dimension();

  const Sample sample = draw_sample(cfg.dist, cfg.n, rng);
  const Sample white(whitened_rows(cfg.dist, sample));
  out.sup_deviation = sup_deviation(white, reference, cover);

  const auto& k = reference.constants();
  for (const Point& q : queries) {
    const double truth = population_depth(cfg.dist, q);
    double error = 0.0;
    if (d == 1) {
      error = std::abs(depth_1d(q[0], sample).value() - truth);
    } else if (d == 2) {
      error = std::abs(depth_exact_2d(q, sample).value() - truth);
      const Point qy = whitened(cfg.dist, q);
      const double rq = (white.rows().rowwise() - qy.transpose()).rowwise().norm().maxCoeff();
      const double slack = (k.l_theta + k.l_pi * (rq + qy.norm())) * cover.radius();
      if (error > out.sup_deviation + slack + 1e-12) out.lipschitz_ok = false;
    } else {
      const DepthInterval iv = depth_certified(q, sample, cover);
      error = std::abs(0.5 * (iv.lower + iv.upper) - truth);
      out.interval_widths.push_back(iv.upper - iv.lower);
    }
    out.query_errors.push_back(error);
    out.max_query_error = std::max(out.max_query_error, error);
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<std::size_t> geometric_grid(std::size_t center) {
  std::vector<std::size_t> out;
  const double lo = std::max(1.0, static_cast<double>(center) / 8.0);
  for (int i = 0; i <= 24; ++i) {
    const auto n = static_cast<std::size_t>(std::llround(lo * std::pow(64.0, i / 24.0)));
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

std::string preconditions_field(const BoundReport& r) {
  std::string out;
  for (const auto& c : r.preconditions) {
    if (!out.empty()) out += ';';
    out += c.name + '=' + (c.satisfied ? '1' : '0');
  }
  return out;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial)));
}

Sample draw_sample(const DistributionSpec& dist, std::size_t n, std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("draw_sample: n must be >= 1");
  if (!is_normal_family(dist)) throw std::invalid_argument("draw_sample: custom families cannot be sampled");
  const auto d = static_cast<Eigen::Index>(dist.dimension());
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) rows(i, j) = gauss(rng);
  }
  if (dist.family() == Family::EllipticalNormal) {
    const AffineReduction& red = dist.reduction();
    const Eigen::MatrixXd map = red.q * red.scales.asDiagonal();
    rows = (rows * map.transpose()).rowwise() + red.mu.transpose();
  }
  return Sample(std::move(rows));
}

std::vector<Point> auto_queries(const DistributionSpec& dist) {
  const auto d = static_cast<Eigen::Index>(dist.dimension());
  std::vector<Point> dirs;
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 5.0;
    Point u(d);
    if (d == 1) {
      u[0] = k % 2 == 0 ? 1.0 : -1.0;
    } else {
      u[0] = std::cos(a);
      u[1] = std::sin(a);
      for (Eigen::Index j = 2; j < d; ++j) u[j] = 0.5 * std::sin(a * static_cast<double>(j + 1) + 1.0);
      u.normalize();
    }
    dirs.push_back(u);
  }
  std::vector<Point> out;
  for (double r : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    for (const Point& u : dirs) {
      const Point y = r * u;
      out.push_back(is_normal_family(dist) ? dist.reduction().from_reduced(y) : y);
    }
  }
  return out;
}

double mc_band(double p, std::size_t trials) {
  const double t = static_cast<double>(trials);
  const double q = std::clamp(p, 0.0, 1.0);
  return 3.0 * std::max(std::sqrt(q * (1.0 - q) / t), 1.0 / t);
}

SphericalCover experiment_cover(const ExperimentConfig& cfg) {
  const std::size_t d = cfg.dist.dimension();
  if (d == 1) return line_cover();
  if (cfg.cover) {
    if (cfg.cover->dimension() != d) throw ConfigError("experiment: cover dimension does not match the distribution");
    return *cfg.cover;
  }
  if (cfg.psi) return build_cover(d, *cfg.psi, splitmix64(cfg.seed ^ 0xc0feULL));
  if (d >= 3) throw ConfigError("experiment: d >= 3 needs an explicit cover or psi");
  const auto& k = cfg.dist.constants();
  const double psi = cfg.eps / (10.0 * (k.l_theta + k.l_pi * 2.0 * std::sqrt(static_cast<double>(d))));
  return build_cover(d, std::min(psi, 0.5 * max_cover_radius(d)));
}

BoundParams experiment_bound_params(const ExperimentConfig& cfg) {
  BoundParams p;
  p.n = cfg.n;
  p.eps = cfg.eps;
  p.d = cfg.dist.dimension();
  p.constants = cfg.dist.constants();
  p.c2 = cfg.c2;
  p.sharp_2d = cfg.sharp_2d;
  p.radius = cfg.radius;
  p.delta = cfg.delta;
  return with_defaults(p);
}

ExperimentResult run_deviation_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (cfg.n < 1) throw ConfigError("experiment: n must be >= 1");
  if (!(cfg.eps > 0.0)) throw ConfigError("experiment: eps must be positive");
  const std::size_t d = cfg.dist.dimension();

  ExperimentResult result;
  const SphericalCover cover = experiment_cover(cfg);
  result.psi = cover.radius();
  result.cover_size = cover.size();
  result.queries = cfg.queries ? *cfg.queries : auto_queries(cfg.dist);
  for (const Point& q : result.queries) {
    if (static_cast<std::size_t>(q.size()) != d) throw ConfigError("experiment: query dimension mismatch");
  }
  const DistributionSpec reference =
      is_normal_family(cfg.dist) ? DistributionSpec::standard_normal(d, cfg.dist.constants().c1).with_constants(
                                       cfg.dist.constants())
                                 : cfg.dist;

  result.trials.resize(cfg.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.trials; i = next++) {
      result.trials[i] = run_trial(cfg, cover, result.queries, reference, i);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, cfg.trials);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::size_t exceed = 0;
  for (const auto& t : result.trials) {
    if (t.sup_deviation >= cfg.eps) ++exceed;
    if (!t.lipschitz_ok) result.validity_ok = false;
  }
  result.exceedance = static_cast<double>(exceed) / static_cast<double>(cfg.trials);
  result.exceedance_band = mc_band(result.exceedance, cfg.trials);

  const BoundParams params = experiment_bound_params(cfg);
  for (BoundKind kind : cfg.kinds) {
    BoundComparison cmp;
    cmp.report = evaluate_bound(kind, params);
    const double bound = std::min(1.0, cmp.report.deviation_bound);
    cmp.band = mc_band(bound, cfg.trials);
    cmp.within = result.exceedance <= bound + cmp.band;
    cmp.proven = proven_kind(kind, d);
    if (!cmp.within) {
      cmp.finding = cmp.proven ? "validity failure" : "C2 calibration finding";
      if (cmp.proven) result.validity_ok = false;
    }
    result.comparisons.push_back(std::move(cmp));
  }
  return result;
}

std::vector<SweepRow> run_bound_sweep(const std::vector<BoundKind>& kinds, const std::vector<std::size_t>& ns,
                                      const std::vector<double>& epss, const BoundParams& p) {
  std::vector<SweepRow> rows;
  for (BoundKind kind : kinds) {
    for (std::size_t n : ns) {
      for (double eps : epss) {
        BoundParams q = p;
        q.n = n;
        q.eps = eps;
        // R's default depends on n and eps; only a user-supplied R is kept.
        if (!p.radius) q.radius.reset();
        q = with_defaults(q);
        SweepRow row{kind, n, eps, evaluate_bound(kind, q), std::nullopt};
        if (kind == BoundKind::Vc2 || kind == BoundKind::Theorem) row.improvement = improvement_factor(n, q.d);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "kind,n,eps,value,deviation_bound,log_deviation_bound,vacuous,applicable,preconditions,improvement_factor\n";
  for (const auto& r : rows) {
    out << to_string(r.kind) << ',' << r.n << ',' << format_double(r.eps) << ',' << format_double(r.report.value)
        << ',' << format_double(r.report.deviation_bound) << ',' << format_double(r.report.log_deviation_bound) << ','
        << (r.report.vacuous ? 1 : 0) << ',' << (r.report.applicable ? 1 : 0) << ',' << preconditions_field(r.report)
        << ',' << (r.improvement ? format_double(*r.improvement) : std::string()) << '\n';
  }
  return out.str();
}

std::string results_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "trial,seed,sup_deviation,max_query_error,lipschitz_ok";
  for (std::size_t q = 0; q < result.queries.size(); ++q) out << ",q" << q << "_error";
  const bool widths = !result.trials.empty() && !result.trials.front().interval_widths.empty();
  if (widths) {
    for (std::size_t q = 0; q < result.queries.size(); ++q) out << ",q" << q << "_width";
  }
  out << '\n';
  for (const auto& t : result.trials) {
    out << t.index << ',' << t.seed << ',' << format_double(t.sup_deviation) << ',' << format_double(t.max_query_error)
        << ',' << (t.lipschitz_ok ? 1 : 0);
    for (double e : t.query_errors) out << ',' << format_double(e);
    for (double w : t.interval_widths) out << ',' << format_double(w);
    out << '\n';
  }
  return out.str();
}

std::string summary_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
  nlohmann::json j;
  nlohmann::json config;
  if (cfg.dist.family() != Family::Custom) config["dist"] = to_json(cfg.dist);
  config["n"] = cfg.n;
  config["eps"] = cfg.eps;
  config["trials"] = cfg.trials;
  config["seed"] = cfg.seed;
  config["C2"] = cfg.c2;
  config["sharp_2d"] = cfg.sharp_2d;
  j["config"] = config;
  j["psi"] = result.psi;
  j["cover_size"] = result.cover_size;

  std::vector<double> sups;
  double wall = 0.0;
  double max_err = 0.0;
  for (const auto& t : result.trials) {
    sups.push_back(t.sup_deviation);
    wall += t.wall_seconds;
    max_err = std::max(max_err, t.max_query_error);
  }
  std::sort(sups.begin(), sups.end());
  const std::size_t m = sups.size();
  j["exceedance"] = result.exceedance;
  j["exceedance_band"] = result.exceedance_band;
  j["sup_deviation_median"] = m % 2 == 1 ? sups[m / 2] : 0.5 * (sups[m / 2 - 1] + sups[m / 2]);
  j["sup_deviation_max"] = sups.back();
  j["sup_deviation_label"] = "max over cover centers and t of |F_theta - F_n,theta| (lower bound on the true sup)";
  j["max_query_error"] = max_err;
  j["max_query_error_label"] = "max over query points and trials of |hd(q;X) - hd(q;X_n)|";
  j["mean_wall_seconds"] = wall / static_cast<double>(m);
  nlohmann::json cmps = nlohmann::json::array();
  for (const auto& c : result.comparisons) {
    cmps.push_back({{"kind", to_string(c.report.kind)},
                    {"report", to_json(c.report)},
                    {"band", c.band},
                    {"within", c.within},
                    {"proven", c.proven},
                    {"finding", c.finding}});
  }
  j["comparisons"] = cmps;
  j["validity_ok"] = result.validity_ok;
  return j.dump(2) + "\n";
}

std::string plotdata_csv(const ExperimentConfig& cfg) {
  std::vector<BoundKind> kinds = cfg.kinds;
  if (kinds.empty()) kinds = {cfg.dist.dimension() == 1 ? BoundKind::Dkw : BoundKind::Theorem};
  BoundParams p = experiment_bound_params(cfg);
  if (!cfg.radius) p.radius.reset();
  return sweep_csv(run_bound_sweep(kinds, geometric_grid(cfg.n), {cfg.eps}, p));
}

}  // namespace hdepth
