// hdepth: halfspace depth, sphere covers, convergence bounds and Monte Carlo
// experiments from the command line. Exit codes: 0 success, 1 input error,
// 2 validity-check failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdepth/bounds.hpp"
#include "hdepth/experiments.hpp"
#include "hdepth/geometry.hpp"
#include "hdepth/io.hpp"
#include "hdepth/population_depth.hpp"
#include "hdepth/sample_depth.hpp"

namespace fs = std::filesystem;
using namespace hdepth;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kValidityFailure = 2;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write '" + out_path + "'");
  out << text;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

Point parse_point(const std::string& text) {
  const std::vector<double> v = parse_number_list(text);
  if (v.empty()) throw InputError("query point is empty");
  return Eigen::Map<const Point>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// A sample given as a path, or inline as a flat list reshaped into rows of
// dimension d.
Sample resolve_sample(const std::string& spec, std::size_t d) {
  if (fs::exists(spec)) return load_sample(spec);
  const std::vector<double> v = parse_number_list(spec);
  if (v.empty()) throw InputError("sample '" + spec + "' is neither a readable file nor a list of numbers");
  if (v.size() % d != 0) {
    throw InputError("inline sample has " + std::to_string(v.size()) + " numbers, not a multiple of d = " +
                     std::to_string(d));
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(v.size() / d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < v.size(); ++i) {
    rows(static_cast<Eigen::Index>(i / d), static_cast<Eigen::Index>(i % d)) = v[i];
  }
  return Sample(std::move(rows));
}

DistributionSpec resolve_distribution(const std::string& name, const std::string& file, std::optional<std::size_t> d) {
  if (!file.empty()) return distribution_from_json(read_json_file(file));
  if (name == "standard_normal") {
    if (!d) throw InputError("--dist standard_normal needs --d");
    return DistributionSpec::standard_normal(*d);
  }
  if (fs::exists(name)) return distribution_from_json(read_json_file(name));
  throw InputError("unknown distribution '" + name + "' (use standard_normal or a JSON spec file)");
}

// JSON config keys mirror long flag names; flags given on the command line win.
void apply_config(CLI::App& sub, const nlohmann::json& cfg, const std::vector<std::string>& special) {
  if (!cfg.is_object()) throw InputError("config must be a JSON object");
  for (const auto& [key, val] : cfg.items()) {
    if (std::find(special.begin(), special.end(), key) != special.end()) continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) throw InputError("config: unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    auto as_text = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (val.is_array()) {
      for (const auto& item : val) opt->add_result(as_text(item));
    } else if (val.is_boolean()) {
      if (!val.get<bool>()) continue;
      opt->add_result("true");
    } else {
      opt->add_result(as_text(val));
    }
    opt->run_callback();
  }
}

SphericalCover cover_for(std::size_t d, std::optional<double> psi, const std::string& cover_file,
                         std::optional<std::uint64_t> seed) {
  if (!cover_file.empty()) {
    SphericalCover cover = cover_from_json(read_json_file(cover_file));
    if (cover.dimension() != d) throw InputError("cover dimension does not match the sample");
    return cover;
  }
  if (d == 1) return line_cover();
  if (!psi) throw InputError("this method needs --psi or --cover");
  if (d >= 4 && !seed) throw InputError("covers in d >= 4 use random centers; pass --seed");
  try {
    return build_cover(d, *psi, seed);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

// ---------------------------------------------------------------------------

struct DepthArgs {
  std::string method = "auto";
  std::string query;
  std::string sample;
  std::string dist;
  std::string dist_file;
  std::optional<std::size_t> d;
  std::optional<double> psi;
  std::string cover;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_depth(const DepthArgs& a) {
  const Point q = parse_point(a.query);
  const auto d = static_cast<std::size_t>(q.size());
  if (a.method == "population") {
    const DistributionSpec dist = resolve_distribution(a.dist.empty() ? "standard_normal" : a.dist, a.dist_file,
                                                       a.d ? a.d : std::optional<std::size_t>(d));
    if (dist.dimension() != d) throw InputError("query dimension does not match the distribution");
    emit(nlohmann::json{{"value", population_depth(dist, q)}}.dump() + "\n", a.out);
    return kOk;
  }
  if (a.sample.empty()) throw InputError("--sample is required for method " + a.method);
  const Sample s = resolve_sample(a.sample, d);
  if (s.dimension() != d) {
    throw InputError("query has dimension " + std::to_string(d) + " but the sample has " +
                     std::to_string(s.dimension()));
  }
  std::string method = a.method;
  if (method == "auto") method = d == 2 ? "exact2d" : "certified";

  nlohmann::json out;
  if (method == "1d") {
    if (d != 1) throw InputError("method 1d needs one-dimensional data");
    out = to_json(depth_1d(q[0], s));
  } else if (method == "exact2d") {
    if (d != 2) throw InputError("method exact2d needs planar data");
    out = to_json(depth_exact_2d(q, s));
  } else if (method == "brute") {
    out = to_json(depth_brute(q, s));
  } else if (method == "approx") {
    out = to_json(depth_approx(q, s, cover_for(d, a.psi, a.cover, a.seed)));
  } else if (method == "certified") {
    out = to_json(depth_certified(q, s, cover_for(d, a.psi, a.cover, a.seed)));
  } else {
    throw InputError("unknown method '" + method + "'");
  }
  emit(out.dump() + "\n", a.out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct CoverArgs {
  std::size_t d = 2;
  double psi = 0.1;
  std::optional<std::uint64_t> seed;
  bool stats = false;
  std::string out;
};

int cmd_cover(const CoverArgs& a) {
  if (a.d >= 3 && !a.seed) throw InputError("cover construction in d >= 3 is randomized; pass --seed");
  SphericalCover cover = [&] {
    try {
      return build_cover(a.d, a.psi, a.seed);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }();
  if (a.stats) {
    const CoveringCount lemma = covering_count(a.d, a.psi);
    emit(nlohmann::json{{"d", a.d},
                        {"psi", a.psi},
                        {"count", cover.size()},
                        {"lemma_exact_form", lemma.exact_form},
                        {"lemma_simplified", lemma.simplified}}
                 .dump() +
             "\n",
         a.out);
  } else {
    emit(to_json(cover).dump() + "\n", a.out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct BoundArgs {
  std::string kind;
  std::size_t n = 1000;
  double eps = 0.1;
  std::size_t d = 2;
  double lambda = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double lpi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double ltheta = 0.0;
  std::optional<double> r;
  std::optional<double> delta;
  bool sharp_2d = false;
  std::string sweep;
  std::string format = "json";
  std::string out;
};

template <typename T>
std::vector<T> parse_range(const std::string& text, const std::string& what) {
  // a..b[:step]
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw InputError("--sweep " + what + ": expected a..b[:step]");
  const auto colon = text.find(':', dots);
  const std::vector<double> lo = parse_number_list(text.substr(0, dots));
  const std::vector<double> hi = parse_number_list(text.substr(dots + 2, colon == std::string::npos ? std::string::npos
                                                                                                    : colon - dots - 2));
  if (lo.size() != 1 || hi.size() != 1 || hi[0] < lo[0]) throw InputError("--sweep " + what + ": bad range");
  double step = 0.0;
  if (colon != std::string::npos) {
    const std::vector<double> s = parse_number_list(text.substr(colon + 1));
    if (s.size() != 1 || !(s[0] > 0.0)) throw InputError("--sweep " + what + ": step must be positive");
    step = s[0];
  } else {
    step = std::is_integral_v<T> ? 1.0 : (hi[0] - lo[0]) / 10.0;
  }
  std::vector<T> out;
  for (std::size_t i = 0;; ++i) {
    const double v = lo[0] + static_cast<double>(i) * step;
    if (v > hi[0] * (1.0 + 1e-12) || (step == 0.0 && i > 0)) break;
    out.push_back(static_cast<T>(std::is_integral_v<T> ? std::llround(v) : v));
  }
  return out;
}

int cmd_bound(const BoundArgs& a) {
  if (a.kind.empty()) throw InputError("--kind is required");
  BoundKind kind;
  try {
    kind = parse_bound_kind(a.kind);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  BoundParams p;
  p.n = a.n;
  p.eps = a.eps;
  p.d = a.d;
  p.constants = DistributionConstants{a.lambda, a.c1, a.lpi, a.ltheta};
  p.c2 = a.c2;
  p.radius = a.r;
  p.delta = a.delta;
  p.sharp_2d = a.sharp_2d;
  if (kind == BoundKind::PropRDelta && (!p.radius || !p.delta) && a.sweep.empty()) {
    throw InputError("--kind prop-r-delta needs --r and --delta");
  }
  if (kind == BoundKind::CorDelta && !p.delta && a.sweep.empty()) throw InputError("--kind cor-delta needs --delta");

  if (a.sweep.empty()) {
    const BoundReport rep = [&] {
      try {
        return evaluate_bound(kind, p);
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
    }();
    if (a.format == "csv") {
      emit(sweep_csv({SweepRow{kind, p.n, p.eps, rep, std::nullopt}}), a.out);
    } else {
      emit(to_json(rep).dump(2) + "\n", a.out);
    }
    return kOk;
  }

  std::vector<std::size_t> ns{p.n};
  std::vector<double> epss{p.eps};
  const auto eq = a.sweep.find('=');
  if (eq == std::string::npos) throw InputError("--sweep expects n=a..b[:step] or eps=a..b[:step]");
  const std::string var = a.sweep.substr(0, eq);
  if (var == "n") {
    ns = parse_range<std::size_t>(a.sweep.substr(eq + 1), "n");
  } else if (var == "eps") {
    epss = parse_range<double>(a.sweep.substr(eq + 1), "eps");
  } else {
    throw InputError("--sweep variable must be n or eps");
  }
  try {
    emit(sweep_csv(run_bound_sweep({kind}, ns, epss, p)), a.out);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::string dist = "standard_normal";
  std::string dist_file;
  std::optional<std::size_t> d;
  std::size_t n = 100;
  double eps = 0.1;
  std::size_t trials = 100;
  std::optional<double> psi;
  std::string cover;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> kinds;
  std::string queries = "auto";
  double c2 = 1.0;
  bool sharp_2d = false;
  std::optional<double> r;
  std::optional<double> delta;
  std::size_t threads = 1;
  std::string out_dir = ".";
};

int cmd_experiment(const ExperimentArgs& a, const nlohmann::json& file_cfg) {
  if (!a.seed) throw InputError("experiment needs an explicit --seed");
  ExperimentConfig cfg;
  if (file_cfg.contains("dist") && file_cfg["dist"].is_object() && a.dist_file.empty()) {
    cfg.dist = distribution_from_json(file_cfg["dist"]);
  } else {
    cfg.dist = resolve_distribution(a.dist, a.dist_file, a.d ? a.d : std::optional<std::size_t>(2));
  }
  if (a.d && *a.d != cfg.dist.dimension()) throw InputError("--d does not match the distribution");
  cfg.n = a.n;
  cfg.eps = a.eps;
  cfg.trials = a.trials;
  cfg.psi = a.psi;
  cfg.seed = *a.seed;
  cfg.c2 = a.c2;
  cfg.sharp_2d = a.sharp_2d;
  cfg.radius = a.r;
  cfg.delta = a.delta;
  cfg.threads = a.threads;
  for (const auto& k : a.kinds) {
    try {
      cfg.kinds.push_back(parse_bound_kind(k));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  if (!a.cover.empty()) cfg.cover = cover_from_json(read_json_file(a.cover));
  if (file_cfg.contains("queries") && file_cfg["queries"].is_array()) {
    std::vector<Point> qs;
    for (const auto& q : file_cfg["queries"]) {
      const auto coords = q.get<std::vector<double>>();
      qs.push_back(Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size())));
    }
    cfg.queries = qs;
  } else if (a.queries != "auto") {
    std::vector<Point> qs;
    std::string rest = a.queries;
    std::size_t start = 0;
    // Points separated by ';', coordinates by ','.
    while (start <= rest.size()) {
      const auto end = rest.find(';', start);
      const std::string part = rest.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (!parse_number_list(part).empty()) qs.push_back(parse_point(part));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    cfg.queries = qs;
  }

  ExperimentResult result;
  try {
    result = run_deviation_experiment(cfg);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_file(dir / "results.csv", results_csv(result));
  write_file(dir / "summary.json", summary_json(cfg, result));
  write_file(dir / "plotdata.csv", plotdata_csv(cfg));
  std::cout << nlohmann::json{{"exceedance", result.exceedance},
                              {"validity_ok", result.validity_ok},
                              {"out_dir", dir.string()}}
                   .dump()
            << "\n";
  return result.validity_ok ? kOk : kValidityFailure;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string sample;
  std::string query;
  std::optional<std::size_t> ngon;
  std::string file;
  std::size_t trials = 100000;
  std::optional<std::uint64_t> seed;
};

int cmd_oracle_brute(const OracleArgs& a) {
  const Point q = parse_point(a.query);
  const Sample s = resolve_sample(a.sample, static_cast<std::size_t>(q.size()));
  if (s.dimension() != static_cast<std::size_t>(q.size())) throw InputError("query and sample dimensions differ");
  std::cout << to_json(depth_brute(q, s)).dump() << "\n";
  return kOk;
}

int cmd_oracle_subsets(const OracleArgs& a) {
  Sample s = [&] {
    if (a.ngon) return regular_polygon(*a.ngon);
    if (a.sample.empty()) throw InputError("oracle subsets needs --regular-ngon or --sample");
    return resolve_sample(a.sample, 2);
  }();
  try {
    std::cout << nlohmann::json{{"count", halfplane_subset_count(s)}, {"n", s.size()}}.dump() << "\n";
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return kOk;
}

int cmd_oracle_verify(const OracleArgs& a) {
  if (!a.seed) throw InputError("verify-cover samples random directions; pass --seed");
  const SphericalCover cover = cover_from_json(read_json_file(a.file));
  std::mt19937_64 rng(*a.seed);
  const CoverVerification v = [&] {
    try {
      return verify_cover(cover, a.trials, rng);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }();
  std::cout << nlohmann::json{{"max_gap", v.max_gap}, {"psi", cover.radius()}, {"pass", v.pass}, {"trials", v.trials}}
                   .dump()
            << "\n";
  return v.pass ? kOk : kValidityFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Halfspace depth, sphere covers, convergence bounds and Monte Carlo validation"};
  app.require_subcommand(1);

  DepthArgs depth;
  auto* depth_cmd = app.add_subcommand("depth", "Depth of a query point");
  depth_cmd->add_option("--method", depth.method, "auto, 1d, exact2d, brute, approx, certified, population")
      ->check(CLI::IsMember({"auto", "1d", "exact2d", "brute", "approx", "certified", "population"}));
  depth_cmd->add_option("--query", depth.query, "Query point, comma separated")->required();
  depth_cmd->add_option("--sample", depth.sample, "Sample file (.csv/.json) or inline numbers");
  depth_cmd->add_option("--dist", depth.dist, "standard_normal or a distribution JSON file");
  depth_cmd->add_option("--dist-file", depth.dist_file, "Distribution JSON file");
  depth_cmd->add_option("--d", depth.d, "Dimension for --dist standard_normal");
  depth_cmd->add_option("--psi", depth.psi, "Cover radius for approx/certified");
  depth_cmd->add_option("--cover", depth.cover, "Cover JSON file");
  depth_cmd->add_option("--seed", depth.seed, "Seed for randomized covers (d >= 4)");
  depth_cmd->add_option("--out", depth.out, "Output path (default stdout)");

  CoverArgs cover;
  auto* cover_cmd = app.add_subcommand("cover", "Build a sphere cover");
  cover_cmd->add_option("--d", cover.d, "Dimension")->required();
  cover_cmd->add_option("--psi", cover.psi, "Cover radius")->required();
  cover_cmd->add_option("--seed", cover.seed, "Seed (required for d >= 3)");
  cover_cmd->add_flag("--stats", cover.stats, "Report counts instead of the cover");
  cover_cmd->add_option("--out", cover.out, "Output path (default stdout)");

  BoundArgs bound;
  std::string bound_config;
  auto* bound_cmd = app.add_subcommand("bound", "Evaluate a convergence bound");
  bound_cmd->add_option("--config", bound_config, "JSON file mirroring the flags");
  bound_cmd->add_option("--kind", bound.kind, "vc1, vc2, dkw, prop-r-delta, cor-delta, theorem, bivariate");
  bound_cmd->add_option("--n", bound.n);
  bound_cmd->add_option("--eps", bound.eps);
  bound_cmd->add_option("--d", bound.d);
  bound_cmd->add_option("--lambda", bound.lambda);
  bound_cmd->add_option("--c1", bound.c1);
  bound_cmd->add_option("--c2", bound.c2);
  bound_cmd->add_option("--lpi", bound.lpi);
  bound_cmd->add_option("--ltheta", bound.ltheta);
  bound_cmd->add_option("--r", bound.r);
  bound_cmd->add_option("--delta", bound.delta);
  bound_cmd->add_flag("--sharp-2d", bound.sharp_2d, "Planar circle covering, exact tail and exact m(r)");
  bound_cmd->add_option("--sweep", bound.sweep, "n=a..b[:step] or eps=a..b[:step]; emits CSV");
  bound_cmd->add_option("--format", bound.format)->check(CLI::IsMember({"json", "csv"}));
  bound_cmd->add_option("--out", bound.out);

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo validation of the bounds");
  exp_cmd->add_option("--config", exp.config, "JSON file mirroring the flags");
  exp_cmd->add_option("--dist", exp.dist, "standard_normal or a distribution JSON file");
  exp_cmd->add_option("--dist-file", exp.dist_file);
  exp_cmd->add_option("--d", exp.d);
  exp_cmd->add_option("--n", exp.n);
  exp_cmd->add_option("--eps", exp.eps);
  exp_cmd->add_option("--trials", exp.trials);
  exp_cmd->add_option("--psi", exp.psi);
  exp_cmd->add_option("--cover", exp.cover, "Cover JSON file");
  exp_cmd->add_option("--seed", exp.seed);
  exp_cmd->add_option("--kinds", exp.kinds, "Bound kinds to compare")->delimiter(',');
  exp_cmd->add_option("--queries", exp.queries, "auto, or points 'x,y;x,y'");
  exp_cmd->add_option("--c2", exp.c2);
  exp_cmd->add_flag("--sharp-2d", exp.sharp_2d);
  exp_cmd->add_option("--r", exp.r);
  exp_cmd->add_option("--delta", exp.delta);
  exp_cmd->add_option("--threads", exp.threads);
  exp_cmd->add_option("--out-dir", exp.out_dir);

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force oracles for test harnesses");
  oracle_cmd->require_subcommand(1);
  auto* brute_cmd = oracle_cmd->add_subcommand("brute", "Exact depth by arrangement enumeration");
  brute_cmd->add_option("--sample", oracle.sample)->required();
  brute_cmd->add_option("--query", oracle.query)->required();
  auto* subsets_cmd = oracle_cmd->add_subcommand("subsets", "Count halfplane-cut subsets of a convex point set");
  subsets_cmd->add_option("--regular-ngon", oracle.ngon);
  subsets_cmd->add_option("--sample", oracle.sample);
  auto* verify_cmd = oracle_cmd->add_subcommand("verify-cover", "Statistically verify a cover");
  verify_cmd->add_option("--file", oracle.file)->required();
  verify_cmd->add_option("--trials", oracle.trials);
  verify_cmd->add_option("--seed", oracle.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*depth_cmd) return cmd_depth(depth);
    if (*cover_cmd) return cmd_cover(cover);
    if (*bound_cmd) {
      if (!bound_config.empty()) apply_config(*bound_cmd, read_json_file(bound_config), {});
      return cmd_bound(bound);
    }
    if (*exp_cmd) {
      nlohmann::json file_cfg = nlohmann::json::object();
      if (!exp.config.empty()) {
        file_cfg = read_json_file(exp.config);
        apply_config(*exp_cmd, file_cfg, {"dist", "queries"});
        if (file_cfg.contains("dist") && file_cfg["dist"].is_string() && exp_cmd->count("--dist") == 0) {
          exp.dist = file_cfg["dist"].get<std::string>();
        }
        if (file_cfg.contains("queries") && file_cfg["queries"].is_string() && exp_cmd->count("--queries") == 0) {
          exp.queries = file_cfg["queries"].get<std::string>();
        }
      }
      return cmd_experiment(exp, file_cfg);
    }
    if (*brute_cmd) return cmd_oracle_brute(oracle);
    if (*subsets_cmd) return cmd_oracle_subsets(oracle);
    if (*verify_cmd) return cmd_oracle_verify(oracle);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
