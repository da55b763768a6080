#include "hdepth/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "hdepth/detail/covering.hpp"

namespace hdepth {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kDirectionNudge = 1e-7;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

void finalize(BoundReport& r, double log_dev) {
  r.log_deviation_bound = log_dev;
  r.deviation_bound = std::exp(log_dev);
  r.value = -std::expm1(log_dev);
  r.vacuous = !(r.value > 0.0);
  r.applicable = std::all_of(r.preconditions.begin(), r.preconditions.end(),
                             [](const Precondition& c) { return c.satisfied; });
}

void add_less(BoundReport& r, std::string name, double lhs, double rhs) {
  r.preconditions.push_back({std::move(name), lhs < rhs, lhs, rhs});
}

void add_eps_range(BoundReport& r, double eps) {
  r.preconditions.push_back({"eps_in_(0,1]", eps > 0.0 && eps <= 1.0, eps, 1.0});
}

void require_multivariate(const BoundParams& p, const char* what) {
  if (p.d < 2) throw std::invalid_argument(std::string(what) + ": requires d >= 2");
  if (p.n < 1) throw std::invalid_argument(std::string(what) + ": requires n >= 1");
}

bool sharp(const BoundParams& p) { return p.sharp_2d && p.d == 2; }

// Log of the number of cover balls of radius psi, generic or planar.
double log_cover_count(const BoundParams& p, double psi) {
  if (sharp(p)) return std::log(std::numbers::pi / psi + 1.0);
  return detail::log_covering_count_simplified(p.d, psi, p.c2);
}

void record_constants(BoundReport& r, const BoundParams& p) {
  r.intermediates["n"] = static_cast<double>(p.n);
  r.intermediates["eps"] = p.eps;
  r.intermediates["d"] = static_cast<double>(p.d);
  r.intermediates["lambda"] = p.constants.lambda;
  r.intermediates["C1"] = p.constants.c1;
  r.intermediates["C2"] = p.c2;
  r.intermediates["Lpi"] = p.constants.l_pi;
  r.intermediates["Ltheta"] = p.constants.l_theta;
  r.intermediates["sharp_2d"] = sharp(p) ? 1.0 : 0.0;
}

double log_m(double r, const BoundParams& p) {
  if (sharp(p)) return std::log(r * r - r + 2.0);
  return log_m_upper(r, p.d);
}

BoundReport vc_bound(BoundKind kind, const BoundParams& p, double r, double exponent, double degree) {
  if (p.n < 1) throw std::invalid_argument("vc bound: requires n >= 1");
  BoundReport rep;
  rep.kind = kind;
  record_constants(rep, p);
  add_eps_range(rep, p.eps);
  const double lm = log_m(r, p);
  rep.intermediates["m"] = std::exp(lm);
  rep.intermediates["log_m"] = lm;
  rep.intermediates["coefficient"] = 4.0 * std::exp(lm);
  rep.intermediates["exponent"] = exponent;
  rep.intermediates["coefficient_degree"] = degree;
  rep.caveats.push_back("holds for n sufficiently large; the threshold is not quantified");
  finalize(rep, std::log(4.0) + lm + exponent);
  return rep;
}

// Shared tail of the R, delta bound: C1 n R^{power} exp(-lambda R^2 / 2).
double log_tail(const BoundParams& p, double radius) {
  const double power = sharp(p) ? 0.0 : 3.0 * static_cast<double>(p.d) - 5.0;
  return safe_log(p.constants.c1) + std::log(static_cast<double>(p.n)) + power * std::log(radius) -
         0.5 * p.constants.lambda * radius * radius;
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Vc1:
      return "vc1";
    case BoundKind::Vc2:
      return "vc2";
    case BoundKind::Dkw:
      return "dkw";
    case BoundKind::PropRDelta:
      return "prop-r-delta";
    case BoundKind::CorDelta:
      return "cor-delta";
    case BoundKind::Theorem:
      return "theorem";
    case BoundKind::Bivariate:
      return "bivariate";
  }
  return "unknown";
}

BoundKind parse_bound_kind(const std::string& name) {
  for (BoundKind k : {BoundKind::Vc1, BoundKind::Vc2, BoundKind::Dkw, BoundKind::PropRDelta, BoundKind::CorDelta,
                      BoundKind::Theorem, BoundKind::Bivariate}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown bound kind '" + name + "'");
}

double log_m_upper(double r, std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::log(1.5) + (dd + 1.0) * std::log(r) - std::lgamma(dd + 2.0);
}

double m_upper(double r, std::size_t d) {
  const double dd = static_cast<double>(d);
  const double direct = 1.5 * std::pow(r, dd + 1.0) / std::tgamma(dd + 2.0);
  return std::isfinite(direct) ? direct : std::exp(log_m_upper(r, d));
}

std::uint64_t m_exact_2d(std::uint64_t r) {
  if (r < 1) throw std::invalid_argument("m_exact_2d: r must be >= 1");
  if (r > (std::uint64_t{1} << 32) - 1) throw std::overflow_error("m_exact_2d: r^2 overflows 64 bits");
  return r * r - r + 2;
}

Sample regular_polygon(std::size_t r) {
  if (r < 1) throw std::invalid_argument("regular_polygon: need at least one vertex");
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(r), 2);
  for (std::size_t i = 0; i < r; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(r);
    rows(static_cast<Eigen::Index>(i), 0) = std::cos(a);
    rows(static_cast<Eigen::Index>(i), 1) = std::sin(a);
  }
  return Sample(std::move(rows));
}

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

// Closed containment of p in the convex hull of the other points, via
// segments and triangles.
bool in_hull_of_others(const std::vector<Eigen::Vector2d>& pts, std::size_t skip, double tol) {
  const Eigen::Vector2d& p = pts[skip];
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip) continue;
    if ((pts[i] - p).norm() <= tol) return true;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == skip) continue;
      const double c = cross(pts[i], pts[j], p);
      if (std::abs(c) <= tol && (p - pts[i]).dot(p - pts[j]) <= tol) return true;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (k == skip) continue;
        const double c1 = cross(pts[i], pts[j], p);
        const double c2 = cross(pts[j], pts[k], p);
        const double c3 = cross(pts[k], pts[i], p);
        const bool nonneg = c1 >= -tol && c2 >= -tol && c3 >= -tol;
        const bool nonpos = c1 <= tol && c2 <= tol && c3 <= tol;
        if (nonneg || nonpos) {
          if (std::abs(cross(pts[i], pts[j], pts[k])) > tol) return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

std::uint64_t halfplane_subset_count(const Sample& points) {
  if (points.dimension() != 2) throw std::invalid_argument("halfplane_subset_count: points must be planar");
  const std::size_t n = points.size();
  if (n > 63) throw std::invalid_argument("halfplane_subset_count: at most 63 points supported");
  std::vector<Eigen::Vector2d> pts(n);
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = points.point(i);
    scale = std::max(scale, pts[i].norm());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (in_hull_of_others(pts, i, 1e-12 * scale * scale)) {
      throw std::invalid_argument("halfplane_subset_count: point " + std::to_string(i) +
                                  " is not in convex position");
    }
  }

  // The projection order only changes where two points project equally, i.e.
  // at normals of point pairs; nudging each such normal both ways visits
  // every arc of constant order.
  std::vector<double> angles{0.0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Eigen::Vector2d e = pts[j] - pts[i];
      const double base = std::atan2(e.y(), e.x()) + 0.5 * std::numbers::pi;
      for (double flip : {0.0, std::numbers::pi}) {
        angles.push_back(base + flip + kDirectionNudge);
        angles.push_back(base + flip - kDirectionNudge);
      }
    }
  }

  std::set<std::uint64_t> subsets;
  std::vector<std::pair<double, std::size_t>> order(n);
  for (double a : angles) {
    const Eigen::Vector2d u(std::cos(a), std::sin(a));
    for (std::size_t i = 0; i < n; ++i) order[i] = {pts[i].dot(u), i};
    std::sort(order.begin(), order.end());
    std::uint64_t mask = 0;
    subsets.insert(mask);
    for (std::size_t k = 0; k < n; ++k) {
      mask |= std::uint64_t{1} << order[k].second;
      // A threshold separates the prefix only between distinct projections.
      if (k + 1 == n || order[k + 1].first > order[k].first) subsets.insert(mask);
    }
  }
  return subsets.size();
}

BoundReport vc_bound_1(const BoundParams& p) {
  const double n = static_cast<double>(p.n);
  const double degree = sharp(p) ? 2.0 : static_cast<double>(p.d) + 1.0;
  return vc_bound(BoundKind::Vc1, p, 2.0 * n, -n * p.eps * p.eps / 8.0, degree);
}

BoundReport vc_bound_2(const BoundParams& p) {
  const double n = static_cast<double>(p.n);
  const double degree = sharp(p) ? 4.0 : 2.0 * static_cast<double>(p.d) + 2.0;
  return vc_bound(BoundKind::Vc2, p, n * n, -2.0 * n * p.eps * p.eps, degree);
}

double dkw_bound(std::size_t n, double eps) { return 2.0 * std::exp(-2.0 * static_cast<double>(n) * eps * eps); }

BoundReport dkw_report(const BoundParams& p) {
  if (p.n < 1) throw std::invalid_argument("dkw: requires n >= 1");
  BoundReport rep;
  rep.kind = BoundKind::Dkw;
  record_constants(rep, p);
  add_eps_range(rep, p.eps);
  rep.preconditions.push_back({"one_dimensional", p.d == 1, static_cast<double>(p.d), 1.0});
  const double exponent = -2.0 * static_cast<double>(p.n) * p.eps * p.eps;
  rep.intermediates["exponent"] = exponent;
  rep.intermediates["coefficient"] = 2.0;
  if (p.d != 1) rep.caveats.push_back("DKW bounds a single direction; not a bound on the sup over directions");
  finalize(rep, kLn2 + exponent);
  return rep;
}

CoveringCount covering_count(std::size_t d, double psi, double c2) {
  if (d < 2) throw std::invalid_argument("covering_count: requires d >= 2");
  if (!(psi > 0.0) || !(psi < max_cover_radius(d))) {
    throw std::invalid_argument("covering_count: psi must lie in (0, arccos(d^-1/2))");
  }
  return CoveringCount{detail::covering_count_exact_form(d, psi, c2), detail::covering_count_simplified(d, psi, c2)};
}

BoundReport bound_prop_R_delta(const BoundParams& p) {
  require_multivariate(p, "prop-r-delta");
  if (!p.radius || !p.delta) throw std::invalid_argument("prop-r-delta: requires R and delta");
  const double n = static_cast<double>(p.n);
  const double eps = p.eps;
  const double delta = *p.delta;
  const double radius = *p.radius;
  const auto& k = p.constants;

  BoundReport rep;
  rep.kind = BoundKind::PropRDelta;
  record_constants(rep, p);
  add_eps_range(rep, eps);
  const double psi = eps * delta / ((1.0 + delta) * (k.l_theta + k.l_pi * radius));
  add_less(rep, "cover_radius", psi, max_cover_radius(p.d));
  rep.preconditions.push_back({"R_gt_1", radius > 1.0, radius, 1.0});

  const double exponent = -2.0 * n * eps * eps / ((1.0 + delta) * (1.0 + delta));
  const double log_count = log_cover_count(p, psi);
  const double log_cover_term = kLn2 + log_count + exponent;
  const double log_tail_term = log_tail(p, radius);

  rep.intermediates["R"] = radius;
  rep.intermediates["delta"] = delta;
  rep.intermediates["psi"] = psi;
  rep.intermediates["covering_count"] = std::exp(log_count);
  rep.intermediates["exponent"] = exponent;
  rep.intermediates["covering_term"] = std::exp(log_cover_term);
  rep.intermediates["tail_term"] = std::exp(log_tail_term);
  rep.intermediates["log_covering_term"] = log_cover_term;
  rep.intermediates["log_tail_term"] = log_tail_term;
  finalize(rep, log_add(log_cover_term, log_tail_term));
  return rep;
}

BoundReport bound_cor_delta(const BoundParams& p) {
  require_multivariate(p, "cor-delta");
  if (!p.delta) throw std::invalid_argument("cor-delta: requires delta");
  const double n = static_cast<double>(p.n);
  const double dd = static_cast<double>(p.d);
  const double eps = p.eps;
  const double delta = *p.delta;
  const auto& k = p.constants;
  const double sl = std::sqrt(k.lambda);
  const double radius = eps * 2.0 * std::sqrt(n) / (sl * (1.0 + delta));

  BoundReport rep;
  rep.kind = BoundKind::CorDelta;
  record_constants(rep, p);
  add_eps_range(rep, eps);
  const double spread = k.l_theta * sl * (1.0 + delta) + 2.0 * k.l_pi * std::sqrt(n) * eps;
  const double psi = eps * delta * sl / spread;
  add_less(rep, "cover_radius", psi, max_cover_radius(p.d));
  add_less(rep, "R_gt_1", sl * (1.0 + delta), 2.0 * eps * std::sqrt(n));

  const double log_cover_coef = sharp(p) ? kLn2 + std::log(std::numbers::pi / psi + 1.0)
                                         : kLn2 + std::log(p.c2) +
                                               (dd - 1.0) * (std::log(spread) + 0.5 * std::log(dd) -
                                                             std::log(eps * delta * sl)) +
                                               1.5 * std::log(dd - 1.0) + std::log(std::log(dd));
  // C1 (2 eps / (sqrt(lambda)(1+delta)))^{3d-5} n^{3(d-1)/2}: the tail of the
  // R, delta bound with R substituted.
  const double log_tail_coef =
      sharp(p) ? safe_log(k.c1) + std::log(n)
               : safe_log(k.c1) + (3.0 * dd - 5.0) * std::log(2.0 * eps / (sl * (1.0 + delta))) +
                     1.5 * (dd - 1.0) * std::log(n);
  const double exponent = -2.0 * n * eps * eps / ((1.0 + delta) * (1.0 + delta));

  rep.intermediates["R"] = radius;
  rep.intermediates["delta"] = delta;
  rep.intermediates["psi"] = psi;
  rep.intermediates["exponent"] = exponent;
  rep.intermediates["covering_coefficient"] = std::exp(log_cover_coef);
  rep.intermediates["tail_coefficient"] = std::exp(log_tail_coef);
  rep.intermediates["coefficient"] = std::exp(log_add(log_cover_coef, log_tail_coef));
  finalize(rep, log_add(log_cover_coef, log_tail_coef) + exponent);
  return rep;
}

BoundReport bound_theorem_final(const BoundParams& p) {
  require_multivariate(p, "theorem");
  const double n = static_cast<double>(p.n);
  const double dd = static_cast<double>(p.d);
  const double eps = p.eps;
  const auto& k = p.constants;
  const double sl = std::sqrt(k.lambda);
  const double n32 = std::pow(n, 1.5);

  BoundReport rep;
  rep.kind = BoundKind::Theorem;
  record_constants(rep, p);
  add_eps_range(rep, eps);
  const double psi = eps / ((n + 1.0) * (k.l_theta + k.l_pi * eps * 2.0 * n32 / (sl * (n + 1.0))));
  add_less(rep, "cover_radius", psi, max_cover_radius(p.d));
  add_less(rep, "R_gt_1", sl * (n + 1.0), 2.0 * eps * n32);

  const double spread = k.l_theta * sl * (n + 1.0) + 2.0 * k.l_pi * n32 * eps;
  const double log_cover_coef =
      sharp(p) ? kLn2 + std::log(std::numbers::pi / psi + 1.0)
               : kLn2 + std::log(p.c2) + (dd - 1.0) * (std::log(spread) + 0.5 * std::log(dd) - std::log(eps * sl)) +
                     1.5 * std::log(dd - 1.0) + std::log(std::log(dd));
  const double log_tail_coef =
      sharp(p) ? safe_log(k.c1) + std::log(n)
               : safe_log(k.c1) + (3.0 * dd - 5.0) * std::log(2.0 * eps * n / (sl * (n + 1.0))) +
                     1.5 * (dd - 1.0) * std::log(n);
  const double log_coef = log_add(log_cover_coef, log_tail_coef);
  const double exponent = 4.0 - 2.0 * n * eps * eps;

  rep.intermediates["delta"] = 1.0 / n;
  rep.intermediates["R"] = 2.0 * eps * n32 / (sl * (n + 1.0));
  rep.intermediates["psi"] = psi;
  rep.intermediates["exponent"] = exponent;
  rep.intermediates["covering_coefficient"] = std::exp(log_cover_coef);
  rep.intermediates["tail_coefficient"] = std::exp(log_tail_coef);
  rep.intermediates["coefficient"] = std::exp(log_coef);
  rep.intermediates["coefficient_degree"] = 1.5 * (dd - 1.0);
  // Coefficient of n^{3(d-1)/2} e^{-2 n eps^2}.
  rep.intermediates["effective_C"] = std::exp(log_coef + 4.0 - 1.5 * (dd - 1.0) * std::log(n));

  BoundParams at_delta = p;
  at_delta.delta = 1.0 / n;
  rep.intermediates["corollary_value_at_delta_1_over_n"] = bound_cor_delta(at_delta).value;
  if (!sharp(p)) rep.caveats.push_back("C2 is not calibrated; value scales with the supplied C2");
  finalize(rep, log_coef + exponent);
  return rep;
}

double bound_bivariate_normal(std::size_t n, double eps) {
  const double nn = static_cast<double>(n);
  const double coef = 2.0 * std::sqrt(2.0 * std::numbers::pi) * std::pow(nn, 1.5) + nn + 2.0;
  return -std::expm1(std::log(coef) + 4.0 - 2.0 * nn * eps * eps);
}

BoundReport bivariate_report(const BoundParams& p) {
  if (p.n < 1) throw std::invalid_argument("bivariate: requires n >= 1");
  BoundReport rep;
  rep.kind = BoundKind::Bivariate;
  record_constants(rep, p);
  add_eps_range(rep, p.eps);
  const double nn = static_cast<double>(p.n);
  const double coef = 2.0 * std::sqrt(2.0 * std::numbers::pi) * std::pow(nn, 1.5) + nn + 2.0;
  const double exponent = 4.0 - 2.0 * nn * p.eps * p.eps;
  rep.intermediates["coefficient"] = coef;
  rep.intermediates["exponent"] = exponent;
  finalize(rep, std::log(coef) + exponent);
  rep.value = bound_bivariate_normal(p.n, p.eps);
  return rep;
}

double improvement_exponent(std::size_t d) {
  const double dd = static_cast<double>(d);
  return (2.0 * dd + 2.0) - 1.5 * (dd - 1.0);
}

double improvement_factor(std::size_t n, std::size_t d) {
  return std::pow(static_cast<double>(n), improvement_exponent(d));
}

BoundReport evaluate_bound(BoundKind kind, const BoundParams& p) {
  switch (kind) {
    case BoundKind::Vc1:
      return vc_bound_1(p);
    case BoundKind::Vc2:
      return vc_bound_2(p);
    case BoundKind::Dkw:
      return dkw_report(p);
    case BoundKind::PropRDelta:
      return bound_prop_R_delta(p);
    case BoundKind::CorDelta:
      return bound_cor_delta(p);
    case BoundKind::Theorem:
      return bound_theorem_final(p);
    case BoundKind::Bivariate:
      return bivariate_report(p);
  }
  throw std::logic_error("evaluate_bound: unknown kind");
}

std::optional<std::size_t> first_nonvacuous_n(BoundKind kind, BoundParams p, std::size_t lo, std::size_t hi) {
  auto ok = [&](std::size_t n) {
    p.n = n;
    return !evaluate_bound(kind, p).vacuous;
  };
  if (lo < 1) lo = 1;
  if (!ok(hi)) return std::nullopt;
  if (ok(lo)) return lo;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace hdepth
