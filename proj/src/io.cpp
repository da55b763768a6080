#include "hdepth/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hdepth {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

Point to_point(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a nonempty array of numbers");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(what + ": entry " + std::to_string(i) + " is not a number");
    p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return p;
}

nlohmann::json point_json(const Point& p) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(p[i]);
  return out;
}

// JSON has no infinities; emit null for them.
nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

template <typename T>
T require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Sample parse_sample_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string field;
    std::size_t col = 0;
    while (std::getline(ss, field, ',')) {
      ++col;
      double v = 0.0;
      const std::string token = trim(field);
      if (!parse_double(token, v)) {
        throw InputError("row " + std::to_string(row) + ", column " + std::to_string(col) + ": cannot parse '" +
                         token + "' as a number");
      }
      values.push_back(v);
    }
    if (!line.empty() && line.back() == ',') {
      throw InputError("row " + std::to_string(row) + ", column " + std::to_string(col + 1) + ": empty field");
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw InputError("row " + std::to_string(row) + ": expected " + std::to_string(rows.front().size()) +
                       " columns, found " + std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputError("sample has no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return Sample(std::move(m));
}

Sample parse_sample_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw InputError("sample JSON must be an object with a \"points\" array");
  }
  std::vector<Point> points;
  for (std::size_t i = 0; i < j["points"].size(); ++i) {
    points.push_back(to_point(j["points"][i], "point " + std::to_string(i)));
  }
  if (points.empty()) throw InputError("sample has no points");
  try {
    return Sample::from_points(points);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

Sample load_sample(const std::filesystem::path& path) {
  if (path.extension() == ".json") return parse_sample_json(read_json_file(path));
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return parse_sample_csv(in);
  } catch (const InputError& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::size_t index = 0;
  auto flush = [&] {
    if (token.empty()) return;
    ++index;
    double v = 0.0;
    if (!parse_double(token, v)) {
      throw InputError("entry " + std::to_string(index) + ": cannot parse '" + token + "' as a number");
    }
    out.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ';' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

nlohmann::json to_json(const SphericalCover& cover) {
  nlohmann::json centers = nlohmann::json::array();
  for (const auto& c : cover.centers()) centers.push_back(point_json(c.coordinates()));
  return {{"d", cover.dimension()}, {"psi", cover.radius()}, {"centers", centers}};
}

SphericalCover cover_from_json(const nlohmann::json& j) {
  const auto d = require<std::size_t>(j, "d");
  const auto psi = require<double>(j, "psi");
  if (!j.contains("centers") || !j["centers"].is_array()) throw InputError("cover JSON needs a \"centers\" array");
  std::vector<Direction> centers;
  try {
    for (std::size_t i = 0; i < j["centers"].size(); ++i) {
      const Point p = to_point(j["centers"][i], "center " + std::to_string(i));
      // Serialized unit vectors lose at most an ulp per coordinate.
      centers.push_back(Direction::normalized(p));
      if (std::abs(p.norm() - 1.0) > 1e-9) throw InputError("center " + std::to_string(i) + " is not a unit vector");
    }
    return SphericalCover(d, psi, std::move(centers));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

nlohmann::json to_json(const DistributionSpec& dist) {
  if (dist.family() == Family::Custom) {
    throw std::invalid_argument("custom distribution '" + dist.name() + "' cannot be serialized");
  }
  nlohmann::json sigma = nlohmann::json::array();
  for (Eigen::Index r = 0; r < dist.sigma().rows(); ++r) sigma.push_back(point_json(dist.sigma().row(r).transpose()));
  const auto& k = dist.constants();
  return {{"family", to_string(dist.family())},
          {"d", dist.dimension()},
          {"mu", point_json(dist.mu())},
          {"sigma", sigma},
          {"lambda", k.lambda},
          {"C1", k.c1},
          {"Lpi", k.l_pi},
          {"Ltheta", k.l_theta}};
}

DistributionSpec distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("distribution JSON must be an object");
  const auto family = require<std::string>(j, "family");
  try {
    DistributionSpec spec = [&] {
      if (family == "standard_normal") {
        return DistributionSpec::standard_normal(require<std::size_t>(j, "d"), j.value("C1", 1.0));
      }
      if (family == "elliptical_normal") {
        const Point mu = to_point(j.at("mu"), "mu");
        const auto& rows = j.at("sigma");
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(mu.size())) {
          throw InputError("sigma must be a d x d array");
        }
        Eigen::MatrixXd sigma(mu.size(), mu.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const Point row = to_point(rows[r], "sigma row " + std::to_string(r));
          if (row.size() != mu.size()) throw InputError("sigma must be a d x d array");
          sigma.row(static_cast<Eigen::Index>(r)) = row.transpose();
        }
        if (j.contains("d") && j["d"].get<std::size_t>() != static_cast<std::size_t>(mu.size())) {
          throw InputError("d does not match the length of mu");
        }
        return DistributionSpec::elliptical_normal(mu, sigma, j.value("C1", 1.0));
      }
      throw InputError("unknown distribution family '" + family + "'");
    }();
    DistributionConstants k = spec.constants();
    k.lambda = j.value("lambda", k.lambda);
    k.c1 = j.value("C1", k.c1);
    k.l_pi = j.value("Lpi", k.l_pi);
    k.l_theta = j.value("Ltheta", k.l_theta);
    return spec.with_constants(k);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(e.what());
  }
}

nlohmann::json to_json(const DepthValue& v) { return {{"count", v.count}, {"n", v.n}, {"value", v.value()}}; }

nlohmann::json to_json(const DepthInterval& v) {
  return {{"lower", v.lower}, {"upper", v.upper}, {"psi", v.psi}, {"R", v.radius}};
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json pre = nlohmann::json::array();
  for (const auto& c : r.preconditions) {
    pre.push_back({{"name", c.name}, {"satisfied", c.satisfied}, {"lhs", number_or_null(c.lhs)},
                   {"rhs", number_or_null(c.rhs)}});
  }
  nlohmann::json inter = nlohmann::json::object();
  for (const auto& [k, v] : r.intermediates) inter[k] = number_or_null(v);
  return {{"kind", to_string(r.kind)},
          {"value", number_or_null(r.value)},
          {"deviation_bound", number_or_null(r.deviation_bound)},
          {"log_deviation_bound", number_or_null(r.log_deviation_bound)},
          {"vacuous", r.vacuous},
          {"applicable", r.applicable},
          {"preconditions", pre},
          {"intermediates", inter},
          {"caveats", r.caveats}};
}

}  // namespace hdepth
