#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "hdepth/bounds.hpp"
#include "hdepth/geometry.hpp"
#include "hdepth/population_depth.hpp"
#include "hdepth/sample_depth.hpp"

namespace hdepth {

/// Malformed or unreadable user input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits; round-trips every double.
std::string format_double(double x);

/// One point per row, comma separated, no header. Errors name the row and column (1-based).
Sample parse_sample_csv(std::istream& in);
/// {"points": [[...], ...]}
Sample parse_sample_json(const nlohmann::json& j);
/// Dispatches on the extension: .json is JSON, anything else CSV.
Sample load_sample(const std::filesystem::path& path);

/// Numbers separated by commas, semicolons or whitespace.
std::vector<double> parse_number_list(const std::string& text);

nlohmann::json to_json(const SphericalCover& cover);
SphericalCover cover_from_json(const nlohmann::json& j);

/// Custom families have no serialized form and throw.
nlohmann::json to_json(const DistributionSpec& dist);
DistributionSpec distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DepthValue& v);
nlohmann::json to_json(const DepthInterval& v);
nlohmann::json to_json(const BoundReport& r);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace hdepth
