#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "otkit/gaussian_mixture.hpp"

namespace otkit::cli {

// Malformed or inconsistent input files and flags (exit code 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Comma-separated numbers, one row per line. '#' starts a comment; blank
// lines are skipped. Every row must have the same length.
Matrix parse_csv(std::string_view text, const std::string& origin = "<input>");
Matrix read_csv(const std::filesystem::path& path);

// A single column or a single row, flattened.
Vector read_vector(const std::filesystem::path& path);

// "1,5,4" or "1 5 4"
Vector parse_inline_list(std::string_view text);

// Weights within 1e-6 of the simplex are rescaled onto it (with a warning);
// anything further off, or negative, is rejected.
Vector normalize_weights(Vector w, const std::string& what);

// Full round-trip precision.
std::string format_csv(const Matrix& m);

// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// {"weights": [...], "means": [[...], ...], "covs": [[[...], ...], ...]}
GaussianMixture parse_gmm(const nlohmann::json& doc);
GaussianMixture read_gmm(const std::filesystem::path& path);

}  // namespace otkit::cli
