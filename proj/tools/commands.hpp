#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace otkit::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

struct CommandResult {
  nlohmann::json summary;
  int exit_code = kExitOk;
};

// Regularization: --eps (absolute) or --eps-rel (times the mean cost);
// neither means the geometry default.
struct EpsilonFlags {
  std::optional<double> eps;
  std::optional<double> eps_rel;
};

struct OutputFlags {
  // JSON summary path; empty means stdout.
  std::string out;
  std::string coupling_out;
};

struct LinConfig {
  // Either two point files or one cost-matrix file.
  std::vector<std::string> point_files;
  std::string cost_matrix_file;
  std::string a_file;
  std::string b_file;
  std::string cost = "sqeucl";
  EpsilonFlags eps;
  std::string solver = "sinkhorn";
  std::optional<int> rank;
  std::optional<double> threshold;
  std::optional<int> max_iters;
  std::uint64_t seed = 0;
  bool verify = false;
  OutputFlags output;
};

struct QuadConfig {
  std::vector<std::string> point_files;
  std::string a_file;
  std::string b_file;
  std::string cost = "sqeucl";
  EpsilonFlags eps;
  std::optional<int> outer_iters;
  std::optional<double> threshold;
  std::optional<int> max_iters;
  bool verify = false;
  OutputFlags output;
  std::string correspondence_out;
};

struct BarycenterConfig {
  std::vector<std::string> histogram_files;
  // Support points (N x d) or, in grid mode, one coordinate file per axis.
  std::string support_file;
  std::vector<std::string> grid_files;
  std::string weights;
  std::string cost = "sqeucl";
  EpsilonFlags eps;
  std::optional<double> threshold;
  std::optional<int> max_iters;
  OutputFlags output;
  std::string barycenter_out;
};

struct SoftSortConfig {
  // Inline list ("1,5,4") or a one-column file.
  std::string values;
  std::string values_file;
  double eps = 1e-2;
  std::optional<int> num_targets;
  std::string eps_sweep;
  OutputFlags output;
  std::string sweep_out;
};

struct GmmConfig {
  std::vector<std::string> gmm_files;
  std::optional<double> eps_rel;
  OutputFlags output;
};

CommandResult run_lin(const LinConfig& cfg);
CommandResult run_quad(const QuadConfig& cfg);
CommandResult run_barycenter(const BarycenterConfig& cfg);
CommandResult run_softsort(const SoftSortConfig& cfg);
CommandResult run_gmm(const GmmConfig& cfg);

// Writes the summary to cfg.out (atomically) or stdout.
void emit_summary(const nlohmann::json& summary, const OutputFlags& output);

}  // namespace otkit::cli
