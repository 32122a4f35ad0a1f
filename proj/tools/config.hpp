#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace alflab::cli {

/// Parsed and validated experiment configuration. Key-value text with INI-style
/// sections; unknown keys and duplicates are rejected with line numbers.
struct ExperimentConfig {
  std::string subcommand;

  // [metric] / [reference]
  std::string metric_kind = "kerr";
  std::map<std::string, double> metric_params;
  std::string reference = "model";  // model | self | flat
  double reference_L = 0;           // flat reference fiber length (0: match metric)

  // [numeric]
  int grid = 512;
  int ntheta = 48;
  double r_out = 120.0;
  double tol = 1e-8;
  std::vector<double> radii;
  double tau = 1.0;
  int k = 0;
  double alpha = 0.5;
  double point_r = 0;      // 0: sample-box midpoint
  double point_theta = 0;
  double s = 0.01;
  std::vector<double> s_values;
  double T = 0.2;
  double dt = 0;
  int jobs = 1;
  bool ray = false;

  // [output]
  std::string output_prefix = "alflab_out";
  std::uint64_t seed = 1;
};

struct ParseError {
  int line = 0;
  std::string message;
};

/// Parses config text. Returns the config or a line-numbered error.
/// The ALF_LAB_SEED environment variable overrides the config seed.
std::optional<ExperimentConfig> parse_config(const std::string& text, ParseError* err);

}  // namespace alflab::cli
