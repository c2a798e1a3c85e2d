#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracslip/geometry.hpp"
#include "fracslip/scaling.hpp"

namespace fracslip {

/// One (delta, gamma) family; the eta parametrisation fills both.
struct ParameterPoint {
  std::optional<double> eta;
  double delta = 0.0;
  double gamma = 0.0;

  ScalingParams at(double epsilon, double F) const;
  std::string label() const;
};

struct RunConfig {
  // geometry
  ShapeSpec shape;
  int cells_per_period = 32;
  int slab_rows_below = 5;
  double slab_height_above = 3.0;

  // parameters
  std::vector<ParameterPoint> points;
  std::vector<double> epsilons;
  std::vector<double> forces;
  double rate_force = 1.0;  ///< F used for the error-norm sweep
  Order1Sign order1_sign = Order1Sign::Derived;

  // solver
  double picard_tolerance = 1e-10;
  double picard_damping = 1.0;
  int picard_max_iterations = 200;
  double truncation_tolerance = 1e-5;

  // output
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path output_dir = "results";

  // flags
  bool allow_out_of_hypothesis = false;
  bool skip_dns = false;
  bool refine_check = false;

  /// Canonical form of everything that influences computed numbers. Output locations and flags that
  /// only change how results are obtained (skip_dns, refine_check) are excluded.
  nlohmann::json physics_json() const;
  /// SHA-256 of physics_json().
  std::string hash() const;
  nlohmann::json to_json() const;
};

/// Parses and validates a YAML config. Unknown keys, wrong types and out-of-range values throw
/// ConfigError with "<file>:<line>:<column>: ..." anchoring. Relative output paths resolve against the
/// working directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& source_name = "<config>");

}  // namespace fracslip
