#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracslip/geometry.hpp"
#include "fracslip/saddle_solver.hpp"
#include "fracslip/scaling.hpp"

namespace fracslip {

struct DNSOptions {
  PicardOptions picard;
  bool convection = true;
  bool allow_out_of_hypothesis = false;
};

struct DNSSolution {
  StaggeredField field;
  ScalingParams params;
  GridDomain domain;
  SolveStats stats;
};

/// Forcing F e1 on the u-rows above Sigma (F/2 on the Sigma row itself), viscosity eps^gamma,
/// zero-mean pressure over the fracture.
SaddleProblem dns_problem(const ScalingParams& p, const GridDomain& dom, bool convection);

/// Throws HypothesisViolated unless (H1)-(H3) hold or the override is set; GridMismatch when the
/// domain was built for other parameters; solver errors propagate.
DNSSolution run_dns(const ScalingParams& p, const GridDomain& dom, const DNSOptions& options = {});

struct InterfaceTrace {
  std::vector<double> slip_per_period;   ///< period means of v1 on Sigma
  std::vector<double> shear_per_period;  ///< period means of d v1 / d x2 from the fracture side
  double slip_average = 0.0;
  double shear_average = 0.0;
};

/// One-sided second-order shear (-3 u0 + 4 u1 - u2) / (2h) from the Sigma row and the two rows above.
InterfaceTrace interface_trace(const StaggeredField& field, const GridDomain& dom);

/// Mean of v1 over the fracture (rows above Sigma, Sigma row at half weight).
double fracture_mean_velocity(const StaggeredField& field, const GridDomain& dom);

/// Cache key: SHA-256 of the canonical description of geometry, parameters, resolution and solver.
std::string dns_cache_key(const ShapeSpec& shape, const ScalingParams& p, const GridDomain& dom,
                          const DNSOptions& options);

/// Append-only snapshot cache: <key>.bin (u, v, p as little-endian doubles) and <key>.json
/// (grid, params, stats, checksum). Writes go to a temporary file and are renamed into place.
void cache_store(const std::filesystem::path& dir, const std::string& key, const DNSSolution& sol,
                 const nlohmann::json& meta);

/// Returns the cached field when both files exist and the checksum matches; nullopt otherwise.
std::optional<std::pair<StaggeredField, SolveStats>> cache_load(const std::filesystem::path& dir,
                                                                const std::string& key,
                                                                const GridDomain& dom);

/// Atomic text write: temporary file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace fracslip
