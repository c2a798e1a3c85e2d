#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracslip/boundary_layer.hpp"
#include "fracslip/config.hpp"
#include "fracslip/error_analysis.hpp"

namespace fracslip {

struct CellStage {
  std::optional<UnitCell> cell;
  std::optional<BLSlab> slab;
  std::optional<BoundaryLayerResult> first;
  std::optional<BoundaryLayerResult> second;
  TruncationReport truncation;
  nlohmann::json constants;  ///< constants_json plus truncation and the dual-identity verdict
};

/// Solves both boundary layers and the truncation study. With refine_check the layers are re-solved at
/// twice the resolution and the constants get a "refinement" block.
CellStage run_cell_stage(const RunConfig& config, std::ostream* log = nullptr);

/// One DNS parameter point after post-processing; the velocity field itself is not kept.
struct PointRecord {
  std::size_t point = 0;  ///< index into config.points
  double epsilon = 0.0;
  double F = 0.0;
  std::string status;     ///< "ok", "hypothesis_fail" or "compute_fail"
  std::string message;
  bool from_cache = false;
  int picard_iterations = 0;
  double momentum_residual = 0.0;
  double divergence = 0.0;
  double slip = 0.0;
  double shear = 0.0;
  double fracture_mean = 0.0;
  double poiseuille_mean = 0.0;
  bool has_norms = false;  ///< set for F == rate_F
  NormComponents apriori;
  NormComponents order[3];
};

struct SweepOptions {
  int jobs = 1;
  std::ostream* log = nullptr;
};

struct SweepResult {
  CellStage cell;
  std::vector<PointRecord> records;
  nlohmann::json summary;
};

/// Cell stage, every (point, eps, F) DNS through the cache, then all analyses. Hypothesis failures are
/// recorded and skipped unless allowed. With skip_dns a missing snapshot throws MissingArtifacts.
SweepResult run_sweep(const RunConfig& config, const SweepOptions& options = {});

/// Summary JSON from records; pure function of its inputs.
nlohmann::json build_summary(const RunConfig& config, const CellStage& cell, const std::vector<PointRecord>& records);

/// errors.csv, apriori.csv, slip.csv and summary.json in `dir`.
void write_sweep_outputs(const SweepResult& result, const RunConfig& config, const std::filesystem::path& dir);

/// Text report and gnuplot data (errors.dat, slip.dat) derived from summary.json only.
/// Throws MissingArtifacts when the summary is absent.
std::string write_report(const std::filesystem::path& dir);

/// Fixed-format number used in every CSV.
std::string csv_number(double v);

}  // namespace fracslip
