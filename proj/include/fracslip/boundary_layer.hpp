#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fracslip/geometry.hpp"
#include "fracslip/saddle_solver.hpp"

namespace fracslip {

enum class DecaySide { Above, Below };
enum class DecayQuantity { Velocity, Pressure };

struct DecayFit {
  double rate = 0.0;          ///< fitted exponent k in dev ~ exp(-k |y|)
  double fit_residual = 0.0;  ///< RMS residual of the log-linear fit
  double r_squared = 0.0;
  double y_from = 0.0;        ///< usable window
  double y_to = 0.0;
  int points = 0;
};

struct BoundaryLayerResult {
  int layer = 1;  ///< 1: beta^bl, omega^bl; 2: beta^{1,bl}, pi^{1,bl}
  BLSlab slab;
  StaggeredField field;
  SolveStats stats;
  double c_velocity = 0.0;          ///< C1 (layer 1) or C11 (layer 2)
  double c_pressure = 0.0;          ///< C_omega (layer 1) or C_pi1 (layer 2)
  double trace_average = 0.0;       ///< period mean of beta_1 on S
  double shear_average = 0.0;       ///< period mean of d beta_1 / d y2 on S, one-sided from above
  double pressure_trace_average = 0.0;  ///< period mean of the pressure on the S row
  double gradient_energy = 0.0;     ///< ||grad beta||^2 over the slab
  double max_row_flux = 0.0;        ///< max over heights of |period mean of beta_2|
  std::optional<DecayFit> decay_above;
  std::optional<DecayFit> decay_pressure_above;
  std::optional<DecayFit> decay_below;
};

/// Unit stress jump on S: -Laplace beta + grad omega = 0 with [grad beta - omega I] e2 = e1.
BoundaryLayerResult solve_first_layer(const BLSlab& slab, double jump = 1.0);

/// -Laplace beta1 + grad pi1 = (beta . grad) beta with no interface jump.
BoundaryLayerResult solve_second_layer(const BLSlab& slab, const BoundaryLayerResult& first);

/// Log-linear fit of the period-RMS deviation from the stabilisation constant.
/// Above: y in [1, L+ - 0.5]; below: y in [-(rows_below - 1), -0.5]. Heights where the deviation
/// is at the noise floor are dropped. Throws InsufficientDecayWindow with fewer than 10 heights.
DecayFit fit_decay(const BoundaryLayerResult& result, DecaySide side,
                   DecayQuantity quantity = DecayQuantity::Velocity);

/// Period-RMS of |(C,0) - beta| on the u-row at `row` (velocity) or of |p - C_p| on the cell row.
double row_deviation(const BoundaryLayerResult& result, int row, DecayQuantity quantity);

/// Period-RMS of the forcing (beta . grad) beta on a u-row.
double convection_row_rms(const StaggeredField& beta, int row);

struct TruncationReport {
  double c1_shift_height = 0.0;   ///< relative change of C1 when L+ doubles
  double c1_shift_depth = 0.0;    ///< relative change of C1 when rows_below doubles
  double comega_shift_height = 0.0;
  double comega_shift_depth = 0.0;
  double c11_shift_height = 0.0;
  double c11_shift_depth = 0.0;
  double max_shift() const;
};

/// Re-solves both layers on slabs with doubled L+ and doubled rows_below. Throws TruncationSuspect
/// when any shift exceeds `tolerance` and `throw_on_fail` is set.
TruncationReport truncation_study(const UnitCell& cell, int rows_below, double height_above, int cells_per_period,
                                  double tolerance = 1e-5, bool throw_on_fail = false);

/// Constants file content: C1, C_omega, C11, C_pi1, interface averages, decay rates, grid metadata.
nlohmann::json constants_json(const BoundaryLayerResult& first, const BoundaryLayerResult& second);

/// Compact constants record, as read back from the constants JSON.
struct LayerConstants {
  double c1 = 0.0;
  double c_omega = 0.0;
  double c11 = 0.0;
  double c_pi1 = 0.0;
  double beta1_trace = 0.0;   ///< <beta_1^{1,bl}> on S
  double beta1_shear = 0.0;   ///< <d beta_1^{1,bl}/d y2> on S
};

LayerConstants layer_constants(const BoundaryLayerResult& first, const BoundaryLayerResult& second);

}  // namespace fracslip
