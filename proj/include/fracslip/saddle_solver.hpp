#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "fracslip/staggered.hpp"

namespace fracslip {

/// Tangential stress jump [mu du/dy] = sigma across the u-row `row`, applied as the line
/// integral -sigma * int phi_1 on the right-hand side.
struct InterfaceJump {
  int row = 0;
  double sigma = 0.0;
};

struct PressureGauge {
  enum class Kind {
    Point,          ///< p = 0 at cell (i, j)
    FractureMean,   ///< zero mean over the cells above the interface row
  };
  Kind kind = Kind::Point;
  int i = 0;
  int j = 0;
};

struct SaddleProblem {
  std::shared_ptr<const MacGrid> grid;
  double viscosity = 1.0;
  std::vector<double> force_u;  ///< empty or nx * ny
  std::vector<double> force_v;  ///< empty or nx * (ny + 1)
  std::optional<InterfaceJump> jump;
  bool convection = false;
  PressureGauge gauge;
};

struct SolveStats {
  double linear_residual = 0.0;
  double momentum_residual = 0.0;  ///< ||R_mom|| / ||f|| at the returned state
  double divergence_norm = 0.0;    ///< max |div u|
  int picard_iterations = 0;
  std::vector<double> picard_history;
};

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 1.0;
  int growth_limit = 5;
};

/// Stokes solve (convection flag ignored). Throws SingularSystem / NonConvergence.
std::pair<StaggeredField, SolveStats> solve_stokes(const SaddleProblem& problem);

/// Picard (Oseen) iteration started from the Stokes solution. Throws PicardDiverged /
/// MaxIterExceeded.
std::pair<StaggeredField, SolveStats> solve_navier_stokes(const SaddleProblem& problem,
                                                          const PicardOptions& options = {});

/// Cell-centred discrete divergence (zero in solid cells).
std::vector<double> discrete_divergence(const StaggeredField& field);

/// Divergence-form centred convection div(a (x) b) evaluated at the velocity nodes.
/// Returns {u-array, v-array} with zeros at inactive nodes.
std::pair<std::vector<double>, std::vector<double>> convection(const StaggeredField& advecting,
                                                               const StaggeredField& transported);

struct ResidualReport {
  double momentum = 0.0;  ///< ||R_mom||_2 / ||f||_2 (absolute when f = 0)
  double divergence = 0.0;
};

/// Residual of the discrete equations (convection included when problem.convection).
ResidualReport residual(const SaddleProblem& problem, const StaggeredField& field);

enum class Region { Full, Porous, Fracture, Interface };

/// Accepts "omega", "omega2", "omega1", "sigma". Throws UnknownRegion.
Region parse_region(std::string_view name);

struct FieldNorms {
  double l2 = 0.0;     ///< velocity L2 over the region (trace L2 for Region::Interface)
  double grad = 0.0;   ///< L2 of the discrete gradient over the region
  double trace = 0.0;  ///< L2 trace on the interface line
};

/// Midpoint / trapezoid quadrature over the represented columns. Regions other than Full need
/// grid->interface_row.
FieldNorms norms(const StaggeredField& field, Region region);

/// Sum of squared edge differences; equals u^T L u for the assembled viscous operator.
double gradient_energy(const StaggeredField& field);

}  // namespace fracslip
