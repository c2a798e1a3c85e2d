#include "fracslip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracslip/error.hpp"

namespace fracslip {

namespace {

int positive_mod(int a, int n) { return ((a % n) + n) % n; }

// Flood fill over an nx x ny mask with periodic x (and optionally periodic y).
bool mask_connected(const std::vector<std::uint8_t>& solid, int nx, int ny, bool periodic_y) {
  const auto idx = [nx](int i, int j) { return static_cast<std::size_t>(i + nx * j); };
  std::vector<std::uint8_t> seen(solid.size(), 0);
  int start = -1;
  int fluid = 0;
  for (std::size_t k = 0; k < solid.size(); ++k) {
    if (!solid[k]) {
      ++fluid;
      if (start < 0) start = static_cast<int>(k);
    }
  }
  if (fluid == 0) return false;
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    const int i = k % nx;
    const int j = k / nx;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int ii = positive_mod(i + di[d], nx);
      int jj = j + dj[d];
      if (periodic_y) {
        jj = positive_mod(jj, ny);
      } else if (jj < 0 || jj >= ny) {
        continue;
      }
      const auto q = idx(ii, jj);
      if (solid[q] || seen[q]) continue;
      seen[q] = 1;
      ++reached;
      stack.push_back(static_cast<int>(q));
    }
  }
  return reached == fluid;
}

}  // namespace

double UnitCell::level_set(double xi, double zeta) const {
  const double dx = xi - 0.5;
  const double dy = zeta - 0.5;
  if (shape_.kind == ShapeKind::Disc) {
    return std::hypot(dx, dy) - shape_.radius;
  }
  const double p = shape_.exponent;
  const double c = std::cos(shape_.rotation);
  const double sn = std::sin(shape_.rotation);
  const double xr = c * dx + sn * dy;
  const double yr = -sn * dx + c * dy;
  const double s = std::pow(std::abs(xr) / shape_.half_width, p) + std::pow(std::abs(yr) / shape_.half_height, p);
  // Scaled so that the zero contour is exact and the sign matches the disc case.
  return std::pow(s, 1.0 / p) - 1.0;
}

double UnitCell::boundary_margin() const {
  if (shape_.kind == ShapeKind::Disc) return 0.5 - shape_.radius;
  // Extent of the rotated boundary curve, sampled densely.
  const double p = shape_.exponent;
  const double c = std::cos(shape_.rotation);
  const double sn = std::sin(shape_.rotation);
  double extent = 0.0;
  constexpr int kSamples = 4096;
  for (int k = 0; k < kSamples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / kSamples;
    const double ct = std::cos(t);
    const double st = std::sin(t);
    const double x = shape_.half_width * std::copysign(std::pow(std::abs(ct), 2.0 / p), ct);
    const double y = shape_.half_height * std::copysign(std::pow(std::abs(st), 2.0 / p), st);
    extent = std::max({extent, std::abs(c * x - sn * y), std::abs(sn * x + c * y)});
  }
  return 0.5 - extent;
}

double UnitCell::fluid_fraction() const {
  if (shape_.kind == ShapeKind::Disc) {
    return 1.0 - std::numbers::pi * shape_.radius * shape_.radius;
  }
  const double p = shape_.exponent;
  const double g = std::tgamma(1.0 + 1.0 / p);
  const double area = 4.0 * shape_.half_width * shape_.half_height * g * g / std::tgamma(1.0 + 2.0 / p);
  return 1.0 - area;
}

UnitCell build_unit_cell(const ShapeSpec& shape, int check_resolution) {
  if (shape.kind == ShapeKind::Disc) {
    if (!(shape.radius > 0.0)) {
      throw Error(ErrorCode::ShapeTouchesBoundary, "disc radius must be positive (no solid means no porous medium)");
    }
  } else {
    if (!(shape.half_width > 0.0) || !(shape.half_height > 0.0)) {
      throw Error(ErrorCode::ShapeTouchesBoundary, "superellipse semi-axes must be positive");
    }
    if (!(shape.exponent >= 2.0)) {
      throw Error(ErrorCode::InvalidArgument, "superellipse exponent must be >= 2");
    }
  }
  UnitCell cell(shape);
  const double margin = cell.boundary_margin();
  if (margin < UnitCell::kMinMargin) {
    throw Error(ErrorCode::ShapeTouchesBoundary,
                "inclusion margin " + std::to_string(margin) + " below required " + std::to_string(UnitCell::kMinMargin));
  }
  const int n = check_resolution;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n * n), 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mask[static_cast<std::size_t>(i + n * j)] = cell.is_solid((i + 0.5) / n, (j + 0.5) / n) ? 1 : 0;
    }
  }
  if (!mask_connected(mask, n, n, true)) {
    throw Error(ErrorCode::DisconnectedFluid, "fluid part of the cell is not connected at resolution " + std::to_string(n));
  }
  return cell;
}

int MacGrid::fluid_cell_count() const {
  return static_cast<int>(std::count(solid.begin(), solid.end(), std::uint8_t{0}));
}

int MacGrid::solid_cell_count() const { return static_cast<int>(solid.size()) - fluid_cell_count(); }

bool MacGrid::fluid_connected() const { return mask_connected(solid, nx, ny, false); }

GridDomain build_grid_domain(const UnitCell& cell, double epsilon, double delta, int cells_per_period,
                             DomainWidth width) {
  if (!(epsilon > 0.0) || epsilon > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1]");
  }
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  }
  if (cells_per_period < 16) {
    throw Error(ErrorCode::InvalidArgument, "cells_per_period must be >= 16");
  }
  const double inv = 1.0 / epsilon;
  const int total_periods = static_cast<int>(std::lround(inv));
  if (std::abs(inv - total_periods) > 1e-9 * inv) {
    throw Error(ErrorCode::GridMismatch, "1/epsilon must be an integer so the pore lattice tiles (0,1)");
  }
  const int n = cells_per_period;
  const double h = epsilon / n;
  const double nominal = std::pow(epsilon, delta);
  const int fracture_rows = static_cast<int>(std::lround(nominal / h));
  if (fracture_rows < 8) {
    throw Error(ErrorCode::UnderResolvedFracture,
                "fracture eps^delta = " + std::to_string(nominal) + " spans " + std::to_string(nominal / h) +
                    " cells (< 8)");
  }
  const int porous_rows = total_periods * n;

  auto grid = std::make_shared<MacGrid>();
  const int periods = width == DomainWidth::Full ? total_periods : 1;
  grid->nx = n * periods;
  grid->ny = porous_rows + fracture_rows - 1;
  grid->h = h;
  grid->row_offset = -(porous_rows - 1);
  grid->interface_row = porous_rows - 1;
  grid->bottom = WallKind::NoSlip;
  grid->top = WallKind::NoSlip;
  grid->solid.assign(static_cast<std::size_t>(grid->nx * grid->ny), 0);
  for (int j = 0; j < grid->ny; ++j) {
    const int m = j + grid->row_offset;
    if (m >= 0) continue;
    const double zeta = static_cast<double>(positive_mod(m, n)) / n;
    for (int i = 0; i < grid->nx; ++i) {
      const double xi = (positive_mod(i, n) + 0.5) / n;
      grid->solid[static_cast<std::size_t>(i + grid->nx * j)] = cell.is_solid(xi, zeta) ? 1 : 0;
    }
  }
  if (!grid->fluid_connected()) {
    throw Error(ErrorCode::DisconnectedFluid, "discretised pore space is not connected");
  }

  GridDomain dom;
  dom.epsilon = epsilon;
  dom.delta = delta;
  dom.cells_per_period = n;
  dom.periods = periods;
  dom.total_periods = total_periods;
  dom.fracture_rows = fracture_rows;
  dom.fracture_height = fracture_rows * h;
  dom.nominal_fracture_height = nominal;
  dom.grid = std::move(grid);
  return dom;
}

BLSlab build_bl_slab(const UnitCell& cell, int rows_below, double height_above, int cells_per_period) {
  if (rows_below < 3) throw Error(ErrorCode::InvalidArgument, "rows_below must be >= 3");
  if (!(height_above >= 1.0)) throw Error(ErrorCode::InvalidArgument, "height_above must be >= 1");
  if (cells_per_period < 16) throw Error(ErrorCode::InvalidArgument, "cells_per_period must be >= 16");
  const int n = cells_per_period;
  const int rows_up = static_cast<int>(std::lround(height_above * n));
  const int rows_down = rows_below * n - 1;

  auto grid = std::make_shared<MacGrid>();
  grid->nx = n;
  grid->ny = rows_down + 1 + rows_up;
  grid->h = 1.0 / n;
  grid->row_offset = -rows_down;
  grid->interface_row = rows_down;
  grid->bottom = WallKind::NoSlip;
  grid->top = WallKind::Slip;
  grid->solid.assign(static_cast<std::size_t>(grid->nx * grid->ny), 0);
  for (int j = 0; j < grid->ny; ++j) {
    const int m = j + grid->row_offset;
    if (m >= 0) continue;
    const double zeta = static_cast<double>(positive_mod(m, n)) / n;
    for (int i = 0; i < n; ++i) {
      grid->solid[static_cast<std::size_t>(i + n * j)] = cell.is_solid((i + 0.5) / n, zeta) ? 1 : 0;
    }
  }
  if (!grid->fluid_connected()) {
    throw Error(ErrorCode::DisconnectedFluid, "slab pore space is not connected");
  }
  BLSlab slab;
  slab.rows_below = rows_below;
  slab.height_above = rows_up * grid->h;
  slab.cells_per_period = n;
  slab.inclusion_copies = rows_below;
  slab.grid = std::move(grid);
  return slab;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeTouchesBoundary: return "ShapeTouchesBoundary";
    case ErrorCode::DisconnectedFluid: return "DisconnectedFluid";
    case ErrorCode::UnderResolvedFracture: return "UnderResolvedFracture";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::PicardDiverged: return "PicardDiverged";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::MissingSecondLayer: return "MissingSecondLayer";
    case ErrorCode::TruncationSuspect: return "TruncationSuspect";
    case ErrorCode::InsufficientDecayWindow: return "InsufficientDecayWindow";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::CollinearSamples: return "CollinearSamples";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingArtifacts: return "MissingArtifacts";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fracslip
