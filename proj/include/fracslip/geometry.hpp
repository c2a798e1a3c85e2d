#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace fracslip {

enum class ShapeKind { Disc, Superellipse };

/// Inclusion descriptor in unit-cell coordinates; the inclusion is centred at (0.5, 0.5).
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Disc;
  double radius = 0.25;
  // Superellipse |x/a|^p + |y/b|^p <= 1.
  double half_width = 0.25;
  double half_height = 0.25;
  double exponent = 2.0;
  double rotation = 0.0;  ///< radians, counter-clockwise; breaks the left-right symmetry when nonzero
};

/// Periodic unit cell Y = (0,1)^2 with one solid inclusion strictly inside.
class UnitCell {
 public:
  static constexpr double kMinMargin = 0.02;

  const ShapeSpec& shape() const { return shape_; }

  /// Negative inside the solid inclusion, positive in the fluid part.
  double level_set(double xi, double zeta) const;
  bool is_solid(double xi, double zeta) const { return level_set(xi, zeta) <= 0.0; }

  /// Gap between the inclusion's bounding box and the cell boundary.
  double boundary_margin() const;

  /// Exact fluid area fraction |Y_F|.
  double fluid_fraction() const;

 private:
  explicit UnitCell(ShapeSpec shape) : shape_(shape) {}
  ShapeSpec shape_;

  friend UnitCell build_unit_cell(const ShapeSpec& shape, int check_resolution);
};

/// Throws ShapeTouchesBoundary (margin < 0.02 or empty inclusion) or DisconnectedFluid.
UnitCell build_unit_cell(const ShapeSpec& shape, int check_resolution = 64);

enum class WallKind { NoSlip, Slip };

/// Uniform MAC grid, periodic in x, with a cell-centred solid mask.
///
/// Cell (i, j) has centre ((i + 1/2) h, (j + row_offset) h). The u-node (i, j) sits on the
/// left face of cell (i, j) at the cell-centre height; the v-node (i, jv) sits on the bottom
/// face of cell (i, jv), jv = 0..ny. A wall outside the grid behaves like one extra row of
/// solid cells (NoSlip) or a symmetry line (Slip).
struct MacGrid {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  int row_offset = 0;
  WallKind bottom = WallKind::NoSlip;
  WallKind top = WallKind::NoSlip;
  std::optional<int> interface_row;
  std::vector<std::uint8_t> solid;

  int wrap(int i) const { return ((i % nx) + nx) % nx; }
  bool solid_cell(int i, int j) const { return solid[static_cast<std::size_t>(wrap(i) + nx * j)] != 0; }
  double x_cell(int i) const { return (i + 0.5) * h; }
  double x_face(int i) const { return i * h; }
  double y_cell(int j) const { return (j + row_offset) * h; }
  double y_vface(int jv) const { return (jv - 0.5 + row_offset) * h; }
  double width() const { return nx * h; }

  int fluid_cell_count() const;
  int solid_cell_count() const;
  /// True when every fluid cell is reachable from every other through open faces.
  bool fluid_connected() const;
};

/// Discretised Omega = (0,1) x (-1, H) with the interface Sigma on the u-row of height 0.
struct GridDomain {
  std::shared_ptr<const MacGrid> grid;
  double epsilon = 0.0;
  double delta = 0.0;
  int cells_per_period = 0;
  int periods = 0;            ///< number of eps-periods represented in x
  int total_periods = 0;      ///< 1/eps, periods across the physical width 1
  int fracture_rows = 0;      ///< M, top wall at y = M h
  double fracture_height = 0; ///< snapped H = M h
  double nominal_fracture_height = 0;  ///< eps^delta before snapping

  int interface_row() const { return *grid->interface_row; }
  /// Factor converting integrals over the represented columns to the width-1 domain.
  double width_factor() const { return static_cast<double>(total_periods) / periods; }
};

enum class DomainWidth { SinglePeriod, Full };

GridDomain build_grid_domain(const UnitCell& cell, double epsilon, double delta,
                             int cells_per_period, DomainWidth width = DomainWidth::SinglePeriod);

/// Truncated boundary-layer slab (0,1) x (-rows_below, height_above) with S on the u-row y2 = 0.
struct BLSlab {
  std::shared_ptr<const MacGrid> grid;
  int rows_below = 0;
  double height_above = 0.0;
  int cells_per_period = 0;
  int inclusion_copies = 0;

  int interface_row() const { return *grid->interface_row; }
  int top_row() const { return grid->ny - 1; }
};

BLSlab build_bl_slab(const UnitCell& cell, int rows_below, double height_above, int cells_per_period);

}  // namespace fracslip
