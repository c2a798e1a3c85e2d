#pragma once

#include <memory>

#include "fracslip/geometry.hpp"

namespace fracslip::testing {

// Inclusion-free grid with u-rows from row_offset up; no interface unless given.
inline std::shared_ptr<MacGrid> open_grid(int nx, int ny, double h, int row_offset, WallKind bottom, WallKind top,
                                          std::optional<int> interface_row = std::nullopt) {
  auto g = std::make_shared<MacGrid>();
  g->nx = nx;
  g->ny = ny;
  g->h = h;
  g->row_offset = row_offset;
  g->bottom = bottom;
  g->top = top;
  g->interface_row = interface_row;
  g->solid.assign(static_cast<std::size_t>(nx * ny), 0);
  return g;
}

}  // namespace fracslip::testing
