#include "fracslip/staggered.hpp"

namespace fracslip {

StaggeredField StaggeredField::zeros(std::shared_ptr<const MacGrid> grid) {
  StaggeredField f;
  const auto cells = static_cast<std::size_t>(grid->nx * grid->ny);
  f.u.assign(cells, 0.0);
  f.v.assign(static_cast<std::size_t>(grid->nx * (grid->ny + 1)), 0.0);
  f.p.assign(cells, 0.0);
  f.grid = std::move(grid);
  return f;
}

double StaggeredField::u_ext(int i, int j) const {
  if (j < 0) {
    return grid->bottom == WallKind::Slip ? U(i, 0) : 0.0;
  }
  if (j >= grid->ny) {
    return grid->top == WallKind::Slip ? U(i, grid->ny - 1) : 0.0;
  }
  return U(i, j);
}

double StaggeredField::v_ext(int i, int jv) const {
  if (jv < 0 || jv > grid->ny) return 0.0;
  return V(i, jv);
}

DofMap::DofMap(const MacGrid& grid) : nx_(grid.nx) {
  const auto cells = static_cast<std::size_t>(grid.nx * grid.ny);
  u_id_.assign(cells, -1);
  v_id_.assign(static_cast<std::size_t>(grid.nx * (grid.ny + 1)), -1);
  p_id_.assign(cells, -1);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.solid_cell(i, j) && !grid.solid_cell(i - 1, j)) u_id_[idx(i, j)] = n_u_++;
    }
  }
  for (int jv = 1; jv < grid.ny; ++jv) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.solid_cell(i, jv) && !grid.solid_cell(i, jv - 1)) v_id_[idx(i, jv)] = n_u_ + n_v_++;
    }
  }
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (!grid.solid_cell(i, j)) p_id_[idx(i, j)] = n_p_++;
    }
  }
}

}  // namespace fracslip
