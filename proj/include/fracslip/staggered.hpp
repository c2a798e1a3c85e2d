#pragma once

#include <memory>
#include <vector>

#include "fracslip/geometry.hpp"

namespace fracslip {

/// Velocity on faces, pressure at cell centres. Storage covers every node of the grid;
/// nodes that are not unknowns (solid-adjacent faces, boundary faces) hold zero.
struct StaggeredField {
  std::shared_ptr<const MacGrid> grid;
  std::vector<double> u;  ///< nx * ny
  std::vector<double> v;  ///< nx * (ny + 1)
  std::vector<double> p;  ///< nx * ny

  static StaggeredField zeros(std::shared_ptr<const MacGrid> grid);

  std::size_t u_index(int i, int j) const { return static_cast<std::size_t>(grid->wrap(i) + grid->nx * j); }
  std::size_t v_index(int i, int jv) const { return static_cast<std::size_t>(grid->wrap(i) + grid->nx * jv); }
  std::size_t p_index(int i, int j) const { return u_index(i, j); }

  double& U(int i, int j) { return u[u_index(i, j)]; }
  double U(int i, int j) const { return u[u_index(i, j)]; }
  double& V(int i, int jv) { return v[v_index(i, jv)]; }
  double V(int i, int jv) const { return v[v_index(i, jv)]; }
  double& P(int i, int j) { return p[p_index(i, j)]; }
  double P(int i, int j) const { return p[p_index(i, j)]; }

  /// u with the wall rows outside the grid resolved (zero for no-slip, mirrored for slip).
  double u_ext(int i, int j) const;
  /// v with out-of-range faces treated as zero.
  double v_ext(int i, int jv) const;
};

/// Which faces and cells carry unknowns.
class DofMap {
 public:
  explicit DofMap(const MacGrid& grid);

  bool u_active(int i, int j) const { return u_id_[idx(i, j)] >= 0; }
  bool v_active(int i, int jv) const { return v_id_[idx(i, jv)] >= 0; }
  bool p_active(int i, int j) const { return p_id_[idx(i, j)] >= 0; }
  int u_id(int i, int j) const { return u_id_[idx(i, j)]; }
  int v_id(int i, int jv) const { return v_id_[idx(i, jv)]; }
  int p_id(int i, int j) const { return p_id_[idx(i, j)]; }

  int n_u() const { return n_u_; }
  int n_v() const { return n_v_; }
  int n_p() const { return n_p_; }
  int n_velocity() const { return n_u_ + n_v_; }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(((i % nx_) + nx_) % nx_ + nx_ * j); }
  int nx_;
  std::vector<int> u_id_, v_id_, p_id_;
  int n_u_ = 0, n_v_ = 0, n_p_ = 0;
};

}  // namespace fracslip
