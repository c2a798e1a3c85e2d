#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracslip/saddle_solver.hpp"
#include "test_util.hpp"

namespace fracslip::testing {

inline constexpr double kTau = 2.0 * std::numbers::pi;

struct MmsError {
  double u_l2;
  ResidualReport res;
};

// u = sin(2 pi x) sin(2 pi y), v = -cos(2 pi x)(1 - cos(2 pi y)), p = cos(2 pi x) sin(2 pi y) on (0,1)^2.
inline MmsError manufactured(int n) {
  const double h = 1.0 / n;
  SaddleProblem pb;
  pb.grid = open_grid(n, n - 1, h, 1, WallKind::NoSlip, WallKind::NoSlip);
  const auto& g = *pb.grid;
  pb.force_u.assign(static_cast<std::size_t>(g.nx * g.ny), 0.0);
  pb.force_v.assign(static_cast<std::size_t>(g.nx * (g.ny + 1)), 0.0);
  const double k2 = kTau * kTau;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x_face(i);
      const double y = g.y_cell(j);
      pb.force_u[static_cast<std::size_t>(i + g.nx * j)] =
          2.0 * k2 * std::sin(kTau * x) * std::sin(kTau * y) - kTau * std::sin(kTau * x) * std::sin(kTau * y);
    }
  }
  for (int jv = 1; jv < g.ny; ++jv) {
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x_cell(i);
      const double y = g.y_vface(jv);
      const double lap_v = k2 * std::cos(kTau * x) - 2.0 * k2 * std::cos(kTau * x) * std::cos(kTau * y);
      pb.force_v[static_cast<std::size_t>(i + g.nx * jv)] = -lap_v + kTau * std::cos(kTau * x) * std::cos(kTau * y);
    }
  }
  auto [f, stats] = solve_stokes(pb);
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double e = f.U(i, j) - std::sin(kTau * g.x_face(i)) * std::sin(kTau * g.y_cell(j));
      err += h * h * e * e;
    }
  }
  for (int jv = 1; jv < g.ny; ++jv) {
    for (int i = 0; i < g.nx; ++i) {
      const double e = f.V(i, jv) + std::cos(kTau * g.x_cell(i)) * (1.0 - std::cos(kTau * g.y_vface(jv)));
      err += h * h * e * e;
    }
  }
  return {std::sqrt(err), residual(pb, f)};
}

struct StripResult {
  double profile_error;    ///< max |u - exact|
  double max_v;
  double derivative_jump;  ///< one-sided du/dy above minus below the line
};

// Two no-slip walls at y = -a and y = b, stress jump sigma on y = 0:
// u = -sigma b (y + a) / (mu (a + b)) below, -sigma a (b - y) / (mu (a + b)) above.
inline StripResult two_layer_strip(double mu, double sigma) {
  const int below = 12;
  const int above = 7;
  const double h = 0.05;
  SaddleProblem pb;
  pb.grid = open_grid(8, below + above - 1, h, -(below - 1), WallKind::NoSlip, WallKind::NoSlip, below - 1);
  pb.viscosity = mu;
  pb.jump = InterfaceJump{below - 1, sigma};
  auto [f, stats] = solve_stokes(pb);
  const double a = below * h;
  const double b = above * h;
  StripResult out{0.0, 0.0, 0.0};
  for (int j = 0; j < pb.grid->ny; ++j) {
    const double y = pb.grid->y_cell(j);
    const double exact = y < 0 ? -sigma * b * (y + a) / (mu * (a + b)) : -sigma * a * (b - y) / (mu * (a + b));
    for (int i = 0; i < pb.grid->nx; ++i) out.profile_error = std::max(out.profile_error, std::abs(f.U(i, j) - exact));
  }
  for (double v : f.v) out.max_v = std::max(out.max_v, std::abs(v));
  const int r = below - 1;
  out.derivative_jump = (f.U(0, r + 1) - f.U(0, r)) / h - (f.U(0, r) - f.U(0, r - 1)) / h;
  return out;
}

}  // namespace fracslip::testing
