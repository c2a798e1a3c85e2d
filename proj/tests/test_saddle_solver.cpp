#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracslip/error.hpp"
#include "fracslip/saddle_solver.hpp"
#include "solver_cases.hpp"
#include "test_util.hpp"

namespace fracslip {
namespace {

using testing::open_grid;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

TEST(SaddleSolver, ZeroDataGivesZeroField) {
  SaddleProblem pb;
  pb.grid = open_grid(16, 16, 1.0 / 16, 1, WallKind::NoSlip, WallKind::NoSlip);
  auto [f, stats] = solve_stokes(pb);
  EXPECT_EQ(max_abs(f.u), 0.0);
  EXPECT_EQ(max_abs(f.v), 0.0);
  EXPECT_EQ(max_abs(f.p), 0.0);
}

TEST(SaddleSolver, ManufacturedSolutionConverges) {
  const auto coarse = testing::manufactured(16);
  const auto mid = testing::manufactured(32);
  const auto fine = testing::manufactured(64);
  const double q1 = std::log2(coarse.u_l2 / mid.u_l2);
  const double q2 = std::log2(mid.u_l2 / fine.u_l2);
  EXPECT_GE(q1, 1.0);
  EXPECT_GE(q2, 1.0);
  EXPECT_LE(fine.res.momentum, 1e-10);
  EXPECT_LE(fine.res.divergence, 1e-10);
}

TEST(SaddleSolver, TwoLayerStripMatchesOneDimensionalProfile) {
  const auto strip = testing::two_layer_strip(0.7, 1.0);
  EXPECT_LE(strip.profile_error, 1e-8);
  EXPECT_LE(strip.max_v, 1e-12);
  EXPECT_NEAR(strip.derivative_jump, 1.0 / 0.7, 1e-8);
}

std::shared_ptr<MacGrid> disc_slab(int n) {
  auto g = open_grid(n, 3 * n, 1.0 / n, -(2 * n - 1), WallKind::NoSlip, WallKind::Slip, 2 * n - 1);
  for (int j = 0; j < g->ny; ++j) {
    const int m = j + g->row_offset;
    if (m >= 0) continue;
    const double zeta = static_cast<double>(((m % n) + n) % n) / n;
    for (int i = 0; i < n; ++i) {
      const double dx = (i + 0.5) / n - 0.5;
      const double dy = zeta - 0.5;
      g->solid[static_cast<std::size_t>(i + n * j)] = std::hypot(dx, dy) <= 0.25 ? 1 : 0;
    }
  }
  return g;
}

TEST(SaddleSolver, EnergyIdentityAndSymmetry) {
  const int n = 16;
  SaddleProblem pb;
  pb.grid = disc_slab(n);
  const int r0 = *pb.grid->interface_row;
  pb.jump = InterfaceJump{r0, 1.0};
  pb.gauge = {PressureGauge::Kind::Point, 0, 0};
  auto [f, stats] = solve_stokes(pb);
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += pb.grid->h * f.U(i, r0);
  EXPECT_LT(trace, 0.0);
  EXPECT_NEAR(gradient_energy(f), -trace, 1e-10 * std::abs(trace));
  EXPECT_LE(stats.momentum_residual, 1e-10);
  EXPECT_LE(stats.divergence_norm, 1e-10);
  double asym = 0.0;
  for (int j = 0; j < pb.grid->ny; ++j) {
    for (int i = 0; i < n; ++i) {
      asym = std::max(asym, std::abs(f.U(i, j) - f.U(n - i, j)));
      asym = std::max(asym, std::abs(f.V(i, j) + f.V(n - 1 - i, j)));
    }
  }
  EXPECT_LE(asym, 1e-10);
}

TEST(SaddleSolver, PeriodicShiftReproducesSolution) {
  const int n = 16;
  auto one = disc_slab(n);
  auto two = open_grid(2 * n, one->ny, one->h, one->row_offset, one->bottom, one->top, one->interface_row);
  for (int j = 0; j < one->ny; ++j) {
    for (int i = 0; i < 2 * n; ++i) two->solid[static_cast<std::size_t>(i + 2 * n * j)] = one->solid_cell(i, j);
  }
  SaddleProblem pb;
  pb.grid = two;
  pb.jump = InterfaceJump{*two->interface_row, 1.0};
  auto [f, stats] = solve_stokes(pb);
  double diff = 0.0;
  for (int j = 0; j < two->ny; ++j) {
    for (int i = 0; i < 2 * n; ++i) diff = std::max(diff, std::abs(f.U(i, j) - f.U(i + n, j)));
  }
  EXPECT_LE(diff, 1e-12);
}

SaddleProblem channel_problem(double force) {
  SaddleProblem pb;
  pb.grid = disc_slab(16);
  auto& g = *pb.grid;
  pb.force_u.assign(static_cast<std::size_t>(g.nx * g.ny), 0.0);
  for (int j = *g.interface_row; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) pb.force_u[static_cast<std::size_t>(i + g.nx * j)] = force;
  }
  pb.viscosity = 0.05;
  pb.convection = true;
  pb.gauge.kind = PressureGauge::Kind::FractureMean;
  return pb;
}

TEST(SaddleSolver, PicardZeroForcing) {
  auto pb = channel_problem(0.0);
  auto [f, stats] = solve_navier_stokes(pb);
  EXPECT_EQ(max_abs(f.u), 0.0);
  EXPECT_LE(stats.picard_iterations, 1);
}

TEST(SaddleSolver, PicardSmallForcingStaysNearStokes) {
  auto pb = channel_problem(1e-6);
  auto [ns, stats] = solve_navier_stokes(pb);
  auto [st, s2] = solve_stokes(pb);
  double diff = 0.0;
  for (std::size_t k = 0; k < ns.u.size(); ++k) diff = std::max(diff, std::abs(ns.u[k] - st.u[k]));
  EXPECT_LE(diff / max_abs(st.u), 1e-4);
  EXPECT_LE(stats.momentum_residual, 1e-10);
}

TEST(SaddleSolver, PicardConvergesWithConvection) {
  auto pb = channel_problem(1.0);
  auto [f, stats] = solve_navier_stokes(pb);
  EXPECT_LE(stats.momentum_residual, 1e-10);
  EXPECT_LE(stats.divergence_norm, 1e-10);
  EXPECT_GT(stats.picard_iterations, 1);
  auto [st, s2] = solve_stokes(pb);
  double diff = 0.0;
  for (std::size_t k = 0; k < f.v.size(); ++k) diff = std::max(diff, std::abs(f.v[k] - st.v[k]));
  EXPECT_GT(diff, 0.0);
}

TEST(SaddleSolver, DivergenceOfConstantIsZero) {
  auto g = open_grid(8, 8, 0.125, 0, WallKind::Slip, WallKind::Slip);
  auto f = StaggeredField::zeros(g);
  for (auto& u : f.u) u = 3.0;
  EXPECT_EQ(max_abs(discrete_divergence(f)), 0.0);
}

TEST(SaddleSolver, SampledDivergenceFreeFieldHasSmallDivergence) {
  // Stream function psi = sin(2 pi x) sin(4 pi y); point samples give an O(h^2) divergence.
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    auto g = open_grid(n, n, 1.0 / n, 0, WallKind::Slip, WallKind::Slip);
    auto f = StaggeredField::zeros(g);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) f.U(i, j) = 2.0 * kTwoPi * std::sin(kTwoPi * g->x_face(i)) * std::cos(2.0 * kTwoPi * g->y_cell(j));
    }
    for (int jv = 0; jv <= n; ++jv) {
      for (int i = 0; i < n; ++i) f.V(i, jv) = -kTwoPi * std::cos(kTwoPi * g->x_cell(i)) * std::sin(2.0 * kTwoPi * g->y_vface(jv));
    }
    const double d = max_abs(discrete_divergence(f));
    if (prev > 0.0) EXPECT_NEAR(prev / d, 4.0, 0.2);
    prev = d;
  }
}

TEST(Norms, ZeroAndConstantFields) {
  auto g = open_grid(10, 6, 0.1, 0, WallKind::Slip, WallKind::Slip);
  auto f = StaggeredField::zeros(g);
  const auto z = norms(f, Region::Full);
  EXPECT_EQ(z.l2, 0.0);
  EXPECT_EQ(z.grad, 0.0);
  for (auto& u : f.u) u = 1.0;
  const auto c = norms(f, Region::Full);
  EXPECT_NEAR(c.l2, std::sqrt(1.0 * 0.6), 1e-14);
  EXPECT_EQ(c.grad, 0.0);
}

TEST(Norms, RegionsSplitAtInterface) {
  auto g = open_grid(10, 9, 0.1, -4, WallKind::Slip, WallKind::Slip, 4);
  auto f = StaggeredField::zeros(g);
  for (auto& u : f.u) u = 1.0;
  const double full = norms(f, Region::Full).l2;
  const double lower = norms(f, Region::Porous).l2;
  const double upper = norms(f, Region::Fracture).l2;
  EXPECT_NEAR(full * full, lower * lower + upper * upper, 1e-14);
  EXPECT_NEAR(norms(f, Region::Interface).l2, 1.0, 1e-14);
}

TEST(Norms, UnknownRegionRejected) {
  EXPECT_EQ(parse_region("omega1"), Region::Fracture);
  try {
    parse_region("omega3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownRegion);
  }
}

TEST(SaddleSolver, AllSolidIsSingular) {
  auto g = open_grid(4, 4, 0.25, 0, WallKind::NoSlip, WallKind::NoSlip);
  std::fill(g->solid.begin(), g->solid.end(), 1);
  SaddleProblem pb;
  pb.grid = g;
  try {
    solve_stokes(pb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

}  // namespace
}  // namespace fracslip
