#include "fracslip/boundary_layer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "fracslip/error.hpp"
#include "fracslip/fit.hpp"

namespace fracslip {

namespace {

PressureGauge deep_pin(const MacGrid& g) {
  for (int i = 0; i < g.nx; ++i) {
    if (!g.solid_cell(i, 0)) return {PressureGauge::Kind::Point, i, 0};
  }
  throw Error(ErrorCode::InvalidArgument, "bottom slab row has no fluid cell for the pressure pin");
}

double row_mean_u(const StaggeredField& f, int j) {
  double s = 0.0;
  for (int i = 0; i < f.grid->nx; ++i) s += f.U(i, j);
  return s / f.grid->nx;
}

double row_mean_p(const StaggeredField& f, int j) {
  double s = 0.0;
  int n = 0;
  for (int i = 0; i < f.grid->nx; ++i) {
    if (f.grid->solid_cell(i, j)) continue;
    s += f.P(i, j);
    ++n;
  }
  return n > 0 ? s / n : 0.0;
}

int extraction_row(const BLSlab& slab) {
  const int m = static_cast<int>(std::lround((slab.height_above - 0.5) * slab.cells_per_period));
  return slab.interface_row() + m;
}

void fill_common(BoundaryLayerResult& r) {
  const auto& f = r.field;
  const auto& g = *f.grid;
  const int r0 = r.slab.interface_row();
  r.trace_average = row_mean_u(f, r0);
  r.shear_average = (-3.0 * row_mean_u(f, r0) + 4.0 * row_mean_u(f, r0 + 1) - row_mean_u(f, r0 + 2)) / (2.0 * g.h);
  r.pressure_trace_average = row_mean_p(f, r0);
  r.gradient_energy = fracslip::gradient_energy(f);
  r.max_row_flux = 0.0;
  for (int jv = 0; jv <= g.ny; ++jv) {
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) s += f.V(i, jv);
    r.max_row_flux = std::max(r.max_row_flux, std::abs(s / g.nx));
  }
}

template <typename Fn>
std::optional<DecayFit> try_fit(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InsufficientDecayWindow) return std::nullopt;
    throw;
  }
}

void fill_decay(BoundaryLayerResult& r) {
  r.decay_above = try_fit([&] { return fit_decay(r, DecaySide::Above, DecayQuantity::Velocity); });
  r.decay_pressure_above = try_fit([&] { return fit_decay(r, DecaySide::Above, DecayQuantity::Pressure); });
  r.decay_below = try_fit([&] { return fit_decay(r, DecaySide::Below, DecayQuantity::Velocity); });
}

// Constants that vanish by symmetry are compared against `floor` instead of their own size.
double rel_shift(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace

BoundaryLayerResult solve_first_layer(const BLSlab& slab, double jump) {
  SaddleProblem pb;
  pb.grid = slab.grid;
  pb.jump = InterfaceJump{slab.interface_row(), jump};
  pb.gauge = deep_pin(*slab.grid);
  auto [field, stats] = solve_stokes(pb);

  BoundaryLayerResult r;
  r.layer = 1;
  r.slab = slab;
  r.field = std::move(field);
  r.stats = std::move(stats);
  fill_common(r);
  // Row means of u and p are constant from S upwards, so the interface averages are the constants.
  r.c_velocity = r.trace_average;
  r.c_pressure = r.pressure_trace_average;
  fill_decay(r);
  return r;
}

BoundaryLayerResult solve_second_layer(const BLSlab& slab, const BoundaryLayerResult& first) {
  if (first.layer != 1 || first.field.grid != slab.grid) {
    throw Error(ErrorCode::GridMismatch, "second layer needs the first layer solved on the same slab");
  }
  SaddleProblem pb;
  pb.grid = slab.grid;
  std::tie(pb.force_u, pb.force_v) = convection(first.field, first.field);
  pb.gauge = deep_pin(*slab.grid);
  auto [field, stats] = solve_stokes(pb);

  BoundaryLayerResult r;
  r.layer = 2;
  r.slab = slab;
  r.field = std::move(field);
  r.stats = std::move(stats);
  fill_common(r);
  const int top = extraction_row(slab);
  r.c_velocity = row_mean_u(r.field, top);
  r.c_pressure = row_mean_p(r.field, top);
  fill_decay(r);
  return r;
}

double row_deviation(const BoundaryLayerResult& result, int row, DecayQuantity quantity) {
  const auto& f = result.field;
  const auto& g = *f.grid;
  const bool above = row >= result.slab.interface_row();
  double s = 0.0;
  int n = 0;
  if (quantity == DecayQuantity::Velocity) {
    const double c = above ? result.c_velocity : 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double du = f.U(i, row) - c;
      const double v = 0.5 * (f.V(i, row) + f.V(i, row + 1));
      s += du * du + v * v;
      ++n;
    }
  } else {
    const double c = above ? result.c_pressure : 0.0;
    for (int i = 0; i < g.nx; ++i) {
      if (g.solid_cell(i, row)) continue;
      const double dp = f.P(i, row) - c;
      s += dp * dp;
      ++n;
    }
  }
  return n > 0 ? std::sqrt(s / n) : 0.0;
}

double convection_row_rms(const StaggeredField& beta, int row) {
  const auto [cu, cv] = convection(beta, beta);
  const auto& g = *beta.grid;
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double a = cu[beta.u_index(i, row)];
    const double b = 0.5 * (cv[beta.v_index(i, row)] + cv[beta.v_index(i, row + 1)]);
    s += a * a + b * b;
  }
  return std::sqrt(s / g.nx);
}

DecayFit fit_decay(const BoundaryLayerResult& result, DecaySide side, DecayQuantity quantity) {
  const auto& slab = result.slab;
  const auto& g = *result.field.grid;
  const int n = slab.cells_per_period;
  const int r0 = slab.interface_row();
  // Heights ordered away from S so the noise floor truncates the far end of the window.
  std::vector<int> rows;
  if (side == DecaySide::Above) {
    const int last = std::min(extraction_row(slab), slab.top_row());
    for (int m = n; r0 + m <= last; ++m) rows.push_back(r0 + m);
  } else {
    const int deepest = -(slab.rows_below - 1) * n;
    for (int m = -n / 2; m >= deepest && r0 + m >= 0; --m) rows.push_back(r0 + m);
  }
  double peak = 0.0;
  for (int j = 0; j < g.ny; ++j) peak = std::max(peak, row_deviation(result, j, quantity));
  const double floor = 1e-11 * std::max(peak, 1e-300);

  std::vector<double> y;
  std::vector<double> logd;
  for (int j : rows) {
    const double d = row_deviation(result, j, quantity);
    if (!(d > floor)) break;
    y.push_back(std::abs(g.y_cell(j)));
    logd.push_back(std::log(d));
  }
  const std::string where = side == DecaySide::Above ? "above" : "below";
  if (y.size() < 10) {
    std::string msg = "only " + std::to_string(y.size()) + " usable heights " + where + " S";
    if (!y.empty()) msg += " (|y| from " + std::to_string(y.front()) + " to " + std::to_string(y.back()) + ")";
    throw Error(ErrorCode::InsufficientDecayWindow, msg);
  }
  const LineFit lf = fit_line(y, logd);
  DecayFit out;
  out.rate = -lf.slope;
  out.fit_residual = lf.rms_residual;
  out.r_squared = lf.r_squared;
  out.y_from = side == DecaySide::Above ? y.front() : -y.front();
  out.y_to = side == DecaySide::Above ? y.back() : -y.back();
  out.points = static_cast<int>(y.size());
  return out;
}

double TruncationReport::max_shift() const {
  return std::max({c1_shift_height, c1_shift_depth, comega_shift_height, comega_shift_depth, c11_shift_height,
                   c11_shift_depth});
}

TruncationReport truncation_study(const UnitCell& cell, int rows_below, double height_above, int cells_per_period,
                                  double tolerance, bool throw_on_fail) {
  const auto solve = [&](int k, double l) {
    const BLSlab slab = build_bl_slab(cell, k, l, cells_per_period);
    auto first = solve_first_layer(slab);
    auto second = solve_second_layer(slab, first);
    return layer_constants(first, second);
  };
  const auto base = solve(rows_below, height_above);
  const auto tall = solve(rows_below, 2.0 * height_above);
  const auto deep = solve(2 * rows_below, height_above);
  TruncationReport rep;
  const double c1_scale = std::abs(base.c1);
  const double floor_omega = 1e-6 * c1_scale;
  const double floor_c11 = 1e-6 * c1_scale * c1_scale;
  rep.c1_shift_height = rel_shift(base.c1, tall.c1, 0.0);
  rep.c1_shift_depth = rel_shift(base.c1, deep.c1, 0.0);
  rep.comega_shift_height = rel_shift(base.c_omega, tall.c_omega, floor_omega);
  rep.comega_shift_depth = rel_shift(base.c_omega, deep.c_omega, floor_omega);
  rep.c11_shift_height = rel_shift(base.c11, tall.c11, floor_c11);
  rep.c11_shift_depth = rel_shift(base.c11, deep.c11, floor_c11);
  if (throw_on_fail && rep.max_shift() > tolerance) {
    throw Error(ErrorCode::TruncationSuspect,
                "a boundary-layer constant moved by " + std::to_string(rep.max_shift()) + " relative under doubling");
  }
  return rep;
}

LayerConstants layer_constants(const BoundaryLayerResult& first, const BoundaryLayerResult& second) {
  LayerConstants c;
  c.c1 = first.c_velocity;
  c.c_omega = first.c_pressure;
  c.c11 = second.c_velocity;
  c.c_pi1 = second.c_pressure;
  c.beta1_trace = second.trace_average;
  c.beta1_shear = second.shear_average;
  return c;
}

namespace {

nlohmann::json decay_json(const std::optional<DecayFit>& d) {
  if (!d) return nullptr;
  return {{"rate", d->rate},       {"fit_residual", d->fit_residual}, {"r_squared", d->r_squared},
          {"y_from", d->y_from},   {"y_to", d->y_to},                 {"points", d->points}};
}

}  // namespace

nlohmann::json constants_json(const BoundaryLayerResult& first, const BoundaryLayerResult& second) {
  nlohmann::json j;
  j["C1"] = first.c_velocity;
  j["C_omega"] = first.c_pressure;
  j["C11"] = second.c_velocity;
  j["C_pi1"] = second.c_pressure;
  j["first_layer"] = {
      {"trace_average", first.trace_average},
      {"shear_average", first.shear_average},
      {"pressure_trace_average", first.pressure_trace_average},
      {"gradient_energy", first.gradient_energy},
      {"dual_identity_rel_gap",
       std::abs(first.trace_average + first.gradient_energy) / std::max(std::abs(first.trace_average), 1e-300)},
      {"max_row_flux", first.max_row_flux},
      {"momentum_residual", first.stats.momentum_residual},
      {"divergence", first.stats.divergence_norm},
      {"decay_above_velocity", decay_json(first.decay_above)},
      {"decay_above_pressure", decay_json(first.decay_pressure_above)},
      {"decay_below_velocity", decay_json(first.decay_below)},
  };
  j["second_layer"] = {
      {"trace_average", second.trace_average},
      {"shear_average", second.shear_average},
      {"pressure_trace_average", second.pressure_trace_average},
      {"max_row_flux", second.max_row_flux},
      {"momentum_residual", second.stats.momentum_residual},
      {"divergence", second.stats.divergence_norm},
      {"decay_above_velocity", decay_json(second.decay_above)},
      {"decay_below_velocity", decay_json(second.decay_below)},
  };
  const auto& s = first.slab;
  j["grid"] = {{"cells_per_period", s.cells_per_period},
               {"rows_below", s.rows_below},
               {"height_above", s.height_above},
               {"nx", s.grid->nx},
               {"ny", s.grid->ny}};
  return j;
}

}  // namespace fracslip
