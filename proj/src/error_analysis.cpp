#include "fracslip/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fracslip/error.hpp"
#include "fracslip/fit.hpp"

namespace fracslip {

StaggeredField error_field(const StaggeredField& sol, const StaggeredField& approx) {
  const auto& a = *sol.grid;
  const auto& b = *approx.grid;
  if (a.nx != b.nx || a.ny != b.ny || a.row_offset != b.row_offset || std::abs(a.h - b.h) > 1e-14 * a.h) {
    throw Error(ErrorCode::GridMismatch, "solution and approximation live on different grids");
  }
  auto e = StaggeredField::zeros(sol.grid);
  for (std::size_t k = 0; k < e.u.size(); ++k) e.u[k] = sol.u[k] - approx.u[k];
  for (std::size_t k = 0; k < e.v.size(); ++k) e.v[k] = sol.v[k] - approx.v[k];
  return e;
}

WeightSet weights_for_order(int order) {
  if (order == -1) return WeightSet::APriori;
  if (order >= 0 && order <= 2) return WeightSet::Corrector;
  throw Error(ErrorCode::InvalidArgument, "error order must be -1, 0, 1 or 2");
}

NormComponents weighted_norm(const StaggeredField& err, const GridDomain& dom, WeightSet weights,
                             const ScalingParams& p) {
  if (err.grid != dom.grid && (err.grid->nx != dom.grid->nx || err.grid->ny != dom.grid->ny)) {
    throw Error(ErrorCode::GridMismatch, "error field does not live on the domain grid");
  }
  const double eps = p.epsilon;
  const double scale = std::sqrt(dom.width_factor());
  const auto full = norms(err, Region::Full);
  const auto porous = norms(err, Region::Porous);
  const auto fracture = norms(err, Region::Fracture);

  double wg, w2, ws, w1;
  if (weights == WeightSet::APriori) {
    wg = std::sqrt(eps);
    w2 = 1.0 / std::sqrt(eps);
    ws = 1.0;
    w1 = std::pow(eps, 0.5 - p.delta);
  } else {
    wg = eps;
    w2 = 1.0;
    ws = std::sqrt(eps);
    w1 = std::pow(eps, 1.0 - p.delta);
  }
  NormComponents n;
  n.grad = wg * scale * full.grad;
  n.omega2 = w2 * scale * porous.l2;
  n.sigma = ws * scale * full.trace;
  n.omega1 = w1 * scale * fracture.l2;
  n.total = n.grad + n.omega2 + n.sigma + n.omega1;
  return n;
}

RateFit fit_rate(const std::vector<double>& epsilons, const std::vector<double>& values, double theoretical) {
  if (epsilons.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "epsilon and norm lists differ in length");
  }
  if (epsilons.size() < 3) {
    throw Error(ErrorCode::InsufficientPoints, "rate fit needs at least 3 eps values, got " +
                                                   std::to_string(epsilons.size()));
  }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0.0) || !(values[k] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "rate fit needs positive eps and norms");
    }
    x.push_back(std::log(epsilons[k]));
    y.push_back(std::log(values[k]));
  }
  const auto line = fit_line(x, y);
  return {line.slope, theoretical, line.r_squared};
}

SlipFit slip_regression(const std::vector<SlipSample>& samples) {
  if (samples.size() < 3) {
    throw Error(ErrorCode::InsufficientPoints, "slip regression needs at least 3 samples, got " +
                                                   std::to_string(samples.size()));
  }
  // Normal equations for v = a s + b s^2, columns scaled by the largest |s|.
  double smax = 0.0;
  for (const auto& s : samples) smax = std::max(smax, std::abs(s.shear_eff));
  if (smax == 0.0) throw Error(ErrorCode::CollinearSamples, "all shear samples are zero");
  double m11 = 0, m12 = 0, m22 = 0, r1 = 0, r2 = 0, vv = 0;
  for (const auto& s : samples) {
    const double z = s.shear_eff / smax;
    m11 += z * z;
    m12 += z * z * z;
    m22 += z * z * z * z;
    r1 += z * s.v1_eff;
    r2 += z * z * s.v1_eff;
    vv += s.v1_eff * s.v1_eff;
  }
  const double det = m11 * m22 - m12 * m12;
  if (det <= 1e-10 * m11 * m22) {
    throw Error(ErrorCode::CollinearSamples, "shear samples cannot separate the linear and quadratic terms");
  }
  const double a = (r1 * m22 - r2 * m12) / det;
  const double b = (m11 * r2 - m12 * r1) / det;
  SlipFit fit;
  fit.a_lin = a / smax;
  fit.a_quad = b / (smax * smax);
  double miss = 0.0;
  for (const auto& s : samples) {
    const double r = s.v1_eff - fit.a_lin * s.shear_eff - fit.a_quad * s.shear_eff * s.shear_eff;
    miss += r * r;
  }
  fit.residual = vv > 0.0 ? std::sqrt(miss / vv) : 0.0;
  return fit;
}

nlohmann::json SlipPrediction::to_json() const {
  return {{"a_lin_closed_form", a_lin_closed_form},     {"a_quad_closed_form", a_quad_closed_form},
          {"a_lin_leading", a_lin_leading}, {"a_lin_series", a_lin_series},
          {"a_quad_series", a_quad_series}};
}

namespace {

std::pair<double, double> approximation_trace(ScalingParams p, double F, const GridDomain& dom,
                                              const BoundaryLayerResult& first, const BoundaryLayerResult& second,
                                              Order1Sign sign) {
  p.F = F;
  const auto approx = compose_approximation(p, dom.fracture_height, first, &second, 2, sign);
  const auto t = interface_trace(approx.sample(dom), dom);
  return {t.slip_average, t.shear_average};
}

}  // namespace

SlipPrediction predict_slip(const ScalingParams& p, const GridDomain& dom, const BoundaryLayerResult& first,
                            const BoundaryLayerResult& second, Order1Sign sign) {
  const double eps = p.epsilon;
  const double c1 = first.c_velocity;
  const double t = std::pow(eps, 1.0 - p.delta);
  SlipPrediction s;
  s.a_lin_closed_form = -c1 * eps * (1.0 - c1 * t) / (1.0 + c1 * t * (1.0 - c1 * t));
  s.a_quad_closed_form = -std::pow(eps, 3.0 - p.gamma) * second.trace_average;
  s.a_lin_leading = -c1 * eps;

  // Every term of the approximation is linear or quadratic in F, so F = +-1 separates them.
  const auto plus = approximation_trace(p, 1.0, dom, first, second, sign);
  const auto minus = approximation_trace(p, -1.0, dom, first, second, sign);
  const double a = 0.5 * (plus.first - minus.first);
  const double b = 0.5 * (plus.first + minus.first);
  const double c = 0.5 * (plus.second - minus.second);
  const double d = 0.5 * (plus.second + minus.second);
  s.a_lin_series = a / c;
  s.a_quad_series = b / (c * c) - a * d / (c * c * c);
  return s;
}

SlipSample approximation_sample(const ScalingParams& p, const GridDomain& dom, const BoundaryLayerResult& first,
                                const BoundaryLayerResult& second, Order1Sign sign) {
  const auto [slip, shear] = approximation_trace(p, p.F, dom, first, second, sign);
  return {p.F, p.epsilon, p.eta.value_or(1.5 - p.gamma), slip, shear};
}

SaffmanReport saffman_check(const std::vector<SlipSample>& samples, double c1) {
  SaffmanReport rep;
  std::map<std::pair<double, double>, std::vector<const SaffmanRow*>> by_eta_f;
  rep.rows.reserve(samples.size());
  for (const auto& s : samples) {
    SaffmanRow r;
    r.epsilon = s.epsilon;
    r.eta = s.eta;
    r.gamma = 1.5 - s.eta;
    r.F = s.F;
    r.v1_eff = s.v1_eff;
    r.linear_prediction = -c1 * s.epsilon * s.shear_eff;
    r.relative_residual = std::abs(s.v1_eff - r.linear_prediction) / std::abs(s.v1_eff);
    rep.rows.push_back(r);
  }
  for (const auto& r : rep.rows) by_eta_f[{r.eta, r.F}].push_back(&r);
  for (const auto& [key, rows] : by_eta_f) {
    if (rows.size() < 3) continue;
    std::vector<double> e, res;
    for (const auto* r : rows) {
      e.push_back(r->epsilon);
      res.push_back(std::abs(r->v1_eff - r->linear_prediction));
    }
    rep.residual_rates.push_back({key.first, key.second, fit_rate(e, res, 0.5 + key.first)});
  }
  // Monotonicity: within each (eps, F), sort by eta and require the residual to fall as eta grows.
  std::map<std::pair<double, double>, std::vector<const SaffmanRow*>> by_eps_f;
  for (const auto& r : rep.rows) by_eps_f[{r.epsilon, r.F}].push_back(&r);
  for (auto& [key, rows] : by_eps_f) {
    std::sort(rows.begin(), rows.end(), [](const SaffmanRow* a, const SaffmanRow* b) { return a->eta < b->eta; });
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (!(rows[k]->relative_residual < rows[k - 1]->relative_residual)) rep.monotone_in_eta = false;
    }
  }
  return rep;
}

}  // namespace fracslip
