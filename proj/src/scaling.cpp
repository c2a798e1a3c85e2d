#include "fracslip/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "fracslip/error.hpp"

namespace fracslip {

ScalingParams ScalingParams::from_eta(double epsilon, double eta, double F) {
  ScalingParams p;
  p.epsilon = epsilon;
  p.delta = 1.0 - 7.0 * eta / 12.0;
  p.gamma = 1.5 - eta;
  p.F = F;
  p.eta = eta;
  return p;
}

double ScalingParams::viscosity() const { return std::pow(epsilon, gamma); }

double ScalingParams::fracture_height() const { return std::pow(epsilon, delta); }

bool HypothesisReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.pass; });
}

std::vector<std::string> HypothesisReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass) out.push_back(c.name);
  }
  return out;
}

nlohmann::json HypothesisReport::to_json() const {
  nlohmann::json j;
  for (const auto& c : checks) j[c.name] = {{"pass", c.pass}, {"margin", c.margin}, {"statement", c.statement}};
  j["rates"] = {{"apriori", rate_apriori}, {"order0", rate_order0}, {"order1", rate_order1}, {"order2", rate_order2}};
  j["all_pass"] = all_pass();
  return j;
}

HypothesisReport validate_hypotheses(const ScalingParams& p) {
  const double d = p.delta;
  const double g = p.gamma;
  HypothesisReport r;
  const double m1 = 3.0 * d - 2.0 * g;
  const double m2 = std::min({d, 1.0 - d, g, 1.5 - g});
  const double m3 = 2.0 * g + 1.0 - 4.0 * d;
  r.checks.push_back({"H1", m1 > 0.0, m1, "2 gamma < 3 delta"});
  r.checks.push_back({"H2", m2 > 0.0, m2, "0 < delta < 1 and 0 < gamma < 3/2"});
  r.checks.push_back({"H3", m3 > 0.0, m3, "4 delta < 2 gamma + 1"});
  r.rate_apriori = d - g + 1.0;
  r.rate_order0 = 2.5 - g;
  r.rate_order1 = 2.5 + 3.0 * d - 3.0 * g;
  r.rate_order2 = 3.5 - d - g;
  return r;
}

AnalyticField poiseuille(const ScalingParams& p, std::optional<double> height) {
  const double H = height.value_or(p.fracture_height());
  const double scale = 0.5 * p.F * std::pow(p.epsilon, -p.gamma);
  AnalyticField f;
  f.tag = "v0";
  // -eps^(2 delta - gamma)(F/2)(x/H)(x/H - 1) with H^2 in place of eps^(2 delta).
  f.v1 = [H, scale](double, double x2) { return (x2 >= 0.0 && x2 <= H) ? scale * x2 * (H - x2) : 0.0; };
  f.v2 = [](double, double) { return 0.0; };
  f.p = [](double, double) { return 0.0; };
  return f;
}

AnalyticField couette(double coefficient, double height) {
  AnalyticField f;
  f.tag = "couette";
  f.v1 = [coefficient, height](double, double x2) { return coefficient * std::max(x2, 0.0) / height; };
  f.v2 = [](double, double) { return 0.0; };
  f.p = [](double, double) { return 0.0; };
  return f;
}

double interface_shear(const ScalingParams& p) { return std::pow(p.epsilon, p.delta - p.gamma) * p.F / 2.0; }

Order1Sign parse_order1_sign(const std::string& s) {
  if (s == "derived") return Order1Sign::Derived;
  if (s == "reversed") return Order1Sign::Reversed;
  throw Error(ErrorCode::ConfigError, "order1_sign must be 'derived' or 'reversed', got '" + s + "'");
}

std::string to_string(Order1Sign s) { return s == Order1Sign::Derived ? "derived" : "reversed"; }

namespace {

void check_alignment(const BoundaryLayerResult& bl, const GridDomain& dom) {
  if (bl.slab.cells_per_period != dom.cells_per_period) {
    throw Error(ErrorCode::GridMismatch, "slab and DNS grid use different cells per period (" +
                                             std::to_string(bl.slab.cells_per_period) + " vs " +
                                             std::to_string(dom.cells_per_period) + ")");
  }
}

}  // namespace

double sample_u(const BoundaryLayerResult& bl, const GridDomain& dom, int i, int j) {
  const auto& s = *bl.slab.grid;
  const int js = j + dom.grid->row_offset - s.row_offset;
  if (js >= s.ny) return bl.c_velocity;
  if (js < 0) return 0.0;
  return bl.field.U(i, js);
}

double sample_v(const BoundaryLayerResult& bl, const GridDomain& dom, int i, int jv) {
  const auto& s = *bl.slab.grid;
  const int js = jv + dom.grid->row_offset - s.row_offset;
  if (js > s.ny || js < 0) return 0.0;
  return bl.field.V(i, js);
}

double sample_p(const BoundaryLayerResult& bl, const GridDomain& dom, int i, int j) {
  const auto& s = *bl.slab.grid;
  int js = j + dom.grid->row_offset - s.row_offset;
  if (js >= s.ny) return bl.c_pressure;
  if (js < 0) {
    // Deep porous region: continue the bottom period periodically.
    const int n = bl.slab.cells_per_period;
    js = ((js % n) + n) % n;
  }
  if (s.solid_cell(i, js)) return 0.0;
  return bl.field.P(i, js);
}

Approximation compose_approximation(const ScalingParams& p, double height, const BoundaryLayerResult& first,
                                    const BoundaryLayerResult* second, int order, Order1Sign sign) {
  if (order < 0 || order > 2) throw Error(ErrorCode::InvalidArgument, "approximation order must be 0, 1 or 2");
  if (order == 2 && second == nullptr) {
    throw Error(ErrorCode::MissingSecondLayer, "order 2 needs the second boundary layer");
  }
  const double eps = p.epsilon;
  const double g = p.gamma;
  const double half_f = 0.5 * p.F;
  const double c1 = first.c_velocity;
  const double A = half_f * height * std::pow(eps, 1.0 - g);

  Approximation a;
  a.order = order;
  a.height = height;
  a.first = &first;
  a.second = order == 2 ? second : nullptr;
  a.poiseuille_scale = half_f * std::pow(eps, -g);
  a.beta_coef = -A;
  a.couette_coef = A * c1;
  if (order >= 1) {
    const double s = sign == Order1Sign::Derived ? 1.0 : -1.0;
    const double k = half_f * std::pow(eps, 2.0 - g);
    a.beta_coef += s * (-k * c1);
    a.couette_coef += s * (k * c1 * c1);
  }
  if (order >= 2) {
    const double k = half_f * half_f * height * height * std::pow(eps, 3.0 - 3.0 * g);
    a.beta1_coef = -k;
    a.couette_coef += k * second->c_velocity;
  }
  return a;
}

StaggeredField Approximation::sample(const GridDomain& dom) const {
  check_alignment(*first, dom);
  if (second) check_alignment(*second, dom);
  const auto& g = *dom.grid;
  auto f = StaggeredField::zeros(dom.grid);
  for (int j = 0; j < g.ny; ++j) {
    const double x2 = g.y_cell(j);
    const double base = (x2 >= 0.0 && x2 <= height ? poiseuille_scale * x2 * (height - x2) : 0.0) +
                        couette_coef * std::max(x2, 0.0) / height;
    for (int i = 0; i < g.nx; ++i) {
      double u = base + beta_coef * sample_u(*first, dom, i, j);
      if (second) u += beta1_coef * sample_u(*second, dom, i, j);
      f.U(i, j) = u;
    }
  }
  for (int jv = 0; jv <= g.ny; ++jv) {
    for (int i = 0; i < g.nx; ++i) {
      double v = beta_coef * sample_v(*first, dom, i, jv);
      if (second) v += beta1_coef * sample_v(*second, dom, i, jv);
      f.V(i, jv) = v;
    }
  }
  return f;
}

nlohmann::json Approximation::to_json() const {
  return {{"order", order},
          {"height", height},
          {"poiseuille_scale", poiseuille_scale},
          {"beta_coef", beta_coef},
          {"couette_coef", couette_coef},
          {"beta1_coef", beta1_coef}};
}

std::vector<double> pressure_approximation(const ScalingParams& p, double height, const BoundaryLayerResult& first,
                                           const GridDomain& dom) {
  check_alignment(first, dom);
  const auto& g = *dom.grid;
  std::vector<double> out(static_cast<std::size_t>(g.nx * g.ny), 0.0);
  const double k = -0.5 * p.F * height;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.solid_cell(i, j)) continue;
      out[static_cast<std::size_t>(i + g.nx * j)] = k * (sample_p(first, dom, i, j) - first.c_pressure);
    }
  }
  return out;
}

}  // namespace fracslip
