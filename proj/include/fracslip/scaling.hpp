#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracslip/boundary_layer.hpp"
#include "fracslip/geometry.hpp"
#include "fracslip/staggered.hpp"

namespace fracslip {

struct ScalingParams {
  double epsilon = 0.125;
  double delta = 0.75;
  double gamma = 1.0;
  double F = 1.0;
  std::optional<double> eta;

  /// delta = 1 - 7 eta / 12, gamma = 3/2 - eta.
  static ScalingParams from_eta(double epsilon, double eta, double F);

  double viscosity() const;           ///< eps^gamma
  double fracture_height() const;     ///< nominal eps^delta
};

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;  ///< positive when satisfied
  std::string statement;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;  ///< H1, H2, H3 in order
  double rate_apriori = 0.0;  ///< delta - gamma + 1
  double rate_order0 = 0.0;   ///< 5/2 - gamma
  double rate_order1 = 0.0;   ///< 5/2 + 3 delta - 3 gamma
  double rate_order2 = 0.0;   ///< 7/2 - delta - gamma

  bool all_pass() const;
  std::vector<std::string> failures() const;
  nlohmann::json to_json() const;
};

/// Failures are reported, not thrown.
HypothesisReport validate_hypotheses(const ScalingParams& p);

/// Closed-form field on Omega; p is zero where not given.
struct AnalyticField {
  std::string tag;
  std::function<double(double, double)> v1;
  std::function<double(double, double)> v2;
  std::function<double(double, double)> p;
};

/// v1 = -eps^(2 delta - gamma) (F/2) (x2/H)(x2/H - 1) on 0 <= x2 <= H, zero elsewhere. H defaults to
/// eps^delta; pass the snapped height to match a grid.
AnalyticField poiseuille(const ScalingParams& p, std::optional<double> height = std::nullopt);

/// Linear profile c * x2+ / H e1, zero for x2 < 0.
AnalyticField couette(double coefficient, double height);

/// d v1 / d x2 at x2 = 0 of the Poiseuille profile: eps^(delta - gamma) F / 2.
double interface_shear(const ScalingParams& p);

/// Orientation of the first corrector. Derived: the boundary layer cancels the shear jump of the
/// order-0 Couette counterflow. Reversed: the opposite orientation.
enum class Order1Sign { Derived, Reversed };

Order1Sign parse_order1_sign(const std::string& s);
std::string to_string(Order1Sign s);

/// v ~ v0(x2) e1 + b * beta(x/eps) + c * (x2+/H) e1 + d * beta1(x/eps).
struct Approximation {
  int order = 0;
  double height = 0.0;         ///< H used in the formulas
  double poiseuille_scale = 0.0;  ///< v0 = poiseuille_scale * x2 (H - x2) in the fracture
  double beta_coef = 0.0;
  double couette_coef = 0.0;
  double beta1_coef = 0.0;
  const BoundaryLayerResult* first = nullptr;
  const BoundaryLayerResult* second = nullptr;

  /// Samples on the DNS grid; the boundary-layer terms are read from slab nodes (same cells per
  /// period), with (C, 0) above the slab top and zero below the slab bottom. Pressure is left zero.
  StaggeredField sample(const GridDomain& dom) const;
  nlohmann::json to_json() const;
};

/// Throws MissingSecondLayer for order 2 without `second`.
Approximation compose_approximation(const ScalingParams& p, double height, const BoundaryLayerResult& first,
                                    const BoundaryLayerResult* second, int order,
                                    Order1Sign sign = Order1Sign::Derived);

/// p ~ -(F/2) H (omega(x/eps) - C_omega) at the fluid cells of the DNS grid.
std::vector<double> pressure_approximation(const ScalingParams& p, double height, const BoundaryLayerResult& first,
                                           const GridDomain& dom);

/// Boundary-layer sampling helpers: values at DNS nodes (i, j) read from the slab.
double sample_u(const BoundaryLayerResult& bl, const GridDomain& dom, int i, int j);
double sample_v(const BoundaryLayerResult& bl, const GridDomain& dom, int i, int jv);
double sample_p(const BoundaryLayerResult& bl, const GridDomain& dom, int i, int j);

}  // namespace fracslip
