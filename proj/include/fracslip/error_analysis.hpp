#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "fracslip/boundary_layer.hpp"
#include "fracslip/dns.hpp"
#include "fracslip/scaling.hpp"

namespace fracslip {

/// APriori: sqrt(eps) grad, eps^-1/2 on Omega2, 1 on Sigma, eps^(1/2 - delta) on Omega1.
/// Corrector: eps grad, 1 on Omega2, eps^1/2 on Sigma, eps^(1 - delta) on Omega1.
enum class WeightSet { APriori, Corrector };

struct NormComponents {
  double grad = 0.0;    ///< weighted
  double omega2 = 0.0;
  double sigma = 0.0;
  double omega1 = 0.0;
  double total = 0.0;
};

/// Pointwise velocity difference sol - approx (pressure slots hold zero). Throws GridMismatch.
StaggeredField error_field(const StaggeredField& sol, const StaggeredField& approx);

/// Norms over the physical width 1 (single-period grids are scaled by the width factor).
NormComponents weighted_norm(const StaggeredField& err, const GridDomain& dom, WeightSet weights,
                             const ScalingParams& p);

/// Order 0..2 use the corrector weights; order -1 denotes v - v0 with the a-priori weights.
WeightSet weights_for_order(int order);

struct RateFit {
  double observed = 0.0;
  double theoretical = 0.0;
  double r_squared = 0.0;
  double margin() const { return observed - theoretical; }
  bool within_slack(double slack = 0.3) const { return observed >= theoretical - slack; }
};

/// Least-squares slope of log(norm) against log(eps). Throws InsufficientPoints with < 3 points.
RateFit fit_rate(const std::vector<double>& epsilons, const std::vector<double>& norms, double theoretical);

struct SlipSample {
  double F = 0.0;
  double epsilon = 0.0;
  double eta = 0.0;
  double v1_eff = 0.0;
  double shear_eff = 0.0;
};

struct SlipFit {
  double a_lin = 0.0;
  double a_quad = 0.0;
  double residual = 0.0;  ///< RMS misfit relative to RMS of v1_eff
};

/// v1_eff = a_lin s + a_quad s^2 by least squares. Throws InsufficientPoints (< 3 samples) or
/// CollinearSamples when the shear values are too close to separate the two terms.
SlipFit slip_regression(const std::vector<SlipSample>& samples);

/// Closed-form slip coefficients.
struct SlipPrediction {
  double a_lin_closed_form = 0.0;      ///< -C1 eps (1 - C1 t) / (1 + C1 t (1 - C1 t)), t = eps^(1 - delta)
  double a_quad_closed_form = 0.0;     ///< -eps^(3 - gamma) <beta1_1 on S>
  double a_lin_leading = 0.0;    ///< -C1 eps
  double a_lin_series = 0.0;     ///< a / c from the composed approximation
  double a_quad_series = 0.0;    ///< b / c^2 - a d / c^3 from the composed approximation
  nlohmann::json to_json() const;
};

/// Series coefficients use the approximation's interface averages: slip = a F + b F^2,
/// shear = c F + d F^2, with the same discrete shear stencil as the DNS trace.
SlipPrediction predict_slip(const ScalingParams& p, const GridDomain& dom, const BoundaryLayerResult& first,
                            const BoundaryLayerResult& second, Order1Sign sign);

/// Slip samples taken from the composed order-2 approximation instead of a DNS.
SlipSample approximation_sample(const ScalingParams& p, const GridDomain& dom, const BoundaryLayerResult& first,
                                const BoundaryLayerResult& second, Order1Sign sign);

struct SaffmanRow {
  double epsilon = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  double F = 0.0;
  double v1_eff = 0.0;
  double linear_prediction = 0.0;  ///< -C1 eps s_eff
  double relative_residual = 0.0;
};

struct SaffmanRate {
  double eta = 0.0;
  double F = 0.0;
  RateFit fit;  ///< exponent of |v1_eff + C1 eps s_eff| against eps, theoretical 2 - gamma
};

struct SaffmanReport {
  std::vector<SaffmanRow> rows;
  std::vector<SaffmanRate> residual_rates;
  /// At every (eps, F) the relative residual grows strictly as eta decreases.
  bool monotone_in_eta = true;
};

/// Linear-law residual per sample. Residual exponents are fitted for every (eta, F) group with at least
/// three eps values.
SaffmanReport saffman_check(const std::vector<SlipSample>& samples, double c1);

}  // namespace fracslip
