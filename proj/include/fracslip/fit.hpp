#pragma once

#include <vector>

namespace fracslip {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs >= 2 distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fracslip
