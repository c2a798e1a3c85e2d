#include "fracslip/fit.hpp"

#include <cmath>

#include "fracslip/error.hpp"

namespace fracslip {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorCode::InsufficientPoints, "line fit needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InsufficientPoints, "line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = y[k] - (f.slope * x[k] + f.intercept);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / static_cast<double>(n));
  f.r_squared = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return f;
}

}  // namespace fracslip
