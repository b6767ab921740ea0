#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace testutil {

/// Central finite differences of a scalar function of a parameter vector.
inline std::vector<double> finite_diff(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> params, double step = 1e-5) {
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    double keep = params[i];
    params[i] = keep + step;
    double up = f(params);
    params[i] = keep - step;
    double down = f(params);
    params[i] = keep;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

/// Relative agreement with a floor so that near-zero pairs compare absolutely.
inline bool rel_close(double a, double b, double tol = 1e-5,
                      double floor_scale = 1e-2) {
  double scale = std::max({std::fabs(a), std::fabs(b), floor_scale});
  return std::fabs(a - b) <= tol * scale;
}

inline bool grads_close(std::span<const double> a, std::span<const double> b,
                        double tol = 1e-5) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!rel_close(a[i], b[i], tol)) return false;
  return true;
}

}  // namespace testutil
