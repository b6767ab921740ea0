#include "repnet/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace repnet {

namespace {

void check_common(const BoundInputs& b) {
  if (b.M <= 0.0) throw std::invalid_argument("bounds: M must be > 0");
  if (b.alpha <= 0.0 || b.alpha >= 1.0)
    throw std::invalid_argument("bounds: alpha must be in (0,1)");
  if (b.nu <= 0.0) throw std::invalid_argument("bounds: nu must be > 0");
  if (b.delta <= 0.0 || b.delta >= 1.0)
    throw std::invalid_argument("bounds: delta must be in (0,1)");
  if (b.n < 1) throw std::invalid_argument("bounds: n must be >= 1");
  if (b.lnC_G < 0.0 || b.lnCstar_F < 0.0)
    throw std::invalid_argument("bounds: log-capacities must be >= 0");
}

}  // namespace

double d_nu(double x, double y, double nu) {
  if (x < 0.0 || y < 0.0) throw std::invalid_argument("d_nu: x,y must be >= 0");
  if (nu <= 0.0) throw std::invalid_argument("d_nu: nu must be > 0");
  return std::fabs(x - y) / (nu + x + y);
}

double multitask_m(const BoundInputs& b) {
  check_common(b);
  double inner = b.lnC_G +
                 (std::log(4.0) + b.lnCstar_F - std::log(b.delta)) / b.n;
  return 8.0 * b.M / (b.alpha * b.alpha * b.nu) * inner;
}

std::pair<double, double> transfer_nm(const BoundInputs& b) {
  check_common(b);
  double pref = 32.0 * b.M / (b.alpha * b.alpha * b.nu);
  double ln_term = std::log(8.0) + b.lnCstar_F - std::log(b.delta);
  double n_req = pref * ln_term;
  double m_req = pref * (b.lnC_G + ln_term / b.n);
  return {n_req, m_req};
}

double impedance_ratio(double lnC_joint_n, double lnC_sigma, int n,
                       bool* clamped) {
  if (lnC_sigma <= 0.0)
    throw std::invalid_argument("impedance_ratio: lnC_sigma must be > 0");
  if (n < 1) throw std::invalid_argument("impedance_ratio: n must be >= 1");
  double value = lnC_joint_n / (static_cast<double>(n) * lnC_sigma);
  double lo = 1.0 / n, hi = 1.0;
  if (clamped) *clamped = value < lo || value > hi;
  if (value < lo) value = lo;
  if (value > hi) value = hi;
  return value;
}

double nn_log_capacity(const BoundInputs& b) {
  if (b.epsilon <= 0.0)
    throw std::invalid_argument("nn_log_capacity: epsilon must be > 0");
  if (b.M <= 0.0 || b.d < 1.0 || b.W < 1.0 || b.lipschitz_product < 1.0)
    throw std::invalid_argument("nn_log_capacity: bad M/d/W/lipschitz");
  double arg = 2.0 * std::exp(1.0) * b.M * b.d * b.lipschitz_product / b.epsilon;
  if (arg <= 1.0) return 0.0;  // bound collapses to a single-element cover
  return 2.0 * b.W * std::log(arg);
}

double deviation_bound(const BoundInputs& b, double lnC_at) {
  check_common(b);
  if (b.m < 0.0) throw std::invalid_argument("deviation_bound: m must be >= 0");
  double log_bound = std::log(4.0) + lnC_at -
                     b.alpha * b.alpha * b.nu * b.n * b.m / (8.0 * b.M);
  if (log_bound >= 0.0) return 1.0;
  return std::exp(log_bound);
}

}  // namespace repnet
