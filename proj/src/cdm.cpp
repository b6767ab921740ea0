#include "repnet/cdm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace repnet {

namespace {

void check_domain(double v, double lo, double hi, const char* what) {
  if (v < lo || v > hi)
    throw std::invalid_argument(std::string(what) + ": argument outside domain");
}

}  // namespace

double rho_closed(ClosedRho kind, double x, double y) {
  switch (kind) {
    case ClosedRho::Linear01:
      check_domain(x, 0.0, 1.0, "rho_closed(linear01)");
      check_domain(y, 0.0, 1.0, "rho_closed(linear01)");
      return 0.5 * std::fabs(x - y);
    case ClosedRho::Quadratic11:
      check_domain(x, -1.0, 1.0, "rho_closed(quadratic11)");
      check_domain(y, -1.0, 1.0, "rho_closed(quadratic11)");
      return 0.5 * std::fabs(x - y) * std::fabs(x + y);
    case ClosedRho::Cubic11:
      check_domain(x, -1.0, 1.0, "rho_closed(cubic11)");
      check_domain(y, -1.0, 1.0, "rho_closed(cubic11)");
      return 0.5 * std::fabs(x * x * x - y * y * y);
  }
  throw std::invalid_argument("rho_closed: unknown kind");
}

Distortion make_closed_distortion(ClosedRho kind) {
  Distortion d;
  d.kind = kind == ClosedRho::Linear01 ? DistortionKind::ClosedLinear
                                       : DistortionKind::ClosedQuadratic;
  d.eval = [kind](double x, double y) { return rho_closed(kind, x, y); };
  return d;
}

double rho_from_hypotheses(
    const std::vector<std::function<double(double)>>& hypotheses,
    const std::function<double(double, double)>& sigma, double x, double y) {
  if (hypotheses.empty()) return 0.0;
  double total = 0.0;
  for (const auto& h : hypotheses) total += sigma(h(x), h(y));
  return total / static_cast<double>(hypotheses.size());
}

double rho_g_linear_cube(double alpha, std::span<const double> v,
                         std::span<const double> w) {
  if (v.size() != w.size())
    throw std::invalid_argument("rho_g_linear_cube: dimension mismatch");
  double d2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double d = v[i] - w[i];
    d2 += d * d;
  }
  return alpha * alpha / 3.0 * d2;
}

double rho_g_threshold_ball(std::span<const double> v,
                            std::span<const double> w) {
  if (v.size() != w.size())
    throw std::invalid_argument("rho_g_threshold_ball: dimension mismatch");
  double nv = 0.0, nw = 0.0, dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    nv += v[i] * v[i];
    nw += w[i] * w[i];
    dot += v[i] * w[i];
  }
  if (nv == 0.0 || nw == 0.0)
    throw std::invalid_argument("rho_g_threshold_ball: zero vector has no angle");
  double c = dot / std::sqrt(nv * nw);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) / std::numbers::pi;
}

std::pair<int, double> quantize(const Quantization& q, double x) {
  if (q.points.empty())
    throw std::invalid_argument("quantize: no quantization points");
  int best = 0;
  double best_d = q.rho(x, q.points[0]);
  for (std::size_t i = 1; i < q.points.size(); ++i) {
    double d = q.rho(x, q.points[i]);
    if (d < best_d) {  // ties keep the lowest index
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return {best, best_d};
}

double reconstruction_error(const Quantization& q, std::span<const double> xs,
                            std::span<const double> ws) {
  if (xs.size() != ws.size())
    throw std::invalid_argument("reconstruction_error: xs/ws length mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j)
    total += ws[j] * quantize(q, xs[j]).second;
  return total;
}

double function_reconstruction_error(
    std::span<const int> partition, std::span<const int> point_grid_idx,
    const std::vector<std::vector<double>>& f_values,
    const std::function<double(double, double)>& sigma,
    std::span<const double> ws) {
  if (partition.size() != ws.size())
    throw std::invalid_argument("function_reconstruction_error: sizes mismatch");
  for (std::size_t i = 0; i < point_grid_idx.size(); ++i) {
    int gi = point_grid_idx[i];
    if (gi < 0 || gi >= static_cast<int>(partition.size()) ||
        partition[gi] != static_cast<int>(i))
      throw std::invalid_argument(
          "function_reconstruction_error: partition is not faithful");
  }
  if (f_values.empty()) return 0.0;
  double total = 0.0;
  for (const std::vector<double>& f : f_values) {
    if (f.size() != partition.size())
      throw std::invalid_argument(
          "function_reconstruction_error: f_values grid mismatch");
    double dp = 0.0;
    for (std::size_t j = 0; j < partition.size(); ++j) {
      int cell = partition[j];
      if (cell < 0 || cell >= static_cast<int>(point_grid_idx.size()))
        throw std::invalid_argument(
            "function_reconstruction_error: cell index out of range");
      dp += ws[j] * sigma(f[j], f[point_grid_idx[cell]]);
    }
    total += dp;
  }
  return total / static_cast<double>(f_values.size());
}

std::vector<int> induced_partition(const Distortion& rho,
                                   std::span<const double> xs,
                                   std::span<const int> point_grid_idx) {
  std::vector<int> part(xs.size(), 0);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    int best = 0;
    double best_d = rho(xs[j], xs[point_grid_idx[0]]);
    for (std::size_t i = 1; i < point_grid_idx.size(); ++i) {
      double d = rho(xs[j], xs[point_grid_idx[i]]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    part[j] = best;
  }
  // Points always claim their own grid position regardless of rho ties.
  for (std::size_t i = 0; i < point_grid_idx.size(); ++i)
    part[point_grid_idx[i]] = static_cast<int>(i);
  return part;
}

QuadQuantResult quad_optimal_quantization(int k, double tol, int max_sweeps) {
  if (k < 2)
    throw std::invalid_argument("quad_optimal_quantization: k must be >= 2");
  QuadQuantResult res;
  std::vector<double>& x = res.points;
  x.resize(k);
  for (int i = 0; i < k; ++i) x[i] = static_cast<double>(i + 1) / k;

  const double inv4s2 = 1.0 / (4.0 * std::sqrt(2.0));
  std::vector<std::vector<double>> recent;  // cycle detection window
  bool converged = false;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    std::vector<double> prev = x;
    for (int i = 0; i < k; ++i) {
      if (i == 0) {
        x[0] = x[1] / std::sqrt(7.0);
      } else if (i == k - 1) {
        x[k - 1] = (4.0 + std::sqrt(2.0 + 7.0 * x[k - 2] * x[k - 2])) / 7.0;
      } else {
        double a2 = x[i - 1] * x[i - 1];
        double c2 = x[i + 1] * x[i + 1];
        double v = 0.25 * (a2 + c2) +
                   inv4s2 * std::sqrt(a2 * a2 + 6.0 * a2 * c2 + c2 * c2);
        x[i] = std::sqrt(v);
      }
    }
    double max_abs = 0.0, max_rel = 0.0;
    for (int i = 0; i < k; ++i) {
      double d = std::fabs(x[i] - prev[i]);
      max_abs = std::max(max_abs, d);
      max_rel = std::max(max_rel, d / std::max(std::fabs(x[i]), 1e-300));
    }
    res.max_rel_change.push_back(max_rel);
    res.sweeps = sweep;
    if (max_abs < tol) {
      converged = true;
      break;
    }
    // Limit-cycle check: exact recurrence of a recent state (period <= 4).
    for (const std::vector<double>& old : recent)
      if (old == x) {
        res.limit_cycle = true;
        return res;
      }
    recent.push_back(x);
    if (recent.size() > 4) recent.erase(recent.begin());
  }
  if (!converged) {
    std::string iterate;
    for (double v : x) iterate += " " + std::to_string(v);
    throw std::runtime_error(
        "quad_optimal_quantization: no convergence within sweep budget; "
        "last iterate:" + iterate);
  }
  std::sort(x.begin(), x.end());
  return res;
}

void uniform_grid(double lo, double hi, int count, std::vector<double>& xs,
                  std::vector<double>& ws) {
  xs.resize(count);
  ws.assign(count, 1.0 / count);
  double step = (hi - lo) / count;
  for (int i = 0; i < count; ++i) xs[i] = lo + (i + 0.5) * step;
}

}  // namespace repnet
