#pragma once

#include <functional>
#include <span>
#include <vector>

#include "repnet/rng.hpp"

namespace repnet {

enum class ClosedRho {
  Linear01,     // F = {x -> ax}, a ~ U[0,1] on X=[0,1]:  rho = |x-y|/2
  Quadratic11,  // F = {x -> ax^2}, a ~ U[-1,1] on X=[-1,1]: rho = |x-y||x+y|/2
  Cubic11,      // F = {x -> ax^3}, a ~ U[-1,1]: rho = |x^3-y^3|/2.
                // Experimental: stated nowhere in closed form, validated
                // against the Monte-Carlo estimator only.
};

double rho_closed(ClosedRho kind, double x, double y);

/// Scalar distortion measure handle.
enum class DistortionKind {
  ClosedLinear,
  ClosedQuadratic,
  McEstimate,
  LearnerEstimate,
  Table
};
struct Distortion {
  std::function<double(double, double)> eval;
  DistortionKind kind = DistortionKind::ClosedLinear;
  double operator()(double x, double y) const { return eval(x, y); }
};

Distortion make_closed_distortion(ClosedRho kind);

/// Monte-Carlo estimate (1/M) sum σ(f_k(x), f_k(y)) over M functions drawn
/// from the sampler.
template <class T>
double rho_mc(const std::function<std::function<double(const T&)>(Rng&)>& sampler,
              const std::function<double(double, double)>& sigma, const T& x,
              const T& y, int draws, Rng& rng) {
  if (draws < 1) return 0.0;
  double total = 0.0;
  for (int k = 0; k < draws; ++k) {
    auto f = sampler(rng);
    total += sigma(f(x), f(y));
  }
  return total / draws;
}

/// Exact average over an explicit hypothesis list (the learner-estimate
/// variant: pass the n trained heads g_i o f).
double rho_from_hypotheses(
    const std::vector<std::function<double(double)>>& hypotheses,
    const std::function<double(double, double)>& sigma, double x, double y);

/// rho_G for linear output maps with coefficients uniform on the cube
/// [-alpha, alpha]^dim and squared loss: (alpha^2/3) |v-w|^2.
double rho_g_linear_cube(double alpha, std::span<const double> v,
                         std::span<const double> w);

/// rho_G for thresholded linear maps with weights uniform on the unit ball:
/// theta / pi with theta the angle between v and w. Zero vectors rejected.
double rho_g_threshold_ball(std::span<const double> v,
                            std::span<const double> w);

/// Ordered quantization points with a distortion handle; the partition is
/// the induced one (nearest point under rho, ties to the lowest index).
struct Quantization {
  std::vector<double> points;
  Distortion rho;
};

/// Index of the nearest quantization point and the distortion to it.
std::pair<int, double> quantize(const Quantization& q, double x);

/// E_rho(points) = sum_j w_j rho(x_j, nearest point), over an explicit
/// discretization (or sample) with weights.
double reconstruction_error(const Quantization& q, std::span<const double> xs,
                            std::span<const double> ws);

/// E_F for an explicit faithful partition: the average over sampled
/// functions f of sum_j w_j sigma(f(x_j), f(point of x_j's cell)).
/// `partition[j]` assigns grid index j to a point; `point_grid_idx[i]` is
/// point i's own grid index and must be assigned to cell i (faithfulness).
/// `f_values[k][j]` is the k-th sampled function evaluated at grid index j.
double function_reconstruction_error(
    std::span<const int> partition, std::span<const int> point_grid_idx,
    const std::vector<std::vector<double>>& f_values,
    const std::function<double(double, double)>& sigma,
    std::span<const double> ws);

/// Partition of a grid induced by a distortion and points-on-the-grid.
std::vector<int> induced_partition(const Distortion& rho,
                                   std::span<const double> xs,
                                   std::span<const int> point_grid_idx);

/// Fixed-point solver for the distortion-optimal quantization of the
/// quadratic environment on [-1,1]. Starting from x_i = i/k the points are
/// updated in index order:
///   x_1 = x_2/sqrt(7),
///   x_i^2 = (x_{i-1}^2+x_{i+1}^2)/4
///           + sqrt(x_{i-1}^4 + 6 x_{i-1}^2 x_{i+1}^2 + x_{i+1}^4)/(4 sqrt 2),
///   x_k = (4 + sqrt(2 + 7 x_{k-1}^2))/7,
/// until the largest point change falls below `tol` or the sweep budget is
/// exhausted. A recurring state (period <= 4) without convergence is
/// reported as a limit cycle.
struct QuadQuantResult {
  std::vector<double> points;  // sorted, strictly increasing in (0,1)
  int sweeps = 0;
  std::vector<double> max_rel_change;  // per sweep
  bool limit_cycle = false;
};
QuadQuantResult quad_optimal_quantization(int k, double tol = 1e-9,
                                          int max_sweeps = 10000);

/// Uniform grid of `count` cell midpoints on [lo, hi] with equal weights.
void uniform_grid(double lo, double hi, int count, std::vector<double>& xs,
                  std::vector<double>& ws);

}  // namespace repnet
