#pragma once

#include <utility>

namespace repnet {

/// Inputs to the sample-complexity calculators. Capacities enter as
/// user-supplied logarithms (or via nn_log_capacity); the formulas are
/// evaluated exactly as stated, they do not compute capacities of arbitrary
/// function classes.
struct BoundInputs {
  double M = 1.0;         // loss range bound
  double alpha = 0.1;     // accuracy, in (0,1)
  double nu = 0.1;        // metric parameter, > 0
  double delta = 0.01;    // confidence, in (0,1)
  int n = 1;              // tasks
  double m = 1.0;         // examples per task
  double lnC_G = 0.0;     // ln capacity of the output class (at eps1)
  double lnCstar_F = 0.0; // ln capacity of the representation class (at eps2)
  double W = 1.0;         // parameter count (capacity formula)
  double d = 1.0;         // network depth
  double lipschitz_product = 1.0;
  double epsilon = 0.1;   // cover scale for nn_log_capacity
};

/// d_nu(x, y) = |x-y| / (nu + x + y) on nonnegative reals; range [0,1).
double d_nu(double x, double y, double nu);

/// Examples per task sufficient for the multi-task deviation guarantee:
/// (8M / alpha^2 nu) [ lnC_G + (1/n) ln(4 e^{lnCstar_F} / delta) ].
/// n = 1 recovers the single-task bound.
double multitask_m(const BoundInputs& b);

/// Task and per-task sample sizes for transfer to novel tasks:
///   n_req = (32M / alpha^2 nu) ln(8 e^{lnCstar_F} / delta)
///   m_req = (32M / alpha^2 nu) [ lnC_G + (1/n) ln(8 e^{lnCstar_F} / delta) ]
/// m_req is evaluated at the supplied n. lnC_G and lnCstar_F are understood
/// at scales eps1 + eps2 = alpha nu / 16 (equal halves by default; the split
/// only selects which capacities the caller supplies).
std::pair<double, double> transfer_nm(const BoundInputs& b);

/// (1/n) lnC_joint_n / lnC_sigma. Values outside the theoretical range
/// [1/n, 1] are clamped and flagged via *clamped when provided.
double impedance_ratio(double lnC_joint_n, double lnC_sigma, int n,
                       bool* clamped = nullptr);

/// Closed-form feedforward-network capacity bound:
/// ln C <= 2 W ln(2 e M d lipschitz_product / epsilon); 0 when the argument
/// of the logarithm is <= 1 (the cover is a single function).
double nn_log_capacity(const BoundInputs& b);

/// min(1, 4 e^{lnC_at} exp(-alpha^2 nu n m / 8M)): the probability bound on
/// a d_nu deviation larger than alpha; n = 1 gives the single-task form.
double deviation_bound(const BoundInputs& b, double lnC_at);

}  // namespace repnet
