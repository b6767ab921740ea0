#pragma once

#include <vector>

#include "repnet/envs.hpp"
#include "repnet/nnet.hpp"
#include "repnet/optim.hpp"

namespace repnet {

/// Classified inputs for metric matching. The pairwise target distance is
/// derived from the labels: 0 for same class, 1 otherwise (symmetric, zero
/// diagonal).
struct LabeledSet {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  double target(std::size_t i, std::size_t j) const {
    return labels[i] == labels[j] ? 0.0 : 1.0;
  }
};

/// Metric mismatch over ordered pairs (i = j terms contribute 0):
/// sum_{i,j} [ 1 - exp(-|f(x_i)-f(x_j)|^2 / T) - target(i,j) ]^2.
double metric_match_error(const Network& f, const LabeledSet& s, double T);

/// Exact gradient with respect to f's parameters; also returns the error.
double metric_match_value_grad(const Network& f, const LabeledSet& s, double T,
                               std::span<double> grad);
GradientVector metric_match_gradient(const Network& f, const LabeledSet& s,
                                     double T);

/// Max absolute mismatch over distinct pairs.
double metric_match_linf(const Network& f, const LabeledSet& s, double T);

struct DirectTrainResult {
  Network f;
  TrainTrace trace;
  LabeledSet sample;
};

/// Draws N labelled inputs (object uniform, position uniform) and minimizes
/// the metric mismatch with conjugate gradient. Halting: total error / N
/// below policy.mse_halt (default 1e-7 for this experiment) or pairwise max
/// mismatch below policy.linf_halt (default 1e-3). Weights start uniform in
/// [policy.init_lo, policy.init_hi) = [0, 0.1). Default architecture is the
/// linear map: no hidden layer, one output node, identity activation.
DirectTrainResult train_direct(const Environment& env, int N, double T,
                               const TrainPolicy& policy, Rng& rng,
                               const std::vector<int>& f_dims = {},
                               Activation activation = Activation::Identity);

/// Direct-training policy defaults (stopping at E/N < 1e-7 or pairwise
/// mismatch < 1e-3, init weights in [0, 0.1)).
TrainPolicy direct_policy_defaults(int N);

struct CentroidModel {
  std::vector<std::vector<double>> centroids;  // one per class
};

struct DirectEval {
  int misclassified = 0;
  double avg_within_variance = 0.0;
  CentroidModel model;
};

/// Builds per-class centroids from f over every position of each object,
/// counts inputs whose nearest centroid (Euclidean, ties to the lowest
/// class) is not their own class, and averages the per-class within-group
/// variances var_i = (1/P) sqrt( sum_j sum_k |f(x_ij) - f(x_ik)|^2 ).
DirectEval evaluate_direct(const Network& f, const Environment& env);

}  // namespace repnet
