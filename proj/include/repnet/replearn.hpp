#pragma once

#include <vector>

#include "repnet/envs.hpp"
#include "repnet/nnet.hpp"
#include "repnet/optim.hpp"

namespace repnet {

/// One shared representation network f plus n per-task output networks.
/// f's output dimension must equal every head's input dimension.
struct MultiTaskNet {
  Network f;
  std::vector<Network> heads;

  int param_count() const;
  /// Joint flat order: f's parameters, then each head's in turn.
  std::vector<double> params() const;
  void set_params(std::span<const double> p);
  std::vector<double> param_caps(double weight_clip, double threshold_clip) const;
  void check_dims() const;
};

struct ArchSpec {
  std::vector<int> f_dims;
  std::vector<int> head_dims;
  Activation activation = Activation::Sigmoid;
};

MultiTaskNet make_multitask_net(const ArchSpec& arch, int n_heads, Rng& rng,
                                double lo = -1.0, double hi = 1.0);

struct MultiTaskGrad {
  std::vector<double> f_grad;
  std::vector<std::vector<double>> head_grads;
};

/// Mean-squared multi-task loss (1/n) sum_i (1/m) sum_j (g_i(f(x_ij))-y_ij)^2
/// with exact gradients: each example's error backpropagates through its own
/// head and through f, so f's gradient is the average of the per-task
/// ordinary gradients and head i's gradient is 1/n times its ordinary one.
double multitask_objective(const MultiTaskNet& mt, const NMSample& z,
                           MultiTaskGrad* grad = nullptr);

/// Max absolute residual over every example and head.
double multitask_linf(const MultiTaskNet& mt, const NMSample& z);

struct TrainResult {
  MultiTaskNet net;
  TrainTrace trace;
  NMSample sample;
};

/// Draws an (n,m) sample and minimizes the multi-task loss with conjugate
/// gradient under the given policy. Weights start uniform in
/// [policy.init_lo, policy.init_hi).
TrainResult train_representation(const Environment& env, int n, int m,
                                 const ArchSpec& arch,
                                 const TrainPolicy& policy, Rng& rng);

/// Exact generalisation error: the input-weighted squared error and max
/// absolute error over the full enumerated input list, averaged over the
/// listed tasks (head i is evaluated against task_ids[i]).
std::pair<double, double> true_error(const MultiTaskNet& mt,
                                     const Environment& env,
                                     std::span<const int> task_ids);
std::pair<double, double> true_error(const Network& net,
                                     const Environment& env, int task_id);

/// Empirical surrogate for the environment-level representation loss: for
/// every task in the environment a fresh head is trained on the full
/// enumerated training set with f frozen, keeping the best of `restarts`
/// random initialisations. Returns the average (over tasks, input-weighted
/// over inputs) squared error and the max error.
struct RepTrueLoss {
  double mse = 0.0;
  double linf = 0.0;
  std::vector<double> per_task_mse;
  int failed_tasks = 0;  // tasks whose every training attempt threw
};
RepTrueLoss rep_true_loss(const Network& f, const Environment& env,
                          const std::vector<int>& head_dims,
                          const TrainPolicy& policy, Rng& rng,
                          int restarts = 32, int threads = 1);

enum class CurveMode { Surface, RepVsFull };

enum class CellVariant { Surface, WithRep, FullSpace };

struct SurfaceCell {
  int n = 0;
  int m = 0;
  int replicate = 0;
  double train_mse = 0.0;
  double true_mse = 0.0;
  double true_linf = 0.0;
  int restarts = 0;
  CellVariant variant = CellVariant::Surface;
  int task = -1;       // RepVsFull: which environment task the cell belongs to
  bool failed = false; // training threw; cell recorded, sweep continued
};

struct GridSpec {
  std::vector<int> n_list;
  std::vector<int> m_list;
};

/// Surface mode: train a fresh MultiTaskNet per (n, m, replicate) cell and
/// record train/true errors and restart counts.
///
/// RepVsFull mode: for every environment task and every m in m_list, train
/// `replicates` seeds twice -- a head over the frozen `perfect_rep` (the
/// G o f space) and a full single-task net (G o F) -- recording both cells.
/// Cells are independent jobs with RNG streams split from `rng` by cell
/// index; results merge deterministically regardless of thread count.
std::vector<SurfaceCell> learning_curves(const Environment& env,
                                         CurveMode mode, const GridSpec& grid,
                                         const ArchSpec& arch,
                                         const TrainPolicy& policy,
                                         int replicates, Rng& rng,
                                         const Network* perfect_rep = nullptr,
                                         int threads = 1);

/// Hand-built translation-invariant representation: hidden nodes threshold
/// the active-pixel count so each of the `objects` run-lengths lands on its
/// own output code. Used as a known-good f in tests and as a fallback
/// perfect representation.
Network popcount_detector_rep(int pixels, int objects, const ArchSpec& arch);

}  // namespace repnet
