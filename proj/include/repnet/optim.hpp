#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "repnet/rng.hpp"

namespace repnet {

/// Training policy shared by every conjugate-gradient job. The defaults are
/// the stringent halting requirements used throughout: stop at mean-squared
/// error below 1e-6 or max absolute residual below 0.01, restart from fresh
/// uniform weights when five iterations improve the loss by less than 0.01%,
/// and clip weights at 20 (thresholds at 80).
struct TrainPolicy {
  double mse_halt = 1e-6;
  double linf_halt = 0.01;
  int plateau_window = 5;
  double plateau_rel_improvement = 1e-4;
  double weight_clip = 20.0;
  double threshold_clip = 80.0;
  int max_restarts = 20;
  double init_lo = -1.0;
  double init_hi = 1.0;
  std::uint64_t master_seed = 0;
  int max_iters_per_run = 4000;  // hard safety cap on a single CG run
};

enum class HaltReason { Mse, Linf, PlateauRestartExhausted };

const char* halt_reason_name(HaltReason r);

/// Record of one minimization job. The objective sequence is non-increasing
/// within any single CG run (between restart boundaries).
struct TrainTrace {
  std::vector<double> objective;        // accepted objective per iteration
  std::vector<int> restart_starts;      // objective index where each run began
  int restarts = 0;
  HaltReason halt = HaltReason::PlateauRestartExhausted;
  /// Frozen-parameter mask snapshots, recorded whenever the mask changes.
  struct MaskEvent {
    int iteration;  // global iteration index at which this mask took effect
    std::vector<std::uint8_t> frozen;
  };
  std::vector<MaskEvent> clip_events;
  int total_iterations = 0;
};

/// Objective oracle for cg_minimize. `value` must match `value_and_grad`
/// evaluated at the same point. `linf` is optional (e.g. the max absolute
/// training residual); when absent the linf halting criterion is disabled.
struct Objective {
  std::function<double(std::span<const double>)> value;
  std::function<double(std::span<const double>, std::span<double>)> value_and_grad;
  std::function<double(std::span<const double>)> linf;
};

/// Minimizes phi along t >= 0 by bracketing followed by golden-section down
/// to 1e-8 relative bracket width. Returns 0 when no descent is found (e.g.
/// monotone increasing phi). Throws std::runtime_error on a non-finite
/// objective value.
double line_search(const std::function<double(double)>& phi,
                   double bracket_hint);

struct CgResult {
  std::vector<double> params;
  double value = 0.0;
  TrainTrace trace;
};

/// Polak-Ribiere conjugate gradient with exact line search.
///
/// Clipping: a parameter whose magnitude exceeds its cap is set to exactly
/// the cap, frozen, and excluded from the search subspace. A frozen
/// parameter is reintroduced as soon as the current gradient indicates that
/// a downhill step would reduce its magnitude.
///
/// Restarts: when the relative improvement over `plateau_window` iterations
/// falls below `plateau_rel_improvement`, parameters are reinitialized
/// uniformly in [init_lo, init_hi). After `max_restarts` reinitializations
/// the best parameters seen so far are returned with halt reason
/// PlateauRestartExhausted.
///
/// `caps` gives per-parameter clip magnitudes; empty disables clipping.
/// A single call is strictly single-threaded and deterministic in `rng`.
CgResult cg_minimize(const Objective& objective, std::vector<double> init,
                     const TrainPolicy& policy, Rng& rng,
                     std::span<const double> caps = {});

}  // namespace repnet
