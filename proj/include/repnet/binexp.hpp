#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "repnet/envs.hpp"
#include "repnet/nnet.hpp"
#include "repnet/rng.hpp"

namespace repnet {

/// Total function from the eight codes in {-1,+1}^3 to labels in {-1,+1};
/// code order follows binary_code_index.
struct OutputTable {
  std::array<std::int8_t, 8> labels{};
};

/// Closed-form empirical loss of a representation on a +-1-labelled sample:
/// (1/mn) sum_i sum_a min(plus(S^i_a), minus(S^i_a)) where S^i_a collects row
/// i's examples mapped to code a. Computed in integer counts and divided
/// once, so "zero loss" is exact.
double rep_empirical_loss(const BinaryNetwork& f, const NMSample& z);
long rep_empirical_loss_count(const BinaryNetwork& f, const NMSample& z);

/// Majority-vote table for one sample row; empty or tied cells default to +1
/// (ties do not change the empirical loss, the default just makes the result
/// deterministic).
OutputTable best_output_table(const BinaryNetwork& f,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<double>& ys);

/// Scans all 2^15 candidate networks (weight bits as a 15-bit counter,
/// row-major; see BinaryNetwork::from_index) and returns, in candidate
/// order, those with zero empirical loss on z.
std::vector<BinaryNetwork> zero_loss_search(const NMSample& z, int threads = 1);

/// Number of inputs among all 2^5 on which table(f(x)) differs from the
/// task's table.
int binary_true_error(const BinaryNetwork& f, const OutputTable& table,
                      std::span<const double> task_table,
                      const Environment& env);

/// New-task evaluation suite: fresh tasks drawn from the environment and,
/// for each task, one independent training set per size in m1_list (input
/// indices into env.inputs). The same suite can be evaluated against
/// learned, exact, and ordinary learners.
struct NewTaskSuite {
  std::vector<int> m1_list;
  std::vector<int> task_ids;                                // one per task
  std::vector<std::vector<std::vector<int>>> train_inputs;  // task x m1 x ids
};
NewTaskSuite make_new_task_suite(const Environment& env,
                                 const std::vector<int>& m1_list,
                                 int new_task_count, Rng& rng);

struct BinCurvePoint {
  int m1 = 0;
  double mean_error = 0.0;  // disagreements out of 32, averaged
};

/// Representation learner's curve: for every representation and suite task,
/// fit the best output table on the training set of each size and count
/// disagreements over all 32 inputs; average over tasks and representations.
std::vector<BinCurvePoint> bin_generalisation_curve(
    const Environment& env, const std::vector<BinaryNetwork>& reps,
    const NewTaskSuite& suite);

/// Ordinary learner's curve: the average true error over every zero-loss
/// network in the full space G o F (each representation weighted by the
/// number of tables realizing zero loss with it; cells unseen in training
/// average over both labels).
std::vector<BinCurvePoint> bin_ordinary_curve(const Environment& env,
                                              const NewTaskSuite& suite,
                                              int threads = 1);

/// Seeded subsample without replacement (keeps candidate order); caps huge
/// zero-loss sets before averaging.
std::vector<BinaryNetwork> subsample_reps(const std::vector<BinaryNetwork>& reps,
                                          std::size_t cap, Rng& rng);

}  // namespace repnet
