#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repnet/nnet.hpp"
#include "repnet/rng.hpp"

namespace repnet {

enum class EnvKind { Translation10, Symmetric10, Binary5x3, Classifier };

/// Fully enumerated toy environment: an explicit input list, per-input
/// sampling weights, and every task as a lookup table over the input list.
/// True errors are therefore computable exactly.
///
/// Targets are stored as {0,1} except for Binary5x3 which keeps the +-1
/// convention of the exhaustive-search experiment; that is the one conversion
/// point between the continuous and binary worlds.
struct Environment {
  EnvKind kind = EnvKind::Translation10;
  int n_pixels = 0;
  int n_objects = 0;  // classifier-style environments; 0 otherwise

  std::vector<std::vector<double>> inputs;
  std::vector<double> input_weights;       // sums to 1
  std::vector<std::vector<double>> tasks;  // tasks[t][input_index]

  // Classifier metadata (Translation10 and Classifier kinds): the object id
  // and position of each input.
  std::vector<int> input_class;
  std::vector<int> input_position;

  // Symmetric10 only: input indices grouped by popcount (index 1..4), used
  // by the two-stage draw.
  std::vector<std::vector<int>> popcount_groups;

  // Binary5x3 only: the generating representation f*.
  bool has_generator = false;
  BinaryNetwork generator{};

  int input_count() const { return static_cast<int>(inputs.size()); }
  int task_count() const { return static_cast<int>(tasks.size()); }
};

/// Ten-pixel circular retina; inputs are the four objects (runs of 1..4
/// adjacent active pixels) at all ten positions; tasks are the 14
/// translation-invariant Boolean functions (all 2^4 assignments minus the two
/// constants). Task order: assignment bitmask 1..14 where bit k is the value
/// on the (k+1)-pixel object.
Environment build_translation10();

/// All 10-bit inputs with one to four active pixels; tasks depend only on
/// the number of ones (mask order as above). Input weights follow the
/// two-stage rule: popcount uniform on {1..4}, then uniform placement.
Environment build_symmetric10();

/// X = {-1,+1}^5 uniform (input order: 5-bit counter, bit i set means
/// component i is +1). Tasks are g o f* for every Boolean g on {-1,+1}^3
/// (256 tables, duplicates kept), f* seeded at random.
Environment build_binary5x3(std::uint64_t seed);

/// P-pixel circular retina with K objects (runs of 1..K adjacent pixels).
/// Inputs are object x position; weights are object-uniform then
/// position-uniform. Tasks are the K per-object indicator functions.
Environment build_classifier(int pixels, int objects);

Environment build_env(EnvKind kind, std::uint64_t seed = 0, int pixels = 0,
                      int objects = 0);

EnvKind env_kind_from_name(const std::string& name);

/// n tasks x m examples each, drawn with replacement. Self-contained: the
/// rows carry both the drawn input vectors and their targets, plus the task
/// ids and input indices for exact evaluation.
struct NMSample {
  int n = 0;
  int m = 0;
  std::vector<int> task_ids;                               // n
  std::vector<std::vector<int>> input_ids;                 // n x m
  std::vector<std::vector<std::vector<double>>> inputs;    // n x m x dim
  std::vector<std::vector<double>> targets;                // n x m
};

/// Row draw order (fixed contract): for each row, first the task id, then the
/// m inputs. Translation10 and Binary5x3 draw inputs uniformly; Symmetric10
/// uses the two-stage popcount rule; Classifier draws object then position.
NMSample draw_nm_sample(const Environment& env, int n, int m, Rng& rng);

}  // namespace repnet
