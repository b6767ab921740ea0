#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "repnet/optim.hpp"

namespace repnet {

/// Flat experiment configuration: an experiment name, the sweep lists, the
/// training policy, and a mandatory master seed (no wall-clock seeding
/// anywhere). Unknown keys are rejected so typos fail loudly.
struct ExperimentConfig {
  std::string experiment;  // binexp | translation | symmetric | rep_vs_full |
                           // directrep1 | directrep2 | quantize_quadratic |
                           // rho_validate | bounds_sweep
  std::string out_dir = "out";
  std::uint64_t master_seed = 0;
  bool seed_set = false;
  int threads = 1;

  std::vector<int> n_list;
  std::vector<int> m_list;
  int replicates = -1;  // -1: per-experiment default (3 surface sims, 32
                        // rep-vs-full seeds, 10 binexp samples, 200/24
                        // direct-training runs)

  TrainPolicy policy;

  // binexp
  std::vector<int> m1_list = {2, 6, 10, 14, 18, 22};
  int new_tasks = 10;
  int zero_loss_cap = 512;
  bool ordinary_curve = true;

  // rep_vs_full
  std::string rep_path;   // optional pre-trained representation
  int search_n = 9;       // grid cell used to hunt for a perfect rep
  int search_m = 81;
  int search_attempts = 20;
  double perfect_threshold = 0.01;

  // directrep
  std::vector<int> N_list;
  double T = 0.01;

  // quantize_quadratic
  int k = 6;

  // rho_validate
  int mc_draws = 100000;
  int pairs = 100;

  // bounds_sweep
  double bound_M = 1.0;
  double bound_alpha = 0.1;
  double bound_nu = 0.1;
  double bound_delta = 0.01;
  double bound_lnC_G = 10.0;
  double bound_lnCstar_F = 100.0;
};

/// `key=value` per line; '#' starts a comment. Keys mirror the CLI flags.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

/// Runs one experiment: writes one CSV per result family plus manifest.txt
/// into out_dir. Deterministic: identical config and seed give byte-identical
/// files. Returns the list of files written.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

}  // namespace repnet
