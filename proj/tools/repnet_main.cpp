#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repnet/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string seed;
  std::string n_list, m_list, m1_list, N_list;
  int replicates = -1;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file");
  cmd->add_option("--seed", flags.seed, "master seed (mandatory here or in the config)");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--n-list", flags.n_list, "comma-separated n values");
  cmd->add_option("--m-list", flags.m_list, "comma-separated m values");
  cmd->add_option("--m1-list", flags.m1_list, "comma-separated new-task training sizes");
  cmd->add_option("--N-list", flags.N_list, "comma-separated direct-training sample sizes");
  cmd->add_option("--replicates", flags.replicates, "replicates per cell");
  cmd->add_option("--threads", flags.threads,
                  "worker threads (REPNET_THREADS as fallback)");
}

repnet::ExperimentConfig build_config(const std::string& experiment,
                                      const CommonFlags& flags) {
  repnet::ExperimentConfig cfg;
  if (!flags.config_path.empty())
    cfg = repnet::parse_config_file(flags.config_path);
  cfg.experiment = experiment;
  if (!flags.seed.empty())
    repnet::apply_config_entry(cfg, "seed", flags.seed);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.n_list.empty())
    repnet::apply_config_entry(cfg, "n_list", flags.n_list);
  if (!flags.m_list.empty())
    repnet::apply_config_entry(cfg, "m_list", flags.m_list);
  if (!flags.m1_list.empty())
    repnet::apply_config_entry(cfg, "m1_list", flags.m1_list);
  if (!flags.N_list.empty())
    repnet::apply_config_entry(cfg, "N_list", flags.N_list);
  if (flags.replicates >= 0) cfg.replicates = flags.replicates;
  if (flags.threads >= 0) {
    cfg.threads = flags.threads;
  } else if (cfg.threads <= 1) {
    if (const char* env = std::getenv("REPNET_THREADS"))
      cfg.threads = std::max(1, std::atoi(env));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repnet: multi-task representation learning experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"binexp", "exhaustive binary-representation experiment"},
      {"translation", "translation-invariance generalisation surface"},
      {"symmetric", "symmetric-functions generalisation surface"},
      {"rep_vs_full", "learning with vs without a representation"},
      {"directrep1", "direct metric-matching, 10-pixel environment"},
      {"directrep2", "direct metric-matching, 30-pixel environment"},
      {"quantize_quadratic", "distortion-optimal quantization points"},
      {"rho_validate", "Monte-Carlo vs closed-form distortion check"},
      {"bounds_sweep", "sample-complexity bound tables"},
  };

  std::vector<CommonFlags> flag_sets(experiments.size());
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(experiments[i].first, experiments[i].second);
    add_common(cmd, flag_sets[i]);
    cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < cmds.size(); ++i) {
    if (!cmds[i]->parsed()) continue;
    try {
      repnet::ExperimentConfig cfg =
          build_config(experiments[i].first, flag_sets[i]);
      std::vector<std::string> files = repnet::run_experiment(cfg);
      for (const std::string& f : files) std::cout << "wrote " << f << "\n";
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
