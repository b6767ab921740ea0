#include "repnet/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "repnet/binexp.hpp"
#include "repnet/bounds.hpp"
#include "repnet/cdm.hpp"
#include "repnet/directrep.hpp"
#include "repnet/envs.hpp"
#include "repnet/netio.hpp"
#include "repnet/replearn.hpp"
#include "parallel.hpp"

namespace repnet {

namespace {

constexpr const char* kVersion = "repnet 1.0";

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

/// Simple CSV sink: header row first, locale-independent decimal cells.
class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::vector<std::string>& header)
      : os_(path) {
    if (!os_) throw std::runtime_error("cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) os_ << ',';
      os_ << header[i];
    }
    os_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

std::string cell(double v) { return format_double(v); }
std::string cell(int v) { return std::to_string(v); }

struct Sink {
  std::filesystem::path dir;
  std::vector<std::string> files;
  std::filesystem::path file(const std::string& name) {
    files.push_back((dir / name).string());
    return dir / name;
  }
};

void write_manifest(Sink& sink, const ExperimentConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ofstream os(sink.file("manifest.txt"));
  os << "version " << kVersion << "\n";
  os << "experiment " << cfg.experiment << "\n";
  os << "seed " << cfg.master_seed << "\n";
  os << "threads " << cfg.threads << "\n";
  if (cfg.replicates > 0) os << "replicates " << cfg.replicates << "\n";
  if (!cfg.n_list.empty()) os << "n_list " << join_ints(cfg.n_list) << "\n";
  if (!cfg.m_list.empty()) os << "m_list " << join_ints(cfg.m_list) << "\n";
  if (!cfg.N_list.empty()) os << "N_list " << join_ints(cfg.N_list) << "\n";
  os << "mse_halt " << format_double(cfg.policy.mse_halt) << "\n";
  os << "linf_halt " << format_double(cfg.policy.linf_halt) << "\n";
  os << "max_restarts " << cfg.policy.max_restarts << "\n";
  for (const auto& [k, v] : extra) os << k << ' ' << v << "\n";
}

ArchSpec default_arch(const std::string& experiment) {
  ArchSpec arch;
  if (experiment == "symmetric") {
    arch.f_dims = {10, 3};
    arch.head_dims = {3, 1};
  } else {
    arch.f_dims = {10, 3, 2};
    arch.head_dims = {2, 2, 1};
  }
  return arch;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

void run_surface(const ExperimentConfig& cfg, Sink& sink) {
  Environment env = cfg.experiment == "symmetric" ? build_symmetric10()
                                                  : build_translation10();
  ArchSpec arch = default_arch(cfg.experiment);
  int replicates = cfg.replicates > 0 ? cfg.replicates : 3;
  GridSpec grid{cfg.n_list, cfg.m_list};
  if (grid.n_list.empty()) grid.n_list = {1, 5, 9, 13, 17, 21};
  if (grid.m_list.empty())
    for (int m = 1; m <= (cfg.experiment == "symmetric" ? 171 : 151); m += 10)
      grid.m_list.push_back(m);

  Rng rng(Rng::mix(cfg.master_seed, 0x5u));
  std::vector<SurfaceCell> cells =
      learning_curves(env, CurveMode::Surface, grid, arch, cfg.policy,
                      replicates, rng, nullptr, cfg.threads);

  Csv csv(sink.file("surface.csv"),
          {"n", "m", "replicate", "train_mse", "true_mse", "true_linf",
           "restarts", "failed"});
  for (const SurfaceCell& c : cells)
    csv.row({cell(c.n), cell(c.m), cell(c.replicate), cell(c.train_mse),
             cell(c.true_mse), cell(c.true_linf), cell(c.restarts),
             cell(c.failed ? 1 : 0)});
  write_manifest(sink, cfg, {});
}

void run_rep_vs_full(const ExperimentConfig& cfg, Sink& sink) {
  Environment env = build_translation10();
  ArchSpec arch = default_arch(cfg.experiment);
  Rng rng(Rng::mix(cfg.master_seed, 0x7u));

  // A "perfect" representation: either loaded, or hunted for by training
  // surface cells until one generalises below the threshold.
  Network rep;
  bool have_rep = false;
  std::string rep_origin;
  if (!cfg.rep_path.empty()) {
    rep = load_net(cfg.rep_path);
    have_rep = true;
    rep_origin = "loaded " + cfg.rep_path;
  } else {
    for (int attempt = 0; attempt < cfg.search_attempts && !have_rep; ++attempt) {
      Rng att_rng = rng.split(1000 + attempt);
      TrainResult tr = train_representation(env, cfg.search_n, cfg.search_m,
                                            arch, cfg.policy, att_rng);
      auto [mse, linf] = true_error(tr.net, env, tr.sample.task_ids);
      (void)linf;
      if (mse < cfg.perfect_threshold) {
        rep = tr.net.f;
        have_rep = true;
        rep_origin = "trained attempt " + std::to_string(attempt);
      }
    }
    if (!have_rep)
      throw std::runtime_error(
          "rep_vs_full: no representation reached the perfect threshold");
  }

  GridSpec grid;
  grid.m_list = cfg.m_list;
  if (grid.m_list.empty())
    for (int m = 1; m <= 151; m += 10) grid.m_list.push_back(m);
  int replicates = cfg.replicates > 0 ? cfg.replicates : 32;

  std::vector<SurfaceCell> cells =
      learning_curves(env, CurveMode::RepVsFull, grid, arch, cfg.policy,
                      replicates, rng, &rep, cfg.threads);

  Csv raw(sink.file("rep_vs_full.csv"),
          {"mode", "task", "m", "replicate", "train_mse", "true_mse",
           "true_linf", "restarts", "failed"});
  for (const SurfaceCell& c : cells)
    raw.row({c.variant == CellVariant::WithRep ? "gof" : "goF", cell(c.task),
             cell(c.m), cell(c.replicate), cell(c.train_mse), cell(c.true_mse),
             cell(c.true_linf), cell(c.restarts), cell(c.failed ? 1 : 0)});

  // Per-(mode, task, m) mean and standard error of the true error.
  Csv curve(sink.file("rep_vs_full_curve.csv"),
            {"mode", "task", "m", "mean_true_error", "stderr"});
  for (CellVariant variant : {CellVariant::WithRep, CellVariant::FullSpace}) {
    for (int t = 0; t < env.task_count(); ++t) {
      for (int m : grid.m_list) {
        double sum = 0.0, sum2 = 0.0;
        int cnt = 0;
        for (const SurfaceCell& c : cells) {
          if (c.variant != variant || c.task != t || c.m != m || c.failed)
            continue;
          sum += c.true_mse;
          sum2 += c.true_mse * c.true_mse;
          ++cnt;
        }
        if (cnt == 0) continue;
        double mean = sum / cnt;
        double var = cnt > 1 ? (sum2 - cnt * mean * mean) / (cnt - 1) : 0.0;
        double se = cnt > 1 ? std::sqrt(std::max(0.0, var) / cnt) : 0.0;
        curve.row({variant == CellVariant::WithRep ? "gof" : "goF", cell(t),
                   cell(m), cell(mean), cell(se)});
      }
    }
  }
  write_manifest(sink, cfg, {{"rep_origin", rep_origin}});
}

void run_binexp(const ExperimentConfig& cfg, Sink& sink) {
  Environment env = build_binary5x3(Rng::mix(cfg.master_seed, 0x2u));
  std::vector<int> n_list = cfg.n_list.empty()
                                ? std::vector<int>{1, 3, 5, 7, 9}
                                : cfg.n_list;
  std::vector<int> m_list = cfg.m_list.empty()
                                ? std::vector<int>{2, 6, 10, 14, 18, 22}
                                : cfg.m_list;
  int replicates = cfg.replicates > 0 ? cfg.replicates : 10;
  Rng rng(Rng::mix(cfg.master_seed, 0x3u));

  Csv curves(sink.file("binexp_curves.csv"),
             {"curve", "n", "m", "m1", "replicate", "mean_error"});
  Csv zl(sink.file("binexp_zeroloss.csv"),
         {"n", "m", "replicate", "zero_loss_count", "evaluated_count"});

  struct CellOut {
    std::vector<std::string> zl_row;
    std::vector<std::vector<std::string>> curve_rows;
  };

  for (int r = 0; r < replicates; ++r) {
    Rng rep_rng = rng.split(r);
    // One new-task suite per replicate, shared by every (n, m) cell and by
    // the exact and ordinary reference curves, so comparisons are paired.
    Rng suite_rng = rep_rng.split(0);
    NewTaskSuite suite =
        make_new_task_suite(env, cfg.m1_list, cfg.new_tasks, suite_rng);

    const std::size_t n_cells = n_list.size() * m_list.size();
    std::vector<CellOut> outs(n_cells);
    parallel_for(n_cells, cfg.threads, [&](std::size_t idx) {
      int n = n_list[idx / m_list.size()];
      int m = m_list[idx % m_list.size()];
      Rng cell_rng = rep_rng.split(1 + idx);
      NMSample z = draw_nm_sample(env, n, m, cell_rng);
      std::vector<BinaryNetwork> reps = zero_loss_search(z, 1);
      std::size_t found = reps.size();
      Rng cap_rng = cell_rng.split(1);
      reps = subsample_reps(reps, cfg.zero_loss_cap, cap_rng);
      outs[idx].zl_row = {cell(n), cell(m), cell(r),
                          cell(static_cast<int>(found)),
                          cell(static_cast<int>(reps.size()))};
      std::vector<BinCurvePoint> curve =
          bin_generalisation_curve(env, reps, suite);
      for (const BinCurvePoint& p : curve)
        outs[idx].curve_rows.push_back({"learned", cell(n), cell(m),
                                        cell(p.m1), cell(r),
                                        cell(p.mean_error)});
    });
    for (const CellOut& o : outs) {
      zl.row(o.zl_row);
      for (const auto& row : o.curve_rows) curves.row(row);
    }

    // Exact-representation reference: f* itself under the same suite.
    std::vector<BinCurvePoint> exact =
        bin_generalisation_curve(env, {env.generator}, suite);
    for (const BinCurvePoint& p : exact)
      curves.row({"exact", cell(0), cell(0), cell(p.m1), cell(r),
                  cell(p.mean_error)});

    if (cfg.ordinary_curve) {
      std::vector<BinCurvePoint> ordinary =
          bin_ordinary_curve(env, suite, cfg.threads);
      for (const BinCurvePoint& p : ordinary)
        curves.row({"ordinary", cell(0), cell(0), cell(p.m1), cell(r),
                    cell(p.mean_error)});
    }
  }
  write_manifest(sink, cfg,
                 {{"zero_loss_cap", std::to_string(cfg.zero_loss_cap)},
                  {"new_tasks", std::to_string(cfg.new_tasks)}});
}

void run_directrep(const ExperimentConfig& cfg, Sink& sink) {
  const bool second = cfg.experiment == "directrep2";
  Environment env = second ? build_classifier(30, 10) : build_classifier(10, 4);
  std::vector<int> N_list = cfg.N_list;
  if (N_list.empty())
    for (int N = 2; N <= 40; N += 2) N_list.push_back(N);
  int replicates = cfg.replicates > 0 ? cfg.replicates : (second ? 24 : 200);

  Rng rng(Rng::mix(cfg.master_seed, second ? 0xB2u : 0xB1u));
  struct Row {
    int N, replicate, misclassified, restarts;
    double variance, err_over_n;
    const char* halt;
    bool failed;
  };
  const std::size_t n_jobs = N_list.size() * replicates;
  std::vector<Row> rows(n_jobs);
  parallel_for(n_jobs, cfg.threads, [&](std::size_t job) {
    int N = N_list[job / replicates];
    int r = static_cast<int>(job % replicates);
    Rng job_rng = rng.split(job);
    Row row{N, r, 0, 0, 0.0, 0.0, "", false};
    try {
      // Metric matching has its own stopping rules and a [0, 0.1) weight
      // start; config entries still equal to the global defaults are
      // replaced by the experiment's defaults.
      TrainPolicy policy = cfg.policy;
      const TrainPolicy global_defaults{};
      const TrainPolicy direct = direct_policy_defaults(N);
      if (policy.mse_halt == global_defaults.mse_halt)
        policy.mse_halt = direct.mse_halt;
      if (policy.linf_halt == global_defaults.linf_halt)
        policy.linf_halt = direct.linf_halt;
      if (policy.init_lo == global_defaults.init_lo &&
          policy.init_hi == global_defaults.init_hi) {
        policy.init_lo = direct.init_lo;
        policy.init_hi = direct.init_hi;
      }
      DirectTrainResult res = train_direct(env, N, cfg.T, policy, job_rng);
      DirectEval ev = evaluate_direct(res.f, env);
      row.misclassified = ev.misclassified;
      row.variance = ev.avg_within_variance;
      row.restarts = res.trace.restarts;
      row.err_over_n =
          metric_match_error(res.f, res.sample, cfg.T) / static_cast<double>(N);
      row.halt = halt_reason_name(res.trace.halt);
    } catch (const std::exception&) {
      row.failed = true;
      row.halt = "failed";
    }
    rows[job] = row;
  });

  Csv csv(sink.file("directrep.csv"),
          {"N", "replicate", "misclassified", "avg_within_variance",
           "restarts", "final_error_over_N", "halt", "failed"});
  for (const Row& r : rows)
    csv.row({cell(r.N), cell(r.replicate), cell(r.misclassified),
             cell(r.variance), cell(r.restarts), cell(r.err_over_n), r.halt,
             cell(r.failed ? 1 : 0)});
  write_manifest(sink, cfg, {{"T", format_double(cfg.T)}});
}

void run_quantize(const ExperimentConfig& cfg, Sink& sink) {
  QuadQuantResult res = quad_optimal_quantization(cfg.k);
  int sweeps_rel = 0;
  for (std::size_t i = 0; i < res.max_rel_change.size(); ++i)
    if (res.max_rel_change[i] < 1e-6) {
      sweeps_rel = static_cast<int>(i) + 1;
      break;
    }
  std::vector<std::string> header{"k"};
  for (int i = 1; i <= cfg.k; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("sweeps");
  header.push_back("sweeps_to_1e6_rel");
  Csv csv(sink.file("quantization.csv"), header);
  std::vector<std::string> row{cell(cfg.k)};
  for (double p : res.points) row.push_back(cell(p));
  row.push_back(cell(res.sweeps));
  row.push_back(cell(sweeps_rel));
  csv.row(row);
  write_manifest(sink, cfg, {{"k", std::to_string(cfg.k)}});
}

void run_rho_validate(const ExperimentConfig& cfg, Sink& sink) {
  Rng rng(Rng::mix(cfg.master_seed, 0xC1u));
  Csv csv(sink.file("rho_validate.csv"),
          {"kind", "x", "y", "closed", "mc_estimate", "abs_error", "draws"});
  struct EnvDef {
    const char* name;
    ClosedRho kind;
    double lo, hi;
  };
  for (const EnvDef& def : {EnvDef{"linear01", ClosedRho::Linear01, 0.0, 1.0},
                            EnvDef{"quadratic11", ClosedRho::Quadratic11, -1.0, 1.0},
                            EnvDef{"cubic11", ClosedRho::Cubic11, -1.0, 1.0}}) {
    auto sampler = [&def](Rng& r) -> std::function<double(const double&)> {
      double a = def.kind == ClosedRho::Linear01 ? r.uniform01()
                                                 : r.uniform(-1.0, 1.0);
      switch (def.kind) {
        case ClosedRho::Linear01:
          return [a](const double& x) { return a * x; };
        case ClosedRho::Quadratic11:
          return [a](const double& x) { return a * x * x; };
        case ClosedRho::Cubic11:
          return [a](const double& x) { return a * x * x * x; };
      }
      return [](const double&) { return 0.0; };
    };
    auto sigma = [](double u, double v) { return std::fabs(u - v); };
    for (int p = 0; p < cfg.pairs; ++p) {
      double x = rng.uniform(def.lo, def.hi);
      double y = rng.uniform(def.lo, def.hi);
      double closed = rho_closed(def.kind, x, y);
      double mc = rho_mc<double>(sampler, sigma, x, y, cfg.mc_draws, rng);
      csv.row({def.name, cell(x), cell(y), cell(closed), cell(mc),
               cell(std::fabs(closed - mc)), cell(cfg.mc_draws)});
    }
  }
  write_manifest(sink, cfg, {{"mc_draws", std::to_string(cfg.mc_draws)}});
}

void run_bounds_sweep(const ExperimentConfig& cfg, Sink& sink) {
  std::vector<int> n_list = cfg.n_list.empty()
                                ? std::vector<int>{1, 2, 5, 10, 20, 50, 100}
                                : cfg.n_list;
  std::vector<int> m_list = cfg.m_list.empty()
                                ? std::vector<int>{10, 100, 1000, 10000}
                                : cfg.m_list;
  Csv csv(sink.file("bounds.csv"),
          {"n", "m", "multitask_m", "transfer_n_req", "transfer_m_req",
           "deviation_bound", "impedance"});
  for (int n : n_list) {
    for (int m : m_list) {
      BoundInputs b;
      b.M = cfg.bound_M;
      b.alpha = cfg.bound_alpha;
      b.nu = cfg.bound_nu;
      b.delta = cfg.bound_delta;
      b.n = n;
      b.m = m;
      b.lnC_G = cfg.bound_lnC_G;
      b.lnCstar_F = cfg.bound_lnCstar_F;
      auto [n_req, m_req] = transfer_nm(b);
      double lnC_joint = n * b.lnC_G + b.lnCstar_F;
      double lnC_sigma = b.lnC_G + b.lnCstar_F;
      csv.row({cell(n), cell(m), cell(multitask_m(b)), cell(n_req),
               cell(m_req), cell(deviation_bound(b, lnC_sigma)),
               cell(impedance_ratio(lnC_joint, lnC_sigma, n))});
    }
  }
  write_manifest(sink, cfg, {});
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string trimmed;
    for (char c : line) {
      if (c == '#') break;
      trimmed += c;
    }
    while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t' ||
                                trimmed.back() == '\r'))
      trimmed.pop_back();
    std::size_t start = trimmed.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    trimmed = trimmed.substr(start);
    std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key=value");
    std::string key = trimmed.substr(0, eq);
    std::string value = trimmed.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "experiment") cfg.experiment = value;
  else if (key == "out") cfg.out_dir = value;
  else if (key == "seed") { cfg.master_seed = std::stoull(value); cfg.seed_set = true; }
  else if (key == "threads") cfg.threads = std::stoi(value);
  else if (key == "n_list") cfg.n_list = parse_int_list(value);
  else if (key == "m_list") cfg.m_list = parse_int_list(value);
  else if (key == "m1_list") cfg.m1_list = parse_int_list(value);
  else if (key == "N_list") cfg.N_list = parse_int_list(value);
  else if (key == "replicates") cfg.replicates = std::stoi(value);
  else if (key == "new_tasks") cfg.new_tasks = std::stoi(value);
  else if (key == "zero_loss_cap") cfg.zero_loss_cap = std::stoi(value);
  else if (key == "ordinary_curve") cfg.ordinary_curve = value == "1" || value == "true";
  else if (key == "rep_path") cfg.rep_path = value;
  else if (key == "search_n") cfg.search_n = std::stoi(value);
  else if (key == "search_m") cfg.search_m = std::stoi(value);
  else if (key == "search_attempts") cfg.search_attempts = std::stoi(value);
  else if (key == "perfect_threshold") cfg.perfect_threshold = std::stod(value);
  else if (key == "T") cfg.T = std::stod(value);
  else if (key == "k") cfg.k = std::stoi(value);
  else if (key == "mc_draws") cfg.mc_draws = std::stoi(value);
  else if (key == "pairs") cfg.pairs = std::stoi(value);
  else if (key == "mse_halt") cfg.policy.mse_halt = std::stod(value);
  else if (key == "linf_halt") cfg.policy.linf_halt = std::stod(value);
  else if (key == "plateau_window") cfg.policy.plateau_window = std::stoi(value);
  else if (key == "plateau_rel") cfg.policy.plateau_rel_improvement = std::stod(value);
  else if (key == "weight_clip") cfg.policy.weight_clip = std::stod(value);
  else if (key == "threshold_clip") cfg.policy.threshold_clip = std::stod(value);
  else if (key == "max_restarts") cfg.policy.max_restarts = std::stoi(value);
  else if (key == "max_iters") cfg.policy.max_iters_per_run = std::stoi(value);
  else if (key == "init_lo") cfg.policy.init_lo = std::stod(value);
  else if (key == "init_hi") cfg.policy.init_hi = std::stod(value);
  else if (key == "bound_M") cfg.bound_M = std::stod(value);
  else if (key == "bound_alpha") cfg.bound_alpha = std::stod(value);
  else if (key == "bound_nu") cfg.bound_nu = std::stod(value);
  else if (key == "bound_delta") cfg.bound_delta = std::stod(value);
  else if (key == "bound_lnC_G") cfg.bound_lnC_G = std::stod(value);
  else if (key == "bound_lnCstar_F") cfg.bound_lnCstar_F = std::stod(value);
  else throw std::runtime_error("unknown config key: " + key);
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
  if (!cfg.seed_set)
    throw std::runtime_error("run_experiment: a seed is mandatory");
  if (cfg.experiment.empty())
    throw std::runtime_error("run_experiment: no experiment selected");

  Sink sink;
  sink.dir = cfg.out_dir;
  std::filesystem::create_directories(sink.dir);

  ExperimentConfig c = cfg;
  if (c.threads < 1) c.threads = 1;

  if (c.experiment == "translation" || c.experiment == "symmetric")
    run_surface(c, sink);
  else if (c.experiment == "rep_vs_full")
    run_rep_vs_full(c, sink);
  else if (c.experiment == "binexp")
    run_binexp(c, sink);
  else if (c.experiment == "directrep1" || c.experiment == "directrep2")
    run_directrep(c, sink);
  else if (c.experiment == "quantize_quadratic")
    run_quantize(c, sink);
  else if (c.experiment == "rho_validate")
    run_rho_validate(c, sink);
  else if (c.experiment == "bounds_sweep")
    run_bounds_sweep(c, sink);
  else
    throw std::runtime_error("unknown experiment: " + c.experiment);

  return sink.files;
}

}  // namespace repnet
