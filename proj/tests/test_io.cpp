#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "repnet/netio.hpp"
#include "repnet/runner.hpp"

using namespace repnet;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
  std::filesystem::path p =
      std::filesystem::temp_directory_path() / ("repnet_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("network round trip is exact") {
  Rng rng(1);
  Network net = Network::random({7, 4, 2}, Activation::Sigmoid, rng);
  std::stringstream buf;
  save_net(buf, net);
  Network back = load_net(buf);
  CHECK(back.params() == net.params());
  CHECK(back.dims() == net.dims());
  CHECK(back.activation() == net.activation());
  std::vector<double> x(7);
  for (double& v : x) v = rng.uniform(-3.0, 3.0);
  CHECK(back.forward(x) == net.forward(x));
}

TEST_CASE("multitask net round trip is exact") {
  Rng rng(2);
  ArchSpec arch;
  arch.f_dims = {10, 3, 2};
  arch.head_dims = {2, 2, 1};
  MultiTaskNet mt = make_multitask_net(arch, 3, rng);
  std::stringstream buf;
  save_net(buf, mt);
  MultiTaskNet back = load_multitask_net(buf);
  CHECK(back.params() == mt.params());
  CHECK(back.heads.size() == 3);
}

TEST_CASE("truncated and malformed files are rejected with line numbers") {
  Rng rng(3);
  Network net = Network::random({3, 2}, Activation::Sigmoid, rng);
  std::stringstream buf;
  save_net(buf, net);
  std::string text = buf.str();

  // Truncation: drop the last two lines.
  std::string cut = text.substr(0, text.rfind('\n', text.rfind('\n') - 1) + 1);
  std::stringstream cut_buf(cut);
  CHECK_THROWS_AS(load_net(cut_buf), std::runtime_error);

  // Header dims disagree with the parameter count.
  std::string bad = text;
  bad.replace(bad.find("params 8"), 8, "params 9");
  std::stringstream bad_buf(bad);
  CHECK_THROWS_WITH_AS(load_net(bad_buf),
                       doctest::Contains("line"), std::runtime_error);

  // Garbage number.
  std::string garbled = text;
  garbled.replace(garbled.rfind('\n', garbled.size() - 2) + 1,
                  std::string::npos, "not-a-number\n");
  std::stringstream garbled_buf(garbled);
  CHECK_THROWS_WITH_AS(load_net(garbled_buf),
                       doctest::Contains("line"), std::runtime_error);

  std::stringstream empty;
  CHECK_THROWS_AS(load_net(empty), std::runtime_error);
}

TEST_CASE("17-digit formatting round-trips doubles exactly") {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform(-12, 12));
    std::string s = format_double17(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("quantize_quadratic experiment writes the six points") {
  ExperimentConfig cfg;
  cfg.experiment = "quantize_quadratic";
  cfg.k = 6;
  cfg.master_seed = 1;
  cfg.seed_set = true;
  cfg.out_dir = temp_dir("quant").string();
  std::vector<std::string> files = run_experiment(cfg);
  REQUIRE(files.size() == 2);  // csv + manifest
  std::string csv = slurp(files[0]);
  CHECK(csv.find("x1,x2,x3,x4,x5,x6") != std::string::npos);
  // Two lines: header and the single data row.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.find("0.14") != std::string::npos);
}

TEST_CASE("a 1x1 translation grid with one replicate emits one data row") {
  ExperimentConfig cfg;
  cfg.experiment = "translation";
  cfg.master_seed = 7;
  cfg.seed_set = true;
  cfg.n_list = {1};
  cfg.m_list = {1};
  cfg.replicates = 1;
  cfg.policy.max_restarts = 2;
  cfg.policy.max_iters_per_run = 150;
  cfg.out_dir = temp_dir("t11").string();
  std::vector<std::string> files = run_experiment(cfg);
  bool saw_manifest = false;
  for (const std::string& f : files)
    if (f.find("manifest") != std::string::npos) saw_manifest = true;
  CHECK(saw_manifest);
  std::string csv = slurp(files[0]);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
}

TEST_CASE("rerunning an experiment with the same seed is byte-identical") {
  for (const char* exp : {"quantize_quadratic", "bounds_sweep"}) {
    ExperimentConfig cfg;
    cfg.experiment = exp;
    cfg.master_seed = 99;
    cfg.seed_set = true;
    cfg.out_dir = temp_dir(std::string(exp) + "_a").string();
    std::vector<std::string> first = run_experiment(cfg);
    cfg.out_dir = temp_dir(std::string(exp) + "_b").string();
    std::vector<std::string> second = run_experiment(cfg);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i)
      CHECK(slurp(first[i]) == slurp(second[i]));
  }
}

TEST_CASE("config parsing accepts known keys and rejects unknown ones") {
  std::filesystem::path dir = temp_dir("cfg");
  std::filesystem::path path = dir / "exp.cfg";
  {
    std::ofstream os(path);
    os << "# comment line\n";
    os << "experiment=translation\n";
    os << "seed=42\n";
    os << "n_list=1,5,9\n";
    os << "mse_halt=1e-7\n";
  }
  ExperimentConfig cfg = parse_config_file(path.string());
  CHECK(cfg.experiment == "translation");
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.seed_set);
  CHECK(cfg.n_list == std::vector<int>{1, 5, 9});
  CHECK(cfg.policy.mse_halt == 1e-7);

  ExperimentConfig bad;
  CHECK_THROWS_AS(apply_config_entry(bad, "zzz", "1"), std::runtime_error);

  ExperimentConfig no_seed;
  no_seed.experiment = "bounds_sweep";
  no_seed.out_dir = (dir / "x").string();
  CHECK_THROWS_AS(run_experiment(no_seed), std::runtime_error);
}
