#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "repnet/directrep.hpp"
#include "repnet/replearn.hpp"
#include "test_util.hpp"

using namespace repnet;

TEST_CASE("single-point and coincident same-class sets have zero error") {
  Network f = Network::from_params({2, 1}, Activation::Identity,
                                   std::vector<double>{1.0, -1.0, 0.5});
  LabeledSet one;
  one.inputs = {{0.3, 0.4}};
  one.labels = {0};
  CHECK(metric_match_error(f, one, 0.01) == 0.0);

  LabeledSet two;
  two.inputs = {{0.3, 0.4}, {0.3, 0.4}};
  two.labels = {1, 1};
  CHECK(metric_match_error(f, two, 0.01) == 0.0);
}

TEST_CASE("two different-class points at squared distance T") {
  // Identity map on one coordinate: f(x) = x, points 0 and sqrt(T).
  Network f = Network::from_params({1, 1}, Activation::Identity,
                                   std::vector<double>{1.0, 0.0});
  const double T = 0.01;
  LabeledSet s;
  s.inputs = {{0.0}, {std::sqrt(T)}};
  s.labels = {0, 1};
  // Each ordered pair contributes (1 - e^{-1} - 1)^2 = e^{-2}.
  CHECK(metric_match_error(f, s, T) ==
        doctest::Approx(0.2706705664732254).epsilon(1e-12));
  CHECK_THROWS_AS(metric_match_error(f, s, 0.0), std::invalid_argument);
}

TEST_CASE("gradient vanishes at a zero-error configuration") {
  Network f = Network::from_params({2, 1}, Activation::Identity,
                                   std::vector<double>{0.0, 0.0, 0.7});
  LabeledSet s;
  s.inputs = {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}};
  s.labels = {3, 3, 3};  // all one class, all mapped to 0.7
  GradientVector g = metric_match_gradient(f, s, 0.01);
  for (double v : g.values) CHECK(v == 0.0);
}

TEST_CASE("metric-match gradient agrees with finite differences") {
  Rng rng(111);
  Environment env = build_classifier(10, 4);
  for (int trial = 0; trial < 20; ++trial) {
    bool linear = trial % 2 == 0;
    std::vector<int> dims = linear ? std::vector<int>{10, 1}
                                   : std::vector<int>{10, 3, 2};
    Activation act = linear ? Activation::Identity : Activation::Sigmoid;
    Network f = Network::random(dims, act, rng, -0.5, 0.5);
    LabeledSet s;
    for (int i = 0; i < 7; ++i) {
      int idx = static_cast<int>(rng.uniform_int(env.input_count()));
      s.inputs.push_back(env.inputs[idx]);
      s.labels.push_back(env.input_class[idx]);
    }
    const double T = 0.1;
    GradientVector g = metric_match_gradient(f, s, T);
    auto value_at = [&](std::span<const double> p) {
      Network probe = Network::from_params(dims, act, p);
      return metric_match_error(probe, s, T);
    };
    std::vector<double> fd = testutil::finite_diff(value_at, f.params());
    CHECK(testutil::grads_close(g.values, fd));
  }
}

TEST_CASE("gradient only sees same/different, not label names") {
  Rng rng(112);
  Network f = Network::random({4, 1}, Activation::Identity, rng);
  LabeledSet s;
  s.inputs = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  s.labels = {0, 0, 1, 2};
  GradientVector a = metric_match_gradient(f, s, 0.05);
  LabeledSet renamed = s;
  renamed.labels = {9, 9, 4, 7};
  GradientVector b = metric_match_gradient(f, renamed, 0.05);
  CHECK(a.values == b.values);
}

TEST_CASE("the surrogate distance is monotone in the Euclidean distance") {
  const double T = 0.01;
  double prev = -1.0;
  for (double d = 0.0; d <= 1.0; d += 0.01) {
    double v = 1.0 - std::exp(-d * d / T);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);  // mathematically < 1; rounds to 1 once exp underflows
    CHECK(v >= prev);
    prev = v;
  }
  for (double d = 0.0; d <= 0.3; d += 0.01)
    CHECK(1.0 - std::exp(-d * d / T) < 1.0);
}

TEST_CASE("train_direct on a one-class environment is immediately solvable") {
  Environment env = build_classifier(10, 1);
  TrainPolicy policy = direct_policy_defaults(4);
  policy.max_restarts = 3;
  Rng rng(113);
  DirectTrainResult res = train_direct(env, 4, 0.01, policy, rng);
  CHECK(metric_match_error(res.f, res.sample, 0.01) /
            static_cast<double>(res.sample.inputs.size()) <
        1e-6);
  // Objective non-increasing within each run.
  const TrainTrace& tr = res.trace;
  for (std::size_t r = 0; r < tr.restart_starts.size(); ++r) {
    std::size_t lo = tr.restart_starts[r];
    std::size_t hi = r + 1 < tr.restart_starts.size()
                         ? static_cast<std::size_t>(tr.restart_starts[r + 1])
                         : tr.objective.size();
    for (std::size_t i = lo + 1; i < hi; ++i)
      CHECK(tr.objective[i] <= tr.objective[i - 1] * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(train_direct(env, 1, 0.01, policy, rng),
                  std::invalid_argument);
}

TEST_CASE("seeded direct training separates the four objects") {
  Environment env = build_classifier(10, 4);
  Rng rng(114);
  TrainPolicy policy = direct_policy_defaults(40);
  policy.max_restarts = 10;
  DirectTrainResult res = train_direct(env, 40, 0.01, policy, rng);
  DirectEval ev = evaluate_direct(res.f, env);
  CHECK(ev.misclassified == 0);
  CHECK(ev.avg_within_variance < 1e-2);
}

TEST_CASE("evaluate_direct endpoints") {
  Environment env = build_classifier(10, 4);
  ArchSpec arch;
  arch.f_dims = {10, 3, 2};
  arch.head_dims = {2, 2, 1};
  // Constant-per-class detector: zero variance, zero misclassification.
  Network detector = popcount_detector_rep(10, 4, arch);
  DirectEval good = evaluate_direct(detector, env);
  CHECK(good.misclassified == 0);
  CHECK(good.avg_within_variance == 0.0);

  // Fully collapsed map: everything lands on the lowest class's centroid.
  Network flat({10, 1}, Activation::Sigmoid);
  DirectEval bad = evaluate_direct(flat, env);
  CHECK(bad.misclassified == 30);  // all but the tie-favoured class
}

TEST_CASE("evaluate_direct matches an independent recomputation") {
  Environment env = build_classifier(10, 4);
  Rng rng(115);
  Network f = Network::random({10, 2}, Activation::Sigmoid, rng);
  DirectEval ev = evaluate_direct(f, env);

  // Two-loop recomputation.
  const int K = 4, P = 10;
  std::vector<std::vector<std::vector<double>>> outs(K);
  for (int i = 0; i < env.input_count(); ++i)
    outs[env.input_class[i]].push_back(f.forward(env.inputs[i]));
  std::vector<std::vector<double>> cents(K, std::vector<double>(2, 0.0));
  for (int k = 0; k < K; ++k)
    for (const auto& o : outs[k])
      for (int d = 0; d < 2; ++d) cents[k][d] += o[d] / P;
  int mis = 0;
  for (int i = 0; i < env.input_count(); ++i) {
    std::vector<double> o = f.forward(env.inputs[i]);
    int best = 0;
    double bd = 1e300;
    for (int k = 0; k < K; ++k) {
      double d2 = 0.0;
      for (int d = 0; d < 2; ++d)
        d2 += (o[d] - cents[k][d]) * (o[d] - cents[k][d]);
      if (d2 < bd) {
        bd = d2;
        best = k;
      }
    }
    if (best != env.input_class[i]) ++mis;
  }
  double var = 0.0;
  for (int k = 0; k < K; ++k) {
    double s = 0.0;
    for (const auto& a : outs[k])
      for (const auto& b : outs[k])
        for (int d = 0; d < 2; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    var += std::sqrt(s) / P / K;
  }
  CHECK(ev.misclassified == mis);
  CHECK(std::fabs(ev.avg_within_variance - var) < 1e-12);
}
