#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "repnet/cdm.hpp"

using namespace repnet;

namespace {

std::function<std::function<double(const double&)>(Rng&)> linear01_sampler() {
  return [](Rng& r) -> std::function<double(const double&)> {
    double a = r.uniform01();
    return [a](const double& x) { return a * x; };
  };
}

std::function<std::function<double(const double&)>(Rng&)> quadratic11_sampler() {
  return [](Rng& r) -> std::function<double(const double&)> {
    double a = r.uniform(-1.0, 1.0);
    return [a](const double& x) { return a * x * x; };
  };
}

double abs_sigma(double a, double b) { return std::fabs(a - b); }

}  // namespace

TEST_CASE("closed-form distortions") {
  CHECK(rho_closed(ClosedRho::Quadratic11, 0.7, -0.7) == 0.0);
  CHECK(rho_closed(ClosedRho::Linear01, 0.3, 0.3) == 0.0);
  CHECK(rho_closed(ClosedRho::Quadratic11, 0.5, 0.25) ==
        doctest::Approx(0.09375).epsilon(1e-15));
  CHECK_THROWS_AS(rho_closed(ClosedRho::Linear01, 1.5, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(rho_closed(ClosedRho::Quadratic11, 0.0, -1.2),
                  std::invalid_argument);
}

TEST_CASE("distortion symmetry and self-distance on random probes") {
  Rng rng(555);
  for (int t = 0; t < 1000; ++t) {
    double x = rng.uniform(-1.0, 1.0);
    double y = rng.uniform(-1.0, 1.0);
    CHECK(rho_closed(ClosedRho::Quadratic11, x, y) ==
          rho_closed(ClosedRho::Quadratic11, y, x));
    CHECK(rho_closed(ClosedRho::Quadratic11, x, x) == 0.0);
    double u = rng.uniform01(), v = rng.uniform01();
    CHECK(rho_closed(ClosedRho::Linear01, u, v) ==
          rho_closed(ClosedRho::Linear01, v, u));
  }
}

TEST_CASE("triangle inequality for the closed forms") {
  Rng rng(556);
  for (int t = 0; t < 1000; ++t) {
    double x = rng.uniform(-1.0, 1.0);
    double y = rng.uniform(-1.0, 1.0);
    double z = rng.uniform(-1.0, 1.0);
    CHECK(rho_closed(ClosedRho::Quadratic11, x, z) <=
          rho_closed(ClosedRho::Quadratic11, x, y) +
              rho_closed(ClosedRho::Quadratic11, y, z) + 1e-12);
    double a = rng.uniform01(), b = rng.uniform01(), c = rng.uniform01();
    CHECK(rho_closed(ClosedRho::Linear01, a, c) <=
          rho_closed(ClosedRho::Linear01, a, b) +
              rho_closed(ClosedRho::Linear01, b, c) + 1e-12);
  }
}

TEST_CASE("Monte-Carlo estimate is zero at x == y") {
  Rng rng(1);
  CHECK(rho_mc<double>(linear01_sampler(), abs_sigma, 0.4, 0.4, 100, rng) == 0.0);
}

TEST_CASE("Monte-Carlo estimate matches the closed forms") {
  Rng rng(8080);
  for (int p = 0; p < 20; ++p) {
    double x = rng.uniform01(), y = rng.uniform01();
    double est = rho_mc<double>(linear01_sampler(), abs_sigma, x, y, 100000, rng);
    CHECK(std::fabs(est - rho_closed(ClosedRho::Linear01, x, y)) < 1e-2);
  }
  for (int p = 0; p < 20; ++p) {
    double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
    double est =
        rho_mc<double>(quadratic11_sampler(), abs_sigma, x, y, 100000, rng);
    CHECK(std::fabs(est - rho_closed(ClosedRho::Quadratic11, x, y)) < 1e-2);
  }
}

TEST_CASE("Monte-Carlo error shrinks roughly like 1/sqrt(M)") {
  Rng rng(6060);
  double err[3] = {0, 0, 0};
  const int Ms[3] = {1000, 10000, 100000};
  const int pairs = 40;
  for (int p = 0; p < pairs; ++p) {
    double x = rng.uniform01(), y = rng.uniform01();
    double want = rho_closed(ClosedRho::Linear01, x, y);
    for (int k = 0; k < 3; ++k)
      err[k] += std::fabs(
          rho_mc<double>(linear01_sampler(), abs_sigma, x, y, Ms[k], rng) - want);
  }
  for (double& e : err) e /= pairs;
  CHECK(err[0] < 0.05);
  CHECK(err[1] < 0.016);
  CHECK(err[2] < 0.005);
  CHECK(err[2] < err[0]);
}

TEST_CASE("classifier environment distortion takes the stated values") {
  // Four indicator tasks on four classes; uniform environment. Same class:
  // every classifier agrees. Different classes: exactly two disagree.
  std::vector<std::function<double(double)>> tasks;
  for (int k = 0; k < 4; ++k)
    tasks.push_back([k](double x) { return static_cast<int>(x) == k ? 1.0 : 0.0; });
  CHECK(rho_from_hypotheses(tasks, abs_sigma, 2.0, 2.0) == 0.0);
  CHECK(rho_from_hypotheses(tasks, abs_sigma, 1.0, 3.0) ==
        doctest::Approx(2.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("rho_g closed forms") {
  std::vector<double> v{1.0, 0.0}, w{0.0, 1.0};
  CHECK(rho_g_linear_cube(1.0, v, v) == 0.0);
  CHECK(rho_g_linear_cube(2.0, v, w) ==
        doctest::Approx(2.6666666666666665).epsilon(1e-15));
  CHECK(rho_g_threshold_ball(v, w) == doctest::Approx(0.5).epsilon(1e-12));
  std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(rho_g_threshold_ball(v, zero), std::invalid_argument);
  std::vector<double> w3{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(rho_g_linear_cube(1.0, v, w3), std::invalid_argument);
}

TEST_CASE("quantize basics and tie-breaking") {
  Quantization q;
  q.rho = make_closed_distortion(ClosedRho::Linear01);
  q.points = {0.2, 0.4, 0.9};
  auto [idx, dist] = quantize(q, 0.4);
  CHECK(idx == 1);
  CHECK(dist == 0.0);
  // Equidistant between the first two points: lowest index wins.
  CHECK(quantize(q, 0.3).first == 0);

  Quantization quad;
  quad.rho = make_closed_distortion(ClosedRho::Quadratic11);
  quad.points = {0.5};
  auto [qi, qd] = quantize(quad, -0.5);
  CHECK(qi == 0);
  CHECK(qd == 0.0);
}

TEST_CASE("quantize matches a linear scan oracle") {
  Rng rng(2222);
  Quantization q;
  q.rho = make_closed_distortion(ClosedRho::Quadratic11);
  q.points = {0.05, 0.2, 0.45, 0.6, 0.8, 0.95};
  for (int t = 0; t < 500; ++t) {
    double x = rng.uniform(-1.0, 1.0);
    int best = 0;
    double best_d = q.rho(x, q.points[0]);
    for (std::size_t i = 1; i < q.points.size(); ++i) {
      double d = q.rho(x, q.points[i]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    auto [idx, dist] = quantize(q, x);
    CHECK(idx == best);
    CHECK(dist == best_d);
  }
}

TEST_CASE("reconstruction error basics") {
  std::vector<double> xs, ws;
  uniform_grid(0.0, 1.0, 10000, xs, ws);

  Quantization q;
  q.rho = make_closed_distortion(ClosedRho::Linear01);
  q.points = xs;  // every input is a point
  CHECK(reconstruction_error(q, xs, ws) == 0.0);

  q.points = {0.0};
  // E |x - 0| / 2 = 1/4 for uniform x on [0,1].
  CHECK(reconstruction_error(q, xs, ws) == doctest::Approx(0.25).epsilon(1e-3));

  Rng rng(31);
  q.points = {0.1, 0.6};
  double before = reconstruction_error(q, xs, ws);
  for (int t = 0; t < 20; ++t) {
    Quantization more = q;
    more.points.push_back(rng.uniform01());
    CHECK(reconstruction_error(more, xs, ws) <= before + 1e-15);
  }
}

namespace {

/// Shared fixture for the optimal-partition theorem checks: a fixed function
/// sample from the quadratic environment on a uniform grid, the table
/// distortion it induces, and grid-resident quantization points.
struct TheoremFixture {
  std::vector<double> xs, ws;
  std::vector<std::vector<double>> f_values;  // sampled functions on the grid
  std::vector<int> point_idx;
  Distortion rho_hat;

  TheoremFixture(int grid_n, int fun_n, std::uint64_t seed) {
    uniform_grid(-1.0, 1.0, grid_n, xs, ws);
    Rng rng(seed);
    for (int k = 0; k < fun_n; ++k) {
      double a = rng.uniform(-1.0, 1.0);
      std::vector<double> fv(xs.size());
      for (std::size_t j = 0; j < xs.size(); ++j) fv[j] = a * xs[j] * xs[j];
      f_values.push_back(std::move(fv));
    }
    // Points at a few grid sites (spread over the positive half).
    for (int i : {int(xs.size() * 0.55), int(xs.size() * 0.7),
                  int(xs.size() * 0.85), int(xs.size() * 0.97)})
      point_idx.push_back(i);
    const auto& fv = f_values;
    const auto& grid = xs;
    rho_hat.kind = DistortionKind::Table;
    rho_hat.eval = [&fv, &grid](double x, double y) {
      // Table lookup by nearest grid site; x and y are always grid values
      // in these tests.
      auto site = [&grid](double v) {
        std::size_t best = 0;
        double bd = std::fabs(grid[0] - v);
        for (std::size_t j = 1; j < grid.size(); ++j)
          if (std::fabs(grid[j] - v) < bd) {
            bd = std::fabs(grid[j] - v);
            best = j;
          }
        return best;
      };
      std::size_t a = site(x), b = site(y);
      double total = 0.0;
      for (const std::vector<double>& f : fv) total += std::fabs(f[a] - f[b]);
      return total / fv.size();
    };
  }
};

}  // namespace

TEST_CASE("induced partition attains the reconstruction error identity") {
  TheoremFixture fx(201, 400, 99);
  std::vector<int> part = induced_partition(fx.rho_hat, fx.xs, fx.point_idx);

  double e_f = function_reconstruction_error(part, fx.point_idx, fx.f_values,
                                             abs_sigma, fx.ws);
  Quantization q;
  q.rho = fx.rho_hat;
  for (int i : fx.point_idx) q.points.push_back(fx.xs[i]);
  double e_rho = reconstruction_error(q, fx.xs, fx.ws);
  CHECK(std::fabs(e_f - e_rho) < 1e-10);
}

TEST_CASE("any other faithful partition does no better") {
  TheoremFixture fx(101, 200, 123);
  std::vector<int> induced = induced_partition(fx.rho_hat, fx.xs, fx.point_idx);
  double best = function_reconstruction_error(induced, fx.point_idx,
                                              fx.f_values, abs_sigma, fx.ws);
  Rng rng(4321);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> part(fx.xs.size());
    for (int& c : part)
      c = static_cast<int>(rng.uniform_int(fx.point_idx.size()));
    for (std::size_t i = 0; i < fx.point_idx.size(); ++i)
      part[fx.point_idx[i]] = static_cast<int>(i);  // keep faithfulness
    double e = function_reconstruction_error(part, fx.point_idx, fx.f_values,
                                             abs_sigma, fx.ws);
    CHECK(e >= best - 1e-12);
  }
}

TEST_CASE("unfaithful partitions are rejected") {
  TheoremFixture fx(51, 10, 5);
  std::vector<int> part = induced_partition(fx.rho_hat, fx.xs, fx.point_idx);
  part[fx.point_idx[0]] = 1;  // point 0 no longer in its own cell
  CHECK_THROWS_AS(function_reconstruction_error(part, fx.point_idx,
                                                fx.f_values, abs_sigma, fx.ws),
                  std::invalid_argument);
}

TEST_CASE("single function with every input a point reconstructs exactly") {
  std::vector<double> xs, ws;
  uniform_grid(-1.0, 1.0, 64, xs, ws);
  std::vector<std::vector<double>> fv(1, std::vector<double>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) fv[0][j] = 0.3 * xs[j] * xs[j];
  std::vector<int> points(xs.size()), part(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) points[i] = part[i] = static_cast<int>(i);
  CHECK(function_reconstruction_error(part, points, fv, abs_sigma, ws) == 0.0);
}

TEST_CASE("quadratic fixed-point quantization reproduces the k=6 points") {
  QuadQuantResult res = quad_optimal_quantization(6);
  REQUIRE(res.points.size() == 6);
  const double want[6] = {0.142, 0.377, 0.545, 0.690, 0.821, 0.942};
  for (int i = 0; i < 6; ++i)
    CHECK(std::fabs(res.points[i] - want[i]) <= 0.001);
  for (int i = 0; i < 6; ++i) {
    CHECK(res.points[i] > 0.0);
    CHECK(res.points[i] < 1.0);
    if (i) CHECK(res.points[i] > res.points[i - 1]);
  }
  int sweeps_rel = 0;
  for (std::size_t i = 0; i < res.max_rel_change.size(); ++i)
    if (res.max_rel_change[i] < 1e-6) {
      sweeps_rel = static_cast<int>(i) + 1;
      break;
    }
  CHECK(sweeps_rel > 0);
  CHECK(sweeps_rel <= 100);
  CHECK_THROWS_AS(quad_optimal_quantization(1), std::invalid_argument);
}

#include "repnet/replearn.hpp"

TEST_CASE("trained hypotheses act as a learner-side distortion estimate") {
  Environment env = build_translation10();
  ArchSpec arch;
  arch.f_dims = {10, 3, 2};
  arch.head_dims = {2, 2, 1};
  TrainPolicy policy;
  policy.max_restarts = 3;
  policy.max_iters_per_run = 300;
  Rng rng(7171);
  TrainResult tr = train_representation(env, 3, 25, arch, policy, rng);

  // The heads g_i o f become the function sample; inputs are indexed.
  std::vector<std::function<double(double)>> hyps;
  for (const Network& head : tr.net.heads) {
    const Network& f = tr.net.f;
    hyps.push_back([&env, &f, &head](double idx) {
      return head.forward(f.forward(env.inputs[static_cast<int>(idx)]))[0];
    });
  }
  auto sigma = [](double a, double b) { return std::fabs(a - b); };
  Rng probe(7272);
  for (int t = 0; t < 50; ++t) {
    double x = static_cast<double>(probe.uniform_int(40));
    double y = static_cast<double>(probe.uniform_int(40));
    double rho_xy = rho_from_hypotheses(hyps, sigma, x, y);
    CHECK(rho_from_hypotheses(hyps, sigma, x, x) == 0.0);
    CHECK(rho_xy == rho_from_hypotheses(hyps, sigma, y, x));
    CHECK(rho_xy >= 0.0);
    CHECK(rho_xy <= 1.0 + 1e-12);
  }
}

TEST_CASE("cubic distortion agrees with its Monte-Carlo estimate") {
  auto cubic_sampler = [](Rng& r) -> std::function<double(const double&)> {
    double a = r.uniform(-1.0, 1.0);
    return [a](const double& x) { return a * x * x * x; };
  };
  Rng rng(909);
  for (int p = 0; p < 10; ++p) {
    double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
    double est = rho_mc<double>(cubic_sampler, abs_sigma, x, y, 100000, rng);
    CHECK(std::fabs(est - rho_closed(ClosedRho::Cubic11, x, y)) < 1e-2);
  }
}
