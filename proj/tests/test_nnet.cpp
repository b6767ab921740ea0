#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "repnet/nnet.hpp"
#include "test_util.hpp"

using namespace repnet;

namespace {

/// Straight-line reimplementation of the layer recurrence, independent of
/// Network's internals.
std::vector<double> oracle_forward(const Network& net,
                                   std::vector<double> a) {
  for (const Layer& l : net.layers()) {
    std::vector<double> next(l.out);
    for (int o = 0; o < l.out; ++o) {
      double z = l.thresholds[o];
      for (int i = 0; i < l.in; ++i) z += l.weights[o * l.in + i] * a[i];
      switch (net.activation()) {
        case Activation::Sigmoid: next[o] = 1.0 / (1.0 + std::exp(-z)); break;
        case Activation::Identity: next[o] = z; break;
        case Activation::Sign: next[o] = z > 0 ? 1.0 : -1.0; break;
      }
    }
    a = next;
  }
  return a;
}

}  // namespace

TEST_CASE("zero-weight zero-threshold sigmoid node gives 0.5") {
  Network net({3, 1}, Activation::Sigmoid);
  std::vector<double> x{0.7, -2.0, 13.0};
  CHECK(net.forward(x)[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("identity one-layer net is the affine map") {
  Network net = Network::from_params({1, 1}, Activation::Identity, std::vector<double>{2.0, 1.0});
  CHECK(net.forward(std::vector<double>{3.0})[0] == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("forward matches an independent reimplementation") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    Network net = Network::random({10, 3, 2}, Activation::Sigmoid, rng);
    std::vector<double> x(10);
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    std::vector<double> got = net.forward(x);
    std::vector<double> want = oracle_forward(net, x);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(std::fabs(got[i] - want[i]) < 1e-12);
  }
}

TEST_CASE("forward is deterministic") {
  Rng rng(7);
  Network net = Network::random({5, 4, 1}, Activation::Sigmoid, rng);
  std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<double> a = net.forward(x);
  std::vector<double> b = net.forward(x);
  CHECK(a == b);
}

TEST_CASE("forward rejects dimension mismatch") {
  Network net({3, 1}, Activation::Sigmoid);
  CHECK_THROWS_AS(net.forward(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("sigmoid saturates cleanly for large pre-activations") {
  CHECK(stable_sigmoid(1e4) == 1.0);
  CHECK(stable_sigmoid(-1e4) == 0.0);
  CHECK(stable_sigmoid(500.0) == 1.0);
  CHECK(stable_sigmoid(-500.0) == 0.0);
  CHECK(std::isfinite(stable_sigmoid(499.0)));
  CHECK(stable_sigmoid(36.0) < 1.0);
  CHECK(stable_sigmoid(-36.0) > 0.0);
  Network net = Network::from_params({1, 1}, Activation::Sigmoid, std::vector<double>{1e4, 0.0});
  CHECK(net.forward(std::vector<double>{1.0})[0] == 1.0);
}

TEST_CASE("binary_forward basics") {
  BinaryNetwork all_plus = BinaryNetwork::from_index(0x7fff);
  std::vector<double> ones{1, 1, 1, 1, 1};
  std::array<int, 3> out = binary_forward(all_plus, ones);
  CHECK(out == std::array<int, 3>{1, 1, 1});

  // Three -1 and two +1: sum = -1 <= 0 at every output node.
  std::vector<double> mixed{-1, -1, -1, 1, 1};
  out = binary_forward(all_plus, mixed);
  CHECK(out == std::array<int, 3>{-1, -1, -1});

  // First row (+1,+1,-1,-1,+1) against (+1,-1,+1,-1,+1): dot = 1 > 0.
  BinaryNetwork net = all_plus;
  net.weights = {1, 1, -1, -1, 1,  1, 1, 1, 1, 1,  1, 1, 1, 1, 1};
  std::vector<double> x{1, -1, 1, -1, 1};
  CHECK(binary_forward(net, x)[0] == 1);

  std::vector<double> bad{1, 0.5, 1, 1, 1};
  CHECK_THROWS_AS(binary_forward(all_plus, bad), std::invalid_argument);
}

TEST_CASE("binary network index round trip") {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    std::uint32_t c = static_cast<std::uint32_t>(rng.uniform_int(1 << 15));
    CHECK(BinaryNetwork::from_index(c).to_index() == c);
  }
}

TEST_CASE("loss_and_gradient at a perfect fit is zero") {
  Network net = Network::from_params({1, 1}, Activation::Identity, std::vector<double>{2.0, 1.0});
  auto [loss, grad] = loss_and_gradient(net, std::vector<double>{3.0}, 7.0);
  CHECK(loss == 0.0);
  for (double g : grad.values) CHECK(g == 0.0);
}

TEST_CASE("loss_and_gradient hand-derived linear case") {
  // Single linear node, w = 1, w_T = 0, x = 1, y = 0: loss = 1, dloss/dw = 2.
  Network net = Network::from_params({1, 1}, Activation::Identity, std::vector<double>{1.0, 0.0});
  auto [loss, grad] = loss_and_gradient(net, std::vector<double>{1.0}, 0.0);
  CHECK(loss == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(grad.values[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(grad.values[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences over seeded nets") {
  Rng rng(1234);
  const std::vector<std::vector<int>> shapes = {
      {2, 1}, {3, 2, 1}, {4, 3, 2, 1}, {10, 3, 1}};
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<int>& dims = shapes[trial % shapes.size()];
    Network net = Network::random(dims, Activation::Sigmoid, rng);
    std::vector<double> x(dims.front());
    for (double& v : x) v = rng.uniform(-1.5, 1.5);
    double y = rng.uniform01();

    auto [loss, grad] = loss_and_gradient(net, x, y);
    (void)loss;
    auto value_at = [&](std::span<const double> p) {
      Network probe = Network::from_params(dims, Activation::Sigmoid, p);
      double r = probe.forward(x)[0] - y;
      return r * r;
    };
    std::vector<double> fd = testutil::finite_diff(value_at, net.params());
    CHECK(testutil::grads_close(grad.values, fd));
  }
}

TEST_CASE("loss_and_gradient rejects vector outputs and bad dims") {
  Network two_out({2, 2}, Activation::Sigmoid);
  CHECK_THROWS_AS(loss_and_gradient(two_out, std::vector<double>{1.0, 2.0}, 0.5),
                  std::invalid_argument);
  Network net({2, 1}, Activation::Sigmoid);
  CHECK_THROWS_AS(loss_and_gradient(net, std::vector<double>{1.0}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("parameter round trip preserves the canonical order") {
  Rng rng(9);
  Network net = Network::random({4, 3, 2}, Activation::Sigmoid, rng);
  std::vector<double> p = net.params();
  Network copy = Network::from_params({4, 3, 2}, Activation::Sigmoid, p);
  CHECK(copy.params() == p);
  // Layer-major, weights before thresholds: the first 12 entries are layer
  // one's weights, the next 3 its thresholds.
  CHECK(p[0] == net.layers()[0].weights[0]);
  CHECK(p[12] == net.layers()[0].thresholds[0]);
  CHECK(p[15] == net.layers()[1].weights[0]);
}
