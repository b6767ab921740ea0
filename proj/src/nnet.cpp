#include "repnet/nnet.hpp"

#include <cmath>
#include <stdexcept>

namespace repnet {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Identity: return "identity";
    case Activation::Sign: return "sign";
  }
  return "sigmoid";
}

Activation activation_from_name(const std::string& name) {
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "identity") return Activation::Identity;
  if (name == "sign") return Activation::Sign;
  throw std::invalid_argument("unknown activation: " + name);
}

double stable_sigmoid(double z) {
  if (z >= 500.0) return 1.0;
  if (z <= -500.0) return 0.0;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double apply_act(Activation a, double z) {
  switch (a) {
    case Activation::Sigmoid: return stable_sigmoid(z);
    case Activation::Identity: return z;
    case Activation::Sign: return z > 0.0 ? 1.0 : -1.0;
  }
  return z;
}

}  // namespace

Network::Network(std::vector<int> dims, Activation act)
    : dims_(std::move(dims)), act_(act) {
  if (dims_.size() < 2) throw std::invalid_argument("Network needs >= 2 dims");
  for (int d : dims_)
    if (d <= 0) throw std::invalid_argument("Network dims must be positive");
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    Layer layer;
    layer.in = dims_[l];
    layer.out = dims_[l + 1];
    layer.weights.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
    layer.thresholds.assign(layer.out, 0.0);
    layers_.push_back(std::move(layer));
    param_count_ += dims_[l] * dims_[l + 1] + dims_[l + 1];
  }
}

Network Network::from_params(std::vector<int> dims, Activation act,
                             std::span<const double> params) {
  Network net(std::move(dims), act);
  net.set_params(params);
  return net;
}

Network Network::random(std::vector<int> dims, Activation act, Rng& rng,
                        double lo, double hi) {
  Network net(std::move(dims), act);
  std::vector<double> p(net.param_count());
  for (double& v : p) v = rng.uniform(lo, hi);
  net.set_params(p);
  return net;
}

std::vector<double> Network::params() const {
  std::vector<double> p;
  p.reserve(param_count_);
  for (const Layer& l : layers_) {
    p.insert(p.end(), l.weights.begin(), l.weights.end());
    p.insert(p.end(), l.thresholds.begin(), l.thresholds.end());
  }
  return p;
}

void Network::set_params(std::span<const double> p) {
  if (static_cast<int>(p.size()) != param_count_)
    throw std::invalid_argument("parameter vector has wrong length");
  std::size_t o = 0;
  for (Layer& l : layers_) {
    for (double& w : l.weights) w = p[o++];
    for (double& t : l.thresholds) t = p[o++];
  }
}

std::vector<double> Network::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != in_dim())
    throw std::invalid_argument("forward: input length does not match in_dim");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> next;
  for (const Layer& l : layers_) {
    next.assign(l.out, 0.0);
    for (int o = 0; o < l.out; ++o) {
      double z = l.thresholds[o];
      const double* w = &l.weights[static_cast<std::size_t>(o) * l.in];
      for (int i = 0; i < l.in; ++i) z += w[i] * a[i];
      next[o] = apply_act(act_, z);
    }
    a.swap(next);
  }
  return a;
}

Network::Trace Network::forward_trace(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != in_dim())
    throw std::invalid_argument("forward: input length does not match in_dim");
  Trace tr;
  tr.activations.emplace_back(x.begin(), x.end());
  for (const Layer& l : layers_) {
    const std::vector<double>& a = tr.activations.back();
    std::vector<double> next(l.out, 0.0);
    for (int o = 0; o < l.out; ++o) {
      double z = l.thresholds[o];
      const double* w = &l.weights[static_cast<std::size_t>(o) * l.in];
      for (int i = 0; i < l.in; ++i) z += w[i] * a[i];
      next[o] = apply_act(act_, z);
    }
    tr.activations.push_back(std::move(next));
  }
  return tr;
}

std::vector<double> Network::backward(const Trace& trace,
                                      std::span<const double> dout,
                                      std::span<double> grad) const {
  if (act_ == Activation::Sign)
    throw std::invalid_argument("backward: sign activation has no gradient");
  if (trace.activations.size() != layers_.size() + 1)
    throw std::invalid_argument("backward: trace does not match network");
  if (static_cast<int>(dout.size()) != out_dim())
    throw std::invalid_argument("backward: dout length does not match out_dim");
  if (static_cast<int>(grad.size()) != param_count_)
    throw std::invalid_argument("backward: grad length does not match params");

  // Offsets of each layer's weight and threshold blocks in the flat order.
  std::vector<std::size_t> w_off(layers_.size()), t_off(layers_.size());
  std::size_t o = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    w_off[l] = o;
    o += layers_[l].weights.size();
    t_off[l] = o;
    o += layers_[l].thresholds.size();
  }

  std::vector<double> delta(dout.begin(), dout.end());
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Layer& l = layers_[li];
    const std::vector<double>& a_out = trace.activations[li + 1];
    const std::vector<double>& a_in = trace.activations[li];
    // dLoss/d(pre-activation)
    std::vector<double> dz(l.out);
    for (int k = 0; k < l.out; ++k) {
      double s = act_ == Activation::Sigmoid ? a_out[k] * (1.0 - a_out[k]) : 1.0;
      dz[k] = delta[k] * s;
    }
    for (int k = 0; k < l.out; ++k) {
      double* gw = &grad[w_off[li] + static_cast<std::size_t>(k) * l.in];
      for (int i = 0; i < l.in; ++i) gw[i] += dz[k] * a_in[i];
      grad[t_off[li] + k] += dz[k];
    }
    std::vector<double> dprev(l.in, 0.0);
    for (int k = 0; k < l.out; ++k) {
      const double* w = &l.weights[static_cast<std::size_t>(k) * l.in];
      for (int i = 0; i < l.in; ++i) dprev[i] += dz[k] * w[i];
    }
    delta.swap(dprev);
  }
  return delta;
}

std::vector<double> Network::param_caps(double weight_clip,
                                        double threshold_clip) const {
  std::vector<double> caps;
  caps.reserve(param_count_);
  for (const Layer& l : layers_) {
    caps.insert(caps.end(), l.weights.size(), weight_clip);
    caps.insert(caps.end(), l.thresholds.size(), threshold_clip);
  }
  return caps;
}

std::pair<double, GradientVector> loss_and_gradient(const Network& net,
                                                    std::span<const double> x,
                                                    double y) {
  if (net.out_dim() != 1)
    throw std::invalid_argument("loss_and_gradient: scalar targets need out_dim 1");
  Network::Trace tr = net.forward_trace(x);
  double out = tr.activations.back()[0];
  double r = out - y;
  GradientVector g;
  g.values.assign(net.param_count(), 0.0);
  double dout = 2.0 * r;
  net.backward(tr, std::span<const double>(&dout, 1), g.values);
  return {r * r, std::move(g)};
}

BinaryNetwork BinaryNetwork::from_index(std::uint32_t c) {
  BinaryNetwork net;
  for (int b = 0; b < kWeightCount; ++b)
    net.weights[b] = (c >> b) & 1u ? 1 : -1;
  return net;
}

std::uint32_t BinaryNetwork::to_index() const {
  std::uint32_t c = 0;
  for (int b = 0; b < kWeightCount; ++b)
    if (weights[b] > 0) c |= 1u << b;
  return c;
}

BinaryNetwork BinaryNetwork::random(Rng& rng) {
  return from_index(static_cast<std::uint32_t>(rng.uniform_int(kCandidateCount)));
}

std::array<int, 3> binary_forward(const BinaryNetwork& net,
                                  std::span<const double> x) {
  if (x.size() != BinaryNetwork::kInputs)
    throw std::invalid_argument("binary_forward: expected 5 inputs");
  for (double v : x)
    if (v != 1.0 && v != -1.0)
      throw std::invalid_argument("binary_forward: inputs must be +-1");
  std::array<int, 3> out{};
  for (int o = 0; o < BinaryNetwork::kOutputs; ++o) {
    int s = 0;
    for (int i = 0; i < BinaryNetwork::kInputs; ++i)
      s += net.weights[o * BinaryNetwork::kInputs + i] * (x[i] > 0 ? 1 : -1);
    out[o] = s > 0 ? 1 : -1;
  }
  return out;
}

int binary_code_index(const std::array<int, 3>& s) {
  int c = 0;
  for (int k = 0; k < 3; ++k)
    if (s[k] > 0) c |= 1 << k;
  return c;
}

}  // namespace repnet
