#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "repnet/rng.hpp"

namespace repnet {

enum class Activation { Sigmoid, Identity, Sign };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// Numerically stable sigmoid. Pre-activations beyond +-500 saturate to
/// exactly 1 and 0 so downstream arithmetic never sees an overflowed exp.
double stable_sigmoid(double z);

struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;     // out x in, node-major (row-major)
  std::vector<double> thresholds;  // out
};

/// Dense feedforward network. Every node applies the network's activation to
/// a weighted sum of its inputs plus a threshold. Networks are value types:
/// construction fixes the architecture, and training works on copies of the
/// flat parameter vector.
///
/// Flat parameter order (the contract shared by gradients and persistence):
/// for each layer from input to output, the weight matrix row-major (all
/// incoming weights of node 0, then node 1, ...) followed by that layer's
/// thresholds.
class Network {
 public:
  Network() = default;
  Network(std::vector<int> dims, Activation act);

  /// Architecture plus an explicit parameter vector in the canonical order.
  static Network from_params(std::vector<int> dims, Activation act,
                             std::span<const double> params);

  /// All parameters drawn uniformly from [lo, hi).
  static Network random(std::vector<int> dims, Activation act, Rng& rng,
                        double lo = -1.0, double hi = 1.0);

  int in_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  int out_dim() const { return dims_.empty() ? 0 : dims_.back(); }
  int param_count() const { return param_count_; }
  const std::vector<int>& dims() const { return dims_; }
  Activation activation() const { return act_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::vector<double> params() const;
  void set_params(std::span<const double> p);

  std::vector<double> forward(std::span<const double> x) const;

  /// Per-layer activations kept for reverse accumulation; activations[0] is
  /// the input itself.
  struct Trace {
    std::vector<std::vector<double>> activations;
  };
  Trace forward_trace(std::span<const double> x) const;

  /// Reverse pass. dout is dLoss/d(output); parameter gradients are
  /// accumulated into grad (length param_count, canonical order) and
  /// dLoss/d(input) is returned so composed networks can chain.
  /// Only Sigmoid and Identity activations are differentiable.
  std::vector<double> backward(const Trace& trace, std::span<const double> dout,
                               std::span<double> grad) const;

  /// Per-parameter clip magnitudes: weight_clip for weights, threshold_clip
  /// for thresholds, in the canonical flat order.
  std::vector<double> param_caps(double weight_clip,
                                 double threshold_clip) const;

 private:
  std::vector<int> dims_;
  Activation act_ = Activation::Sigmoid;
  std::vector<Layer> layers_;
  int param_count_ = 0;
};

struct GradientVector {
  std::vector<double> values;  // aligned with Network's flat parameter order
};

/// Squared-error loss of a scalar-output network on one example, with the
/// exact gradient by reverse accumulation.
std::pair<double, GradientVector> loss_and_gradient(const Network& net,
                                                    std::span<const double> x,
                                                    double y);

/// Five-input, three-output network with +-1 weights, no thresholds, and the
/// hard-limiting sign nonlinearity theta(t) = 1 if t > 0 else -1.
struct BinaryNetwork {
  // weights[o * 5 + i] is the weight from input i to output o, in {-1,+1}.
  std::array<std::int8_t, 15> weights{};

  static constexpr int kInputs = 5;
  static constexpr int kOutputs = 3;
  static constexpr int kWeightCount = 15;
  static constexpr int kCandidateCount = 1 << 15;

  /// Candidate index c encodes the weights as a 15-bit counter, row-major:
  /// bit (o*5+i) set means weight +1, clear means -1.
  static BinaryNetwork from_index(std::uint32_t c);
  std::uint32_t to_index() const;
  static BinaryNetwork random(Rng& rng);
};

/// Output in {-1,+1}^3. Inputs must be exactly +-1.
std::array<int, 3> binary_forward(const BinaryNetwork& net,
                                  std::span<const double> x);

/// Code index of s in {-1,+1}^3: bit k set iff s[k] == +1, so codes run
/// (-1,-1,-1)=0 ... (+1,+1,+1)=7.
int binary_code_index(const std::array<int, 3>& s);

}  // namespace repnet
