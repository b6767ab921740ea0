#include "repnet/directrep.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace repnet {

namespace {

std::vector<std::vector<double>> map_all(const Network& f, const LabeledSet& s) {
  std::vector<std::vector<double>> v(s.inputs.size());
  for (std::size_t i = 0; i < s.inputs.size(); ++i) v[i] = f.forward(s.inputs[i]);
  return v;
}

double sqdist(std::span<const double> a, std::span<const double> b) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double d = a[k] - b[k];
    d2 += d * d;
  }
  return d2;
}

}  // namespace

double metric_match_error(const Network& f, const LabeledSet& s, double T) {
  if (T <= 0.0) throw std::invalid_argument("metric_match_error: T must be > 0");
  std::vector<std::vector<double>> v = map_all(f, s);
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (i == j) continue;  // exact zero either way
      double r = 1.0 - std::exp(-sqdist(v[i], v[j]) / T) - s.target(i, j);
      total += r * r;
    }
  return total;
}

double metric_match_value_grad(const Network& f, const LabeledSet& s, double T,
                               std::span<double> grad) {
  if (T <= 0.0) throw std::invalid_argument("metric_match_value_grad: T must be > 0");
  if (static_cast<int>(grad.size()) != f.param_count())
    throw std::invalid_argument("metric_match_value_grad: grad length mismatch");
  const std::size_t N = s.inputs.size();
  std::vector<Network::Trace> traces(N);
  std::vector<std::vector<double>> v(N);
  for (std::size_t i = 0; i < N; ++i) {
    traces[i] = f.forward_trace(s.inputs[i]);
    v[i] = traces[i].activations.back();
  }
  // Accumulate dE/d f(x_i) over all ordered pairs, then one backward pass
  // per sample.
  std::vector<std::vector<double>> dv(N, std::vector<double>(f.out_dim(), 0.0));
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      double d2 = sqdist(v[i], v[j]);
      double e = std::exp(-d2 / T);
      double r = 1.0 - e - s.target(i, j);
      total += 2.0 * r * r;  // ordered pairs (i,j) and (j,i)
      // d(r^2)/d d2 = 2 r e / T, doubled for the two ordered pairs.
      double c = 4.0 * r * e / T;
      for (int k = 0; k < f.out_dim(); ++k) {
        double g = c * 2.0 * (v[i][k] - v[j][k]);
        dv[i][k] += g;
        dv[j][k] -= g;
      }
    }
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t i = 0; i < N; ++i) f.backward(traces[i], dv[i], grad);
  return total;
}

GradientVector metric_match_gradient(const Network& f, const LabeledSet& s,
                                     double T) {
  GradientVector g;
  g.values.assign(f.param_count(), 0.0);
  metric_match_value_grad(f, s, T, g.values);
  return g;
}

double metric_match_linf(const Network& f, const LabeledSet& s, double T) {
  std::vector<std::vector<double>> v = map_all(f, s);
  double mx = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      double r = 1.0 - std::exp(-sqdist(v[i], v[j]) / T) - s.target(i, j);
      mx = std::max(mx, std::fabs(r));
    }
  return mx;
}

TrainPolicy direct_policy_defaults(int N) {
  TrainPolicy p;
  p.mse_halt = 1e-7 * N;  // objective is the pair sum; halting is on E/N
  p.linf_halt = 1e-3;
  p.init_lo = 0.0;
  p.init_hi = 0.1;
  return p;
}

DirectTrainResult train_direct(const Environment& env, int N, double T,
                               const TrainPolicy& policy, Rng& rng,
                               const std::vector<int>& f_dims,
                               Activation activation) {
  if (N < 2) throw std::invalid_argument("train_direct: N must be >= 2");
  if (env.input_class.empty())
    throw std::invalid_argument("train_direct: environment has no class labels");
  DirectTrainResult res;
  for (int i = 0; i < N; ++i) {
    int obj = static_cast<int>(rng.uniform_int(env.n_objects));
    int pos = static_cast<int>(rng.uniform_int(env.n_pixels));
    int idx = obj * env.n_pixels + pos;
    res.sample.inputs.push_back(env.inputs[idx]);
    res.sample.labels.push_back(env.input_class[idx]);
  }
  std::vector<int> dims = f_dims.empty()
                              ? std::vector<int>{env.n_pixels, 1}
                              : f_dims;
  Network f = Network::random(dims, activation, rng, policy.init_lo,
                              policy.init_hi);
  std::vector<double> caps =
      f.param_caps(policy.weight_clip, policy.threshold_clip);

  auto shared = std::make_shared<Network>(f);
  const LabeledSet& sample = res.sample;
  Objective obj;
  obj.value = [shared, &sample, T](std::span<const double> p) {
    shared->set_params(p);
    return metric_match_error(*shared, sample, T);
  };
  obj.value_and_grad = [shared, &sample, T](std::span<const double> p,
                                            std::span<double> g) {
    shared->set_params(p);
    return metric_match_value_grad(*shared, sample, T, g);
  };
  obj.linf = [shared, &sample, T](std::span<const double> p) {
    shared->set_params(p);
    return metric_match_linf(*shared, sample, T);
  };
  CgResult cg = cg_minimize(obj, f.params(), policy, rng, caps);
  f.set_params(cg.params);
  res.f = std::move(f);
  res.trace = std::move(cg.trace);
  return res;
}

DirectEval evaluate_direct(const Network& f, const Environment& env) {
  if (env.input_class.empty())
    throw std::invalid_argument("evaluate_direct: environment has no class labels");
  const int K = env.n_objects;
  const int P = env.n_pixels;
  DirectEval ev;
  std::vector<std::vector<std::vector<double>>> outs(K);
  for (int i = 0; i < env.input_count(); ++i)
    outs[env.input_class[i]].push_back(f.forward(env.inputs[i]));

  ev.model.centroids.assign(K, std::vector<double>(f.out_dim(), 0.0));
  for (int k = 0; k < K; ++k) {
    for (const std::vector<double>& o : outs[k])
      for (int d = 0; d < f.out_dim(); ++d) ev.model.centroids[k][d] += o[d];
    for (int d = 0; d < f.out_dim(); ++d)
      ev.model.centroids[k][d] /= static_cast<double>(outs[k].size());
  }

  for (int i = 0; i < env.input_count(); ++i) {
    std::vector<double> o = f.forward(env.inputs[i]);
    int best = 0;
    double best_d = sqdist(o, ev.model.centroids[0]);
    for (int k = 1; k < K; ++k) {
      double d = sqdist(o, ev.model.centroids[k]);
      if (d < best_d) {  // ties favour the lowest class index
        best_d = d;
        best = k;
      }
    }
    if (best != env.input_class[i]) ++ev.misclassified;
  }

  double var_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    double s = 0.0;
    for (const std::vector<double>& a : outs[k])
      for (const std::vector<double>& b : outs[k]) s += sqdist(a, b);
    var_sum += std::sqrt(s) / static_cast<double>(P);
  }
  ev.avg_within_variance = var_sum / static_cast<double>(K);
  return ev;
}

}  // namespace repnet
