#include "repnet/envs.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace repnet {

namespace {

std::vector<double> ring_object(int pixels, int length, int pos) {
  std::vector<double> v(pixels, 0.0);
  for (int j = 0; j < length; ++j) v[(pos + j) % pixels] = 1.0;
  return v;
}

Environment build_ring_env(EnvKind kind, int pixels, int objects) {
  Environment env;
  env.kind = kind;
  env.n_pixels = pixels;
  env.n_objects = objects;
  for (int k = 1; k <= objects; ++k) {
    for (int p = 0; p < pixels; ++p) {
      env.inputs.push_back(ring_object(pixels, k, p));
      env.input_class.push_back(k - 1);
      env.input_position.push_back(p);
    }
  }
  int n = env.input_count();
  env.input_weights.assign(n, 1.0 / n);
  return env;
}

}  // namespace

Environment build_translation10() {
  Environment env = build_ring_env(EnvKind::Translation10, 10, 4);
  // The 14 non-constant assignments of {0,1} to the four objects.
  for (int mask = 1; mask <= 14; ++mask) {
    std::vector<double> table(env.input_count());
    for (int i = 0; i < env.input_count(); ++i)
      table[i] = (mask >> env.input_class[i]) & 1 ? 1.0 : 0.0;
    env.tasks.push_back(std::move(table));
  }
  return env;
}

Environment build_symmetric10() {
  Environment env;
  env.kind = EnvKind::Symmetric10;
  env.n_pixels = 10;
  // Enumerate all 10-bit vectors with popcount 1..4, in counter order.
  std::vector<int> popcounts;
  for (int b = 1; b < (1 << 10); ++b) {
    int pc = __builtin_popcount(static_cast<unsigned>(b));
    if (pc < 1 || pc > 4) continue;
    std::vector<double> v(10, 0.0);
    for (int i = 0; i < 10; ++i)
      if ((b >> i) & 1) v[i] = 1.0;
    env.inputs.push_back(std::move(v));
    popcounts.push_back(pc);
  }
  // Two-stage rule: popcount uniform on {1..4}, then uniform among the
  // vectors with that popcount.
  env.popcount_groups.assign(5, {});
  for (int i = 0; i < env.input_count(); ++i)
    env.popcount_groups[popcounts[i]].push_back(i);
  env.input_weights.resize(env.input_count());
  for (int i = 0; i < env.input_count(); ++i)
    env.input_weights[i] =
        0.25 / static_cast<double>(env.popcount_groups[popcounts[i]].size());
  for (int mask = 1; mask <= 14; ++mask) {
    std::vector<double> table(env.input_count());
    for (int i = 0; i < env.input_count(); ++i)
      table[i] = (mask >> (popcounts[i] - 1)) & 1 ? 1.0 : 0.0;
    env.tasks.push_back(std::move(table));
  }
  return env;
}

Environment build_binary5x3(std::uint64_t seed) {
  Environment env;
  env.kind = EnvKind::Binary5x3;
  env.n_pixels = 5;
  for (int b = 0; b < 32; ++b) {
    std::vector<double> v(5);
    for (int i = 0; i < 5; ++i) v[i] = (b >> i) & 1 ? 1.0 : -1.0;
    env.inputs.push_back(std::move(v));
  }
  env.input_weights.assign(32, 1.0 / 32.0);
  Rng rng(seed);
  env.generator = BinaryNetwork::random(rng);
  env.has_generator = true;
  // Code of every input under f*, then one task per Boolean g (g indexed by
  // its 8-bit truth table over the codes; bit c of g is the label of code c).
  std::array<int, 32> code{};
  for (int i = 0; i < 32; ++i)
    code[i] = binary_code_index(binary_forward(env.generator, env.inputs[i]));
  for (int g = 0; g < 256; ++g) {
    std::vector<double> table(32);
    for (int i = 0; i < 32; ++i)
      table[i] = (g >> code[i]) & 1 ? 1.0 : -1.0;
    env.tasks.push_back(std::move(table));
  }
  return env;
}

Environment build_classifier(int pixels, int objects) {
  if (pixels <= 0 || objects <= 0 || objects > pixels)
    throw std::invalid_argument("build_classifier: bad pixels/objects");
  Environment env = build_ring_env(EnvKind::Classifier, pixels, objects);
  for (int k = 0; k < objects; ++k) {
    std::vector<double> table(env.input_count());
    for (int i = 0; i < env.input_count(); ++i)
      table[i] = env.input_class[i] == k ? 1.0 : 0.0;
    env.tasks.push_back(std::move(table));
  }
  return env;
}

Environment build_env(EnvKind kind, std::uint64_t seed, int pixels,
                      int objects) {
  switch (kind) {
    case EnvKind::Translation10: return build_translation10();
    case EnvKind::Symmetric10: return build_symmetric10();
    case EnvKind::Binary5x3: return build_binary5x3(seed);
    case EnvKind::Classifier: return build_classifier(pixels, objects);
  }
  throw std::invalid_argument("build_env: unknown kind");
}

EnvKind env_kind_from_name(const std::string& name) {
  if (name == "translation10") return EnvKind::Translation10;
  if (name == "symmetric10") return EnvKind::Symmetric10;
  if (name == "binary5x3") return EnvKind::Binary5x3;
  if (name == "classifier") return EnvKind::Classifier;
  throw std::invalid_argument("unknown environment: " + name);
}

namespace {

int draw_input_index(const Environment& env, Rng& rng) {
  switch (env.kind) {
    case EnvKind::Translation10:
    case EnvKind::Binary5x3:
      return static_cast<int>(rng.uniform_int(env.input_count()));
    case EnvKind::Classifier: {
      int obj = static_cast<int>(rng.uniform_int(env.n_objects));
      int pos = static_cast<int>(rng.uniform_int(env.n_pixels));
      return obj * env.n_pixels + pos;
    }
    case EnvKind::Symmetric10: {
      int pc = 1 + static_cast<int>(rng.uniform_int(4));
      const std::vector<int>& group = env.popcount_groups[pc];
      return group[rng.uniform_int(group.size())];
    }
  }
  throw std::logic_error("draw_input_index: unknown kind");
}

}  // namespace

NMSample draw_nm_sample(const Environment& env, int n, int m, Rng& rng) {
  if (n < 1 || m < 0) throw std::invalid_argument("draw_nm_sample: n,m >= 1");
  NMSample s;
  s.n = n;
  s.m = m;
  s.task_ids.resize(n);
  s.input_ids.assign(n, {});
  s.inputs.assign(n, {});
  s.targets.assign(n, {});
  for (int i = 0; i < n; ++i) {
    s.task_ids[i] = static_cast<int>(rng.uniform_int(env.task_count()));
    s.input_ids[i].resize(m);
    s.inputs[i].resize(m);
    s.targets[i].resize(m);
    for (int j = 0; j < m; ++j) {
      int idx = draw_input_index(env, rng);
      s.input_ids[i][j] = idx;
      s.inputs[i][j] = env.inputs[idx];
      s.targets[i][j] = env.tasks[s.task_ids[i]][idx];
    }
  }
  return s;
}

}  // namespace repnet
