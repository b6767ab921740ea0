#include "repnet/binexp.hpp"

#include <algorithm>
#include <stdexcept>

#include "parallel.hpp"

namespace repnet {

namespace {

int input_bits(std::span<const double> x) {
  int b = 0;
  for (int i = 0; i < 5; ++i)
    if (x[i] > 0) b |= 1 << i;
  return b;
}

/// Codes of all 32 possible +-1 inputs under one candidate (input id is the
/// 5-bit pattern, bit i set meaning component i = +1).
std::array<std::uint8_t, 32> code_table(const BinaryNetwork& f) {
  std::array<std::uint8_t, 32> codes{};
  for (int b = 0; b < 32; ++b) {
    int c = 0;
    for (int o = 0; o < 3; ++o) {
      int s = 0;
      for (int i = 0; i < 5; ++i) {
        int xi = (b >> i) & 1 ? 1 : -1;
        s += f.weights[o * 5 + i] * xi;
      }
      if (s > 0) c |= 1 << o;
    }
    codes[b] = static_cast<std::uint8_t>(c);
  }
  return codes;
}

/// Per-row plus/minus counts binned by the 5-bit input pattern, shared by
/// the whole candidate scan.
struct RowBins {
  std::array<int, 32> plus{};
  std::array<int, 32> minus{};
};

std::vector<RowBins> bin_sample(const NMSample& z) {
  std::vector<RowBins> rows(z.n);
  for (int i = 0; i < z.n; ++i) {
    for (std::size_t j = 0; j < z.targets[i].size(); ++j) {
      const std::vector<double>& x = z.inputs[i][j];
      if (x.size() != 5)
        throw std::invalid_argument("binexp: inputs must have 5 components");
      double y = z.targets[i][j];
      if (y != 1.0 && y != -1.0)
        throw std::invalid_argument("binexp: targets must be +-1");
      int b = input_bits(x);
      if (y > 0)
        ++rows[i].plus[b];
      else
        ++rows[i].minus[b];
    }
  }
  return rows;
}

long loss_count_from_bins(const std::array<std::uint8_t, 32>& codes,
                          const std::vector<RowBins>& rows) {
  long total = 0;
  for (const RowBins& row : rows) {
    int plus[8] = {0}, minus[8] = {0};
    for (int b = 0; b < 32; ++b) {
      plus[codes[b]] += row.plus[b];
      minus[codes[b]] += row.minus[b];
    }
    for (int a = 0; a < 8; ++a) total += std::min(plus[a], minus[a]);
  }
  return total;
}

}  // namespace

long rep_empirical_loss_count(const BinaryNetwork& f, const NMSample& z) {
  return loss_count_from_bins(code_table(f), bin_sample(z));
}

double rep_empirical_loss(const BinaryNetwork& f, const NMSample& z) {
  long denom = 0;
  for (int i = 0; i < z.n; ++i) denom += static_cast<long>(z.targets[i].size());
  if (denom == 0) return 0.0;
  return static_cast<double>(rep_empirical_loss_count(f, z)) /
         static_cast<double>(denom);
}

OutputTable best_output_table(const BinaryNetwork& f,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("best_output_table: xs/ys length mismatch");
  int plus[8] = {0}, minus[8] = {0};
  for (std::size_t j = 0; j < xs.size(); ++j) {
    std::array<int, 3> s = binary_forward(f, xs[j]);
    int a = binary_code_index(s);
    if (ys[j] > 0)
      ++plus[a];
    else
      ++minus[a];
  }
  OutputTable t;
  for (int a = 0; a < 8; ++a)
    t.labels[a] = plus[a] >= minus[a] ? 1 : -1;  // ties and empty cells: +1
  return t;
}

std::vector<BinaryNetwork> zero_loss_search(const NMSample& z, int threads) {
  std::vector<RowBins> rows = bin_sample(z);
  const int n_chunks = std::max(1, threads * 4);
  const int chunk = (BinaryNetwork::kCandidateCount + n_chunks - 1) / n_chunks;
  std::vector<std::vector<BinaryNetwork>> found(n_chunks);
  parallel_for(n_chunks, threads, [&](std::size_t ci) {
    int lo = static_cast<int>(ci) * chunk;
    int hi = std::min(lo + chunk, BinaryNetwork::kCandidateCount);
    for (int c = lo; c < hi; ++c) {
      BinaryNetwork f = BinaryNetwork::from_index(static_cast<std::uint32_t>(c));
      if (loss_count_from_bins(code_table(f), rows) == 0)
        found[ci].push_back(f);
    }
  });
  std::vector<BinaryNetwork> out;
  for (const auto& part : found) out.insert(out.end(), part.begin(), part.end());
  return out;
}

int binary_true_error(const BinaryNetwork& f, const OutputTable& table,
                      std::span<const double> task_table,
                      const Environment& env) {
  if (static_cast<int>(task_table.size()) != env.input_count())
    throw std::invalid_argument("binary_true_error: task table size mismatch");
  std::array<std::uint8_t, 32> codes = code_table(f);
  int errs = 0;
  for (int i = 0; i < env.input_count(); ++i) {
    int b = input_bits(env.inputs[i]);
    int pred = table.labels[codes[b]];
    int want = task_table[i] > 0 ? 1 : -1;
    if (pred != want) ++errs;
  }
  return errs;
}

NewTaskSuite make_new_task_suite(const Environment& env,
                                 const std::vector<int>& m1_list,
                                 int new_task_count, Rng& rng) {
  NewTaskSuite suite;
  suite.m1_list = m1_list;
  suite.task_ids.resize(new_task_count);
  suite.train_inputs.assign(new_task_count, {});
  for (int t = 0; t < new_task_count; ++t) {
    suite.task_ids[t] = static_cast<int>(rng.uniform_int(env.task_count()));
    suite.train_inputs[t].resize(m1_list.size());
    for (std::size_t k = 0; k < m1_list.size(); ++k) {
      suite.train_inputs[t][k].resize(m1_list[k]);
      for (int j = 0; j < m1_list[k]; ++j)
        suite.train_inputs[t][k][j] =
            static_cast<int>(rng.uniform_int(env.input_count()));
    }
  }
  return suite;
}

std::vector<BinCurvePoint> bin_generalisation_curve(
    const Environment& env, const std::vector<BinaryNetwork>& reps,
    const NewTaskSuite& suite) {
  std::vector<BinCurvePoint> curve(suite.m1_list.size());
  for (std::size_t k = 0; k < suite.m1_list.size(); ++k) {
    curve[k].m1 = suite.m1_list[k];
    double total = 0.0;
    long cnt = 0;
    for (std::size_t t = 0; t < suite.task_ids.size(); ++t) {
      const std::vector<double>& task = env.tasks[suite.task_ids[t]];
      std::vector<std::vector<double>> xs;
      std::vector<double> ys;
      for (int idx : suite.train_inputs[t][k]) {
        xs.push_back(env.inputs[idx]);
        ys.push_back(task[idx]);
      }
      for (const BinaryNetwork& f : reps) {
        OutputTable g = best_output_table(f, xs, ys);
        total += binary_true_error(f, g, task, env);
        ++cnt;
      }
    }
    curve[k].mean_error = cnt > 0 ? total / static_cast<double>(cnt) : 0.0;
  }
  return curve;
}

std::vector<BinCurvePoint> bin_ordinary_curve(const Environment& env,
                                              const NewTaskSuite& suite,
                                              int threads) {
  // Candidate code tables are shared across every (task, m1) evaluation.
  std::vector<std::array<std::uint8_t, 32>> codes(BinaryNetwork::kCandidateCount);
  parallel_for(BinaryNetwork::kCandidateCount, threads, [&](std::size_t c) {
    codes[c] = code_table(BinaryNetwork::from_index(static_cast<std::uint32_t>(c)));
  });

  std::vector<BinCurvePoint> curve(suite.m1_list.size());
  for (std::size_t k = 0; k < suite.m1_list.size(); ++k) {
    curve[k].m1 = suite.m1_list[k];
    double sum_over_tasks = 0.0;
    int task_cnt = 0;
    for (std::size_t t = 0; t < suite.task_ids.size(); ++t) {
      const std::vector<double>& task = env.tasks[suite.task_ids[t]];
      // Training labels by 5-bit input pattern.
      std::array<int, 32> has_plus{}, has_minus{};
      for (int idx : suite.train_inputs[t][k]) {
        int b = input_bits(env.inputs[idx]);
        if (task[idx] > 0)
          has_plus[b] = 1;
        else
          has_minus[b] = 1;
      }
      // True labels of every input, summarized per pattern.
      std::array<int, 32> want_plus{};
      for (int i = 0; i < env.input_count(); ++i)
        want_plus[input_bits(env.inputs[i])] = task[i] > 0 ? 1 : 0;

      double weighted_err = 0.0, weight = 0.0;
      for (int c = 0; c < BinaryNetwork::kCandidateCount; ++c) {
        const auto& ct = codes[c];
        // Cell label constraints from the training set.
        int cell_plus[8] = {0}, cell_minus[8] = {0};
        for (int b = 0; b < 32; ++b) {
          if (has_plus[b]) cell_plus[ct[b]] = 1;
          if (has_minus[b]) cell_minus[ct[b]] = 1;
        }
        bool consistent = true;
        for (int a = 0; a < 8 && consistent; ++a)
          if (cell_plus[a] && cell_minus[a]) consistent = false;
        if (!consistent) continue;
        // Mismatch counts per cell for either label choice.
        int cnt[8] = {0}, pos[8] = {0};
        for (int b = 0; b < 32; ++b) {
          ++cnt[ct[b]];
          pos[ct[b]] += want_plus[b];
        }
        double err = 0.0;
        int free_cells = 0;
        for (int a = 0; a < 8; ++a) {
          int mis_plus = cnt[a] - pos[a];
          int mis_minus = pos[a];
          if (cell_plus[a])
            err += mis_plus;
          else if (cell_minus[a])
            err += mis_minus;
          else {
            err += 0.5 * (mis_plus + mis_minus);
            ++free_cells;
          }
        }
        double w = static_cast<double>(1 << free_cells);
        weighted_err += w * err;
        weight += w;
      }
      if (weight > 0.0) {
        sum_over_tasks += weighted_err / weight;
        ++task_cnt;
      }
    }
    curve[k].mean_error =
        task_cnt > 0 ? sum_over_tasks / static_cast<double>(task_cnt) : 0.0;
  }
  return curve;
}

std::vector<BinaryNetwork> subsample_reps(const std::vector<BinaryNetwork>& reps,
                                          std::size_t cap, Rng& rng) {
  if (reps.size() <= cap) return reps;
  // Partial Fisher-Yates over indices, then restore candidate order.
  std::vector<std::uint32_t> idx(reps.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < cap; ++i) {
    std::size_t j = i + rng.uniform_int(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  std::vector<BinaryNetwork> out;
  out.reserve(cap);
  for (std::uint32_t i : idx) out.push_back(reps[i]);
  return out;
}

}  // namespace repnet
