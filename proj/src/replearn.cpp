#include "repnet/replearn.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "parallel.hpp"

namespace repnet {

int MultiTaskNet::param_count() const {
  int c = f.param_count();
  for (const Network& h : heads) c += h.param_count();
  return c;
}

std::vector<double> MultiTaskNet::params() const {
  std::vector<double> p = f.params();
  p.reserve(param_count());
  for (const Network& h : heads) {
    std::vector<double> hp = h.params();
    p.insert(p.end(), hp.begin(), hp.end());
  }
  return p;
}

void MultiTaskNet::set_params(std::span<const double> p) {
  if (static_cast<int>(p.size()) != param_count())
    throw std::invalid_argument("MultiTaskNet: parameter vector length mismatch");
  std::size_t o = 0;
  f.set_params(p.subspan(o, f.param_count()));
  o += f.param_count();
  for (Network& h : heads) {
    h.set_params(p.subspan(o, h.param_count()));
    o += h.param_count();
  }
}

std::vector<double> MultiTaskNet::param_caps(double weight_clip,
                                             double threshold_clip) const {
  std::vector<double> caps = f.param_caps(weight_clip, threshold_clip);
  for (const Network& h : heads) {
    std::vector<double> hc = h.param_caps(weight_clip, threshold_clip);
    caps.insert(caps.end(), hc.begin(), hc.end());
  }
  return caps;
}

void MultiTaskNet::check_dims() const {
  for (const Network& h : heads)
    if (h.in_dim() != f.out_dim())
      throw std::invalid_argument(
          "MultiTaskNet: head input dimension must equal f output dimension");
}

MultiTaskNet make_multitask_net(const ArchSpec& arch, int n_heads, Rng& rng,
                                double lo, double hi) {
  MultiTaskNet mt;
  mt.f = Network::random(arch.f_dims, arch.activation, rng, lo, hi);
  mt.heads.reserve(n_heads);
  for (int i = 0; i < n_heads; ++i)
    mt.heads.push_back(Network::random(arch.head_dims, arch.activation, rng, lo, hi));
  mt.check_dims();
  return mt;
}

double multitask_objective(const MultiTaskNet& mt, const NMSample& z,
                           MultiTaskGrad* grad) {
  if (static_cast<int>(mt.heads.size()) != z.n)
    throw std::invalid_argument("multitask_objective: sample rows != heads");
  const int n = z.n;
  if (grad) {
    grad->f_grad.assign(mt.f.param_count(), 0.0);
    grad->head_grads.assign(n, {});
    for (int i = 0; i < n; ++i)
      grad->head_grads[i].assign(mt.heads[i].param_count(), 0.0);
  }
  double total = 0.0;
  long count = 0;
  for (int i = 0; i < n; ++i) {
    const Network& head = mt.heads[i];
    const int m = static_cast<int>(z.targets[i].size());
    for (int j = 0; j < m; ++j) {
      if (!grad) {
        std::vector<double> v = mt.f.forward(z.inputs[i][j]);
        double o = head.forward(v)[0];
        double r = o - z.targets[i][j];
        total += r * r;
      } else {
        Network::Trace tf = mt.f.forward_trace(z.inputs[i][j]);
        Network::Trace tg = head.forward_trace(tf.activations.back());
        double o = tg.activations.back()[0];
        double r = o - z.targets[i][j];
        total += r * r;
        double scale = 2.0 * r / (static_cast<double>(n) * m);
        std::vector<double> dv =
            head.backward(tg, std::span<const double>(&scale, 1),
                          grad->head_grads[i]);
        mt.f.backward(tf, dv, grad->f_grad);
      }
      ++count;
    }
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

double multitask_linf(const MultiTaskNet& mt, const NMSample& z) {
  double mx = 0.0;
  for (int i = 0; i < z.n; ++i)
    for (std::size_t j = 0; j < z.targets[i].size(); ++j) {
      std::vector<double> v = mt.f.forward(z.inputs[i][j]);
      double o = mt.heads[i].forward(v)[0];
      mx = std::max(mx, std::fabs(o - z.targets[i][j]));
    }
  return mx;
}

namespace {

/// cg_minimize adapter over the joint [f | heads] parameter vector.
Objective multitask_cg_objective(MultiTaskNet work, const NMSample& z) {
  auto shared = std::make_shared<MultiTaskNet>(std::move(work));
  Objective obj;
  obj.value = [shared, &z](std::span<const double> p) {
    shared->set_params(p);
    return multitask_objective(*shared, z, nullptr);
  };
  obj.value_and_grad = [shared, &z](std::span<const double> p,
                                    std::span<double> g) {
    shared->set_params(p);
    MultiTaskGrad mg;
    double v = multitask_objective(*shared, z, &mg);
    std::size_t o = 0;
    for (double x : mg.f_grad) g[o++] = x;
    for (const std::vector<double>& hg : mg.head_grads)
      for (double x : hg) g[o++] = x;
    return v;
  };
  obj.linf = [shared, &z](std::span<const double> p) {
    shared->set_params(p);
    return multitask_linf(*shared, z);
  };
  return obj;
}

}  // namespace

TrainResult train_representation(const Environment& env, int n, int m,
                                 const ArchSpec& arch,
                                 const TrainPolicy& policy, Rng& rng) {
  TrainResult res;
  res.sample = draw_nm_sample(env, n, m, rng);
  MultiTaskNet mt =
      make_multitask_net(arch, n, rng, policy.init_lo, policy.init_hi);
  std::vector<double> caps =
      mt.param_caps(policy.weight_clip, policy.threshold_clip);
  Objective obj = multitask_cg_objective(mt, res.sample);
  CgResult cg = cg_minimize(obj, mt.params(), policy, rng, caps);
  mt.set_params(cg.params);
  res.net = std::move(mt);
  res.trace = std::move(cg.trace);
  return res;
}

std::pair<double, double> true_error(const MultiTaskNet& mt,
                                     const Environment& env,
                                     std::span<const int> task_ids) {
  if (task_ids.size() != mt.heads.size())
    throw std::invalid_argument("true_error: task ids != heads");
  double mse = 0.0, linf = 0.0;
  for (std::size_t i = 0; i < task_ids.size(); ++i) {
    int t = task_ids[i];
    if (t < 0 || t >= env.task_count())
      throw std::invalid_argument("true_error: unknown task id");
    double task_mse = 0.0;
    for (int x = 0; x < env.input_count(); ++x) {
      std::vector<double> v = mt.f.forward(env.inputs[x]);
      double o = mt.heads[i].forward(v)[0];
      double r = o - env.tasks[t][x];
      task_mse += env.input_weights[x] * r * r;
      linf = std::max(linf, std::fabs(r));
    }
    mse += task_mse;
  }
  return {mse / static_cast<double>(task_ids.size()), linf};
}

std::pair<double, double> true_error(const Network& net,
                                     const Environment& env, int task_id) {
  if (task_id < 0 || task_id >= env.task_count())
    throw std::invalid_argument("true_error: unknown task id");
  double mse = 0.0, linf = 0.0;
  for (int x = 0; x < env.input_count(); ++x) {
    double o = net.forward(env.inputs[x])[0];
    double r = o - env.tasks[task_id][x];
    mse += env.input_weights[x] * r * r;
    linf = std::max(linf, std::fabs(r));
  }
  return {mse, linf};
}

namespace {

/// Trains a head on precomputed representation outputs over the whole input
/// list; returns the best weighted MSE over `restarts` fresh initialisations.
std::pair<double, double> best_head_fit(
    const std::vector<std::vector<double>>& v_inputs,
    const std::vector<double>& targets, const std::vector<double>& weights,
    const std::vector<int>& head_dims, Activation act,
    const TrainPolicy& policy, Rng& rng, int restarts, int* failures) {
  TrainPolicy single = policy;
  single.max_restarts = 0;  // one CG run per seed; the fan is the restart
  Network proto(head_dims, act);
  std::vector<double> caps =
      proto.param_caps(policy.weight_clip, policy.threshold_clip);

  auto eval = [&](const Network& h) {
    double mse = 0.0, linf = 0.0;
    for (std::size_t x = 0; x < v_inputs.size(); ++x) {
      double r = h.forward(v_inputs[x])[0] - targets[x];
      mse += weights[x] * r * r;
      linf = std::max(linf, std::fabs(r));
    }
    return std::make_pair(mse, linf);
  };

  auto shared = std::make_shared<Network>(proto);
  Objective obj;
  obj.value = [shared, &v_inputs, &targets, &weights](std::span<const double> p) {
    shared->set_params(p);
    double mse = 0.0;
    for (std::size_t x = 0; x < v_inputs.size(); ++x) {
      double r = shared->forward(v_inputs[x])[0] - targets[x];
      mse += weights[x] * r * r;
    }
    return mse;
  };
  obj.value_and_grad = [shared, &v_inputs, &targets, &weights](
                           std::span<const double> p, std::span<double> g) {
    shared->set_params(p);
    std::fill(g.begin(), g.end(), 0.0);
    double mse = 0.0;
    for (std::size_t x = 0; x < v_inputs.size(); ++x) {
      Network::Trace tr = shared->forward_trace(v_inputs[x]);
      double r = tr.activations.back()[0] - targets[x];
      mse += weights[x] * r * r;
      double dout = 2.0 * weights[x] * r;
      shared->backward(tr, std::span<const double>(&dout, 1), g);
    }
    return mse;
  };
  obj.linf = [shared, &v_inputs, &targets](std::span<const double> p) {
    shared->set_params(p);
    double linf = 0.0;
    for (std::size_t x = 0; x < v_inputs.size(); ++x)
      linf = std::max(linf,
                      std::fabs(shared->forward(v_inputs[x])[0] - targets[x]));
    return linf;
  };

  double best_mse = std::numeric_limits<double>::infinity();
  double best_linf = std::numeric_limits<double>::infinity();
  for (int s = 0; s < restarts; ++s) {
    Rng seed_rng = rng.split(s);
    try {
      Network h = Network::random(head_dims, act, seed_rng, policy.init_lo,
                                  policy.init_hi);
      CgResult cg = cg_minimize(obj, h.params(), single, seed_rng, caps);
      h.set_params(cg.params);
      auto [mse, linf] = eval(h);
      if (mse < best_mse) {
        best_mse = mse;
        best_linf = linf;
      }
      if (best_mse < policy.mse_halt) break;  // already at the halting floor
    } catch (const std::exception&) {
      if (failures) ++*failures;
    }
  }
  return {best_mse, best_linf};
}

}  // namespace

RepTrueLoss rep_true_loss(const Network& f, const Environment& env,
                          const std::vector<int>& head_dims,
                          const TrainPolicy& policy, Rng& rng, int restarts,
                          int threads) {
  const int n_tasks = env.task_count();
  // f is frozen: precompute its outputs once.
  std::vector<std::vector<double>> v_inputs(env.input_count());
  for (int x = 0; x < env.input_count(); ++x)
    v_inputs[x] = f.forward(env.inputs[x]);

  RepTrueLoss out;
  out.per_task_mse.assign(n_tasks, 0.0);
  std::vector<double> per_task_linf(n_tasks, 0.0);
  std::vector<int> per_task_failures(n_tasks, 0);

  parallel_for(n_tasks, threads, [&](std::size_t t) {
    Rng task_rng = rng.split(t);
    auto [mse, linf] =
        best_head_fit(v_inputs, env.tasks[t], env.input_weights, head_dims,
                      f.activation(), policy, task_rng, restarts,
                      &per_task_failures[t]);
    out.per_task_mse[t] = mse;
    per_task_linf[t] = linf;
  });

  for (int t = 0; t < n_tasks; ++t) {
    out.mse += out.per_task_mse[t] / n_tasks;
    out.linf = std::max(out.linf, per_task_linf[t]);
    if (per_task_failures[t] > 0 &&
        !std::isfinite(out.per_task_mse[t]))
      ++out.failed_tasks;
  }
  return out;
}

namespace {

SurfaceCell run_surface_cell(const Environment& env, int n, int m,
                             int replicate, const ArchSpec& arch,
                             const TrainPolicy& policy, Rng cell_rng) {
  SurfaceCell cell;
  cell.n = n;
  cell.m = m;
  cell.replicate = replicate;
  try {
    TrainResult tr = train_representation(env, n, m, arch, policy, cell_rng);
    cell.train_mse = multitask_objective(tr.net, tr.sample);
    auto [mse, linf] = true_error(tr.net, env, tr.sample.task_ids);
    cell.true_mse = mse;
    cell.true_linf = linf;
    cell.restarts = tr.trace.restarts;
  } catch (const std::exception&) {
    cell.failed = true;
  }
  return cell;
}

/// A single-row sample of task `t` with `m` draws, used by RepVsFull cells.
NMSample draw_task_sample(const Environment& env, int t, int m, Rng& rng) {
  NMSample s = draw_nm_sample(env, 1, m, rng);
  s.task_ids[0] = t;
  for (int j = 0; j < m; ++j)
    s.targets[0][j] = env.tasks[t][s.input_ids[0][j]];
  return s;
}

std::pair<SurfaceCell, SurfaceCell> run_rep_vs_full_cell(
    const Environment& env, const Network& perfect_rep, int t, int m,
    int replicate, const ArchSpec& arch, const TrainPolicy& policy,
    Rng cell_rng) {
  SurfaceCell with_rep, full;
  with_rep.variant = CellVariant::WithRep;
  full.variant = CellVariant::FullSpace;
  for (SurfaceCell* c : {&with_rep, &full}) {
    c->n = 1;
    c->m = m;
    c->task = t;
    c->replicate = replicate;
  }
  NMSample sample = draw_task_sample(env, t, m, cell_rng);

  // G o f: train one head on top of the frozen representation.
  try {
    Rng head_rng = cell_rng.split(1);
    std::vector<std::vector<double>> v(sample.targets[0].size());
    for (std::size_t j = 0; j < v.size(); ++j)
      v[j] = perfect_rep.forward(sample.inputs[0][j]);
    TrainPolicy head_policy = policy;
    Network proto(arch.head_dims, arch.activation);
    std::vector<double> caps =
        proto.param_caps(policy.weight_clip, policy.threshold_clip);
    auto shared = std::make_shared<Network>(proto);
    Objective obj;
    obj.value = [shared, &v, &sample](std::span<const double> p) {
      shared->set_params(p);
      double mse = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        double r = shared->forward(v[j])[0] - sample.targets[0][j];
        mse += r * r;
      }
      return v.empty() ? 0.0 : mse / static_cast<double>(v.size());
    };
    obj.value_and_grad = [shared, &v, &sample](std::span<const double> p,
                                               std::span<double> g) {
      shared->set_params(p);
      std::fill(g.begin(), g.end(), 0.0);
      double mse = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        Network::Trace tr = shared->forward_trace(v[j]);
        double r = tr.activations.back()[0] - sample.targets[0][j];
        mse += r * r;
        double dout = 2.0 * r / static_cast<double>(v.size());
        shared->backward(tr, std::span<const double>(&dout, 1), g);
      }
      return v.empty() ? 0.0 : mse / static_cast<double>(v.size());
    };
    obj.linf = [shared, &v, &sample](std::span<const double> p) {
      shared->set_params(p);
      double linf = 0.0;
      for (std::size_t j = 0; j < v.size(); ++j)
        linf = std::max(linf, std::fabs(shared->forward(v[j])[0] -
                                        sample.targets[0][j]));
      return linf;
    };
    Network h = Network::random(arch.head_dims, arch.activation, head_rng,
                                policy.init_lo, policy.init_hi);
    CgResult cg = cg_minimize(obj, h.params(), head_policy, head_rng, caps);
    h.set_params(cg.params);
    with_rep.train_mse = cg.value;
    with_rep.restarts = cg.trace.restarts;
    double mse = 0.0, linf = 0.0;
    for (int x = 0; x < env.input_count(); ++x) {
      double o = h.forward(perfect_rep.forward(env.inputs[x]))[0];
      double r = o - env.tasks[t][x];
      mse += env.input_weights[x] * r * r;
      linf = std::max(linf, std::fabs(r));
    }
    with_rep.true_mse = mse;
    with_rep.true_linf = linf;
  } catch (const std::exception&) {
    with_rep.failed = true;
  }

  // G o F: the full space, trained as a single-task joint job.
  try {
    Rng full_rng = cell_rng.split(2);
    MultiTaskNet mt = make_multitask_net(arch, 1, full_rng, policy.init_lo,
                                         policy.init_hi);
    std::vector<double> caps =
        mt.param_caps(policy.weight_clip, policy.threshold_clip);
    Objective obj = multitask_cg_objective(mt, sample);
    CgResult cg = cg_minimize(obj, mt.params(), policy, full_rng, caps);
    mt.set_params(cg.params);
    full.train_mse = cg.value;
    full.restarts = cg.trace.restarts;
    auto [mse, linf] = true_error(mt, env, sample.task_ids);
    full.true_mse = mse;
    full.true_linf = linf;
  } catch (const std::exception&) {
    full.failed = true;
  }
  return {with_rep, full};
}

}  // namespace

std::vector<SurfaceCell> learning_curves(const Environment& env,
                                         CurveMode mode, const GridSpec& grid,
                                         const ArchSpec& arch,
                                         const TrainPolicy& policy,
                                         int replicates, Rng& rng,
                                         const Network* perfect_rep,
                                         int threads) {
  if (grid.m_list.empty() || (mode == CurveMode::Surface && grid.n_list.empty()))
    throw std::invalid_argument("learning_curves: empty grid");
  std::vector<SurfaceCell> cells;
  if (mode == CurveMode::Surface) {
    const std::size_t n_jobs =
        grid.n_list.size() * grid.m_list.size() * replicates;
    cells.resize(n_jobs);
    parallel_for(n_jobs, threads, [&](std::size_t job) {
      std::size_t r = job % replicates;
      std::size_t rest = job / replicates;
      std::size_t mi = rest % grid.m_list.size();
      std::size_t ni = rest / grid.m_list.size();
      cells[job] = run_surface_cell(env, grid.n_list[ni], grid.m_list[mi],
                                    static_cast<int>(r), arch, policy,
                                    rng.split(job));
    });
  } else {
    if (!perfect_rep)
      throw std::invalid_argument("learning_curves: RepVsFull needs a representation");
    const std::size_t n_jobs =
        static_cast<std::size_t>(env.task_count()) * grid.m_list.size() * replicates;
    cells.resize(2 * n_jobs);
    parallel_for(n_jobs, threads, [&](std::size_t job) {
      std::size_t r = job % replicates;
      std::size_t rest = job / replicates;
      std::size_t mi = rest % grid.m_list.size();
      std::size_t ti = rest / grid.m_list.size();
      auto [with_rep, full] = run_rep_vs_full_cell(
          env, *perfect_rep, static_cast<int>(ti), grid.m_list[mi],
          static_cast<int>(r), arch, policy, rng.split(job));
      cells[2 * job] = with_rep;
      cells[2 * job + 1] = full;
    });
  }
  return cells;
}

Network popcount_detector_rep(int pixels, int objects, const ArchSpec& arch) {
  if (objects != 4)
    throw std::invalid_argument("popcount_detector_rep: built for 4 objects");
  const double s = 20.0;
  if (arch.f_dims == std::vector<int>{pixels, 3, 2}) {
    // Hidden node k fires when the active-pixel count exceeds k + 0.5, so the
    // hidden code walks a staircase; the output layer folds it to four
    // distinct corners (h1 and not h3, h2).
    std::vector<double> p;
    for (int k = 1; k <= 3; ++k)
      for (int i = 0; i < pixels; ++i) p.push_back(s);
    for (int k = 1; k <= 3; ++k) p.push_back(-s * (k + 0.5));
    const double w2[2][3] = {{s, 0.0, -s}, {0.0, s, 0.0}};
    for (int o = 0; o < 2; ++o)
      for (int h = 0; h < 3; ++h) p.push_back(w2[o][h]);
    p.push_back(-0.5 * s);
    p.push_back(-0.5 * s);
    return Network::from_params({pixels, 3, 2}, arch.activation, p);
  }
  if (arch.f_dims == std::vector<int>{pixels, 3}) {
    std::vector<double> p;
    for (int k = 1; k <= 3; ++k)
      for (int i = 0; i < pixels; ++i) p.push_back(s);
    for (int k = 1; k <= 3; ++k) p.push_back(-s * (k + 0.5));
    return Network::from_params({pixels, 3}, arch.activation, p);
  }
  throw std::invalid_argument("popcount_detector_rep: unsupported architecture");
}

}  // namespace repnet
