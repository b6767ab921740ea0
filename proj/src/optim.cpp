#include "repnet/optim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace repnet {

const char* halt_reason_name(HaltReason r) {
  switch (r) {
    case HaltReason::Mse: return "mse";
    case HaltReason::Linf: return "linf";
    case HaltReason::PlateauRestartExhausted: return "plateau-restart-exhausted";
  }
  return "?";
}

namespace {

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5)-1)/2

double checked(const std::function<double(double)>& phi, double t) {
  double v = phi(t);
  if (!std::isfinite(v))
    throw std::runtime_error("line_search: non-finite objective at t=" +
                             std::to_string(t));
  return v;
}

/// Line search restricted to [0, t_max]. Returns the chosen step and its
/// value; step 0 means no descent was found.
std::pair<double, double> bounded_line_search(
    const std::function<double(double)>& phi, double hint, double t_max) {
  double f0 = checked(phi, 0.0);
  double t = hint;
  if (t <= 0.0) t = 1.0;
  if (t > t_max) t = t_max;
  double ft = checked(phi, t);

  // Shrink until a descent point is found.
  int k = 0;
  while (ft >= f0 && k < 64) {
    t *= 0.5;
    ft = checked(phi, t);
    ++k;
  }
  if (ft >= f0) return {0.0, f0};

  // Expand geometrically while the objective keeps decreasing.
  double a = 0.0;
  double b = t, fb = ft;
  double c = std::min(2.0 * t, t_max);
  double fc = c > b ? checked(phi, c) : fb;
  k = 0;
  while (c > b && fc < fb && k < 200) {
    a = b;
    b = c;
    fb = fc;
    if (c >= t_max) break;
    c = std::min(2.0 * c, t_max);
    fc = checked(phi, c);
    ++k;
  }
  if (c <= b) c = b;  // descent ran into the boundary

  // Golden-section to 1e-8 relative bracket width on [a, c].
  double x1 = c - kGolden * (c - a);
  double x2 = a + kGolden * (c - a);
  double f1 = checked(phi, x1);
  double f2 = checked(phi, x2);
  while ((c - a) > 1e-8 * (std::fabs(a) + std::fabs(c)) + 1e-300) {
    if (f1 < f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - kGolden * (c - a);
      f1 = checked(phi, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (c - a);
      f2 = checked(phi, x2);
    }
  }
  double tm = 0.5 * (a + c);
  double fm = checked(phi, tm);
  // Keep the best probe; the boundary may beat the interior midpoint.
  if (fb < fm && b >= a && b <= c) {
    tm = b;
    fm = fb;
  }
  if (t_max < std::numeric_limits<double>::infinity()) {
    double fmax = checked(phi, t_max);
    if (fmax <= fm) {
      tm = t_max;
      fm = fmax;
    }
  }
  if (fm >= f0) return {0.0, f0};
  return {tm, fm};
}

}  // namespace

double line_search(const std::function<double(double)>& phi,
                   double bracket_hint) {
  return bounded_line_search(phi, bracket_hint,
                             std::numeric_limits<double>::infinity())
      .first;
}

CgResult cg_minimize(const Objective& objective, std::vector<double> init,
                     const TrainPolicy& policy, Rng& rng,
                     std::span<const double> caps) {
  const std::size_t n = init.size();
  const bool clipping = !caps.empty();
  if (clipping && caps.size() != n)
    throw std::invalid_argument("cg_minimize: caps length mismatch");
  if (policy.mse_halt <= 0.0 || policy.linf_halt <= 0.0 ||
      policy.plateau_window <= 0 || policy.plateau_rel_improvement <= 0.0 ||
      policy.max_restarts < 0 || policy.max_iters_per_run <= 0 ||
      !(policy.init_lo < policy.init_hi))
    throw std::invalid_argument("cg_minimize: invalid policy");

  CgResult res;
  res.trace.restarts = 0;
  std::vector<double> x = std::move(init);
  std::vector<double> best = x;
  double best_f = std::numeric_limits<double>::infinity();

  std::vector<std::uint8_t> frozen(n, 0);
  std::vector<double> g(n), gprev(n), d(n), trial(n);

  auto record_mask = [&](int iter) {
    res.trace.clip_events.push_back({iter, frozen});
  };

  int global_iter = 0;
  for (int run = 0; run <= policy.max_restarts; ++run) {
    if (run > 0) {
      for (double& v : x) v = rng.uniform(policy.init_lo, policy.init_hi);
      ++res.trace.restarts;
    }
    res.trace.restart_starts.push_back(static_cast<int>(res.trace.objective.size()));
    std::fill(frozen.begin(), frozen.end(), 0);
    if (clipping) {
      // Initial points outside the box are clamped and frozen immediately.
      bool any = false;
      for (std::size_t i = 0; i < n; ++i)
        if (std::fabs(x[i]) > caps[i]) {
          x[i] = x[i] > 0 ? caps[i] : -caps[i];
          frozen[i] = 1;
          any = true;
        }
      if (any) record_mask(global_iter);
    }

    bool have_prev = false;
    double prev_step = 0.0;
    std::size_t run_start = res.trace.objective.size();

    for (int it = 0; it < policy.max_iters_per_run; ++it) {
      double f = objective.value_and_grad(x, g);
      if (!std::isfinite(f))
        throw std::runtime_error("cg_minimize: non-finite objective");
      if (f < best_f) {
        best_f = f;
        best = x;
      }
      res.trace.objective.push_back(f);
      ++global_iter;
      res.trace.total_iterations = global_iter;

      if (f < policy.mse_halt) {
        res.params = std::move(x);
        res.value = f;
        res.trace.halt = HaltReason::Mse;
        return res;
      }
      if (objective.linf && objective.linf(x) < policy.linf_halt) {
        res.params = std::move(x);
        res.value = f;
        res.trace.halt = HaltReason::Linf;
        return res;
      }

      // Plateau: relative improvement over the window below threshold.
      std::size_t len = res.trace.objective.size() - run_start;
      if (static_cast<int>(len) > policy.plateau_window) {
        double then = res.trace.objective[res.trace.objective.size() - 1 -
                                          policy.plateau_window];
        if (then > 0.0 && (then - f) / then < policy.plateau_rel_improvement)
          break;
      }

      // Reintroduce frozen parameters whose gradient points back inside.
      bool set_changed = false;
      if (clipping) {
        for (std::size_t i = 0; i < n; ++i)
          if (frozen[i] && x[i] * g[i] > 0.0) {
            frozen[i] = 0;
            set_changed = true;
          }
        if (set_changed) record_mask(global_iter);
      }

      std::vector<double> gm = g;
      for (std::size_t i = 0; i < n; ++i)
        if (frozen[i]) gm[i] = 0.0;

      bool steepest = !have_prev || set_changed ||
                      (it > 0 && it % static_cast<int>(n) == 0);
      for (int attempt = 0; attempt < 2; ++attempt) {
        if (steepest) {
          d = gm;
          for (double& v : d) v = -v;
        } else {
          double num = 0.0, den = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            num += gm[i] * (gm[i] - gprev[i]);
            den += gprev[i] * gprev[i];
          }
          double beta = den > 0.0 ? std::max(0.0, num / den) : 0.0;
          double descent = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            d[i] = -gm[i] + beta * d[i];
            if (frozen[i]) d[i] = 0.0;
            descent += d[i] * gm[i];
          }
          if (descent >= 0.0) {  // not a descent direction; fall back
            steepest = true;
            continue;
          }
        }

        double dnorm = 0.0;
        for (double v : d) dnorm += v * v;
        dnorm = std::sqrt(dnorm);
        if (dnorm == 0.0) break;

        // Largest step keeping every active parameter inside its cap.
        double t_cap = std::numeric_limits<double>::infinity();
        if (clipping) {
          for (std::size_t i = 0; i < n; ++i) {
            if (frozen[i] || d[i] == 0.0) continue;
            double lim = d[i] > 0 ? (caps[i] - x[i]) / d[i]
                                  : (-caps[i] - x[i]) / d[i];
            if (lim < t_cap) t_cap = lim;
          }
          if (t_cap < 0.0) t_cap = 0.0;
        }

        double hint = prev_step > 0.0 ? prev_step : 1.0 / (1.0 + dnorm);
        auto phi = [&](double t) {
          for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + t * d[i];
          return objective.value(trial);
        };
        auto [t, ft] = bounded_line_search(phi, hint, t_cap);
        (void)ft;
        if (t > 0.0) {
          for (std::size_t i = 0; i < n; ++i) x[i] += t * d[i];
          bool froze_now = false;
          if (clipping && t_cap < std::numeric_limits<double>::infinity() &&
              t >= t_cap * (1.0 - 1e-12)) {
            for (std::size_t i = 0; i < n; ++i) {
              if (frozen[i]) continue;
              if (std::fabs(x[i]) >= caps[i] * (1.0 - 1e-12)) {
                x[i] = x[i] > 0 ? caps[i] : -caps[i];
                frozen[i] = 1;
                froze_now = true;
              }
            }
            if (froze_now) record_mask(global_iter);
          }
          prev_step = t;
          gprev = gm;
          have_prev = !froze_now;  // freezing changes the subspace
          break;
        }
        if (steepest) {
          // No descent even along the (projected) gradient: leave the
          // iterate in place and let the plateau rule trigger the restart.
          have_prev = false;
          break;
        }
        steepest = true;  // conjugate direction failed; retry with gradient
      }
    }
  }

  res.params = std::move(best);
  res.value = best_f;
  res.trace.halt = HaltReason::PlateauRestartExhausted;
  return res;
}

}  // namespace repnet
