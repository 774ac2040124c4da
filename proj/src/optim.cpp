#include "pann/optim.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace pann {

void AdamConfig::validate() const {
  if (iterations < 0) throw ConfigError("adam iterations must be >= 0");
  if (!(lr0 > 0.0)) throw ConfigError("adam lr0 must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("adam betas must lie in [0,1)");
}

void LbfgsConfig::validate() const {
  if (iterations < 0) throw ConfigError("lbfgs iterations must be >= 0");
  if (history_size < 1) throw ConfigError("lbfgs history size must be >= 1");
  if (!(lr0 > 0.0)) throw ConfigError("lbfgs lr0 must be > 0");
}

double cosine_lr(double lr0, int step, int total_steps) {
  if (total_steps <= 0) return lr0;
  return lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * step / total_steps));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Keep roughly a thousand trace samples regardless of the budget.
int trace_stride(int iterations) { return std::max(1, iterations / 1000); }

}  // namespace

TrainReport adam_run(const LossFn& loss_fn, Vector& x, const AdamConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  TrainReport report;

  Vector grad(x.size());
  double loss = loss_fn(x, grad);
  report.loss_trace.push_back(loss);
  if (!std::isfinite(loss)) {
    report.diverged = true;
    report.final_loss = loss;
    report.wall_seconds = seconds_since(start);
    return report;
  }

  Vector m = Vector::Zero(x.size());
  Vector v = Vector::Zero(x.size());
  Vector last_finite = x;
  const int stride = trace_stride(cfg.iterations);
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  for (int k = 0; k < cfg.iterations; ++k) {
    const double lr = cfg.cosine_annealing ? cosine_lr(cfg.lr0, k, cfg.iterations) : cfg.lr0;
    beta1_pow *= cfg.beta1;
    beta2_pow *= cfg.beta2;
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    const Vector m_hat = m / (1.0 - beta1_pow);
    const Vector v_hat = v / (1.0 - beta2_pow);
    x -= lr * (m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon)).matrix();

    loss = loss_fn(x, grad);
    report.iterations_run = k + 1;
    if (!std::isfinite(loss) || !grad.allFinite()) {
      x = last_finite;
      report.diverged = true;
      break;
    }
    last_finite = x;
    if ((k + 1) % stride == 0) report.loss_trace.push_back(loss);
  }

  if (report.loss_trace.empty() || report.loss_trace.back() != loss)
    report.loss_trace.push_back(loss);
  report.final_loss = loss;
  report.wall_seconds = seconds_since(start);
  return report;
}

namespace {

// Cubic interpolation step for zoom; falls back to bisection when the cubic
// is ill-posed or leaves the bracket.
double interpolate_step(double a_lo, double f_lo, double g_lo, double a_hi, double f_hi,
                        double g_hi) {
  const double d1 = g_lo + g_hi - 3.0 * (f_lo - f_hi) / (a_lo - a_hi);
  const double disc = d1 * d1 - g_lo * g_hi;
  if (disc >= 0.0) {
    const double d2 = std::sqrt(disc) * (a_hi > a_lo ? 1.0 : -1.0);
    const double cand =
        a_hi - (a_hi - a_lo) * (g_hi + d2 - d1) / (g_hi - g_lo + 2.0 * d2);
    const double lo = std::min(a_lo, a_hi);
    const double hi = std::max(a_lo, a_hi);
    const double margin = 0.1 * (hi - lo);
    if (std::isfinite(cand) && cand > lo + margin && cand < hi - margin) return cand;
  }
  return 0.5 * (a_lo + a_hi);
}

}  // namespace

bool line_search_strong_wolfe(const LossFn& loss_fn, const Vector& x0, double f0,
                              const Vector& g0, const Vector& direction, double step0,
                              double c1, double c2, int max_trials, Vector& x_out,
                              double& f_out, Vector& g_out) {
  const double dg0 = g0.dot(direction);
  if (!(dg0 < 0.0)) return false;

  Vector g(x0.size());
  auto eval = [&](double alpha, double& f, double& dg) {
    x_out = x0 + alpha * direction;
    f = loss_fn(x_out, g);
    dg = g.dot(direction);
  };

  int trials = 0;
  auto zoom = [&](double a_lo, double f_lo, double dg_lo, double a_hi, double f_hi,
                  double dg_hi) -> bool {
    while (trials < max_trials) {
      const double a = interpolate_step(a_lo, f_lo, dg_lo, a_hi, f_hi, dg_hi);
      double f, dg;
      eval(a, f, dg);
      ++trials;
      if (!std::isfinite(f)) {
        a_hi = a;
        f_hi = f;
        dg_hi = dg;
        continue;
      }
      if (f > f0 + c1 * a * dg0 || f >= f_lo) {
        a_hi = a;
        f_hi = f;
        dg_hi = dg;
      } else {
        if (std::abs(dg) <= -c2 * dg0) {
          f_out = f;
          g_out = g;
          return true;
        }
        if (dg * (a_hi - a_lo) >= 0.0) {
          a_hi = a_lo;
          f_hi = f_lo;
          dg_hi = dg_lo;
        }
        a_lo = a;
        f_lo = f;
        dg_lo = dg;
      }
      if (std::abs(a_hi - a_lo) < 1e-16) return false;
    }
    return false;
  };

  double a_prev = 0.0;
  double f_prev = f0;
  double dg_prev = dg0;
  double a = step0;
  while (trials < max_trials) {
    double f, dg;
    eval(a, f, dg);
    ++trials;
    if (!std::isfinite(f)) {
      // Shrink back toward the last good point.
      const bool ok = zoom(a_prev, f_prev, dg_prev, a, f, dg);
      return ok;
    }
    if (f > f0 + c1 * a * dg0 || (trials > 1 && f >= f_prev))
      return zoom(a_prev, f_prev, dg_prev, a, f, dg);
    if (std::abs(dg) <= -c2 * dg0) {
      f_out = f;
      g_out = g;
      return true;
    }
    if (dg >= 0.0) return zoom(a, f, dg, a_prev, f_prev, dg_prev);
    a_prev = a;
    f_prev = f;
    dg_prev = dg;
    a *= 2.0;
  }
  return false;
}

TrainReport lbfgs_run(const LossFn& loss_fn, Vector& x, const LbfgsConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  TrainReport report;

  Vector grad(x.size());
  double loss = loss_fn(x, grad);
  report.loss_trace.push_back(loss);
  if (!std::isfinite(loss) || !grad.allFinite()) {
    report.diverged = true;
    report.final_loss = loss;
    report.wall_seconds = seconds_since(start);
    return report;
  }

  struct Pair {
    Vector s, y;
    double rho;
  };
  std::deque<Pair> history;
  const int stride = trace_stride(cfg.iterations);
  constexpr double kGradTol = 1e-12;
  constexpr double kCurvatureTol = 1e-10;
  constexpr double kFallbackLr = 1e-3;
  int consecutive_failures = 0;

  for (int k = 0; k < cfg.iterations; ++k) {
    if (grad.norm() < kGradTol) break;

    // Two-loop recursion.
    Vector q = -grad;
    std::vector<double> alpha(history.size());
    for (size_t i = history.size(); i-- > 0;) {
      alpha[i] = history[i].rho * history[i].s.dot(q);
      q -= alpha[i] * history[i].y;
    }
    if (!history.empty()) {
      const Pair& last = history.back();
      q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (size_t i = 0; i < history.size(); ++i) {
      const double beta = history[i].rho * history[i].y.dot(q);
      q += (alpha[i] - beta) * history[i].s;
    }
    if (q.dot(grad) >= 0.0) q = -grad;  // safeguard: keep descent directions

    Vector x_new(x.size()), g_new(x.size());
    double f_new = 0.0;
    const double step0 = cfg.lr0;
    const bool ok = line_search_strong_wolfe(loss_fn, x, loss, grad, q, step0, cfg.wolfe_c1,
                                             cfg.wolfe_c2, cfg.max_line_search, x_new, f_new,
                                             g_new);
    report.iterations_run = k + 1;
    if (!ok) {
      ++consecutive_failures;
      if (consecutive_failures >= 2) break;
      // One bounded steepest-descent step before giving up entirely.
      x_new = x - kFallbackLr * grad / std::max(1.0, grad.norm());
      f_new = loss_fn(x_new, g_new);
      if (!std::isfinite(f_new) || f_new >= loss) break;
    } else {
      consecutive_failures = 0;
    }
    if (!std::isfinite(f_new) || !g_new.allFinite()) {
      report.diverged = true;
      break;
    }

    Pair pair;
    pair.s = x_new - x;
    pair.y = g_new - grad;
    const double sy = pair.s.dot(pair.y);
    if (sy > kCurvatureTol) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > cfg.history_size) history.pop_front();
    }
    x = x_new;
    grad = g_new;
    loss = f_new;
    if ((k + 1) % stride == 0) report.loss_trace.push_back(loss);
  }

  if (report.loss_trace.empty() || report.loss_trace.back() != loss)
    report.loss_trace.push_back(loss);
  report.final_loss = loss;
  report.wall_seconds = seconds_since(start);
  return report;
}

PipelineResult train_pipeline(const ModelLossBinding& binding, const AdamConfig& adam_cfg,
                              const LbfgsConfig& lbfgs_cfg, double truncation_threshold) {
  if (binding.model == nullptr || !binding.loss)
    throw ConfigError("training pipeline needs a bound model and loss");
  PannModel& model = *binding.model;

  const LossFn loss_fn = [&](const Vector& x, Vector& grad) {
    unpack_params(model, x);
    const LossEval eval = binding.loss(model);
    grad = pack_gradient(model, eval.grad);
    return eval.loss;
  };

  PipelineResult result;
  Vector x = pack_params(model);
  result.adam = adam_run(loss_fn, x, adam_cfg);
  unpack_params(model, x);

  truncate(model, truncation_threshold);

  x = pack_params(model);
  result.lbfgs = lbfgs_run(loss_fn, x, lbfgs_cfg);
  unpack_params(model, x);

  result.truncation = truncate(model, truncation_threshold);

  result.combined.loss_trace = result.adam.loss_trace;
  result.combined.loss_trace.insert(result.combined.loss_trace.end(),
                                    result.lbfgs.loss_trace.begin(),
                                    result.lbfgs.loss_trace.end());
  result.combined.final_loss = result.lbfgs.final_loss;
  result.combined.wall_seconds = result.adam.wall_seconds + result.lbfgs.wall_seconds;
  result.combined.iterations_run = result.adam.iterations_run + result.lbfgs.iterations_run;
  result.combined.diverged = result.adam.diverged || result.lbfgs.diverged;
  return result;
}

}  // namespace pann
