#pragma once

#include <functional>

#include "pann/common.hpp"
#include "pann/model.hpp"

namespace pann {

struct AdamConfig {
  int iterations = 20000;
  double lr0 = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool cosine_annealing = true;

  void validate() const;
};

struct LbfgsConfig {
  int iterations = 400;
  double lr0 = 1.0;       // initial line-search step
  int history_size = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 25;

  void validate() const;
};

struct TrainReport {
  std::vector<double> loss_trace;  // subsampled; always holds the final loss
  double final_loss = 0.0;
  double wall_seconds = 0.0;
  int iterations_run = 0;
  bool diverged = false;
};

/// Loss callable: fills grad (resized by the callee) and returns the loss.
using LossFn = std::function<double(const Vector& x, Vector& grad)>;

/// Cosine-annealed learning rate: lr0 * (1 + cos(pi k / K)) / 2, so lr(0) =
/// lr0 and lr(K) = 0.
double cosine_lr(double lr0, int step, int total_steps);

/// Bias-corrected Adam. Aborts with the divergence flag set and the last
/// finite iterate restored if the loss or gradient becomes non-finite.
TrainReport adam_run(const LossFn& loss_fn, Vector& x, const AdamConfig& cfg);

/// Strong Wolfe line search along direction d from x0. Returns true and
/// updates (x, f, g) on success.
bool line_search_strong_wolfe(const LossFn& loss_fn, const Vector& x0, double f0,
                              const Vector& g0, const Vector& direction, double step0,
                              double c1, double c2, int max_trials, Vector& x_out,
                              double& f_out, Vector& g_out);

/// L-BFGS with two-loop recursion over the most recent curvature pairs.
/// Pairs with s.y <= 1e-10 are skipped; terminates when the gradient norm
/// falls below 1e-12 or the line search fails twice in a row (with one
/// bounded steepest-descent fallback step in between).
TrainReport lbfgs_run(const LossFn& loss_fn, Vector& x, const LbfgsConfig& cfg);

/// Couples a model to a loss evaluator for the training pipeline.
struct ModelLossBinding {
  PannModel* model = nullptr;
  std::function<LossEval(const PannModel&)> loss;
};

struct PipelineResult {
  TrainReport adam;
  TrainReport lbfgs;
  TrainReport combined;
  TruncationReport truncation;
};

/// Adam phase, truncation at the given threshold, L-BFGS phase on the
/// surviving parameters (masked coefficients leave the optimization vector),
/// then a final truncation pass that produces the cumulative report.
PipelineResult train_pipeline(const ModelLossBinding& binding, const AdamConfig& adam_cfg,
                              const LbfgsConfig& lbfgs_cfg, double truncation_threshold);

}  // namespace pann
