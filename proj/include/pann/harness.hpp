#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pann/common.hpp"
#include "pann/model.hpp"
#include "pann/optim.hpp"
#include "pann/pde.hpp"

namespace pann {

enum class ExperimentKind {
  LegendreRecovery,
  NonSmooth,
  HighDim,
  CsvRegression,
  PdePoisson,
  PdeAllenCahn,
  BasisInfo,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);

enum class SamplingMode { UniformRandom, Equispaced, PoissonDisk };
SamplingMode sampling_from_string(std::string_view name);
std::string_view to_string(SamplingMode mode);

enum class BoundaryPlacement { Equispaced, Random };

/// ||truth - pred||_2 / ||truth||_2.
double relative_l2_error(const Vector& pred, const Vector& truth);

/// Seeded point sampling on [-1,1]^d. Equispaced supports d <= 2 (the 1D
/// line, or the ceil(sqrt(N))^2 grid truncated to N points). PoissonDisk is
/// a naive dart thrower for d = 2.
Matrix sample_points(int n, int dim, SamplingMode mode, std::uint64_t seed);

/// nb points distributed along the boundary of [-1,1]^2, equispaced along
/// the perimeter (nb divisible by 4 gives the same count per edge) or
/// uniformly random on it.
Matrix sample_boundary_points(int nb, BoundaryPlacement placement, std::uint64_t seed);

enum class TargetKind { Legendre10, X2Sin1Y, HighDimSineProduct };

/// Synthetic regression targets:
///   Legendre10:         P_10(x0) P_10(x1)
///   X2Sin1Y:            x0^2 sin(1/x1), defined as 0 on the line x1 = 0
///   HighDimSineProduct: 5 pi^2 sin(2 pi x0) prod_{i>=1} sin(pi x_i)
double synthetic_target(TargetKind kind, const Vector& x);
Vector evaluate_target(TargetKind kind, const Matrix& points);

struct Dataset {
  Matrix points;        // scaled features in [-1,1]
  Vector targets;       // scaled to [-1,1]
  Vector feature_min, feature_max;
  double target_min = 0.0, target_max = 0.0;
  std::vector<int> rejected_lines;  // 1-based line numbers with non-numeric cells

  double unscale_target(double scaled) const;
};

/// Load a numeric CSV with a header row; min-max scales all columns to
/// [-1,1]. Rows containing non-numeric cells are rejected and recorded.
Dataset load_csv_dataset(const std::string& path, const std::string& target_column);

/// Seeded shuffle then contiguous folds; sizes differ by at most one and the
/// test folds partition [0,n).
std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold_split(int n, int k,
                                                                       std::uint64_t seed);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::LegendreRecovery;
  int n_points = 4096;
  int dim = 2;
  SamplingMode sampling = SamplingMode::UniformRandom;

  double schedule_c = 0.001;
  int schedule_offset = 8;
  bool schedule_doubled = true;
  int ell_override = -1;  // when >= 0, bypass the schedule
  BasisKind basis = BasisKind::TotalDegree;

  std::vector<int> hidden_widths = {100, 100, 100};
  Activation activation;
  LossConfig loss;
  AdamConfig adam;
  LbfgsConfig lbfgs;

  std::uint64_t seed = 0;
  int trials = 5;
  std::string out_path;
  std::string model_out;  // checkpoint of the last trained model, when set

  std::string csv_path;
  std::string target_column = "median_house_value";
  int kfolds = 4;

  int boundary_points = 400;
  BoundaryPlacement boundary_placement = BoundaryPlacement::Equispaced;

  bool record_timing = true;
  bool verbose = false;

  void validate() const;
};

/// Paper-style defaults for each experiment kind (schedules, constraints,
/// activations). The returned config can be overridden field by field.
ExperimentConfig defaults_for(ExperimentKind kind);

struct ReportRow {
  std::string experiment;
  std::string trial;  // trial/fold number, or "mean"/"std" for summary rows
  int n_points = 0;
  int dim = 0;
  int ell = 0;
  Eigen::Index m = 0;
  std::string constraint;
  std::string activation;
  bool preconditioned = false;
  double rel_l2 = 0.0;
  double wall_s = 0.0;
  double pct_nn_trunc = 0.0;
  double pct_poly_trunc = 0.0;
  double final_loss = 0.0;
  bool diverged = false;  // not part of the CSV schema
};

std::string report_csv(const std::vector<ReportRow>& rows);
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);

/// Run every trial/fold of an experiment, appending per-trial rows plus
/// mean/std summary rows, and write the CSV when an output path is set.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg);

/// Chunked model evaluation against ground truth on an arbitrary point set.
double evaluate_rel_l2(const PannModel& model, const Matrix& points, const Vector& truth);

}  // namespace pann
