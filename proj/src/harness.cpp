#include "pann/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

namespace pann {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::LegendreRecovery: return "legendre-recovery";
    case ExperimentKind::NonSmooth: return "nonsmooth";
    case ExperimentKind::HighDim: return "highdim";
    case ExperimentKind::CsvRegression: return "csv-regression";
    case ExperimentKind::PdePoisson: return "pde-poisson";
    case ExperimentKind::PdeAllenCahn: return "pde-allencahn";
    case ExperimentKind::BasisInfo: return "basis-info";
  }
  return "?";
}

ExperimentKind experiment_from_string(std::string_view name) {
  if (name == "legendre-recovery") return ExperimentKind::LegendreRecovery;
  if (name == "nonsmooth") return ExperimentKind::NonSmooth;
  if (name == "highdim") return ExperimentKind::HighDim;
  if (name == "csv-regression") return ExperimentKind::CsvRegression;
  if (name == "pde-poisson") return ExperimentKind::PdePoisson;
  if (name == "pde-allencahn") return ExperimentKind::PdeAllenCahn;
  if (name == "basis-info") return ExperimentKind::BasisInfo;
  throw ConfigError("unknown experiment kind: " + std::string(name));
}

std::string_view to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::UniformRandom: return "uniform-random";
    case SamplingMode::Equispaced: return "equispaced";
    case SamplingMode::PoissonDisk: return "poisson-disk";
  }
  return "?";
}

SamplingMode sampling_from_string(std::string_view name) {
  if (name == "uniform-random" || name == "random") return SamplingMode::UniformRandom;
  if (name == "equispaced") return SamplingMode::Equispaced;
  if (name == "poisson-disk") return SamplingMode::PoissonDisk;
  throw ConfigError("unknown sampling mode: " + std::string(name));
}

double relative_l2_error(const Vector& pred, const Vector& truth) {
  if (pred.size() != truth.size())
    throw ConfigError("prediction and truth vectors differ in length");
  const double denom = truth.norm();
  if (!(denom > 0.0)) throw ConfigError("relative l2 error needs a nonzero truth vector");
  return (truth - pred).norm() / denom;
}

namespace {

Matrix equispaced_points(int n, int dim) {
  Matrix pts(n, dim);
  if (dim == 1) {
    for (int i = 0; i < n; ++i) pts(i, 0) = n == 1 ? 0.0 : -1.0 + 2.0 * i / (n - 1);
    return pts;
  }
  // ceil(sqrt(N)) grid truncated to the first N points in row-major order.
  const int g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  int at = 0;
  for (int i = 0; i < g && at < n; ++i)
    for (int j = 0; j < g && at < n; ++j) {
      pts(at, 0) = g == 1 ? 0.0 : -1.0 + 2.0 * i / (g - 1);
      pts(at, 1) = g == 1 ? 0.0 : -1.0 + 2.0 * j / (g - 1);
      ++at;
    }
  return pts;
}

// Dart throwing with a background grid for neighbor lookups. The radius
// shrinks geometrically whenever the thrower stalls, so the requested count
// is always reached.
Matrix poisson_disk_points(int n, Rng& rng) {
  Matrix pts(n, 2);
  double radius = std::sqrt(4.0 * 0.7 / (std::numbers::pi * n));
  int placed = 0;
  while (placed < n) {
    const double cell = radius / std::numbers::sqrt2;
    const int cells = std::max(1, static_cast<int>(std::ceil(2.0 / cell)));
    std::vector<std::vector<int>> grid(static_cast<size_t>(cells) * cells);
    auto cell_of = [&](double x, double y) {
      int cx = std::min(cells - 1, static_cast<int>((x + 1.0) / cell));
      int cy = std::min(cells - 1, static_cast<int>((y + 1.0) / cell));
      return cy * cells + cx;
    };
    placed = 0;
    int failures = 0;
    const int max_failures = 200 * n;
    while (placed < n && failures < max_failures) {
      const double x = rng.uniform(-1.0, 1.0);
      const double y = rng.uniform(-1.0, 1.0);
      const int cx = std::min(cells - 1, static_cast<int>((x + 1.0) / cell));
      const int cy = std::min(cells - 1, static_cast<int>((y + 1.0) / cell));
      bool ok = true;
      for (int dy = -2; dy <= 2 && ok; ++dy)
        for (int dx = -2; dx <= 2 && ok; ++dx) {
          const int nx = cx + dx, ny = cy + dy;
          if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) continue;
          for (int id : grid[static_cast<size_t>(ny * cells + nx)]) {
            const double ddx = pts(id, 0) - x, ddy = pts(id, 1) - y;
            if (ddx * ddx + ddy * ddy < radius * radius) {
              ok = false;
              break;
            }
          }
        }
      if (ok) {
        pts(placed, 0) = x;
        pts(placed, 1) = y;
        grid[static_cast<size_t>(cell_of(x, y))].push_back(placed);
        ++placed;
      } else {
        ++failures;
      }
    }
    if (placed < n) radius *= 0.85;
  }
  return pts;
}

}  // namespace

Matrix sample_points(int n, int dim, SamplingMode mode, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_points requires N >= 1");
  if (dim < 1) throw ConfigError("sample_points requires dim >= 1");
  switch (mode) {
    case SamplingMode::UniformRandom: {
      Rng rng(seed);
      Matrix pts(n, dim);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) pts(i, j) = rng.uniform(-1.0, 1.0);
      return pts;
    }
    case SamplingMode::Equispaced:
      if (dim > 2) throw ConfigError("equispaced sampling is only supported for d <= 2");
      return equispaced_points(n, dim);
    case SamplingMode::PoissonDisk: {
      if (dim != 2) throw ConfigError("poisson-disk sampling is only supported for d = 2");
      Rng rng(seed);
      return poisson_disk_points(n, rng);
    }
  }
  throw ConfigError("unknown sampling mode");
}

Matrix sample_boundary_points(int nb, BoundaryPlacement placement, std::uint64_t seed) {
  if (nb < 1) throw ConfigError("need at least one boundary point");
  Matrix pts(nb, 2);
  Rng rng(seed);
  auto perimeter_point = [](double s) {
    // Walk the perimeter of [-1,1]^2, total length 8, starting at (-1,-1).
    double x, y;
    if (s < 2.0) {
      x = -1.0 + s;
      y = -1.0;
    } else if (s < 4.0) {
      x = 1.0;
      y = -1.0 + (s - 2.0);
    } else if (s < 6.0) {
      x = 1.0 - (s - 4.0);
      y = 1.0;
    } else {
      x = -1.0;
      y = 1.0 - (s - 6.0);
    }
    return std::pair<double, double>(x, y);
  };
  for (int i = 0; i < nb; ++i) {
    const double s = placement == BoundaryPlacement::Equispaced
                         ? 8.0 * i / nb
                         : rng.uniform(0.0, 8.0);
    const auto [x, y] = perimeter_point(s);
    pts(i, 0) = x;
    pts(i, 1) = y;
  }
  return pts;
}

double synthetic_target(TargetKind kind, const Vector& x) {
  switch (kind) {
    case TargetKind::Legendre10:
      return legendre_values_1d(10, x[0])[10] * legendre_values_1d(10, x[1])[10];
    case TargetKind::X2Sin1Y:
      return x[1] == 0.0 ? 0.0 : x[0] * x[0] * std::sin(1.0 / x[1]);
    case TargetKind::HighDimSineProduct: {
      double v = 5.0 * std::numbers::pi * std::numbers::pi *
                 std::sin(2.0 * std::numbers::pi * x[0]);
      for (Eigen::Index i = 1; i < x.size(); ++i) v *= std::sin(std::numbers::pi * x[i]);
      return v;
    }
  }
  throw ConfigError("unknown target kind");
}

Vector evaluate_target(TargetKind kind, const Matrix& points) {
  Vector out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    out[i] = synthetic_target(kind, points.row(i).transpose());
  return out;
}

double Dataset::unscale_target(double scaled) const {
  return target_min + (scaled + 1.0) * 0.5 * (target_max - target_min);
}

Dataset load_csv_dataset(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset is empty: " + path);
  // Strip a UTF-8 BOM and a trailing CR if present.
  if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end())
    throw DataError("target column '" + target_column + "' not found in " + path);
  const size_t target_idx = static_cast<size_t>(target_it - header.begin());
  const size_t ncols = header.size();
  if (ncols < 2) throw DataError("dataset needs at least one feature and a target");

  std::vector<std::vector<double>> rows;
  std::vector<int> rejected;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    bool ok = true;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        ok = false;
        break;
      }
    }
    if (!ok || row.size() != ncols) {
      rejected.push_back(line_no);
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("dataset has no usable rows: " + path);
  if (!rejected.empty()) {
    std::ostringstream msg;
    msg << "[pann] warning: rejected " << rejected.size() << " non-numeric row(s) at line(s)";
    for (size_t i = 0; i < std::min<size_t>(rejected.size(), 10); ++i) msg << ' ' << rejected[i];
    if (rejected.size() > 10) msg << " ...";
    std::cerr << msg.str() << "\n";
  }

  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(ncols) - 1;
  Dataset ds;
  ds.rejected_lines = std::move(rejected);
  ds.points.resize(n, d);
  ds.targets.resize(n);
  ds.feature_min.resize(d);
  ds.feature_max.resize(d);

  for (int i = 0; i < n; ++i) {
    int at = 0;
    for (size_t c = 0; c < ncols; ++c) {
      if (c == target_idx)
        ds.targets[i] = rows[static_cast<size_t>(i)][c];
      else
        ds.points(i, at++) = rows[static_cast<size_t>(i)][c];
    }
  }

  for (int j = 0; j < d; ++j) {
    const double lo = ds.points.col(j).minCoeff();
    const double hi = ds.points.col(j).maxCoeff();
    if (!(hi > lo))
      throw DataError("feature column " + std::to_string(j) + " has zero range");
    ds.feature_min[j] = lo;
    ds.feature_max[j] = hi;
    ds.points.col(j) = (2.0 * (ds.points.col(j).array() - lo) / (hi - lo) - 1.0).matrix();
  }
  ds.target_min = ds.targets.minCoeff();
  ds.target_max = ds.targets.maxCoeff();
  if (!(ds.target_max > ds.target_min))
    throw DataError("target column has zero range");
  ds.targets = (2.0 * (ds.targets.array() - ds.target_min) /
                (ds.target_max - ds.target_min) - 1.0).matrix();
  return ds;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold_split(int n, int k,
                                                                       std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold split requires k >= 2");
  if (n < k) throw ConfigError("k-fold split requires n >= k");
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }

  std::vector<std::pair<std::vector<int>, std::vector<int>>> folds;
  const int base = n / k;
  const int extra = n % k;
  int at = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    std::vector<int> test(order.begin() + at, order.begin() + at + size);
    std::vector<int> train;
    train.reserve(static_cast<size_t>(n - size));
    train.insert(train.end(), order.begin(), order.begin() + at);
    train.insert(train.end(), order.begin() + at + size, order.end());
    folds.emplace_back(std::move(train), std::move(test));
    at += size;
  }
  return folds;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (n_points < 1) throw ConfigError("N must be >= 1");
  if (dim < 1) throw ConfigError("dim must be >= 1");
  loss.validate();
  adam.validate();
  lbfgs.validate();
  activation.validate();
}

ExperimentConfig defaults_for(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::LegendreRecovery:
      cfg.schedule_doubled = true;
      cfg.loss.constraint = ConstraintKind::CE;
      break;
    case ExperimentKind::NonSmooth:
      cfg.schedule_doubled = false;
      cfg.loss.constraint = ConstraintKind::CE;
      cfg.activation.kind = ActivationKind::ReLU;
      break;
    case ExperimentKind::HighDim:
      cfg.ell_override = 8;
      cfg.n_points = 1536;
      cfg.loss.constraint = ConstraintKind::CE;
      break;
    case ExperimentKind::CsvRegression:
      cfg.dim = 8;
      cfg.ell_override = 2;
      cfg.loss.constraint = ConstraintKind::CE;
      cfg.activation.kind = ActivationKind::ReLU;
      cfg.trials = 1;  // folds drive the row count instead
      break;
    case ExperimentKind::PdePoisson:
    case ExperimentKind::PdeAllenCahn:
      cfg.n_points = 256;
      cfg.schedule_c = 0.003;
      cfg.schedule_doubled = true;
      cfg.sampling = SamplingMode::Equispaced;
      cfg.loss.constraint = ConstraintKind::CE;
      break;
    case ExperimentKind::BasisInfo:
      break;
  }
  return cfg;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

ReportRow summary_row(const std::vector<ReportRow>& rows, bool want_std) {
  ReportRow out = rows.front();
  out.trial = want_std ? "std" : "mean";
  auto reduce = [&](auto getter) {
    double mean = 0.0;
    for (const auto& r : rows) mean += getter(r);
    mean /= static_cast<double>(rows.size());
    if (!want_std) return mean;
    if (rows.size() < 2) return 0.0;
    double ss = 0.0;
    for (const auto& r : rows) ss += (getter(r) - mean) * (getter(r) - mean);
    return std::sqrt(ss / static_cast<double>(rows.size() - 1));
  };
  out.rel_l2 = reduce([](const ReportRow& r) { return r.rel_l2; });
  out.wall_s = reduce([](const ReportRow& r) { return r.wall_s; });
  out.pct_nn_trunc = reduce([](const ReportRow& r) { return r.pct_nn_trunc; });
  out.pct_poly_trunc = reduce([](const ReportRow& r) { return r.pct_poly_trunc; });
  out.final_loss = reduce([](const ReportRow& r) { return r.final_loss; });
  out.diverged = false;
  return out;
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "experiment,trial,N,d,ell,m,constraint,activation,preconditioned,rel_l2,"
         "wall_s,pct_nn_trunc,pct_poly_trunc,final_loss\n";
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.trial << ',' << r.n_points << ',' << r.dim << ','
        << r.ell << ',' << r.m << ',' << r.constraint << ',' << r.activation << ','
        << (r.preconditioned ? "true" : "false") << ',' << format_double(r.rel_l2) << ','
        << format_double(r.wall_s) << ',' << format_double(r.pct_nn_trunc) << ','
        << format_double(r.pct_poly_trunc) << ',' << format_double(r.final_loss) << '\n';
  }
  return out.str();
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open report for writing: " + path);
  out << report_csv(rows);
}

double evaluate_rel_l2(const PannModel& model, const Matrix& points, const Vector& truth) {
  constexpr Eigen::Index kBlock = 4096;
  Vector pred(points.rows());
  for (Eigen::Index at = 0; at < points.rows(); at += kBlock) {
    const Eigen::Index len = std::min(kBlock, points.rows() - at);
    const Matrix block = points.middleRows(at, len);
    const DesignBundle bundle = assemble_design(model.basis, block, false);
    pred.segment(at, len) = predict(model, block, bundle);
  }
  return relative_l2_error(pred, truth);
}

namespace {

struct TrialOutcome {
  double rel_l2 = std::numeric_limits<double>::quiet_NaN();
  double final_loss = std::numeric_limits<double>::quiet_NaN();
  double wall_s = 0.0;
  TruncationReport truncation;
  bool diverged = false;
  int ell = 0;
  Eigen::Index m = 0;
};

int resolve_ell(const ExperimentConfig& cfg, int n_train) {
  if (cfg.ell_override >= 0) return cfg.ell_override;
  return degree_schedule(n_train, cfg.schedule_c, cfg.schedule_offset, cfg.schedule_doubled);
}

MlpConfig mlp_config_for(const ExperimentConfig& cfg, int dim) {
  MlpConfig mc;
  mc.input_dim = dim;
  mc.hidden_widths = cfg.hidden_widths;
  mc.activation = cfg.activation;
  return mc;
}

TrialOutcome run_regression_trial(const ExperimentConfig& cfg, TargetKind target,
                                  std::uint64_t trial_seed) {
  TrialOutcome out;
  const int d = cfg.kind == ExperimentKind::HighDim ? cfg.dim : 2;
  const Matrix points = sample_points(cfg.n_points, d, cfg.sampling, trial_seed);
  const Vector targets = evaluate_target(target, points);

  out.ell = resolve_ell(cfg, cfg.n_points);
  BasisSpec spec{cfg.basis, d, out.ell};
  MultiIndexSet basis = enumerate_indices(spec);
  out.m = basis.size();

  DesignBundle bundle = assemble_design(basis, points, false);
  if (cfg.loss.preconditioned) compute_preconditioner(bundle, basis);

  PannModel model = make_model(mlp_config_for(cfg, d), std::move(basis),
                               derive_seed(trial_seed, 0xabcd));
  ModelLossBinding binding;
  binding.model = &model;
  binding.loss = [&](const PannModel& mdl) {
    return regression_loss(mdl, points, targets, bundle, cfg.loss);
  };

  const PipelineResult result =
      train_pipeline(binding, cfg.adam, cfg.lbfgs, cfg.loss.truncation_threshold);
  out.final_loss = result.combined.final_loss;
  out.wall_s = result.combined.wall_seconds;
  out.truncation = result.truncation;
  out.diverged = result.combined.diverged;
  if (!cfg.model_out.empty()) save_model(model, cfg.model_out);
  if (!out.diverged) {
    const Matrix grid = test_grid(d);
    out.rel_l2 = evaluate_rel_l2(model, grid, evaluate_target(target, grid));
  }
  return out;
}

TrialOutcome run_pde_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  TrialOutcome out;
  const PdeProblem problem = cfg.kind == ExperimentKind::PdePoisson
                                 ? manufactured_poisson()
                                 : manufactured_allen_cahn();

  const Matrix colloc = sample_points(cfg.n_points, 2, cfg.sampling, trial_seed);
  const Matrix bdry = sample_boundary_points(cfg.boundary_points, cfg.boundary_placement,
                                             derive_seed(trial_seed, 0xb0d));
  Vector f_vals(colloc.rows());
  for (Eigen::Index i = 0; i < colloc.rows(); ++i)
    f_vals[i] = problem.forcing(colloc(i, 0), colloc(i, 1));
  Vector g_vals(bdry.rows());
  for (Eigen::Index i = 0; i < bdry.rows(); ++i)
    g_vals[i] = problem.boundary(bdry(i, 0), bdry(i, 1));

  out.ell = resolve_ell(cfg, cfg.n_points);
  BasisSpec spec{cfg.basis, 2, out.ell};
  MultiIndexSet basis = enumerate_indices(spec);
  out.m = basis.size();

  DesignBundle bundle_b = assemble_design(basis, bdry, false);
  DesignBundle bundle_r = assemble_design(basis, colloc, true);
  if (cfg.loss.preconditioned) {
    compute_preconditioner(bundle_b, basis);
    compute_preconditioner(bundle_r, basis);
  }

  PannModel model = make_model(mlp_config_for(cfg, 2), std::move(basis),
                               derive_seed(trial_seed, 0xabcd));
  ModelLossBinding binding;
  binding.model = &model;
  binding.loss = [&](const PannModel& mdl) {
    return pde_loss(mdl, bdry, g_vals, colloc, f_vals, bundle_b, bundle_r, problem.kind,
                    cfg.loss);
  };

  const PipelineResult result =
      train_pipeline(binding, cfg.adam, cfg.lbfgs, cfg.loss.truncation_threshold);
  out.final_loss = result.combined.final_loss;
  out.wall_s = result.combined.wall_seconds;
  out.truncation = result.truncation;
  out.diverged = result.combined.diverged;
  if (!cfg.model_out.empty()) save_model(model, cfg.model_out);
  if (!out.diverged) {
    const Matrix grid = test_grid(2);
    Vector truth(grid.rows());
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
      truth[i] = problem.exact_solution(grid(i, 0), grid(i, 1));
    out.rel_l2 = evaluate_rel_l2(model, grid, truth);
  }
  return out;
}

TrialOutcome run_csv_fold(const ExperimentConfig& cfg, const Dataset& data,
                          const std::vector<int>& train_idx, const std::vector<int>& test_idx,
                          std::uint64_t fold_seed) {
  TrialOutcome out;
  const int d = static_cast<int>(data.points.cols());
  Matrix train_pts(static_cast<Eigen::Index>(train_idx.size()), d);
  Vector train_y(static_cast<Eigen::Index>(train_idx.size()));
  for (size_t i = 0; i < train_idx.size(); ++i) {
    train_pts.row(static_cast<Eigen::Index>(i)) = data.points.row(train_idx[i]);
    train_y[static_cast<Eigen::Index>(i)] = data.targets[train_idx[i]];
  }
  Matrix test_pts(static_cast<Eigen::Index>(test_idx.size()), d);
  Vector test_y(static_cast<Eigen::Index>(test_idx.size()));
  for (size_t i = 0; i < test_idx.size(); ++i) {
    test_pts.row(static_cast<Eigen::Index>(i)) = data.points.row(test_idx[i]);
    test_y[static_cast<Eigen::Index>(i)] = data.targets[test_idx[i]];
  }

  out.ell = resolve_ell(cfg, static_cast<int>(train_idx.size()));
  BasisSpec spec{cfg.basis, d, out.ell};
  MultiIndexSet basis = enumerate_indices(spec);
  out.m = basis.size();

  DesignBundle bundle = assemble_design(basis, train_pts, false);
  if (cfg.loss.preconditioned) compute_preconditioner(bundle, basis);

  PannModel model = make_model(mlp_config_for(cfg, d), std::move(basis),
                               derive_seed(fold_seed, 0xabcd));
  ModelLossBinding binding;
  binding.model = &model;
  binding.loss = [&](const PannModel& mdl) {
    return regression_loss(mdl, train_pts, train_y, bundle, cfg.loss);
  };

  const PipelineResult result =
      train_pipeline(binding, cfg.adam, cfg.lbfgs, cfg.loss.truncation_threshold);
  out.final_loss = result.combined.final_loss;
  out.wall_s = result.combined.wall_seconds;
  out.truncation = result.truncation;
  out.diverged = result.combined.diverged;
  if (!cfg.model_out.empty()) save_model(model, cfg.model_out);
  if (!out.diverged) out.rel_l2 = evaluate_rel_l2(model, test_pts, test_y);
  return out;
}

void print_basis_info(const ExperimentConfig& cfg) {
  struct Block {
    const char* label;
    std::vector<double> cs;
    std::vector<int> ns;
    bool doubled;
  };
  const std::vector<Block> blocks = {
      {"degree schedule l = 2(ceil(cN)+8), d=2 total-degree",
       {0.001, 0.002, 0.003},
       {256, 1024, 4096, 16384},
       true},
      {"degree schedule l = ceil(cN)+8, d=2 total-degree",
       {0.001, 0.002, 0.003},
       {256, 1024, 4096, 16384},
       false},
      {"degree schedule l = 2(ceil(cN)+8), d=2 total-degree (collocation sizes)",
       {0.003, 0.004},
       {64, 256, 1024, 4096},
       true},
  };
  for (const auto& block : blocks) {
    std::cout << block.label << "\n";
    std::cout << "c,N,ell,m\n";
    for (double c : block.cs)
      for (int n : block.ns) {
        const int ell = degree_schedule(n, c, cfg.schedule_offset, block.doubled);
        const BasisSpec spec{BasisKind::TotalDegree, 2, ell};
        std::cout << format_double(c) << ',' << n << ',' << ell << ','
                  << enumerate_indices(spec).size() << "\n";
      }
    std::cout << "\n";
  }
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind == ExperimentKind::BasisInfo) {
    print_basis_info(cfg);
    return {};
  }

  ReportRow proto;
  proto.experiment = std::string(to_string(cfg.kind));
  proto.n_points = cfg.n_points;
  proto.dim = cfg.kind == ExperimentKind::HighDim ? cfg.dim : 2;
  proto.constraint = std::string(to_string(cfg.loss.constraint));
  proto.activation = std::string(to_string(cfg.activation.kind));
  proto.preconditioned = cfg.loss.preconditioned;

  std::vector<ReportRow> rows;
  auto append_outcome = [&](const TrialOutcome& out, const std::string& trial_label) {
    ReportRow row = proto;
    row.trial = trial_label;
    row.ell = out.ell;
    row.m = out.m;
    row.rel_l2 = out.rel_l2;
    row.wall_s = cfg.record_timing ? out.wall_s : 0.0;
    row.pct_nn_trunc = out.truncation.pct_nn_truncated;
    row.pct_poly_trunc = out.truncation.pct_poly_truncated;
    row.final_loss = out.final_loss;
    row.diverged = out.diverged;
    rows.push_back(std::move(row));
  };

  if (cfg.kind == ExperimentKind::CsvRegression) {
    if (cfg.csv_path.empty()) throw ConfigError("csv-regression requires a dataset path");
    const Dataset data = load_csv_dataset(cfg.csv_path, cfg.target_column);
    proto.dim = static_cast<int>(data.points.cols());
    const auto folds =
        kfold_split(static_cast<int>(data.points.rows()), cfg.kfolds, cfg.seed);
    for (size_t f = 0; f < folds.size(); ++f) {
      proto.n_points = static_cast<int>(folds[f].first.size());
      const TrialOutcome out = run_csv_fold(cfg, data, folds[f].first, folds[f].second,
                                            derive_seed(cfg.seed, f));
      append_outcome(out, std::to_string(f));
      if (cfg.verbose)
        std::cerr << "[pann] fold " << f << " rel_l2 " << out.rel_l2 << "\n";
    }
  } else {
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
      TrialOutcome out;
      if (cfg.kind == ExperimentKind::PdePoisson || cfg.kind == ExperimentKind::PdeAllenCahn) {
        out = run_pde_trial(cfg, trial_seed);
      } else {
        const TargetKind target = cfg.kind == ExperimentKind::LegendreRecovery
                                      ? TargetKind::Legendre10
                                      : cfg.kind == ExperimentKind::NonSmooth
                                            ? TargetKind::X2Sin1Y
                                            : TargetKind::HighDimSineProduct;
        out = run_regression_trial(cfg, target, trial_seed);
      }
      append_outcome(out, std::to_string(t));
      if (cfg.verbose)
        std::cerr << "[pann] trial " << t << " rel_l2 " << out.rel_l2 << " final loss "
                  << out.final_loss << "\n";
    }
  }

  std::vector<ReportRow> trial_rows = rows;
  rows.push_back(summary_row(trial_rows, false));
  rows.push_back(summary_row(trial_rows, true));
  if (!cfg.out_path.empty()) write_report_csv(cfg.out_path, rows);
  return rows;
}

}  // namespace pann
