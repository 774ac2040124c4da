#include <cmath>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pann/harness.hpp"
#include "pann/optim.hpp"

namespace {

using namespace pann;

void add_experiment_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& experiment,
                            std::string& sampling, std::string& basis, std::string& act,
                            std::string& constraint, std::string& l1_scope) {
  cmd->add_option("--experiment", experiment, "experiment kind");
  cmd->add_option("-N,--n-points", cfg.n_points, "training / collocation point count");
  cmd->add_option("-d,--dim", cfg.dim, "problem dimension (highdim experiments)");
  cmd->add_option("--sampling", sampling, "uniform-random | equispaced | poisson-disk");
  cmd->add_option("--schedule-c", cfg.schedule_c, "degree schedule constant c");
  cmd->add_option("--schedule-offset", cfg.schedule_offset, "degree schedule offset");
  cmd->add_flag("--schedule-doubled,!--schedule-undoubled", cfg.schedule_doubled,
                "double the schedule degree");
  cmd->add_option("--ell", cfg.ell_override, "explicit degree budget (bypasses the schedule)");
  cmd->add_option("--basis", basis, "total-degree | tensor-product | hyperbolic-cross");
  cmd->add_option("--hidden", cfg.hidden_widths, "hidden layer widths");
  cmd->add_option("--activation", act, "tanh | relu | repu");
  cmd->add_option("--repu-power", cfg.activation.repu_power, "RePU exponent (>= 2)");
  cmd->add_option("--constraint", constraint, "none | l1 | ca..ch");
  cmd->add_option("--lambda-r", cfg.loss.lambda_r, "L1 strength");
  cmd->add_option("--lambda-c", cfg.loss.lambda_c, "orthogonality strength");
  cmd->add_option("--lambda-pde", cfg.loss.lambda_pde, "PDE residual weight");
  cmd->add_flag("--precondition,!--no-precondition", cfg.loss.preconditioned,
                "diagonal preconditioning");
  cmd->add_option("--truncation-threshold", cfg.loss.truncation_threshold,
                  "coefficient truncation threshold t");
  cmd->add_option("--l1-scope", l1_scope, "all | coefficients");
  cmd->add_option("--adam-iterations", cfg.adam.iterations, "Adam iteration budget");
  cmd->add_option("--adam-lr", cfg.adam.lr0, "Adam initial learning rate");
  cmd->add_flag("--cosine-annealing,!--no-cosine-annealing", cfg.adam.cosine_annealing,
                "cosine learning-rate annealing");
  cmd->add_option("--lbfgs-iterations", cfg.lbfgs.iterations, "L-BFGS iteration budget");
  cmd->add_option("--lbfgs-lr", cfg.lbfgs.lr0, "L-BFGS initial step");
  cmd->add_option("--lbfgs-history", cfg.lbfgs.history_size, "L-BFGS history size");
  cmd->add_option("--seed", cfg.seed, "base RNG seed");
  cmd->add_option("--trials", cfg.trials, "number of random trials");
  cmd->add_option("-o,--out", cfg.out_path, "CSV report path");
  cmd->add_option("--save-model", cfg.model_out, "checkpoint path for the trained model");
  cmd->add_option("--csv", cfg.csv_path, "input dataset path (csv-regression)");
  cmd->add_option("--target-column", cfg.target_column, "dataset target column name");
  cmd->add_option("--kfolds", cfg.kfolds, "cross-validation fold count");
  cmd->add_option("--boundary-points", cfg.boundary_points, "boundary point count (pde)");
  cmd->add_flag("--random-boundary", "place boundary points randomly on the perimeter");
  cmd->add_flag("--record-timing,!--no-record-timing", cfg.record_timing,
                "write wall-clock seconds into reports (disable for byte-stable output)");
  cmd->add_flag("-v,--verbose", cfg.verbose, "per-trial progress on stderr");
  cmd->set_config("--config", "", "key=value config file mirroring these flags");
}

void apply_string_options(ExperimentConfig& cfg, const std::string& experiment,
                          const std::string& sampling, const std::string& basis,
                          const std::string& act, const std::string& constraint,
                          const std::string& l1_scope, CLI::App* cmd) {
  ExperimentConfig defaults = defaults_for(experiment_from_string(experiment));
  // Fields the user did not touch fall back to the experiment's defaults.
  auto untouched = [&](const std::string& flag) { return cmd->count(flag) == 0; };
  if (untouched("--sampling")) cfg.sampling = defaults.sampling;
  else cfg.sampling = sampling_from_string(sampling);
  if (untouched("--basis")) cfg.basis = defaults.basis;
  else cfg.basis = basis_kind_from_string(basis);
  if (untouched("--activation")) cfg.activation.kind = defaults.activation.kind;
  else cfg.activation.kind = activation_from_string(act);
  if (untouched("--constraint")) cfg.loss.constraint = defaults.loss.constraint;
  else cfg.loss.constraint = constraint_from_string(constraint);
  if (untouched("--schedule-c")) cfg.schedule_c = defaults.schedule_c;
  if (untouched("--schedule-doubled") && untouched("--schedule-undoubled"))
    cfg.schedule_doubled = defaults.schedule_doubled;
  if (untouched("--ell")) cfg.ell_override = defaults.ell_override;
  if (untouched("--n-points")) cfg.n_points = defaults.n_points;
  if (untouched("--dim")) cfg.dim = defaults.dim;
  if (untouched("--trials")) cfg.trials = defaults.trials;
  cfg.kind = defaults.kind;
  if (l1_scope == "coefficients") cfg.loss.l1_scope = L1Scope::CoefficientsOnly;
  else if (l1_scope == "all") cfg.loss.l1_scope = L1Scope::All;
  else throw ConfigError("unknown l1 scope: " + l1_scope);
  if (cmd->count("--random-boundary") > 0)
    cfg.boundary_placement = BoundaryPlacement::Random;
}

int report_outcome(const std::vector<ReportRow>& rows) {
  bool any_ok = false;
  bool any_trial = false;
  for (const auto& r : rows) {
    if (r.trial == "mean" || r.trial == "std") continue;
    any_trial = true;
    if (!r.diverged) any_ok = true;
  }
  if (any_trial && !any_ok) {
    std::cerr << "[pann] every trial diverged\n";
    return 3;
  }
  for (const auto& r : rows)
    if (r.trial == "mean")
      std::cout << "mean rel_l2 " << r.rel_l2 << " (" << r.experiment << ", m=" << r.m
                << ", ell=" << r.ell << ")\n";
  return 0;
}

bool check(const char* name, bool ok) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
  return ok;
}

int run_self_checks() {
  bool all = true;

  {
    const MultiIndexSet td = enumerate_indices({BasisKind::TotalDegree, 2, 8});
    const MultiIndexSet hc = enumerate_indices({BasisKind::HyperbolicCross, 2, 8});
    const MultiIndexSet tp = enumerate_indices({BasisKind::TensorProduct, 3, 8});
    all &= check("basis cardinalities (TD 45, HC 23, TP 729)",
                 td.size() == 45 && hc.size() == 23 && tp.size() == 729);
  }
  {
    double max_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double z = -1.0 + 2.0 * i / 999.0;
      const double p10 = legendre_values_1d(10, z)[10];
      const double closed =
          (46189.0 * std::pow(z, 10) - 109395.0 * std::pow(z, 8) + 90090.0 * std::pow(z, 6) -
           30030.0 * std::pow(z, 4) + 3465.0 * z * z - 63.0) /
          256.0;
      max_err = std::max(max_err, std::abs(p10 - closed));
    }
    all &= check("Legendre recurrence matches the explicit P_10 form (1e-12)", max_err < 1e-12);
  }
  {
    bool ok = true;
    for (double z : {-0.7, -0.2, 0.3, 0.9}) {
      const double h = 1e-5;
      const LegendreDerivs c = legendre_derivs_1d(10, z);
      const Vector up = legendre_values_1d(10, z + h);
      const Vector dn = legendre_values_1d(10, z - h);
      for (int d = 1; d <= 10; ++d) {
        const double fd = (up[d] - dn[d]) / (2.0 * h);
        ok &= std::abs(fd - c.first[d]) <= 1e-6 * std::max(1.0, std::abs(c.first[d]));
      }
    }
    all &= check("derivative recurrences match finite differences (1e-6)", ok);
  }
  {
    const QuadratureRule rule = gauss_legendre_rule(16, 1);
    double worst = 0.0;
    for (int a = 0; a <= 10; ++a)
      for (int b = 0; b <= 10; ++b) {
        double integral = 0.0;
        for (Eigen::Index q = 0; q < rule.nodes.rows(); ++q) {
          const Vector p = legendre_values_1d(10, rule.nodes(q, 0));
          integral += rule.weights[q] * p[a] * p[b];
        }
        const double expect = a == b ? 2.0 / (2 * a + 1) : 0.0;
        worst = std::max(worst, std::abs(integral - expect));
      }
    all &= check("Gauss-Legendre orthogonality integrals (1e-12)", worst < 1e-12);
  }
  {
    const MultiIndexSet basis = enumerate_indices({BasisKind::TotalDegree, 2, 12});
    const Matrix pts = sample_points(500, 2, SamplingMode::UniformRandom, 11);
    DesignBundle bundle = assemble_design(basis, pts, false);
    compute_preconditioner(bundle, basis);
    const double m = static_cast<double>(basis.size());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double s = bundle.precond[i] * bundle.precond[i] *
                       bundle.phi.row(i).squaredNorm();
      worst = std::max(worst, std::abs(s - m));
    }
    all &= check("preconditioner identity K^2 sum(phi^2) = m (1e-10)", worst < 1e-10);
  }
  {
    const PdeProblem poisson = manufactured_poisson();
    const PdeProblem ac = manufactured_allen_cahn();
    Rng rng(5);
    double worst_p = 0.0, worst_ac = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = rng.uniform(-1.0, 1.0);
      const double y = rng.uniform(-1.0, 1.0);
      worst_p = std::max(worst_p,
                         std::abs(poisson.exact_laplacian(x, y) - poisson.forcing(x, y)));
      const double u = ac.exact_solution(x, y);
      worst_ac = std::max(worst_ac, std::abs(ac.exact_laplacian(x, y) + u * (u * u - 1.0) -
                                             ac.forcing(x, y)));
    }
    all &= check("manufactured solutions satisfy their operators (1e-10)",
                 worst_p < 1e-10 && worst_ac < 1e-10);
  }

  std::cout << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial-augmented neural network experiments"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string experiment = "legendre-recovery";
  std::string sampling = "uniform-random";
  std::string basis = "total-degree";
  std::string act = "tanh";
  std::string constraint = "ce";
  std::string l1_scope = "all";

  CLI::App* regress = app.add_subcommand("regress", "regression experiments");
  add_experiment_options(regress, cfg, experiment, sampling, basis, act, constraint, l1_scope);

  CLI::App* pde = app.add_subcommand("pde", "physics-informed experiments");
  std::string pde_problem = "poisson";
  pde->add_option("--problem", pde_problem, "poisson | allen-cahn");
  add_experiment_options(pde, cfg, experiment, sampling, basis, act, constraint, l1_scope);

  CLI::App* basis_info = app.add_subcommand("basis-info", "degree schedule tables");
  basis_info->add_option("--schedule-offset", cfg.schedule_offset, "degree schedule offset");

  app.add_subcommand("check", "run the fast invariant suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("check")) return run_self_checks();
    if (app.got_subcommand("basis-info")) {
      cfg.kind = ExperimentKind::BasisInfo;
      run_experiment(cfg);
      return 0;
    }
    if (app.got_subcommand("regress")) {
      const ExperimentKind kind = experiment_from_string(experiment);
      if (kind != ExperimentKind::LegendreRecovery && kind != ExperimentKind::NonSmooth &&
          kind != ExperimentKind::HighDim && kind != ExperimentKind::CsvRegression)
        throw ConfigError("regress expects a regression experiment kind");
      apply_string_options(cfg, experiment, sampling, basis, act, constraint, l1_scope,
                           regress);
      return report_outcome(run_experiment(cfg));
    }
    if (app.got_subcommand("pde")) {
      experiment = pde_problem == "poisson" ? "pde-poisson"
                   : pde_problem == "allen-cahn" ? "pde-allencahn"
                                                 : throw ConfigError("unknown pde problem: " +
                                                                     pde_problem);
      apply_string_options(cfg, experiment, sampling, basis, act, constraint, l1_scope, pde);
      return report_outcome(run_experiment(cfg));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
