#include "pann/pde.hpp"

#include <cmath>
#include <numbers>

namespace pann {

std::string_view to_string(PdeKind kind) {
  switch (kind) {
    case PdeKind::Poisson: return "poisson";
    case PdeKind::AllenCahn: return "allen-cahn";
  }
  return "?";
}

PdeProblem manufactured_poisson() {
  PdeProblem p;
  p.kind = PdeKind::Poisson;
  p.exact_solution = [](double x, double y) {
    return legendre_values_1d(10, x)[10] * legendre_values_1d(10, y)[10];
  };
  p.exact_laplacian = [](double x, double y) {
    const LegendreDerivs lx = legendre_derivs_1d(10, x);
    const LegendreDerivs ly = legendre_derivs_1d(10, y);
    return lx.second[10] * ly.value[10] + lx.value[10] * ly.second[10];
  };
  p.forcing = p.exact_laplacian;
  p.boundary = p.exact_solution;
  return p;
}

PdeProblem manufactured_allen_cahn() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto u = [](double x, double y) {
    return x * x * x * y * y * y + 5.0 * x * std::cos(two_pi * x) * std::cos(two_pi * y);
  };
  auto lap_u = [](double x, double y) {
    const double cx = std::cos(two_pi * x);
    const double sx = std::sin(two_pi * x);
    const double cy = std::cos(two_pi * y);
    // d2/dx2 [x cos(2 pi x)] = -4 pi sin(2 pi x) - 4 pi^2 x cos(2 pi x);
    // the y second derivative contributes another -4 pi^2 x cos cos term.
    return 6.0 * x * y * y * y + 6.0 * x * x * x * y +
           5.0 * cy * (-2.0 * two_pi * sx - two_pi * two_pi * x * cx) +
           5.0 * x * cx * (-two_pi * two_pi * cy);
  };
  PdeProblem p;
  p.kind = PdeKind::AllenCahn;
  p.exact_solution = u;
  p.exact_laplacian = lap_u;
  p.forcing = [u, lap_u](double x, double y) {
    const double v = u(x, y);
    return lap_u(x, y) + v * (v * v - 1.0);
  };
  p.boundary = u;
  return p;
}

namespace {

// 1D Gauss-Legendre nodes and weights by Newton iteration on P_n.
void gauss_legendre_1d(int n, Vector& nodes, Vector& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const LegendreDerivs l = legendre_derivs_1d(n, x);
      dp = l.first[n];
      const double step = l.value[n] / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const LegendreDerivs l = legendre_derivs_1d(n, x);
    dp = l.first[n];
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Exploit symmetry so paired nodes are exact negatives.
    nodes[i] = -x;
    weights[i] = w;
    nodes[n - 1 - i] = x;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

}  // namespace

QuadratureRule gauss_legendre_rule(int points_per_dim, int dim) {
  if (points_per_dim < 1) throw ConfigError("quadrature needs at least one point per dim");
  if (dim < 1) throw ConfigError("quadrature dimension must be >= 1");
  Vector n1, w1;
  gauss_legendre_1d(points_per_dim, n1, w1);

  const Eigen::Index total = static_cast<Eigen::Index>(
      std::pow(static_cast<double>(points_per_dim), dim) + 0.5);
  QuadratureRule rule;
  rule.nodes.resize(total, dim);
  rule.weights.resize(total);
  std::vector<int> digit(static_cast<size_t>(dim), 0);
  for (Eigen::Index q = 0; q < total; ++q) {
    double w = 1.0;
    for (int j = 0; j < dim; ++j) {
      rule.nodes(q, j) = n1[digit[static_cast<size_t>(j)]];
      w *= w1[digit[static_cast<size_t>(j)]];
    }
    rule.weights[q] = w;
    for (int j = dim - 1; j >= 0; --j) {
      if (++digit[static_cast<size_t>(j)] < points_per_dim) break;
      digit[static_cast<size_t>(j)] = 0;
    }
  }
  return rule;
}

Matrix test_grid(int dim) {
  if (dim == 1) {
    constexpr int n = 1000;
    Matrix pts(n, 1);
    for (int i = 0; i < n; ++i) pts(i, 0) = -1.0 + 2.0 * i / (n - 1);
    return pts;
  }
  if (dim == 2) {
    constexpr int g = 256;
    Matrix pts(g * g, 2);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        pts(i * g + j, 0) = -1.0 + 2.0 * i / (g - 1);
        pts(i * g + j, 1) = -1.0 + 2.0 * j / (g - 1);
      }
    return pts;
  }
  constexpr int n = 20000;
  Matrix pts(n, dim);
  Rng rng(0x7e57u);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) pts(i, j) = rng.uniform(-1.0, 1.0);
  return pts;
}

ProjectionResult l2_projection(const std::function<double(const Vector&)>& target,
                               const MultiIndexSet& basis, const QuadratureRule& rule,
                               bool preconditioned) {
  if (rule.nodes.cols() != basis.spec.dim)
    throw ConfigError("quadrature dimension does not match basis");

  DesignBundle bundle = assemble_design(basis, rule.nodes, false);
  Vector f(rule.nodes.rows());
  for (Eigen::Index q = 0; q < rule.nodes.rows(); ++q)
    f[q] = target(rule.nodes.row(q).transpose());

  Vector row_scale = rule.weights.array().sqrt();
  if (preconditioned) {
    compute_preconditioner(bundle, basis);
    row_scale = row_scale.array() * bundle.precond.array();
  }

  Matrix a = row_scale.asDiagonal() * bundle.phi;
  Vector rhs = row_scale.asDiagonal() * f;

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  ProjectionResult result;
  result.rank_deficient = qr.rank() < bundle.phi.cols();
  result.coeffs = qr.solve(rhs);

  const Matrix grid = test_grid(basis.spec.dim);
  Vector truth(grid.rows());
  for (Eigen::Index i = 0; i < grid.rows(); ++i) truth[i] = target(grid.row(i).transpose());
  const DesignBundle eval = assemble_design(basis, grid, false);
  const Vector pred = eval.phi * result.coeffs;
  result.rel_l2 = (truth - pred).norm() / truth.norm();
  return result;
}

}  // namespace pann
