#pragma once

#include <functional>

#include "pann/common.hpp"
#include "pann/polybasis.hpp"

namespace pann {

enum class PdeKind { Poisson, AllenCahn };

std::string_view to_string(PdeKind kind);

/// A PDE on [-1,1]^2 with a manufactured exact solution. The forcing and
/// boundary data are derived from the exact solution so that errors can be
/// measured against ground truth:
///   Poisson:    lap u = f,                u = g on the boundary
///   Allen-Cahn: lap u + u (u^2 - 1) = f,  u = g on the boundary
struct PdeProblem {
  PdeKind kind = PdeKind::Poisson;
  std::function<double(double, double)> exact_solution;
  std::function<double(double, double)> exact_laplacian;
  std::function<double(double, double)> forcing;
  std::function<double(double, double)> boundary;
};

/// Exact solution P_10(x) P_10(y).
PdeProblem manufactured_poisson();

/// Exact solution x^3 y^3 + 5 x cos(2 pi x) cos(2 pi y).
PdeProblem manufactured_allen_cahn();

struct QuadratureRule {
  Matrix nodes;    // n x d
  Vector weights;  // length n, sums to 2^d
};

/// Tensorized Gauss-Legendre rule; 1D nodes found by Newton iteration on the
/// Legendre recurrences, exact for 1D polynomials of degree <= 2n-1.
QuadratureRule gauss_legendre_rule(int points_per_dim, int dim);

struct ProjectionResult {
  Vector coeffs;
  double rel_l2 = 0.0;   // relative error on the module's test grid
  bool rank_deficient = false;
};

/// Quadrature-weighted least-squares projection of a target onto the basis
/// span, optionally with the diagonal preconditioner applied to the rows.
ProjectionResult l2_projection(const std::function<double(const Vector&)>& target,
                               const MultiIndexSet& basis, const QuadratureRule& rule,
                               bool preconditioned);

/// Evaluation grid used for reported test errors: equispaced 256^2 for d = 2,
/// equispaced 1000 points for d = 1, and 20000 seeded uniform points for
/// d >= 3.
Matrix test_grid(int dim);

}  // namespace pann
