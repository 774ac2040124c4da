#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pann/common.hpp"

namespace pann {

/// Per-dimension polynomial degrees of one product basis function.
using MultiIndex = std::vector<int>;

enum class BasisKind { TensorProduct, TotalDegree, HyperbolicCross };

std::string_view to_string(BasisKind kind);
BasisKind basis_kind_from_string(std::string_view name);

struct BasisSpec {
  BasisKind kind = BasisKind::TotalDegree;
  int dim = 1;     // problem dimension d
  int degree = 0;  // degree budget l

  void validate() const;
};

/// An ordered multi-index set with an activity mask. Ordering is graded
/// lexicographic (by total degree, ties broken lexicographically) so that
/// truncation reports are reproducible.
struct MultiIndexSet {
  BasisSpec spec;
  std::vector<MultiIndex> indices;
  std::vector<bool> active;

  Eigen::Index size() const { return static_cast<Eigen::Index>(indices.size()); }
  Eigen::Index active_count() const;
  int max_degree_in_dim(int dim) const;
};

/// Enumerate the multi-index set of a basis spec.
///
/// Membership rules:
///   TensorProduct:   max_j k_j <= l
///   TotalDegree:     sum_j k_j <= l
///   HyperbolicCross: prod_j (k_j + 1) <= l + 1
MultiIndexSet enumerate_indices(const BasisSpec& spec);

/// P_0(z) .. P_max(z) by the three-term recurrence
/// (n+1) P_{n+1} = (2n+1) z P_n - n P_{n-1}.
Vector legendre_values_1d(int max_degree, double z);

struct LegendreDerivs {
  Vector value;
  Vector first;
  Vector second;
};

/// Values plus first and second derivatives, using the derivative
/// recurrences P'_{n+1} = P'_{n-1} + (2n+1) P_n and
/// P''_{n+1} = P''_{n-1} + (2n+1) P'_n.
LegendreDerivs legendre_derivs_1d(int max_degree, double z);

/// Precomputed basis evaluations at a point set. Rows are points, columns
/// are basis functions in the index-set order. dphi and lap_phi are filled
/// only when derivatives were requested; precond only after
/// compute_preconditioner.
struct DesignBundle {
  Matrix phi;                // n x m values
  std::vector<Matrix> dphi;  // d matrices, n x m first partials
  Matrix lap_phi;            // n x m Laplacians
  Vector precond;            // n diagonal entries K(x_i)

  bool has_laplacian() const { return lap_phi.size() > 0; }
  bool has_precond() const { return precond.size() > 0; }
};

/// Evaluate every basis function (active or not) at every point.
/// Points outside [-1,1]^d are allowed but logged once per call.
DesignBundle assemble_design(const MultiIndexSet& basis, const Matrix& points,
                             bool with_laplacian);

/// Fill bundle.precond with K(x_i) = sqrt(m / sum_k phi_ik^2), where the sum
/// and m range over active columns only.
void compute_preconditioner(DesignBundle& bundle, const MultiIndexSet& basis);

/// Degree budget as a function of the training-set size:
/// l = ceil(c*N) + offset, doubled when requested.
int degree_schedule(int n_points, double c, int offset, bool doubled);

/// Exact binomial coefficient, used for cardinality checks.
std::int64_t binomial(int n, int k);

}  // namespace pann
