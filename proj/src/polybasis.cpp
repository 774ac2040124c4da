#include "pann/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace pann {

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::TensorProduct: return "tensor-product";
    case BasisKind::TotalDegree: return "total-degree";
    case BasisKind::HyperbolicCross: return "hyperbolic-cross";
  }
  return "?";
}

BasisKind basis_kind_from_string(std::string_view name) {
  if (name == "tensor-product" || name == "tp") return BasisKind::TensorProduct;
  if (name == "total-degree" || name == "td") return BasisKind::TotalDegree;
  if (name == "hyperbolic-cross" || name == "hc") return BasisKind::HyperbolicCross;
  throw ConfigError("unknown basis kind: " + std::string(name));
}

void BasisSpec::validate() const {
  if (dim < 1) throw ConfigError("basis dim must be >= 1");
  if (degree < 0) throw ConfigError("basis degree must be >= 0");
}

Eigen::Index MultiIndexSet::active_count() const {
  return static_cast<Eigen::Index>(std::count(active.begin(), active.end(), true));
}

int MultiIndexSet::max_degree_in_dim(int dim) const {
  int best = 0;
  for (const auto& idx : indices) best = std::max(best, idx[static_cast<size_t>(dim)]);
  return best;
}

namespace {

bool member(const BasisSpec& spec, const MultiIndex& idx) {
  switch (spec.kind) {
    case BasisKind::TensorProduct:
      return *std::max_element(idx.begin(), idx.end()) <= spec.degree;
    case BasisKind::TotalDegree:
      return std::accumulate(idx.begin(), idx.end(), 0) <= spec.degree;
    case BasisKind::HyperbolicCross: {
      std::int64_t prod = 1;
      for (int k : idx) {
        prod *= k + 1;
        if (prod > spec.degree + 1) return false;
      }
      return true;
    }
  }
  return false;
}

// Emit, in ascending lexicographic order, every tuple of `dim` non-negative
// integers summing to `total` that passes the membership filter.
void emit_fixed_total(const BasisSpec& spec, int dim, int total, MultiIndex& scratch,
                      std::vector<MultiIndex>& out) {
  const size_t pos = scratch.size();
  if (static_cast<int>(pos) == dim - 1) {
    scratch.push_back(total);
    if (member(spec, scratch)) out.push_back(scratch);
    scratch.pop_back();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    scratch.push_back(k);
    emit_fixed_total(spec, dim, total - k, scratch, out);
    scratch.pop_back();
  }
}

}  // namespace

MultiIndexSet enumerate_indices(const BasisSpec& spec) {
  spec.validate();
  MultiIndexSet set;
  set.spec = spec;

  // Graded part of the order: any member's total degree is bounded by l for
  // total-degree and hyperbolic-cross sets (prod(k_i+1) >= 1 + sum k_i), and
  // by d*l for tensor products.
  const int max_total =
      spec.kind == BasisKind::TensorProduct ? spec.dim * spec.degree : spec.degree;

  MultiIndex scratch;
  scratch.reserve(static_cast<size_t>(spec.dim));
  for (int total = 0; total <= max_total; ++total)
    emit_fixed_total(spec, spec.dim, total, scratch, set.indices);

  set.active.assign(set.indices.size(), true);
  return set;
}

Vector legendre_values_1d(int max_degree, double z) {
  if (max_degree < 0) throw ConfigError("max_degree must be >= 0");
  Vector p(max_degree + 1);
  p[0] = 1.0;
  if (max_degree >= 1) p[1] = z;
  for (int n = 1; n < max_degree; ++n)
    p[n + 1] = ((2 * n + 1) * z * p[n] - n * p[n - 1]) / (n + 1);
  return p;
}

LegendreDerivs legendre_derivs_1d(int max_degree, double z) {
  if (max_degree < 0) throw ConfigError("max_degree must be >= 0");
  LegendreDerivs out;
  out.value = legendre_values_1d(max_degree, z);
  out.first = Vector::Zero(max_degree + 1);
  out.second = Vector::Zero(max_degree + 1);
  if (max_degree >= 1) out.first[1] = 1.0;
  for (int n = 1; n < max_degree; ++n) {
    out.first[n + 1] = out.first[n - 1] + (2 * n + 1) * out.value[n];
    out.second[n + 1] = out.second[n - 1] + (2 * n + 1) * out.first[n];
  }
  return out;
}

DesignBundle assemble_design(const MultiIndexSet& basis, const Matrix& points,
                             bool with_laplacian) {
  const Eigen::Index n = points.rows();
  const Eigen::Index m = basis.size();
  const int d = basis.spec.dim;
  if (points.cols() != d)
    throw ConfigError("point dimension " + std::to_string(points.cols()) +
                      " does not match basis dimension " + std::to_string(d));
  if (m == 0) throw ConfigError("cannot assemble a design for an empty basis");

  if ((points.array().abs() > 1.0).any())
    std::cerr << "[pann] warning: evaluation points outside [-1,1]^d; "
                 "Legendre recurrences extrapolate\n";

  DesignBundle bundle;
  bundle.phi.resize(n, m);
  if (with_laplacian) {
    bundle.dphi.assign(static_cast<size_t>(d), Matrix(n, m));
    bundle.lap_phi.resize(n, m);
  }

  std::vector<int> max_deg(static_cast<size_t>(d), 0);
  for (int j = 0; j < d; ++j) max_deg[static_cast<size_t>(j)] = basis.max_degree_in_dim(j);

  // Per point: 1D tables per dimension, then products per multi-index.
  std::vector<LegendreDerivs> tab(static_cast<size_t>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      if (with_laplacian)
        tab[static_cast<size_t>(j)] = legendre_derivs_1d(max_deg[static_cast<size_t>(j)], points(i, j));
      else
        tab[static_cast<size_t>(j)].value =
            legendre_values_1d(max_deg[static_cast<size_t>(j)], points(i, j));
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      const MultiIndex& idx = basis.indices[static_cast<size_t>(k)];
      double prod = 1.0;
      for (int j = 0; j < d; ++j) prod *= tab[static_cast<size_t>(j)].value[idx[static_cast<size_t>(j)]];
      bundle.phi(i, k) = prod;
      if (!with_laplacian) continue;

      double lap = 0.0;
      for (int j = 0; j < d; ++j) {
        // Product over the other dimensions, with the dim-j factor replaced
        // by its first (resp. second) derivative.
        double rest = 1.0;
        for (int l = 0; l < d; ++l)
          if (l != j) rest *= tab[static_cast<size_t>(l)].value[idx[static_cast<size_t>(l)]];
        const int deg = idx[static_cast<size_t>(j)];
        bundle.dphi[static_cast<size_t>(j)](i, k) = tab[static_cast<size_t>(j)].first[deg] * rest;
        lap += tab[static_cast<size_t>(j)].second[deg] * rest;
      }
      bundle.lap_phi(i, k) = lap;
    }
  }
  return bundle;
}

void compute_preconditioner(DesignBundle& bundle, const MultiIndexSet& basis) {
  const Eigen::Index n = bundle.phi.rows();
  const Eigen::Index m = bundle.phi.cols();
  if (m != basis.size()) throw ConfigError("design bundle does not match basis cardinality");
  const double m_active = static_cast<double>(basis.active_count());
  if (m_active == 0) throw ConfigError("cannot precondition with no active basis functions");

  bundle.precond.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < m; ++k)
      if (basis.active[static_cast<size_t>(k)]) s += bundle.phi(i, k) * bundle.phi(i, k);
    if (!(s > 0.0))
      throw InternalError("zero basis energy at a point; constant basis function missing?");
    bundle.precond[i] = std::sqrt(m_active / s);
  }
}

int degree_schedule(int n_points, double c, int offset, bool doubled) {
  if (n_points < 1) throw ConfigError("degree_schedule requires N >= 1");
  if (!(c > 0.0)) throw ConfigError("degree_schedule requires c > 0");
  if (offset < 0) throw ConfigError("degree_schedule requires offset >= 0");
  const int base = static_cast<int>(std::ceil(c * n_points)) + offset;
  return doubled ? 2 * base : base;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace pann
