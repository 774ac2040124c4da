#pragma once

#include <string>
#include <string_view>

#include "pann/common.hpp"
#include "pann/network.hpp"
#include "pann/pde.hpp"
#include "pann/polybasis.hpp"

namespace pann {

/// The discrete orthogonality penalties. Each constraint is an array of
/// pointwise products between network and polynomial quantities; its
/// Frobenius norm is added to the loss with strength lambda_c.
enum class ConstraintKind { None, L1Only, CA, CB, CC, CD, CE, CF, CG, CH };

std::string_view to_string(ConstraintKind kind);
ConstraintKind constraint_from_string(std::string_view name);

enum class L1Scope { All, CoefficientsOnly };

struct LossConfig {
  double lambda_r = 1e-5;             // L1 strength
  double lambda_c = 1e-3;             // constraint strength
  double lambda_pde = 1.0;            // residual balance
  bool preconditioned = true;
  ConstraintKind constraint = ConstraintKind::None;
  double truncation_threshold = 1e-4;
  L1Scope l1_scope = L1Scope::All;

  void validate() const;
};

/// Network plus polynomial layer. Masked polynomial coefficients are exactly
/// zero and stay zero; the basis activity mask mirrors poly_mask.
struct PannModel {
  MlpConfig mlp_config;
  MlpParams mlp;
  MultiIndexSet basis;
  Vector poly_coeffs;           // b, length m
  std::vector<bool> poly_mask;

  Vector masked_poly_coeffs() const;
  Eigen::Index poly_size() const { return poly_coeffs.size(); }
};

/// Fresh model with Glorot-initialized network and zero polynomial
/// coefficients; all masks true.
PannModel make_model(const MlpConfig& mlp_config, MultiIndexSet basis, std::uint64_t seed);

struct TruncationReport {
  double pct_nn_truncated = 0.0;
  double pct_poly_truncated = 0.0;
  std::vector<MultiIndex> surviving_poly_indices;
};

/// Polynomial-layer prediction alone (the standalone PL path).
Vector poly_predict(const DesignBundle& bundle, const Vector& coeffs,
                    const std::vector<bool>& mask);

/// u(x_i) = Psi a + Phi b with masked coefficients.
Vector predict(const PannModel& model, const Matrix& points, const DesignBundle& bundle);

/// Full gradient record for one loss evaluation.
struct PannGradient {
  MlpGrad mlp;
  Vector poly;

  void setZero(const PannModel& model);
};

struct LossEval {
  double loss = 0.0;
  PannGradient grad;
};

/// Constraint value ||C||_F and its exact gradients. d_features is the
/// upstream signal for the hidden parameters (dL/dpsi_ij).
struct ConstraintEval {
  double value = 0.0;
  Vector d_coeffs_a;
  Vector d_coeffs_b;
  Matrix d_features;
};

ConstraintEval constraint_penalty(const PannModel& model, const Matrix& features,
                                  const DesignBundle& bundle, ConstraintKind kind);

/// Mean preconditioned squared error plus L1 and constraint terms:
///   mean_i [K_i (u(x_i) - y_i)]^2 + lambda_r ||theta||_1 + lambda_c ||C||_F.
LossEval regression_loss(const PannModel& model, const Matrix& points, const Vector& targets,
                         const DesignBundle& bundle, const LossConfig& cfg);

/// Physics-informed loss: boundary data term plus lambda_pde-weighted PDE
/// residual term plus the regularizers. Constraints are evaluated on the
/// union of boundary and collocation points. The collocation bundle must
/// carry Laplacians.
LossEval pde_loss(const PannModel& model, const Matrix& boundary_pts,
                  const Vector& boundary_vals, const Matrix& collocation_pts,
                  const Vector& f_vals, const DesignBundle& boundary_bundle,
                  const DesignBundle& collocation_bundle, PdeKind problem,
                  const LossConfig& cfg);

/// Mask every coefficient with |value| < t (strict) and zero it. Masks are
/// monotone: already-masked entries never return. The report carries the
/// cumulative truncation percentages.
TruncationReport truncate(PannModel& model, double threshold);

/// Flat optimization vector: hidden weights and biases in layer order, then
/// unmasked output coefficients, then unmasked polynomial coefficients.
Vector pack_params(const PannModel& model);
void unpack_params(PannModel& model, const Vector& x);
Vector pack_gradient(const PannModel& model, const PannGradient& grad);

/// Versioned JSON checkpoint with config, basis, coefficients, and masks.
void save_model(const PannModel& model, const std::string& path);
PannModel load_model(const std::string& path);

}  // namespace pann
