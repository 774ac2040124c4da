#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pann/common.hpp"

namespace pann {

enum class ActivationKind { Tanh, ReLU, RePU };

std::string_view to_string(ActivationKind kind);
ActivationKind activation_from_string(std::string_view name);

struct Activation {
  ActivationKind kind = ActivationKind::Tanh;
  int repu_power = 3;  // only meaningful for RePU; must be >= 2

  void validate() const;
};

struct MlpConfig {
  int input_dim = 1;
  std::vector<int> hidden_widths;  // empty => no network, feature width 0
  Activation activation;

  /// Feature count w (width of the last hidden layer).
  int feature_width() const { return hidden_widths.empty() ? 0 : hidden_widths.back(); }
  void validate() const;
};

/// Hidden-layer weights and biases plus the linear output coefficients a.
/// Masked coefficients are held at exactly zero.
struct MlpParams {
  std::vector<Matrix> weights;  // layer l: out x in
  std::vector<Vector> biases;
  Vector coeffs;                // a, length w
  std::vector<bool> coeff_mask;

  Vector masked_coeffs() const;
};

/// Deterministic Glorot-uniform initialization; biases start at zero and the
/// mask is all-true.
MlpParams init_params(const MlpConfig& config, std::uint64_t seed);

/// Everything the backward pass needs from a forward evaluation.
/// dpre/spre hold, per layer and per input dimension, the first and pure
/// second derivatives of the pre-activations with respect to that input
/// coordinate. Mixed partials never arise: layers are affine between
/// pointwise activations, so each coordinate's (value, d/dx_j, d^2/dx_j^2)
/// triple propagates independently.
struct ForwardCache {
  bool with_laplacian = false;
  Matrix input;                          // n x d
  std::vector<Matrix> preacts;           // Z_l, n x w_l
  std::vector<Matrix> acts;              // H_l, n x w_l (post-activation)
  std::vector<std::vector<Matrix>> dpre; // per layer, per input dim
  std::vector<std::vector<Matrix>> spre;
};

struct FeatureEval {
  Matrix features;                        // psi, n x w
  Vector nn_values;                       // N(x_i) = features * (a .* mask)
  std::vector<Matrix> feature_gradients;  // d matrices n x w, when requested
  Matrix feature_laplacians;              // n x w, when requested

  bool has_laplacian() const { return feature_laplacians.size() > 0; }
};

/// Forward pass through the hidden stack. With need_laplacian the per-feature
/// Laplacians are computed exactly by second-order forward propagation.
/// A cache for backward_* is filled when `cache` is non-null.
FeatureEval forward_features(const MlpConfig& config, const MlpParams& params,
                             const Matrix& points, bool need_laplacian,
                             ForwardCache* cache = nullptr);

/// Gradients with respect to hidden weights/biases and output coefficients.
struct MlpGrad {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Vector coeffs;

  void setZero(const MlpConfig& config);
  void accumulate(const MlpGrad& other);
  void scale(double s);
};

/// Reverse pass from feature-space upstream gradients: g_features = dL/dpsi
/// and (optionally, empty otherwise) g_feature_laplacians = dL/d(lap psi).
/// Returns hidden-parameter gradients; the coeffs slot is zero.
MlpGrad backward_features(const MlpConfig& config, const MlpParams& params,
                          const ForwardCache& cache, const Matrix& g_features,
                          const Matrix& g_feature_laplacians);

/// Reverse pass from upstream gradients on the network outputs: g_values =
/// dL/dN(x_i) and optionally g_laplacians = dL/d(lap N)(x_i). Includes the
/// output-coefficient gradient; masked coefficients receive exactly zero.
MlpGrad backward_params(const MlpConfig& config, const MlpParams& params,
                        const ForwardCache& cache, const FeatureEval& eval,
                        const Vector& g_values, const Vector& g_laplacians = Vector());

}  // namespace pann
