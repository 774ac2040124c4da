#include "pann/network.hpp"

#include <cmath>

namespace pann {

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::RePU: return "repu";
  }
  return "?";
}

ActivationKind activation_from_string(std::string_view name) {
  if (name == "tanh") return ActivationKind::Tanh;
  if (name == "relu") return ActivationKind::ReLU;
  if (name == "repu") return ActivationKind::RePU;
  throw ConfigError("unknown activation: " + std::string(name));
}

void Activation::validate() const {
  if (kind == ActivationKind::RePU && repu_power < 2)
    throw ConfigError("RePU power must be >= 2");
}

void MlpConfig::validate() const {
  if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
  for (int w : hidden_widths)
    if (w < 1) throw ConfigError("hidden widths must be >= 1");
  activation.validate();
}

Vector MlpParams::masked_coeffs() const {
  Vector a = coeffs;
  for (Eigen::Index j = 0; j < a.size(); ++j)
    if (!coeff_mask[static_cast<size_t>(j)]) a[j] = 0.0;
  return a;
}

MlpParams init_params(const MlpConfig& config, std::uint64_t seed) {
  config.validate();
  MlpParams p;
  Rng rng(seed);
  int fan_in = config.input_dim;
  for (int width : config.hidden_widths) {
    const double limit = std::sqrt(6.0 / (fan_in + width));
    Matrix w(width, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Vector::Zero(width));
    fan_in = width;
  }
  const int w = config.feature_width();
  const double limit = w > 0 ? std::sqrt(6.0 / (w + 1)) : 0.0;
  p.coeffs.resize(w);
  for (Eigen::Index j = 0; j < w; ++j) p.coeffs[j] = rng.uniform(-limit, limit);
  p.coeff_mask.assign(static_cast<size_t>(w), true);
  return p;
}

namespace {

// Elementwise activation value and first three derivatives. The third
// derivative feeds the reverse pass through the Laplacian channels.
struct ActTables {
  Matrix s0, s1, s2, s3;
};

ActTables act_tables(const Activation& act, const Matrix& z, bool with_laplacian,
                     bool with_third) {
  ActTables t;
  switch (act.kind) {
    case ActivationKind::Tanh: {
      t.s0 = z.array().tanh().matrix();
      Eigen::ArrayXXd th = t.s0.array();
      Eigen::ArrayXXd sech2 = 1.0 - th.square();
      t.s1 = sech2.matrix();
      if (with_laplacian) t.s2 = (-2.0 * th * sech2).matrix();
      if (with_third) t.s3 = (sech2 * (6.0 * th.square() - 2.0)).matrix();
      break;
    }
    case ActivationKind::ReLU: {
      Eigen::ArrayXXd pos = (z.array() > 0.0).cast<double>();
      t.s0 = (z.array() * pos).matrix();
      t.s1 = pos.matrix();
      // Second derivative taken as zero everywhere; the kink has measure zero.
      if (with_laplacian) t.s2 = Matrix::Zero(z.rows(), z.cols());
      if (with_third) t.s3 = Matrix::Zero(z.rows(), z.cols());
      break;
    }
    case ActivationKind::RePU: {
      const int p = act.repu_power;
      Eigen::ArrayXXd zp = z.array().max(0.0);
      Eigen::ArrayXXd pos = (z.array() > 0.0).cast<double>();
      t.s0 = zp.pow(p).matrix();
      t.s1 = (p * zp.pow(p - 1)).matrix();
      if (with_laplacian)
        t.s2 = (p == 2 ? (2.0 * pos).eval() : (p * (p - 1) * zp.pow(p - 2)).eval()).matrix();
      if (with_third) {
        if (p == 2)
          t.s3 = Matrix::Zero(z.rows(), z.cols());
        else if (p == 3)
          t.s3 = (6.0 * pos).matrix();
        else
          t.s3 = (p * (p - 1) * (p - 2) * zp.pow(p - 3)).matrix();
      }
      break;
    }
  }
  return t;
}

}  // namespace

FeatureEval forward_features(const MlpConfig& config, const MlpParams& params,
                             const Matrix& points, bool need_laplacian,
                             ForwardCache* cache) {
  config.validate();
  if (points.cols() != config.input_dim)
    throw ConfigError("points have dimension " + std::to_string(points.cols()) +
                      ", network expects " + std::to_string(config.input_dim));
  if (params.weights.size() != config.hidden_widths.size())
    throw InternalError("parameter record does not match network config");

  const Eigen::Index n = points.rows();
  const int d = config.input_dim;
  const size_t num_layers = config.hidden_widths.size();

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c = ForwardCache{};
  c.with_laplacian = need_laplacian;
  c.input = points;

  Matrix h = points;
  std::vector<Matrix> dh, sh;
  if (need_laplacian) {
    dh.assign(static_cast<size_t>(d), Matrix::Zero(n, d));
    sh.assign(static_cast<size_t>(d), Matrix::Zero(n, d));
    for (int j = 0; j < d; ++j) dh[static_cast<size_t>(j)].col(j).setOnes();
  }
  c.acts.push_back(h);

  for (size_t l = 0; l < num_layers; ++l) {
    const Matrix& w = params.weights[l];
    const Vector& b = params.biases[l];
    Matrix z = (h * w.transpose()).rowwise() + b.transpose();
    c.preacts.push_back(z);

    std::vector<Matrix> dz, sz;
    if (need_laplacian) {
      dz.reserve(static_cast<size_t>(d));
      sz.reserve(static_cast<size_t>(d));
      for (int j = 0; j < d; ++j) {
        dz.push_back(dh[static_cast<size_t>(j)] * w.transpose());
        sz.push_back(sh[static_cast<size_t>(j)] * w.transpose());
      }
      c.dpre.push_back(dz);
      c.spre.push_back(sz);
    }

    ActTables t = act_tables(config.activation, z, need_laplacian, false);
    h = t.s0;
    if (need_laplacian) {
      for (int j = 0; j < d; ++j) {
        const size_t js = static_cast<size_t>(j);
        sh[js] = (t.s2.array() * dz[js].array().square() + t.s1.array() * sz[js].array()).matrix();
        dh[js] = (t.s1.array() * dz[js].array()).matrix();
      }
    }
    c.acts.push_back(h);
  }

  FeatureEval eval;
  if (num_layers == 0) {
    // Degenerate zero-width network: no features, identically zero output.
    eval.features = Matrix(n, 0);
    eval.nn_values = Vector::Zero(n);
    if (need_laplacian) {
      eval.feature_gradients.assign(static_cast<size_t>(d), Matrix(n, 0));
      eval.feature_laplacians = Matrix(n, 0);
    }
    return eval;
  }
  eval.features = h;
  eval.nn_values = h * params.masked_coeffs();
  if (need_laplacian) {
    eval.feature_gradients = dh;
    eval.feature_laplacians = Matrix::Zero(n, h.cols());
    for (int j = 0; j < d; ++j) eval.feature_laplacians += sh[static_cast<size_t>(j)];
  }
  return eval;
}

void MlpGrad::setZero(const MlpConfig& config) {
  weights.clear();
  biases.clear();
  int fan_in = config.input_dim;
  for (int width : config.hidden_widths) {
    weights.push_back(Matrix::Zero(width, fan_in));
    biases.push_back(Vector::Zero(width));
    fan_in = width;
  }
  coeffs = Vector::Zero(config.feature_width());
}

void MlpGrad::accumulate(const MlpGrad& other) {
  for (size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  coeffs += other.coeffs;
}

void MlpGrad::scale(double s) {
  for (size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= s;
    biases[l] *= s;
  }
  coeffs *= s;
}

MlpGrad backward_features(const MlpConfig& config, const MlpParams& params,
                          const ForwardCache& cache, const Matrix& g_features,
                          const Matrix& g_feature_laplacians) {
  MlpGrad grad;
  grad.setZero(config);

  const size_t num_layers = config.hidden_widths.size();
  if (num_layers == 0) return grad;
  const int d = config.input_dim;
  const Eigen::Index n = cache.input.rows();
  const bool lap_path = g_feature_laplacians.size() > 0;
  if (lap_path && !cache.with_laplacian)
    throw InternalError("Laplacian upstream given but forward cache has no derivative channels");

  Matrix gh = g_features;  // dL/dH_l
  std::vector<Matrix> gdh, gsh;  // dL/dD_l^(j), dL/dS_l^(j)
  if (lap_path) {
    // Feature Laplacian is the sum of the per-dimension S channels.
    gdh.assign(static_cast<size_t>(d), Matrix::Zero(n, g_features.cols()));
    gsh.assign(static_cast<size_t>(d), g_feature_laplacians);
  }

  for (size_t l = num_layers; l-- > 0;) {
    const Matrix& z = cache.preacts[l];
    const Matrix& h_prev = cache.acts[l];
    const Matrix& w = params.weights[l];

    ActTables t = act_tables(config.activation, z, cache.with_laplacian, lap_path);

    // Through the activation: H = s0(Z), D^j = s1 .* dz^j,
    // S^j = s2 .* (dz^j)^2 + s1 .* sz^j.
    Matrix gz = (gh.array() * t.s1.array()).matrix();
    std::vector<Matrix> gdz, gsz;
    if (lap_path) {
      gdz.reserve(static_cast<size_t>(d));
      gsz.reserve(static_cast<size_t>(d));
      for (int j = 0; j < d; ++j) {
        const size_t js = static_cast<size_t>(j);
        const Matrix& dz = cache.dpre[l][js];
        const Matrix& sz = cache.spre[l][js];
        gz += (gdh[js].array() * dz.array() * t.s2.array()).matrix();
        gz += (gsh[js].array() *
               (dz.array().square() * t.s3.array() + sz.array() * t.s2.array()))
                  .matrix();
        gdz.push_back((gdh[js].array() * t.s1.array() +
                       gsh[js].array() * 2.0 * dz.array() * t.s2.array())
                          .matrix());
        gsz.push_back((gsh[js].array() * t.s1.array()).matrix());
      }
    }

    // Through the affine map: Z = H_prev W^T + b, dz^j = D_prev^j W^T,
    // sz^j = S_prev^j W^T. The derivative channels carry no bias term.
    grad.weights[l] += gz.transpose() * h_prev;
    grad.biases[l] += gz.colwise().sum().transpose();
    gh = gz * w;

    if (lap_path) {
      if (l > 0) {
        const Matrix& z_prev = cache.preacts[l - 1];
        ActTables tp = act_tables(config.activation, z_prev, true, false);
        for (int j = 0; j < d; ++j) {
          const size_t js = static_cast<size_t>(j);
          const Matrix& dz_prev = cache.dpre[l - 1][js];
          const Matrix& sz_prev = cache.spre[l - 1][js];
          Matrix d_prev = (tp.s1.array() * dz_prev.array()).matrix();
          Matrix s_prev = (tp.s2.array() * dz_prev.array().square() +
                           tp.s1.array() * sz_prev.array())
                              .matrix();
          grad.weights[l] += gdz[js].transpose() * d_prev + gsz[js].transpose() * s_prev;
          gdh[js] = gdz[js] * w;
          gsh[js] = gsz[js] * w;
        }
      } else {
        // Input layer: D_0^j is the constant indicator of column j and
        // S_0^j is zero, so only the D path contributes to the weights.
        for (int j = 0; j < d; ++j) {
          const size_t js = static_cast<size_t>(j);
          grad.weights[0].col(j) += gdz[js].colwise().sum().transpose();
        }
      }
    }
  }
  return grad;
}

MlpGrad backward_params(const MlpConfig& config, const MlpParams& params,
                        const ForwardCache& cache, const FeatureEval& eval,
                        const Vector& g_values, const Vector& g_laplacians) {
  const Vector a = params.masked_coeffs();
  const bool lap_path = g_laplacians.size() > 0;
  if (g_values.size() != eval.features.rows())
    throw InternalError("upstream size does not match evaluation");

  Matrix g_feat = g_values * a.transpose();
  Matrix g_lapfeat;
  if (lap_path) g_lapfeat = g_laplacians * a.transpose();

  MlpGrad grad = backward_features(config, params, cache, g_feat, g_lapfeat);
  grad.coeffs = eval.features.transpose() * g_values;
  if (lap_path) grad.coeffs += eval.feature_laplacians.transpose() * g_laplacians;
  for (Eigen::Index j = 0; j < grad.coeffs.size(); ++j)
    if (!params.coeff_mask[static_cast<size_t>(j)]) grad.coeffs[j] = 0.0;
  return grad;
}

}  // namespace pann
