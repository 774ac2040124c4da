#include "pann/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace pann {

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::None: return "none";
    case ConstraintKind::L1Only: return "l1";
    case ConstraintKind::CA: return "ca";
    case ConstraintKind::CB: return "cb";
    case ConstraintKind::CC: return "cc";
    case ConstraintKind::CD: return "cd";
    case ConstraintKind::CE: return "ce";
    case ConstraintKind::CF: return "cf";
    case ConstraintKind::CG: return "cg";
    case ConstraintKind::CH: return "ch";
  }
  return "?";
}

ConstraintKind constraint_from_string(std::string_view name) {
  if (name == "none") return ConstraintKind::None;
  if (name == "l1") return ConstraintKind::L1Only;
  if (name == "ca") return ConstraintKind::CA;
  if (name == "cb") return ConstraintKind::CB;
  if (name == "cc") return ConstraintKind::CC;
  if (name == "cd") return ConstraintKind::CD;
  if (name == "ce") return ConstraintKind::CE;
  if (name == "cf") return ConstraintKind::CF;
  if (name == "cg") return ConstraintKind::CG;
  if (name == "ch") return ConstraintKind::CH;
  throw ConfigError("unknown constraint kind: " + std::string(name));
}

void LossConfig::validate() const {
  if (!(lambda_r >= 0.0) || !(lambda_c >= 0.0) || !(lambda_pde >= 0.0))
    throw ConfigError("loss multipliers must be finite and non-negative");
  if (!(truncation_threshold >= 0.0))
    throw ConfigError("truncation threshold must be >= 0");
}

Vector PannModel::masked_poly_coeffs() const {
  Vector b = poly_coeffs;
  for (Eigen::Index k = 0; k < b.size(); ++k)
    if (!poly_mask[static_cast<size_t>(k)]) b[k] = 0.0;
  return b;
}

PannModel make_model(const MlpConfig& mlp_config, MultiIndexSet basis, std::uint64_t seed) {
  PannModel model;
  model.mlp_config = mlp_config;
  model.mlp = init_params(mlp_config, seed);
  model.poly_coeffs = Vector::Zero(basis.size());
  model.poly_mask.assign(static_cast<size_t>(basis.size()), true);
  model.basis = std::move(basis);
  return model;
}

Vector poly_predict(const DesignBundle& bundle, const Vector& coeffs,
                    const std::vector<bool>& mask) {
  Vector b = coeffs;
  for (Eigen::Index k = 0; k < b.size(); ++k)
    if (!mask[static_cast<size_t>(k)]) b[k] = 0.0;
  return bundle.phi * b;
}

Vector predict(const PannModel& model, const Matrix& points, const DesignBundle& bundle) {
  if (bundle.phi.cols() != model.basis.size())
    throw ConfigError("design bundle does not match the model basis");
  const FeatureEval feat =
      forward_features(model.mlp_config, model.mlp, points, false, nullptr);
  return feat.nn_values + poly_predict(bundle, model.poly_coeffs, model.poly_mask);
}

void PannGradient::setZero(const PannModel& model) {
  mlp.setZero(model.mlp_config);
  poly = Vector::Zero(model.poly_size());
}

namespace {

Vector mask_to_vector(const std::vector<bool>& mask) {
  Vector v(static_cast<Eigen::Index>(mask.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = mask[static_cast<size_t>(i)] ? 1.0 : 0.0;
  return v;
}

void apply_mask(Vector& v, const std::vector<bool>& mask) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!mask[static_cast<size_t>(i)]) v[i] = 0.0;
}

// sign with sign(0) = 0, the L1 subgradient choice that lets truncated
// coefficients stay at zero.
double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

ConstraintEval constraint_eval(const PannModel& model, const Matrix& features,
                               const Matrix& phi, ConstraintKind kind) {
  const Eigen::Index n = features.rows();
  const Eigen::Index w = features.cols();
  const Eigen::Index m = phi.cols();

  ConstraintEval ce;
  ce.d_coeffs_a = Vector::Zero(w);
  ce.d_coeffs_b = Vector::Zero(m);
  ce.d_features = Matrix::Zero(n, w);
  if (kind == ConstraintKind::None || kind == ConstraintKind::L1Only) return ce;

  const Vector a = model.mlp.masked_coeffs();
  const Vector b = model.masked_poly_coeffs();
  const Vector nn = features * a;
  const Vector poly = phi * b;

  // ||C||_F^2 for every member of the family factors into per-point sums, so
  // no n x w x m tensor is ever materialized.
  double t_val = 0.0;
  Vector dt_dn = Vector::Zero(n);
  Vector dt_dp = Vector::Zero(n);
  Vector dt_da = Vector::Zero(w);
  Vector dt_db = Vector::Zero(m);
  Matrix dt_dpsi;

  switch (kind) {
    case ConstraintKind::CA: {
      t_val = (nn.array() * poly.array()).square().sum();
      dt_dn = 2.0 * (nn.array() * poly.array().square()).matrix();
      dt_dp = 2.0 * (poly.array() * nn.array().square()).matrix();
      break;
    }
    case ConstraintKind::CB: {
      const Matrix phi2 = phi.array().square();
      const Vector beta = phi2 * b.array().square().matrix();
      t_val = (nn.array().square() * beta.array()).sum();
      dt_dn = 2.0 * (nn.array() * beta.array()).matrix();
      dt_db = 2.0 * (b.array() * (phi2.transpose() * nn.array().square().matrix()).array()).matrix();
      break;
    }
    case ConstraintKind::CC: {
      const Vector gamma = phi.array().square().matrix() * mask_to_vector(model.poly_mask);
      t_val = (nn.array().square() * gamma.array()).sum();
      dt_dn = 2.0 * (nn.array() * gamma.array()).matrix();
      break;
    }
    case ConstraintKind::CD: {
      const double b2 = b.squaredNorm();
      t_val = nn.squaredNorm() * b2;
      dt_dn = 2.0 * b2 * nn;
      dt_db = 2.0 * nn.squaredNorm() * b;
      break;
    }
    case ConstraintKind::CE: {
      const Matrix psi2 = features.array().square();
      const Vector alpha = psi2 * a.array().square().matrix();
      const Vector p2 = poly.array().square().matrix();
      t_val = (p2.array() * alpha.array()).sum();
      dt_dp = 2.0 * (poly.array() * alpha.array()).matrix();
      dt_da = 2.0 * (a.array() * (psi2.transpose() * p2).array()).matrix();
      dt_dpsi = 2.0 * (p2 * a.array().square().matrix().transpose()).array() * features.array();
      break;
    }
    case ConstraintKind::CF: {
      const Vector jmask = mask_to_vector(model.mlp.coeff_mask);
      const Matrix psi2 = features.array().square();
      const Vector delta = psi2 * jmask;
      const Vector p2 = poly.array().square().matrix();
      t_val = (p2.array() * delta.array()).sum();
      dt_dp = 2.0 * (poly.array() * delta.array()).matrix();
      dt_dpsi = 2.0 * (p2 * jmask.transpose()).array() * features.array();
      break;
    }
    case ConstraintKind::CG: {
      const double a2 = a.squaredNorm();
      t_val = poly.squaredNorm() * a2;
      dt_dp = 2.0 * a2 * poly;
      dt_da = 2.0 * poly.squaredNorm() * a;
      break;
    }
    case ConstraintKind::CH: {
      const Matrix psi2 = features.array().square();
      const Matrix phi2 = phi.array().square();
      const Vector alpha = psi2 * a.array().square().matrix();
      const Vector beta = phi2 * b.array().square().matrix();
      t_val = (alpha.array() * beta.array()).sum();
      dt_da = 2.0 * (a.array() * (psi2.transpose() * beta).array()).matrix();
      dt_db = 2.0 * (b.array() * (phi2.transpose() * alpha).array()).matrix();
      dt_dpsi = 2.0 * (beta * a.array().square().matrix().transpose()).array() * features.array();
      break;
    }
    default:
      break;
  }

  ce.value = std::sqrt(t_val);
  // The Frobenius norm is non-differentiable at zero; freeze the gradient
  // contribution there.
  if (ce.value < 1e-12) return ce;
  const double scale = 0.5 / ce.value;

  ce.d_coeffs_a = scale * (dt_da + features.transpose() * dt_dn);
  ce.d_coeffs_b = scale * (dt_db + phi.transpose() * dt_dp);
  ce.d_features = scale * (dt_dn * a.transpose());
  if (dt_dpsi.size() > 0) ce.d_features += scale * dt_dpsi;
  apply_mask(ce.d_coeffs_a, model.mlp.coeff_mask);
  apply_mask(ce.d_coeffs_b, model.poly_mask);
  return ce;
}

double l1_term(const PannModel& model, const LossConfig& cfg, PannGradient& grad) {
  if (cfg.lambda_r == 0.0) return 0.0;
  double total = 0.0;
  const Vector a = model.mlp.masked_coeffs();
  const Vector b = model.masked_poly_coeffs();
  total += a.cwiseAbs().sum() + b.cwiseAbs().sum();
  for (Eigen::Index j = 0; j < a.size(); ++j)
    if (model.mlp.coeff_mask[static_cast<size_t>(j)])
      grad.mlp.coeffs[j] += cfg.lambda_r * sgn(a[j]);
  for (Eigen::Index k = 0; k < b.size(); ++k)
    if (model.poly_mask[static_cast<size_t>(k)])
      grad.poly[k] += cfg.lambda_r * sgn(b[k]);
  if (cfg.l1_scope == L1Scope::All) {
    for (size_t l = 0; l < model.mlp.weights.size(); ++l) {
      total += model.mlp.weights[l].cwiseAbs().sum() + model.mlp.biases[l].cwiseAbs().sum();
      grad.mlp.weights[l] += cfg.lambda_r * model.mlp.weights[l].unaryExpr([](double x) { return sgn(x); });
      grad.mlp.biases[l] += cfg.lambda_r * model.mlp.biases[l].unaryExpr([](double x) { return sgn(x); });
    }
  }
  return cfg.lambda_r * total;
}

Vector effective_precond(const DesignBundle& bundle, Eigen::Index n, bool preconditioned) {
  if (!preconditioned) return Vector::Ones(n);
  if (!bundle.has_precond())
    throw ConfigError("preconditioned loss requested but the bundle has no preconditioner");
  return bundle.precond;
}

}  // namespace

ConstraintEval constraint_penalty(const PannModel& model, const Matrix& features,
                                  const DesignBundle& bundle, ConstraintKind kind) {
  if (bundle.phi.cols() != model.basis.size())
    throw ConfigError("design bundle does not match the model basis");
  return constraint_eval(model, features, bundle.phi, kind);
}

LossEval regression_loss(const PannModel& model, const Matrix& points, const Vector& targets,
                         const DesignBundle& bundle, const LossConfig& cfg) {
  cfg.validate();
  if (bundle.phi.cols() != model.basis.size())
    throw ConfigError("design bundle does not match the model basis");
  const Eigen::Index n = points.rows();
  if (targets.size() != n) throw ConfigError("targets do not match point count");

  LossEval out;
  out.grad.setZero(model);

  ForwardCache cache;
  const FeatureEval feat =
      forward_features(model.mlp_config, model.mlp, points, false, &cache);
  const Vector a = model.mlp.masked_coeffs();

  const Vector u = feat.nn_values + poly_predict(bundle, model.poly_coeffs, model.poly_mask);
  const Vector k = effective_precond(bundle, n, cfg.preconditioned);
  const Vector r = u - targets;
  const Vector k2r = (k.array().square() * r.array()).matrix();
  out.loss = (k.array() * r.array()).square().sum() / static_cast<double>(n);

  const Vector g_u = (2.0 / static_cast<double>(n)) * k2r;
  out.grad.mlp.coeffs += feat.features.transpose() * g_u;
  out.grad.poly += bundle.phi.transpose() * g_u;
  Matrix g_feat = g_u * a.transpose();

  if (cfg.lambda_c > 0.0) {
    const ConstraintEval ce = constraint_eval(model, feat.features, bundle.phi, cfg.constraint);
    out.loss += cfg.lambda_c * ce.value;
    out.grad.mlp.coeffs += cfg.lambda_c * ce.d_coeffs_a;
    out.grad.poly += cfg.lambda_c * ce.d_coeffs_b;
    g_feat += cfg.lambda_c * ce.d_features;
  }

  const MlpGrad hidden = backward_features(model.mlp_config, model.mlp, cache, g_feat, Matrix());
  for (size_t l = 0; l < hidden.weights.size(); ++l) {
    out.grad.mlp.weights[l] += hidden.weights[l];
    out.grad.mlp.biases[l] += hidden.biases[l];
  }

  out.loss += l1_term(model, cfg, out.grad);
  apply_mask(out.grad.mlp.coeffs, model.mlp.coeff_mask);
  apply_mask(out.grad.poly, model.poly_mask);
  return out;
}

LossEval pde_loss(const PannModel& model, const Matrix& boundary_pts,
                  const Vector& boundary_vals, const Matrix& collocation_pts,
                  const Vector& f_vals, const DesignBundle& boundary_bundle,
                  const DesignBundle& collocation_bundle, PdeKind problem,
                  const LossConfig& cfg) {
  cfg.validate();
  if (!collocation_bundle.has_laplacian())
    throw ConfigError("collocation bundle must carry Laplacian evaluations");
  if (boundary_bundle.phi.cols() != model.basis.size() ||
      collocation_bundle.phi.cols() != model.basis.size())
    throw ConfigError("design bundle does not match the model basis");

  const Eigen::Index nb = boundary_pts.rows();
  const Eigen::Index nr = collocation_pts.rows();

  LossEval out;
  out.grad.setZero(model);

  ForwardCache cache_b, cache_r;
  const FeatureEval feat_b =
      forward_features(model.mlp_config, model.mlp, boundary_pts, false, &cache_b);
  const FeatureEval feat_r =
      forward_features(model.mlp_config, model.mlp, collocation_pts, true, &cache_r);
  const Vector a = model.mlp.masked_coeffs();
  const Vector b = model.masked_poly_coeffs();

  // Boundary data term.
  const Vector u_b = feat_b.nn_values + boundary_bundle.phi * b;
  const Vector k_b = effective_precond(boundary_bundle, nb, cfg.preconditioned);
  const Vector r_b = u_b - boundary_vals;
  out.loss += (k_b.array() * r_b.array()).square().sum() / static_cast<double>(nb);
  const Vector g_ub =
      (2.0 / static_cast<double>(nb)) * (k_b.array().square() * r_b.array()).matrix();

  // PDE residual term.
  const Vector u_r = feat_r.nn_values + collocation_bundle.phi * b;
  const Vector lap_u = (feat_r.has_laplacian() && feat_r.feature_laplacians.cols() > 0
                            ? Vector(feat_r.feature_laplacians * a)
                            : Vector(Vector::Zero(nr))) +
                       collocation_bundle.lap_phi * b;
  Vector residual = lap_u - f_vals;
  if (problem == PdeKind::AllenCahn)
    residual += (u_r.array() * (u_r.array().square() - 1.0)).matrix();
  const Vector k_r = effective_precond(collocation_bundle, nr, cfg.preconditioned);
  out.loss += cfg.lambda_pde * (k_r.array() * residual.array()).square().sum() /
              static_cast<double>(nr);
  const Vector g_f = (cfg.lambda_pde * 2.0 / static_cast<double>(nr)) *
                     (k_r.array().square() * residual.array()).matrix();
  Vector g_ur = Vector::Zero(nr);
  if (problem == PdeKind::AllenCahn)
    g_ur = (g_f.array() * (3.0 * u_r.array().square() - 1.0)).matrix();

  // Coefficient gradients through the value and Laplacian paths.
  out.grad.mlp.coeffs += feat_b.features.transpose() * g_ub;
  out.grad.poly += boundary_bundle.phi.transpose() * g_ub;
  if (feat_r.feature_laplacians.cols() > 0)
    out.grad.mlp.coeffs += feat_r.feature_laplacians.transpose() * g_f;
  out.grad.poly += collocation_bundle.lap_phi.transpose() * g_f;
  out.grad.mlp.coeffs += feat_r.features.transpose() * g_ur;
  out.grad.poly += collocation_bundle.phi.transpose() * g_ur;

  Matrix g_feat_b = g_ub * a.transpose();
  Matrix g_feat_r = g_ur * a.transpose();
  const Matrix g_lapfeat_r = g_f * a.transpose();

  // Constraints see the union of boundary and collocation points.
  if (cfg.lambda_c > 0.0) {
    Matrix features_u(nb + nr, feat_b.features.cols());
    features_u << feat_b.features, feat_r.features;
    Matrix phi_u(nb + nr, model.basis.size());
    phi_u << boundary_bundle.phi, collocation_bundle.phi;
    const ConstraintEval ce = constraint_eval(model, features_u, phi_u, cfg.constraint);
    out.loss += cfg.lambda_c * ce.value;
    out.grad.mlp.coeffs += cfg.lambda_c * ce.d_coeffs_a;
    out.grad.poly += cfg.lambda_c * ce.d_coeffs_b;
    g_feat_b += cfg.lambda_c * ce.d_features.topRows(nb);
    g_feat_r += cfg.lambda_c * ce.d_features.bottomRows(nr);
  }

  const MlpGrad hidden_b =
      backward_features(model.mlp_config, model.mlp, cache_b, g_feat_b, Matrix());
  const MlpGrad hidden_r =
      backward_features(model.mlp_config, model.mlp, cache_r, g_feat_r, g_lapfeat_r);
  for (size_t l = 0; l < hidden_b.weights.size(); ++l) {
    out.grad.mlp.weights[l] += hidden_b.weights[l] + hidden_r.weights[l];
    out.grad.mlp.biases[l] += hidden_b.biases[l] + hidden_r.biases[l];
  }

  out.loss += l1_term(model, cfg, out.grad);
  apply_mask(out.grad.mlp.coeffs, model.mlp.coeff_mask);
  apply_mask(out.grad.poly, model.poly_mask);
  return out;
}

TruncationReport truncate(PannModel& model, double threshold) {
  if (!(threshold >= 0.0)) throw ConfigError("truncation threshold must be >= 0");
  for (Eigen::Index j = 0; j < model.mlp.coeffs.size(); ++j) {
    const size_t js = static_cast<size_t>(j);
    if (model.mlp.coeff_mask[js] && std::abs(model.mlp.coeffs[j]) < threshold) {
      model.mlp.coeff_mask[js] = false;
    }
    if (!model.mlp.coeff_mask[js]) model.mlp.coeffs[j] = 0.0;
  }
  for (Eigen::Index k = 0; k < model.poly_coeffs.size(); ++k) {
    const size_t ks = static_cast<size_t>(k);
    if (model.poly_mask[ks] && std::abs(model.poly_coeffs[k]) < threshold) {
      model.poly_mask[ks] = false;
    }
    if (!model.poly_mask[ks]) model.poly_coeffs[k] = 0.0;
    model.basis.active[ks] = model.poly_mask[ks];
  }

  TruncationReport report;
  const auto w = static_cast<double>(model.mlp.coeffs.size());
  const auto m = static_cast<double>(model.poly_coeffs.size());
  const auto masked_nn = static_cast<double>(
      std::count(model.mlp.coeff_mask.begin(), model.mlp.coeff_mask.end(), false));
  const auto masked_poly = static_cast<double>(
      std::count(model.poly_mask.begin(), model.poly_mask.end(), false));
  report.pct_nn_truncated = w > 0 ? 100.0 * masked_nn / w : 0.0;
  report.pct_poly_truncated = m > 0 ? 100.0 * masked_poly / m : 0.0;
  for (Eigen::Index k = 0; k < model.poly_coeffs.size(); ++k)
    if (model.poly_mask[static_cast<size_t>(k)])
      report.surviving_poly_indices.push_back(model.basis.indices[static_cast<size_t>(k)]);
  return report;
}

namespace {

Eigen::Index packed_size(const PannModel& model) {
  Eigen::Index n = 0;
  for (size_t l = 0; l < model.mlp.weights.size(); ++l)
    n += model.mlp.weights[l].size() + model.mlp.biases[l].size();
  for (bool on : model.mlp.coeff_mask) n += on ? 1 : 0;
  for (bool on : model.poly_mask) n += on ? 1 : 0;
  return n;
}

}  // namespace

Vector pack_params(const PannModel& model) {
  Vector x(packed_size(model));
  Eigen::Index at = 0;
  for (size_t l = 0; l < model.mlp.weights.size(); ++l) {
    const Matrix& w = model.mlp.weights[l];
    x.segment(at, w.size()) = Eigen::Map<const Vector>(w.data(), w.size());
    at += w.size();
    x.segment(at, model.mlp.biases[l].size()) = model.mlp.biases[l];
    at += model.mlp.biases[l].size();
  }
  for (Eigen::Index j = 0; j < model.mlp.coeffs.size(); ++j)
    if (model.mlp.coeff_mask[static_cast<size_t>(j)]) x[at++] = model.mlp.coeffs[j];
  for (Eigen::Index k = 0; k < model.poly_coeffs.size(); ++k)
    if (model.poly_mask[static_cast<size_t>(k)]) x[at++] = model.poly_coeffs[k];
  return x;
}

void unpack_params(PannModel& model, const Vector& x) {
  if (x.size() != packed_size(model))
    throw InternalError("parameter vector does not match the model's packed size");
  Eigen::Index at = 0;
  for (size_t l = 0; l < model.mlp.weights.size(); ++l) {
    Matrix& w = model.mlp.weights[l];
    Eigen::Map<Vector>(w.data(), w.size()) = x.segment(at, w.size());
    at += w.size();
    model.mlp.biases[l] = x.segment(at, model.mlp.biases[l].size());
    at += model.mlp.biases[l].size();
  }
  for (Eigen::Index j = 0; j < model.mlp.coeffs.size(); ++j)
    if (model.mlp.coeff_mask[static_cast<size_t>(j)]) model.mlp.coeffs[j] = x[at++];
  for (Eigen::Index k = 0; k < model.poly_coeffs.size(); ++k)
    if (model.poly_mask[static_cast<size_t>(k)]) model.poly_coeffs[k] = x[at++];
}

Vector pack_gradient(const PannModel& model, const PannGradient& grad) {
  Vector g(packed_size(model));
  Eigen::Index at = 0;
  for (size_t l = 0; l < grad.mlp.weights.size(); ++l) {
    const Matrix& w = grad.mlp.weights[l];
    g.segment(at, w.size()) = Eigen::Map<const Vector>(w.data(), w.size());
    at += w.size();
    g.segment(at, grad.mlp.biases[l].size()) = grad.mlp.biases[l];
    at += grad.mlp.biases[l].size();
  }
  for (Eigen::Index j = 0; j < grad.mlp.coeffs.size(); ++j)
    if (model.mlp.coeff_mask[static_cast<size_t>(j)]) g[at++] = grad.mlp.coeffs[j];
  for (Eigen::Index k = 0; k < grad.poly.size(); ++k)
    if (model.poly_mask[static_cast<size_t>(k)]) g[at++] = grad.poly[k];
  return g;
}

namespace {

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const nlohmann::json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = a[static_cast<size_t>(i)].get<double>();
  return v;
}

}  // namespace

void save_model(const PannModel& model, const std::string& path) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["mlp"]["input_dim"] = model.mlp_config.input_dim;
  j["mlp"]["hidden_widths"] = model.mlp_config.hidden_widths;
  j["mlp"]["activation"] = std::string(to_string(model.mlp_config.activation.kind));
  j["mlp"]["repu_power"] = model.mlp_config.activation.repu_power;
  j["basis"]["kind"] = std::string(to_string(model.basis.spec.kind));
  j["basis"]["dim"] = model.basis.spec.dim;
  j["basis"]["degree"] = model.basis.spec.degree;

  nlohmann::json weights = nlohmann::json::array();
  for (const Matrix& w : model.mlp.weights) {
    nlohmann::json entry;
    entry["rows"] = w.rows();
    entry["cols"] = w.cols();
    entry["data"] = vector_to_json(Eigen::Map<const Vector>(w.data(), w.size()));
    weights.push_back(entry);
  }
  j["weights"] = weights;
  nlohmann::json biases = nlohmann::json::array();
  for (const Vector& b : model.mlp.biases) biases.push_back(vector_to_json(b));
  j["biases"] = biases;
  j["coeffs"] = vector_to_json(model.mlp.coeffs);
  j["coeff_mask"] = model.mlp.coeff_mask;
  j["poly_coeffs"] = vector_to_json(model.poly_coeffs);
  j["poly_mask"] = model.poly_mask;

  std::ofstream out(path);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path);
  out << j.dump(2) << "\n";
}

PannModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    throw DataError("unsupported checkpoint format version");

  MlpConfig config;
  config.input_dim = j["mlp"]["input_dim"].get<int>();
  config.hidden_widths = j["mlp"]["hidden_widths"].get<std::vector<int>>();
  config.activation.kind = activation_from_string(j["mlp"]["activation"].get<std::string>());
  config.activation.repu_power = j["mlp"]["repu_power"].get<int>();

  BasisSpec spec;
  spec.kind = basis_kind_from_string(j["basis"]["kind"].get<std::string>());
  spec.dim = j["basis"]["dim"].get<int>();
  spec.degree = j["basis"]["degree"].get<int>();

  PannModel model = make_model(config, enumerate_indices(spec), 0);
  const auto& weights = j["weights"];
  if (weights.size() != model.mlp.weights.size())
    throw DataError("checkpoint layer count does not match config");
  for (size_t l = 0; l < model.mlp.weights.size(); ++l) {
    Matrix& w = model.mlp.weights[l];
    if (weights[l]["rows"].get<Eigen::Index>() != w.rows() ||
        weights[l]["cols"].get<Eigen::Index>() != w.cols())
      throw DataError("checkpoint weight shape does not match config");
    Eigen::Map<Vector>(w.data(), w.size()) = vector_from_json(weights[l]["data"]);
    model.mlp.biases[l] = vector_from_json(j["biases"][l]);
  }
  model.mlp.coeffs = vector_from_json(j["coeffs"]);
  model.mlp.coeff_mask = j["coeff_mask"].get<std::vector<bool>>();
  model.poly_coeffs = vector_from_json(j["poly_coeffs"]);
  model.poly_mask = j["poly_mask"].get<std::vector<bool>>();
  if (model.poly_coeffs.size() != model.basis.size() ||
      model.poly_mask.size() != static_cast<size_t>(model.basis.size()))
    throw DataError("checkpoint polynomial record does not match basis");
  for (Eigen::Index k = 0; k < model.basis.size(); ++k)
    model.basis.active[static_cast<size_t>(k)] = model.poly_mask[static_cast<size_t>(k)];
  return model;
}

}  // namespace pann
