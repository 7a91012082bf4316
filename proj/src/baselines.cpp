#include "qfl/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "qfl/error.hpp"
#include "qfl/optim.hpp"
#include "qfl/random.hpp"

namespace qfl {

using nlohmann::json;

const char* variant_name(FullFusionVariant v) {
  return v == FullFusionVariant::kModalityProduct ? "modality_product" : "polynomial_power";
}

FullFusionVariant variant_from_name(std::string_view name) {
  if (name == "modality_product") return FullFusionVariant::kModalityProduct;
  if (name == "polynomial_power") return FullFusionVariant::kPolynomialPower;
  fail(ErrorCode::kInput, "unknown full-fusion variant '" + std::string(name) + "'");
}

std::size_t full_fusion_feature_dim(std::size_t modalities, std::size_t dim,
                                    FullFusionVariant variant, std::size_t degree) {
  if (modalities < 1 || dim < 1) fail(ErrorCode::kInput, "need M >= 1 and D >= 1");
  const std::size_t base =
      variant == FullFusionVariant::kModalityProduct ? dim + 1 : modalities * dim + 1;
  const std::size_t power = variant == FullFusionVariant::kModalityProduct ? modalities : degree;
  if (variant == FullFusionVariant::kPolynomialPower && degree < 1)
    fail(ErrorCode::kInput, "polynomial degree must be >= 1");
  std::size_t n = 1;
  for (std::size_t k = 0; k < power; ++k) {
    n *= base;
    if (n > kMaxFusionFeatures)
      fail(ErrorCode::kSize, "full fusion feature vector exceeds " +
                                 std::to_string(kMaxFusionFeatures) + " entries");
  }
  return n;
}

namespace {

std::vector<double> kron_vec(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (double u : a)
    for (double v : b) out.push_back(u * v);
  return out;
}

}  // namespace

std::vector<double> full_fusion_features(const ModalityBundle& bundle, FullFusionVariant variant,
                                         std::size_t degree) {
  full_fusion_feature_dim(bundle.modalities(), bundle.dim(), variant, degree);
  std::vector<double> out{1.0};
  if (variant == FullFusionVariant::kModalityProduct) {
    for (const auto& z : bundle.features()) {
      std::vector<double> f(z.begin(), z.end());
      f.push_back(1.0);
      out = kron_vec(out, f);
    }
  } else {
    std::vector<double> f{1.0};
    const auto x = concatenate(bundle);
    f.insert(f.end(), x.begin(), x.end());
    for (std::size_t p = 0; p < degree; ++p) out = kron_vec(out, f);
  }
  return out;
}

FullTensorFusion FullTensorFusion::random(std::size_t modalities, std::size_t dim,
                                          FullFusionVariant variant, std::size_t degree,
                                          std::size_t hidden, std::uint64_t seed) {
  FullTensorFusion m;
  m.variant = variant;
  m.modalities = modalities;
  m.dim = dim;
  m.degree = degree;
  m.hidden = hidden;
  auto rng = make_rng(seed, "full-fusion-init");
  std::normal_distribution<double> n(0.0, 1.0);
  m.weights.resize(m.parameter_count());
  for (double& w : m.weights) w = n(rng);
  return m;
}

std::vector<double> full_fusion_predict(const FullTensorFusion& model, const ModalityBundle& bundle) {
  if (bundle.modalities() != model.modalities || bundle.dim() != model.dim)
    fail(ErrorCode::kShape, "bundle shape does not match the fusion model");
  const auto f = full_fusion_features(bundle, model.variant, model.degree);
  if (model.weights.size() != f.size() * model.hidden)
    fail(ErrorCode::kShape, "weight count does not match feature_dim x hidden");
  std::vector<double> out(model.hidden, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t h = 0; h < model.hidden; ++h) out[h] += model.weights[i * model.hidden + h] * f[i];
  return out;
}

// --- CP --------------------------------------------------------------------

const char* granularity_name(CpGranularity g) {
  return g == CpGranularity::kPerScalar ? "per_scalar" : "per_modality";
}

CpGranularity granularity_from_name(std::string_view name) {
  if (name == "per_scalar") return CpGranularity::kPerScalar;
  if (name == "per_modality") return CpGranularity::kPerModality;
  fail(ErrorCode::kInput, "unknown CP granularity '" + std::string(name) + "'");
}

std::size_t CpModel::num_factors() const {
  return granularity == CpGranularity::kPerScalar ? modalities * dim : modalities;
}

std::size_t CpModel::factor_width() const {
  return granularity == CpGranularity::kPerScalar ? 2 : dim + 1;
}

std::size_t CpModel::parameter_count() const {
  return rank * num_factors() * hidden * factor_width();
}

void CpModel::validate() const {
  if (rank < 1) fail(ErrorCode::kInput, "CP rank must be >= 1");
  if (modalities < 1 || dim < 1 || hidden < 1) fail(ErrorCode::kInput, "CP shape must be positive");
  if (!params.empty() && params.size() != parameter_count())
    fail(ErrorCode::kShape, "CP parameter count mismatch");
}

CpModel CpModel::create(std::size_t modalities, std::size_t dim, std::size_t hidden,
                        std::size_t rank, CpGranularity granularity, std::uint64_t seed,
                        double init_scale) {
  CpModel m;
  m.rank = rank;
  m.modalities = modalities;
  m.dim = dim;
  m.hidden = hidden;
  m.granularity = granularity;
  m.validate();
  auto rng = make_rng(seed, "cp-init");
  std::normal_distribution<double> n(0.0, init_scale);
  m.params.resize(m.parameter_count());
  for (double& p : m.params) p = n(rng);
  return m;
}

namespace {

struct CpView {
  const CpModel& m;
  std::span<const double> p;
  std::size_t F, W;

  CpView(const CpModel& model, std::span<const double> params)
      : m(model), p(params), F(model.num_factors()), W(model.factor_width()) {
    if (params.size() != model.parameter_count())
      fail(ErrorCode::kShape, "CP parameter count mismatch");
  }

  std::size_t offset(std::size_t a, std::size_t f, std::size_t h) const {
    return ((a * F + f) * m.hidden + h) * W;
  }
  // j-th input of factor f (j < W - 1).
  double input(std::span<const double> x, std::size_t f, std::size_t j) const {
    return m.granularity == CpGranularity::kPerScalar ? x[f] : x[f * m.dim + j];
  }
  double factor(std::span<const double> x, std::size_t a, std::size_t f, std::size_t h) const {
    const std::size_t o = offset(a, f, h);
    double g = p[o + W - 1];
    for (std::size_t j = 0; j + 1 < W; ++j) g += p[o + j] * input(x, f, j);
    return g;
  }
};

void check_input(const CpModel& m, std::span<const double> x) {
  if (x.size() != m.modalities * m.dim) fail(ErrorCode::kShape, "CP input has the wrong length");
}

std::vector<double> cp_forward(const CpModel& m, std::span<const double> p,
                               std::span<const double> x) {
  check_input(m, x);
  const CpView v(m, p);
  std::vector<double> out(m.hidden, 0.0);
  for (std::size_t h = 0; h < m.hidden; ++h)
    for (std::size_t a = 0; a < m.rank; ++a) {
      double prod = 1.0;
      for (std::size_t f = 0; f < v.F; ++f) prod *= v.factor(x, a, f, h);
      out[h] += prod;
    }
  return out;
}

void cp_backward_impl(const CpModel& m, std::span<const double> p, std::span<const double> x,
                      std::span<const double> upstream, std::span<double> grad) {
  check_input(m, x);
  const CpView v(m, p);
  std::vector<double> g(v.F), prefix(v.F + 1), suffix(v.F + 1);
  for (std::size_t h = 0; h < m.hidden; ++h) {
    if (upstream[h] == 0.0) continue;
    for (std::size_t a = 0; a < m.rank; ++a) {
      for (std::size_t f = 0; f < v.F; ++f) g[f] = v.factor(x, a, f, h);
      prefix[0] = 1.0;
      for (std::size_t f = 0; f < v.F; ++f) prefix[f + 1] = prefix[f] * g[f];
      suffix[v.F] = 1.0;
      for (std::size_t f = v.F; f-- > 0;) suffix[f] = suffix[f + 1] * g[f];
      for (std::size_t f = 0; f < v.F; ++f) {
        const double rest = upstream[h] * prefix[f] * suffix[f + 1];
        const std::size_t o = v.offset(a, f, h);
        for (std::size_t j = 0; j + 1 < v.W; ++j) grad[o + j] += rest * v.input(x, f, j);
        grad[o + v.W - 1] += rest;
      }
    }
  }
}

}  // namespace

std::vector<double> cp_predict(const CpModel& model, std::span<const double> x) {
  return cp_forward(model, model.params, x);
}

void cp_backward(const CpModel& model, std::span<const double> x,
                 std::span<const double> upstream, std::span<double> grad) {
  cp_backward_impl(model, model.params, x, upstream, grad);
}

std::vector<double> CpFusion::forward(std::span<const double> params,
                                      std::span<const double> x) const {
  return cp_forward(shape_, params, x);
}

void CpFusion::backward(std::span<const double> params, std::span<const double> x,
                        std::span<const double> upstream, std::span<double> grad) const {
  cp_backward_impl(shape_, params, x, upstream, grad);
}

namespace {

double max_residual(const CpModel& m, const std::vector<std::vector<double>>& inputs,
                    const std::vector<std::vector<double>>& targets) {
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto f = cp_predict(m, inputs[i]);
    for (std::size_t h = 0; h < m.hidden; ++h) worst = std::max(worst, std::abs(f[h] - targets[i][h]));
  }
  return worst;
}

void check_data(const CpModel& m, const std::vector<std::vector<double>>& inputs,
                const std::vector<std::vector<double>>& targets) {
  if (inputs.empty() || inputs.size() != targets.size())
    fail(ErrorCode::kShape, "inputs and targets must be non-empty and equal in count");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    check_input(m, inputs[i]);
    if (targets[i].size() != m.hidden) fail(ErrorCode::kShape, "target has the wrong length");
  }
}

}  // namespace

AlsReport fit_cp_als(CpModel& model, const std::vector<std::vector<double>>& inputs,
                     const std::vector<std::vector<double>>& targets, std::size_t max_sweeps,
                     double tol) {
  model.validate();
  check_data(model, inputs, targets);
  const std::size_t n = inputs.size();
  const std::size_t F = model.num_factors(), W = model.factor_width(), R = model.rank;
  AlsReport report;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t h = 0; h < model.hidden; ++h) {
        const CpView v(model, model.params);
        Eigen::MatrixXd A(n, R * W);
        Eigen::VectorXd b(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto& x = inputs[i];
          b(i) = targets[i][h];
          for (std::size_t a = 0; a < R; ++a) {
            double rest = 1.0;
            for (std::size_t k = 0; k < F; ++k)
              if (k != f) rest *= v.factor(x, a, k, h);
            for (std::size_t j = 0; j + 1 < W; ++j) A(i, a * W + j) = rest * v.input(x, f, j);
            A(i, a * W + W - 1) = rest;
          }
        }
        const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(b);
        for (std::size_t a = 0; a < R; ++a)
          for (std::size_t j = 0; j < W; ++j)
            model.params[v.offset(a, f, h) + j] = sol(a * W + j);
      }
    }
    report.sweeps = sweep + 1;
    report.max_abs_residual = max_residual(model, inputs, targets);
    if (report.max_abs_residual <= tol) break;
  }
  return report;
}

double fit_cp_adam(CpModel& model, const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::vector<double>>& targets, std::size_t steps,
                   double learning_rate) {
  model.validate();
  check_data(model, inputs, targets);
  Adam adam(model.params.size(), learning_rate);
  std::vector<double> grad(model.params.size());
  const double scale = 2.0 / static_cast<double>(inputs.size());
  for (std::size_t s = 0; s < steps; ++s) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      auto f = cp_predict(model, inputs[i]);
      for (std::size_t h = 0; h < model.hidden; ++h) f[h] = scale * (f[h] - targets[i][h]);
      cp_backward(model, inputs[i], f, grad);
    }
    adam.step(model.params, grad);
  }
  return max_residual(model, inputs, targets);
}

std::string cp_to_json(const CpModel& m) {
  return json{{"rank", m.rank},         {"modalities", m.modalities},
              {"dim", m.dim},           {"hidden", m.hidden},
              {"granularity", granularity_name(m.granularity)},
              {"params", m.params}}
      .dump(2);
}

CpModel cp_from_json(std::string_view text) {
  try {
    const json d = json::parse(text);
    CpModel m;
    m.rank = d.at("rank").get<std::size_t>();
    m.modalities = d.at("modalities").get<std::size_t>();
    m.dim = d.at("dim").get<std::size_t>();
    m.hidden = d.at("hidden").get<std::size_t>();
    m.granularity = granularity_from_name(d.at("granularity").get<std::string>());
    m.params = d.at("params").get<std::vector<double>>();
    m.validate();
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInput, std::string("malformed CP JSON: ") + e.what());
  }
}

std::string full_fusion_to_json(const FullTensorFusion& m) {
  return json{{"variant", variant_name(m.variant)},
              {"modalities", m.modalities},
              {"dim", m.dim},
              {"degree", m.degree},
              {"hidden", m.hidden},
              {"weights", m.weights}}
      .dump(2);
}

FullTensorFusion full_fusion_from_json(std::string_view text) {
  try {
    const json d = json::parse(text);
    FullTensorFusion m;
    m.variant = variant_from_name(d.at("variant").get<std::string>());
    m.modalities = d.at("modalities").get<std::size_t>();
    m.dim = d.at("dim").get<std::size_t>();
    m.degree = d.at("degree").get<std::size_t>();
    m.hidden = d.at("hidden").get<std::size_t>();
    m.weights = d.at("weights").get<std::vector<double>>();
    if (m.weights.size() != m.parameter_count())
      fail(ErrorCode::kShape, "full-fusion weight count mismatch");
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInput, std::string("malformed full-fusion JSON: ") + e.what());
  }
}

}  // namespace qfl
