#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qfl/stateprep.hpp"
#include "qfl/training.hpp"

namespace qfl {

inline constexpr std::size_t kMaxFusionFeatures = 10000;

// kModalityProduct: ⊗_m [z^(m); 1], constant last in each factor.
// kPolynomialPower: [1 | x]^{⊗P} over the concatenated features.
enum class FullFusionVariant { kModalityProduct, kPolynomialPower };

const char* variant_name(FullFusionVariant v);
FullFusionVariant variant_from_name(std::string_view name);

std::size_t full_fusion_feature_dim(std::size_t modalities, std::size_t dim,
                                    FullFusionVariant variant, std::size_t degree = 1);

std::vector<double> full_fusion_features(const ModalityBundle& bundle, FullFusionVariant variant,
                                         std::size_t degree = 1);

struct FullTensorFusion {
  FullFusionVariant variant = FullFusionVariant::kModalityProduct;
  std::size_t modalities = 0, dim = 0, degree = 1, hidden = 1;
  std::vector<double> weights;  // feature_dim x hidden, row-major

  std::size_t feature_dim() const {
    return full_fusion_feature_dim(modalities, dim, variant, degree);
  }
  std::size_t parameter_count() const { return feature_dim() * hidden; }
  static FullTensorFusion random(std::size_t modalities, std::size_t dim,
                                 FullFusionVariant variant, std::size_t degree,
                                 std::size_t hidden, std::uint64_t seed);
};

// Wᵀ · features(bundle).
std::vector<double> full_fusion_predict(const FullTensorFusion& model, const ModalityBundle& bundle);

// Low-rank CP fusion: f_h = Σ_α Π_factors g_{α,h}(factor input), each g
// affine. Per-scalar factors take one feature z_k (2 params: a·z + b);
// per-modality factors take a whole modality (D weights + bias).
enum class CpGranularity { kPerScalar, kPerModality };

const char* granularity_name(CpGranularity g);
CpGranularity granularity_from_name(std::string_view name);

struct CpModel {
  std::size_t rank = 16;
  std::size_t modalities = 0, dim = 0, hidden = 1;
  CpGranularity granularity = CpGranularity::kPerScalar;
  std::vector<double> params;

  std::size_t num_factors() const;
  std::size_t factor_width() const;  // inputs per factor + 1 (bias)
  std::size_t parameter_count() const;
  void validate() const;

  static CpModel create(std::size_t modalities, std::size_t dim, std::size_t hidden,
                        std::size_t rank, CpGranularity granularity, std::uint64_t seed,
                        double init_scale = 0.5);
};

std::vector<double> cp_predict(const CpModel& model, std::span<const double> x);
// grad += (∂f/∂params)ᵀ · upstream
void cp_backward(const CpModel& model, std::span<const double> x,
                 std::span<const double> upstream, std::span<double> grad);

// Alternating least squares for targets[i] (size hidden) against inputs[i];
// each factor update is a min-norm linear least-squares solve.
struct AlsReport {
  std::size_t sweeps = 0;
  double max_abs_residual = 0.0;
};
AlsReport fit_cp_als(CpModel& model, const std::vector<std::vector<double>>& inputs,
                     const std::vector<std::vector<double>>& targets, std::size_t max_sweeps,
                     double tol = 1e-12);

// Full-batch Adam on mean squared error; returns the final max |residual|.
double fit_cp_adam(CpModel& model, const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::vector<double>>& targets, std::size_t steps,
                   double learning_rate);

std::string cp_to_json(const CpModel& model);
CpModel cp_from_json(std::string_view text);
std::string full_fusion_to_json(const FullTensorFusion& model);
FullTensorFusion full_fusion_from_json(std::string_view text);

class CpFusion final : public FusionLayer {
 public:
  explicit CpFusion(CpModel shape) : shape_(std::move(shape)) { shape_.validate(); }

  std::size_t output_dim() const override { return shape_.hidden; }
  std::size_t num_params() const override { return shape_.parameter_count(); }
  std::vector<double> forward(std::span<const double> params,
                              std::span<const double> x) const override;
  void backward(std::span<const double> params, std::span<const double> x,
                std::span<const double> upstream, std::span<double> grad) const override;

 private:
  CpModel shape_;
};

}  // namespace qfl
