#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qfl/measurement.hpp"
#include "qfl/qfl.hpp"

namespace qfl {

struct PlantedTerm {
  Exponent exponent;  // over the MD concatenated features
  double coefficient;
};

struct SyntheticTask {
  std::size_t modalities = 0;   // M
  std::size_t dim = 0;          // D
  std::size_t planted_degree = 0;
  std::uint64_t seed = 0;            // as requested
  std::uint64_t effective_seed = 0;  // after any regeneration
  std::vector<PlantedTerm> planted;
  double threshold = 0.0;  // median of the planted polynomial
  std::vector<std::vector<double>> features;  // n x MD, entries in [-1, 1]
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_features() const noexcept { return modalities * dim; }
  double planted_value(std::span<const double> x) const;
};

struct TaskOptions {
  std::size_t extra_terms = 0;  // low-weight monomials added to the planted one
};

// Features uniform in [-1, 1]; label = planted polynomial > its median. For
// degree >= 2 the planted polynomial contains a monomial spanning at least
// two modalities; degree 1 plants a separable linear form.
SyntheticTask generate_task(std::size_t modalities, std::size_t dim, std::size_t degree,
                            std::size_t n_samples, std::uint64_t seed,
                            const TaskOptions& options = {});

struct TaskSplit {
  std::vector<std::size_t> train, validation, test;
};
// Seeded shuffle into 60/20/20 train/validation/test.
TaskSplit split_task(const SyntheticTask& task, std::uint64_t seed);

// --- fusion layers ---------------------------------------------------------

class FusionLayer {
 public:
  virtual ~FusionLayer() = default;
  virtual std::size_t output_dim() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual std::vector<double> forward(std::span<const double> params,
                                      std::span<const double> x) const = 0;
  // grad += (∂f/∂params)ᵀ · upstream
  virtual void backward(std::span<const double> params, std::span<const double> x,
                        std::span<const double> upstream, std::span<double> grad) const = 0;
};

// Jacobian column ∂f/∂θ_k for a circuit whose trainable angles are tagged on
// Rx/Ry/Rz gates: (f(θ_k + π/2) − f(θ_k − π/2)) / 2 per observable.
std::vector<double> parameter_shift(const Circuit& circuit, const QuantumState& initial,
                                    const ObservablePlan& plan, std::size_t param);

// Σ_h upstream_h · ∂f_h/∂θ_k through the full QFL (prefix + F_P).
double parameter_shift_gradient(const QflCircuitSpec& spec, std::span<const double> x,
                                const ObservablePlan& plan, std::span<const double> upstream,
                                std::size_t param);

class QflFusion final : public FusionLayer {
 public:
  QflFusion(QflCircuitSpec spec, ObservablePlan plan, MeasurementMode mode = {});

  std::size_t output_dim() const override { return plan_.size(); }
  std::size_t num_params() const override { return spec_.num_params(); }
  std::vector<double> forward(std::span<const double> params,
                              std::span<const double> x) const override;
  void backward(std::span<const double> params, std::span<const double> x,
                std::span<const double> upstream, std::span<double> grad) const override;

  const QflCircuitSpec& spec() const noexcept { return spec_; }

 private:
  QflCircuitSpec spec_;
  ObservablePlan plan_;
  MeasurementMode mode_;
};

// --- training --------------------------------------------------------------

enum class LossKind { kCrossEntropy, kFocal };
const char* loss_name(LossKind k);
LossKind loss_from_name(const std::string& name);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  LossKind loss = LossKind::kCrossEntropy;
  double focal_gamma = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch;
  std::string split;  // "train" | "validation"
  double loss;
  double accuracy;
};

struct Metrics {
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> roc_auc;  // empty when only one class is present
};

struct TrainedModel {
  std::vector<double> fusion_params;
  std::vector<double> decoder;  // classes x H weights, then classes biases
  std::size_t classes = 2;
};

struct TrainResult {
  TrainedModel best;
  std::vector<EpochMetrics> history;
  double initial_validation_loss = 0.0;
  double best_validation_loss = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  bool stopped_early = false;
};

TrainResult train(const FusionLayer& fusion, std::vector<double> initial_params,
                  const SyntheticTask& task, const TaskSplit& split, const TrainConfig& config);

Metrics evaluate(const FusionLayer& fusion, const TrainedModel& model,
                 const SyntheticTask& task, std::span<const std::size_t> indices);

// Metric primitives, exposed for tests.
double roc_auc(std::span<const double> scores, std::span<const int> labels);
std::optional<double> roc_auc_checked(std::span<const double> scores, std::span<const int> labels);
double f1_score(std::span<const int> predictions, std::span<const int> labels);

// Loss of logits for one label plus ∂loss/∂logits.
double classification_loss(std::span<const double> logits, int label, LossKind kind,
                           double gamma, double alpha, std::span<double> dlogits);

std::string history_csv(const std::vector<EpochMetrics>& history);

}  // namespace qfl
