#include "qfl/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "format.hpp"
#include "qfl/optim.hpp"
#include "qfl/random.hpp"

namespace qfl {

namespace {

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Results
// must be written to per-index slots so reduction order stays fixed.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t hash_features(std::span<const double> x) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (double v : x) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = splitmix64(h ^ bits);
  }
  return h;
}

Exponent random_monomial(std::size_t vars, std::size_t degree, std::mt19937_64& rng) {
  Exponent e(vars, 0);
  std::uniform_int_distribution<std::size_t> pick(0, vars - 1);
  for (std::size_t k = 0; k < degree; ++k) ++e[pick(rng)];
  return e;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double SyntheticTask::planted_value(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& t : planted) {
    double m = t.coefficient;
    for (std::size_t k = 0; k < t.exponent.size(); ++k)
      for (int p = 0; p < t.exponent[k]; ++p) m *= x[k];
    acc += m;
  }
  return acc;
}

SyntheticTask generate_task(std::size_t modalities, std::size_t dim, std::size_t degree,
                            std::size_t n_samples, std::uint64_t seed,
                            const TaskOptions& options) {
  if (modalities < 1 || dim < 1) fail(ErrorCode::kInput, "task needs M >= 1 and D >= 1");
  if (modalities * dim > 7) fail(ErrorCode::kInput, "task supports M*D <= 7");
  if (degree < 1 || degree > 4) fail(ErrorCode::kInput, "planted degree must lie in [1, 4]");
  if (degree >= 2 && modalities < 2)
    fail(ErrorCode::kInput, "a cross-modal monomial needs at least two modalities");
  if (n_samples < 10) fail(ErrorCode::kInput, "task needs at least 10 samples");

  const std::size_t vars = modalities * dim;
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    SyntheticTask task;
    task.modalities = modalities;
    task.dim = dim;
    task.planted_degree = degree;
    task.seed = seed;
    task.effective_seed = seed + attempt;
    auto rng = make_rng(task.effective_seed, "synthetic-task");
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> mag(0.5, 1.5);
    std::uniform_real_distribution<double> small(-0.3, 0.3);

    if (degree == 1) {
      // Separable control: a linear form over every feature.
      std::normal_distribution<double> normal(0.0, 1.0);
      for (std::size_t k = 0; k < vars; ++k) {
        Exponent e(vars, 0);
        e[k] = 1;
        task.planted.push_back({e, normal(rng)});
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick_mod(0, modalities - 1);
      std::uniform_int_distribution<std::size_t> pick_dim(0, dim - 1);
      const std::size_t m1 = pick_mod(rng);
      std::size_t m2 = pick_mod(rng);
      while (m2 == m1) m2 = pick_mod(rng);
      Exponent e = random_monomial(vars, degree - 2, rng);
      ++e[m1 * dim + pick_dim(rng)];
      ++e[m2 * dim + pick_dim(rng)];
      const double sign = (rng() & 1) ? -1.0 : 1.0;
      task.planted.push_back({e, sign * mag(rng)});
    }
    std::uniform_int_distribution<std::size_t> pick_deg(1, degree);
    for (std::size_t t = 0; t < options.extra_terms; ++t)
      task.planted.push_back({random_monomial(vars, pick_deg(rng), rng), small(rng)});

    std::vector<double> values;
    for (std::size_t i = 0; i < n_samples; ++i) {
      std::vector<double> x(vars);
      for (double& v : x) v = unit(rng);
      values.push_back(task.planted_value(x));
      task.features.push_back(std::move(x));
    }
    task.threshold = median(values);
    std::size_t positives = 0;
    for (double v : values) {
      task.labels.push_back(v > task.threshold ? 1 : 0);
      positives += task.labels.back();
    }
    const double balance = static_cast<double>(positives) / static_cast<double>(n_samples);
    if (balance >= 0.35 && balance <= 0.65) return task;
  }
  fail(ErrorCode::kInput, "could not draw a balanced task");
}

TaskSplit split_task(const SyntheticTask& task, std::uint64_t seed) {
  std::vector<std::size_t> order(task.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, "task-split");
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = order.size() * 6 / 10;
  const std::size_t n_val = order.size() * 2 / 10;
  TaskSplit s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.validation.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  s.test.assign(order.begin() + n_train + n_val, order.end());
  return s;
}

// --- parameter shift -------------------------------------------------------

std::vector<double> parameter_shift(const Circuit& circuit, const QuantumState& initial,
                                    const ObservablePlan& plan, std::size_t param) {
  std::optional<std::size_t> where;
  for (std::size_t g = 0; g < circuit.size(); ++g) {
    const Gate& gate = circuit.gates()[g];
    if (gate.param != param) continue;
    if (!gate.is_shift_compatible())
      fail(ErrorCode::kUnsupportedGradient,
           "parameter " + std::to_string(param) + " sits on a " + gate.label() +
               " gate; the two-term shift rule needs Rx, Ry or Rz");
    if (!gate.controls.empty())
      fail(ErrorCode::kUnsupportedGradient,
           "parameter " + std::to_string(param) + " sits on a controlled rotation");
    if (where)
      fail(ErrorCode::kUnsupportedGradient,
           "parameter " + std::to_string(param) + " is shared by several gates");
    where = g;
  }
  if (!where)
    fail(ErrorCode::kUnsupportedGradient,
         "parameter " + std::to_string(param) + " does not appear in the circuit");

  auto shifted = [&](double delta) {
    QuantumState s = initial;
    for (std::size_t g = 0; g < circuit.size(); ++g) {
      if (g == *where) {
        Gate copy = circuit.gates()[g];
        copy.angle += delta;
        apply_gate(copy, s.amplitudes(), s.num_qubits());
      } else {
        apply_gate(circuit.gates()[g], s.amplitudes(), s.num_qubits());
      }
    }
    return measure_plan(s, plan);
  };
  const auto plus = shifted(kPi / 2.0);
  const auto minus = shifted(-kPi / 2.0);
  std::vector<double> out(plus.size());
  for (std::size_t h = 0; h < out.size(); ++h) out[h] = 0.5 * (plus[h] - minus[h]);
  return out;
}

namespace {

void require_trainable(const QflCircuitSpec& spec) {
  if (!spec.fixed_blocks.empty())
    fail(ErrorCode::kUnsupportedGradient, "fixed blocks carry no trainable parameters");
}

Circuit full_circuit(const QflCircuitSpec& spec, std::span<const double> x) {
  Circuit c = build_hadamard_prefix(spec.layout);
  c.append(assemble(spec, x));
  return c;
}

}  // namespace

double parameter_shift_gradient(const QflCircuitSpec& spec, std::span<const double> x,
                                const ObservablePlan& plan, std::span<const double> upstream,
                                std::size_t param) {
  require_trainable(spec);
  if (param >= spec.num_params())
    fail(ErrorCode::kUnsupportedGradient, "parameter index out of range");
  if (upstream.size() != plan.size()) fail(ErrorCode::kShape, "upstream size != plan size");
  const auto col = parameter_shift(full_circuit(spec, x),
                                   QuantumState(spec.layout.total_qubits()), plan, param);
  double g = 0.0;
  for (std::size_t h = 0; h < col.size(); ++h) g += upstream[h] * col[h];
  return g;
}

QflFusion::QflFusion(QflCircuitSpec spec, ObservablePlan plan, MeasurementMode mode)
    : spec_(std::move(spec)), plan_(std::move(plan)), mode_(mode) {
  spec_.validate();
  for (const auto& o : plan_.observables)
    if (o.target >= spec_.layout.index_qubits)
      fail(ErrorCode::kShape, "observable targets a qubit outside the index register");
}

std::vector<double> QflFusion::forward(std::span<const double> params,
                                       std::span<const double> x) const {
  QflCircuitSpec s = spec_;
  s.params.assign(params.begin(), params.end());
  MeasurementMode m = mode_;
  if (m.shots) m.seed = derive_seed(mode_.seed, "sample", hash_features(x));
  const QuantumState out = apply(full_circuit(s, x), QuantumState(s.layout.total_qubits()));
  return measure_plan(out, plan_, m);
}

void QflFusion::backward(std::span<const double> params, std::span<const double> x,
                         std::span<const double> upstream, std::span<double> grad) const {
  require_trainable(spec_);
  QflCircuitSpec s = spec_;
  s.params.assign(params.begin(), params.end());
  const Circuit c = full_circuit(s, x);
  const QuantumState init(s.layout.total_qubits());
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto col = parameter_shift(c, init, plan_, k);
    for (std::size_t h = 0; h < col.size(); ++h) grad[k] += upstream[h] * col[h];
  }
}

// --- losses and metrics ----------------------------------------------------

const char* loss_name(LossKind k) {
  return k == LossKind::kFocal ? "focal" : "cross_entropy";
}

LossKind loss_from_name(const std::string& name) {
  if (name == "cross_entropy") return LossKind::kCrossEntropy;
  if (name == "focal") return LossKind::kFocal;
  fail(ErrorCode::kConfig, "unknown loss '" + name + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    fail(ErrorCode::kConfig, "learning rate must be positive");
  if (batch_size < 1) fail(ErrorCode::kConfig, "batch size must be >= 1");
  if (patience < 1) fail(ErrorCode::kConfig, "patience must be >= 1");
  if (focal_gamma < 0.0) fail(ErrorCode::kConfig, "focal gamma must be >= 0");
}

double classification_loss(std::span<const double> logits, int label, LossKind kind,
                           double gamma, double alpha, std::span<double> dlogits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  std::vector<double> p(logits.size());
  for (std::size_t c = 0; c < logits.size(); ++c) p[c] = std::exp(logits[c] - mx) / z;
  const double log_pt = logits[label] - mx - std::log(z);
  const double pt = p[label];

  if (kind == LossKind::kCrossEntropy) {
    for (std::size_t c = 0; c < p.size(); ++c)
      dlogits[c] = p[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
    return -log_pt;
  }
  // FL = -α (1 - p_t)^γ log p_t ; dFL/dp_t then chained through softmax.
  const double one_m = std::max(1.0 - pt, 0.0);
  const double loss = -alpha * std::pow(one_m, gamma) * log_pt;
  const double mod_term =
      (gamma > 0.0 && one_m > 0.0) ? gamma * std::pow(one_m, gamma - 1.0) * log_pt : 0.0;
  const double dl_dpt = alpha * (mod_term - std::pow(one_m, gamma) / pt);
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double dpt = static_cast<int>(c) == label ? pt * (1.0 - pt) : -pt * p[c];
    dlogits[c] = dl_dpt * dpt;
  }
  return loss;
}

std::optional<double> roc_auc_checked(std::span<const double> scores,
                                      std::span<const int> labels) {
  if (scores.size() != labels.size()) fail(ErrorCode::kShape, "scores and labels differ in size");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over ties.
  std::vector<double> rank(scores.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  double pos = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) {
      pos += 1.0;
      sum += rank[i];
    }
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0.0 || neg == 0.0) return std::nullopt;
  return (sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  const auto auc = roc_auc_checked(scores, labels);
  if (!auc) fail(ErrorCode::kInput, "ROC-AUC is undefined when only one class is present");
  return *auc;
}

double f1_score(std::span<const int> predictions, std::span<const int> labels) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == 1 && labels[i] == 1) ++tp;
    else if (predictions[i] == 1) ++fp;
    else if (labels[i] == 1) ++fn;
  }
  if (tp == 0.0) return 0.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

// --- training loop ---------------------------------------------------------

namespace {

struct Decoder {
  std::size_t classes, hidden;
  std::span<const double> w;  // classes*hidden weights then classes biases

  std::vector<double> logits(std::span<const double> f) const {
    std::vector<double> out(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      double z = w[classes * hidden + c];
      for (std::size_t h = 0; h < hidden; ++h) z += w[c * hidden + h] * f[h];
      out[c] = z;
    }
    return out;
  }
};

struct SplitEval {
  double loss = 0.0;
  double accuracy = 0.0;
};

SplitEval evaluate_split(const FusionLayer& fusion, std::span<const double> fparams,
                         std::span<const double> decoder, const SyntheticTask& task,
                         std::span<const std::size_t> idx, LossKind kind, double gamma,
                         std::span<const double> alpha) {
  const Decoder dec{2, fusion.output_dim(), decoder};
  std::vector<double> losses(idx.size());
  std::vector<int> correct(idx.size());
  parallel_for(idx.size(), [&](std::size_t i) {
    const auto& x = task.features[idx[i]];
    const int y = task.labels[idx[i]];
    const auto lg = dec.logits(fusion.forward(fparams, x));
    double d[2];
    losses[i] = classification_loss(lg, y, kind, gamma, alpha[y], d);
    correct[i] = (lg[1] > lg[0] ? 1 : 0) == y;
  });
  SplitEval e;
  if (idx.empty()) return e;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    e.loss += losses[i];
    e.accuracy += correct[i];
  }
  e.loss /= static_cast<double>(idx.size());
  e.accuracy /= static_cast<double>(idx.size());
  return e;
}

}  // namespace

TrainResult train(const FusionLayer& fusion, std::vector<double> initial_params,
                  const SyntheticTask& task, const TaskSplit& split, const TrainConfig& config) {
  config.validate();
  if (initial_params.size() != fusion.num_params())
    fail(ErrorCode::kShape, "initial parameter count does not match the fusion layer");
  if (split.train.empty() || split.validation.empty())
    fail(ErrorCode::kInput, "training needs non-empty train and validation splits");

  const std::size_t H = fusion.output_dim();
  const std::size_t C = 2;
  const std::size_t K = fusion.num_params();

  // Class weights for the focal loss: inverse class frequency on train.
  std::vector<double> alpha(C, 1.0);
  if (config.loss == LossKind::kFocal) {
    std::vector<double> count(C, 0.0);
    for (std::size_t i : split.train) count[task.labels[i]] += 1.0;
    for (std::size_t c = 0; c < C; ++c)
      alpha[c] = count[c] > 0 ? static_cast<double>(split.train.size()) / (C * count[c]) : 1.0;
  }

  // Parameter vector: fusion params, then decoder weights and biases.
  std::vector<double> params = std::move(initial_params);
  {
    auto rng = make_rng(config.seed, "decoder-init");
    const double bound = 1.0 / std::sqrt(static_cast<double>(H));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t i = 0; i < C * H; ++i) params.push_back(u(rng));
    for (std::size_t c = 0; c < C; ++c) params.push_back(0.0);
  }
  auto fparams = [&] { return std::span<const double>(params.data(), K); };
  auto dparams = [&] { return std::span<const double>(params.data() + K, C * H + C); };

  TrainResult result;
  auto record = [&](std::size_t epoch) {
    const auto tr = evaluate_split(fusion, fparams(), dparams(), task, split.train, config.loss,
                                   config.focal_gamma, alpha);
    const auto va = evaluate_split(fusion, fparams(), dparams(), task, split.validation,
                                   config.loss, config.focal_gamma, alpha);
    result.history.push_back({epoch, "train", tr.loss, tr.accuracy});
    result.history.push_back({epoch, "validation", va.loss, va.accuracy});
    return va.loss;
  };

  auto snapshot = [&] {
    TrainedModel m;
    m.fusion_params.assign(params.begin(), params.begin() + static_cast<long>(K));
    m.decoder.assign(params.begin() + static_cast<long>(K), params.end());
    m.classes = C;
    return m;
  };

  result.initial_validation_loss = record(0);
  result.best_validation_loss = result.initial_validation_loss;
  result.best = snapshot();

  Adam adam(params.size(), config.learning_rate);
  auto rng = make_rng(config.seed, "batch-order");
  std::vector<std::size_t> order = split.train;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0, batch = 0; start < order.size();
         start += config.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::size_t B = end - start;
      std::vector<std::vector<double>> grads(B);
      std::vector<double> losses(B);
      const Decoder dec{C, H, dparams()};
      parallel_for(B, [&](std::size_t b) {
        const std::size_t i = order[start + b];
        const auto& x = task.features[i];
        const int y = task.labels[i];
        const auto f = fusion.forward(fparams(), x);
        const auto lg = dec.logits(f);
        std::vector<double> dl(C);
        losses[b] = classification_loss(lg, y, config.loss, config.focal_gamma, alpha[y], dl);
        auto& g = grads[b];
        g.assign(params.size(), 0.0);
        std::vector<double> upstream(H, 0.0);
        for (std::size_t c = 0; c < C; ++c) {
          for (std::size_t h = 0; h < H; ++h) {
            g[K + c * H + h] = dl[c] * f[h];
            upstream[h] += dl[c] * dec.w[c * H + h];
          }
          g[K + C * H + c] = dl[c];
        }
        fusion.backward(fparams(), x, upstream, std::span<double>(g.data(), K));
      });
      std::vector<double> grad(params.size(), 0.0);
      double loss = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        loss += losses[b];
        for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += grads[b][k];
      }
      loss /= static_cast<double>(B);
      if (!std::isfinite(loss))
        fail(ErrorCode::kNonFinite, "non-finite loss at epoch " + std::to_string(epoch) +
                                        ", batch " + std::to_string(batch));
      for (double& g : grad) g /= static_cast<double>(B);
      adam.step(params, grad);
    }

    const double val = record(epoch);
    result.epochs_run = epoch;
    if (val < result.best_validation_loss) {
      result.best_validation_loss = val;
      result.best_epoch = epoch;
      result.best = snapshot();
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

Metrics evaluate(const FusionLayer& fusion, const TrainedModel& model,
                 const SyntheticTask& task, std::span<const std::size_t> indices) {
  const Decoder dec{model.classes, fusion.output_dim(), model.decoder};
  std::vector<double> scores(indices.size());
  std::vector<int> preds(indices.size()), labels(indices.size());
  parallel_for(indices.size(), [&](std::size_t i) {
    const auto lg = dec.logits(fusion.forward(model.fusion_params, task.features[indices[i]]));
    scores[i] = 1.0 / (1.0 + std::exp(lg[0] - lg[1]));
    preds[i] = lg[1] > lg[0] ? 1 : 0;
    labels[i] = task.labels[indices[i]];
  });
  Metrics m;
  if (indices.empty()) return m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) correct += preds[i] == labels[i];
  m.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
  m.f1 = f1_score(preds, labels);
  m.roc_auc = roc_auc_checked(scores, labels);
  return m;
}

std::string history_csv(const std::vector<EpochMetrics>& history) {
  std::ostringstream out;
  out << "epoch,split,loss,accuracy\n";
  for (const auto& e : history)
    out << e.epoch << ',' << e.split << ',' << detail::format_double(e.loss) << ','
        << detail::format_double(e.accuracy) << '\n';
  return out.str();
}

}  // namespace qfl
