#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "qfl/optim.hpp"
#include "qfl/random.hpp"
#include "qfl/training.hpp"

using namespace qfl;

namespace {

// Passes the features straight to the decoder.
class IdentityFusion final : public FusionLayer {
 public:
  explicit IdentityFusion(std::size_t dim) : dim_(dim) {}
  std::size_t output_dim() const override { return dim_; }
  std::size_t num_params() const override { return 0; }
  std::vector<double> forward(std::span<const double>, std::span<const double> x) const override {
    return {x.begin(), x.end()};
  }
  void backward(std::span<const double>, std::span<const double>, std::span<const double>,
                std::span<double>) const override {}

 private:
  std::size_t dim_;
};

struct QflSetup {
  QflCircuitSpec spec;
  ObservablePlan plan;
  std::vector<double> theta;
};

QflSetup default_qfl(std::size_t md, std::size_t depth, std::size_t layers, std::uint64_t seed,
                     InitMode init = InitMode::kSmallAngle) {
  const auto layout = RegisterLayout::for_features(md);
  const AnsatzSpec a{layout.index_qubits, layers, Entangler::kRing};
  auto rng = make_rng(seed, "qfl-init");
  auto theta = init_parameters((depth + 1) * a.params_per_block(), init, rng);
  auto spec = QflCircuitSpec::with_ansatz(md, depth, layers, Entangler::kRing, theta);
  return {spec, draw_plan(4, layout.index_qubits, derive_seed(seed, "plan")), theta};
}

ObservablePlan z_on(std::size_t q) {
  ObservablePlan p;
  p.observables.push_back({PauliPlane::kXZ, kPi / 2, q});
  return p;
}

}  // namespace

TEST_CASE("adam first step moves by the learning rate against the gradient sign") {
  Adam adam(2, 0.1);
  std::vector<double> p{1.0, -1.0};
  const std::vector<double> g{3.0, -0.5};
  adam.step(p, g);
  CHECK(p[0] == doctest::Approx(0.9));
  CHECK(p[1] == doctest::Approx(-0.9));
  CHECK(adam.steps() == 1);
}

TEST_CASE("parameter shift on Ry gives -sin(theta) for sigma-z") {
  for (double t : {0.0, 0.4, 1.9, -2.5}) {
    Circuit c(1);
    c.append(Gate::ry(0, t).with_param(0));
    const auto g = parameter_shift(c, QuantumState(1), z_on(0), 0);
    REQUIRE(g.size() == 1);
    CHECK(g[0] == doctest::Approx(-std::sin(t)).epsilon(1e-12));
  }
}

TEST_CASE("parameter shift refuses unsupported gates") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInput;
  };
  const auto plan = z_on(0);
  Circuit controlled(2);
  controlled.append(Gate::ry(1, 0.3).controlled(0).with_param(0));
  CHECK(code_of([&] { parameter_shift(controlled, QuantumState(2), plan, 0); }) ==
        ErrorCode::kUnsupportedGradient);

  Circuit shared(1);
  shared.append(Gate::rx(0, 0.3).with_param(0));
  shared.append(Gate::rz(0, 0.3).with_param(0));
  CHECK(code_of([&] { parameter_shift(shared, QuantumState(1), plan, 0); }) ==
        ErrorCode::kUnsupportedGradient);

  Circuit phase(1);
  phase.append(Gate::phase_exp(Axis::kY, 0, 0.3).with_param(0));
  CHECK(code_of([&] { parameter_shift(phase, QuantumState(1), plan, 0); }) ==
        ErrorCode::kUnsupportedGradient);

  Circuit absent(1);
  absent.append(Gate::rx(0, 0.3).with_param(0));
  CHECK(code_of([&] { parameter_shift(absent, QuantumState(1), plan, 3); }) ==
        ErrorCode::kUnsupportedGradient);

  const auto fixed = QflCircuitSpec::with_fixed_blocks(1, {ComplexMatrix::identity(2), ComplexMatrix::identity(2)});
  const std::vector<double> x{0.3}, up{1.0};
  CHECK(code_of([&] { parameter_shift_gradient(fixed, x, plan, up, 0); }) ==
        ErrorCode::kUnsupportedGradient);
}

TEST_CASE("parameter shift matches central finite differences") {
  const auto s = default_qfl(3, 2, 5, 7, InitMode::kFullRange);
  const QflFusion fusion(s.spec, s.plan);
  auto rng = make_rng(8, "test-fd");
  std::uniform_real_distribution<double> u(-1, 1);
  const double h = 1e-4;
  double worst = 0.0;
  bool ok = true;
  for (int n = 0; n < 5; ++n) {
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    std::vector<double> up(fusion.output_dim());
    for (double& v : up) v = u(rng);
    std::vector<double> grad(fusion.num_params(), 0.0);
    fusion.backward(s.theta, x, up, grad);
    for (std::size_t k = 0; k < fusion.num_params(); ++k) {
      auto plus = s.theta, minus = s.theta;
      plus[k] += h;
      minus[k] -= h;
      const auto fp = fusion.forward(plus, x), fm = fusion.forward(minus, x);
      double fd = 0.0;
      for (std::size_t j = 0; j < up.size(); ++j) fd += up[j] * (fp[j] - fm[j]) / (2 * h);
      const double err = std::abs(fd - grad[k]);
      worst = std::max(worst, err);
      ok = ok && (err <= 1e-7 || err <= 1e-5 * std::abs(fd));
    }
  }
  INFO("worst abs error " << worst);
  CHECK(ok);
}

TEST_CASE("task generation") {
  const auto t = generate_task(2, 1, 2, 400, 5);
  CHECK(t.size() == 400);
  CHECK(t.num_features() == 2);
  std::size_t ones = 0;
  for (int y : t.labels) ones += static_cast<std::size_t>(y);
  CHECK(ones >= 140);
  CHECK(ones <= 260);
  for (const auto& x : t.features)
    for (double v : x) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  // Some planted monomial spans both modalities.
  bool cross = false;
  for (const auto& term : t.planted) cross = cross || (term.exponent[0] > 0 && term.exponent[1] > 0);
  CHECK(cross);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(t.labels[i] == (t.planted_value(t.features[i]) > t.threshold ? 1 : 0));

  CHECK_THROWS_AS(generate_task(1, 2, 2, 100, 1), Error);
  CHECK_THROWS_AS(generate_task(4, 2, 2, 100, 1), Error);
  CHECK_THROWS_AS(generate_task(2, 1, 5, 100, 1), Error);

  const auto s = split_task(t, 3);
  CHECK(s.train.size() == 240);
  CHECK(s.validation.size() == 80);
  CHECK(s.test.size() == 80);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 400);
}

TEST_CASE("metric primitives") {
  const double perfect[] = {0.1, 0.2, 0.8, 0.9};
  const int lab[] = {0, 0, 1, 1};
  CHECK(roc_auc(perfect, lab) == 1.0);
  const double inverted[] = {0.9, 0.8, 0.2, 0.1};
  CHECK(roc_auc(inverted, lab) == 0.0);
  const double tied[] = {0.5, 0.5, 0.5, 0.5};
  CHECK(roc_auc(tied, lab) == 0.5);
  const int one_class[] = {1, 1, 1, 1};
  CHECK_FALSE(roc_auc_checked(perfect, one_class).has_value());
  CHECK_THROWS_AS(roc_auc(perfect, one_class), Error);

  auto rng = make_rng(1, "test-auc");
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> sc(1000);
  std::vector<int> y(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    sc[i] = u(rng);
    y[i] = static_cast<int>(rng() & 1);
  }
  CHECK(std::abs(roc_auc(sc, y) - 0.5) < 0.05);

  const int pred[] = {1, 0, 1, 1};
  // tp = 2, fp = 1, fn = 0
  CHECK(f1_score(pred, lab) == doctest::Approx(0.8));
}

TEST_CASE("losses and their gradients") {
  const double logits[] = {0.3, -0.2};
  double dl[2];
  const double ce = classification_loss(logits, 0, LossKind::kCrossEntropy, 0, 1, dl);
  const double p0 = std::exp(0.3) / (std::exp(0.3) + std::exp(-0.2));
  CHECK(ce == doctest::Approx(-std::log(p0)));
  CHECK(dl[0] == doctest::Approx(p0 - 1));
  CHECK(dl[1] == doctest::Approx(1 - p0));

  // Focal with gamma 0 and alpha 1 is cross-entropy.
  double df[2];
  CHECK(classification_loss(logits, 0, LossKind::kFocal, 0, 1, df) == doctest::Approx(ce));
  CHECK(df[0] == doctest::Approx(dl[0]));

  // Finite-difference check of the focal gradient.
  const double h = 1e-6;
  double g[2], tmp[2];
  classification_loss(logits, 1, LossKind::kFocal, 2.0, 0.7, g);
  for (int k = 0; k < 2; ++k) {
    double lp[2] = {logits[0], logits[1]}, lm[2] = {logits[0], logits[1]};
    lp[k] += h;
    lm[k] -= h;
    const double fd = (classification_loss(lp, 1, LossKind::kFocal, 2.0, 0.7, tmp) -
                       classification_loss(lm, 1, LossKind::kFocal, 2.0, 0.7, tmp)) / (2 * h);
    CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
  }
  // Saturated logits keep a finite gradient.
  const double sat[] = {800.0, -800.0};
  classification_loss(sat, 0, LossKind::kFocal, 2.0, 1.0, g);
  CHECK(std::isfinite(g[0]));
  CHECK(std::isfinite(g[1]));
  CHECK(loss_from_name("focal") == LossKind::kFocal);
  CHECK_THROWS_AS(loss_from_name("hinge"), Error);
}

TEST_CASE("zero-epoch run records the initial state only") {
  const auto task = generate_task(2, 1, 2, 60, 2);
  const auto split = split_task(task, 2);
  const auto s = default_qfl(2, 1, 2, 2);
  TrainConfig cfg;
  cfg.max_epochs = 0;
  const auto r = train(QflFusion(s.spec, s.plan), s.theta, task, split, cfg);
  CHECK(r.history.size() == 2);
  CHECK(r.epochs_run == 0);
  CHECK(r.best_validation_loss == r.initial_validation_loss);
  CHECK(r.best.fusion_params == s.theta);
  // Decoder weights drawn in [-1/sqrt(H), 1/sqrt(H)], biases at zero.
  REQUIRE(r.best.decoder.size() == 2 * 4 + 2);
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(r.best.decoder[i]) <= 0.5);
  CHECK(r.best.decoder[8] == 0.0);
  CHECK(history_csv(r.history).rfind("epoch,split,loss,accuracy\n", 0) == 0);

  cfg.patience = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("training is deterministic and respects the seed") {
  const auto task = generate_task(2, 1, 2, 80, 3);
  const auto split = split_task(task, 3);
  const auto s = default_qfl(2, 1, 2, 3);
  TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.learning_rate = 0.02;
  const QflFusion f(s.spec, s.plan);
  const auto a = train(f, s.theta, task, split, cfg);
  const auto b = train(f, s.theta, task, split, cfg);
  CHECK(history_csv(a.history) == history_csv(b.history));
  CHECK(a.best.fusion_params == b.best.fusion_params);
  cfg.seed = 1;
  CHECK(history_csv(train(f, s.theta, task, split, cfg).history) != history_csv(a.history));
}

TEST_CASE("linear control task is learned by a linear decoder") {
  const auto task = generate_task(2, 2, 1, 400, 11);
  const auto split = split_task(task, 11);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 80;
  cfg.patience = 80;
  const IdentityFusion id(task.num_features());
  const auto r = train(id, {}, task, split, cfg);
  const auto m = evaluate(id, r.best, task, split.test);
  INFO("test accuracy " << m.accuracy);
  CHECK(m.accuracy >= 0.95);
  REQUIRE(m.roc_auc.has_value());
  CHECK(*m.roc_auc > 0.98);
}

TEST_CASE("QFL smoke run halves the training loss at a raised learning rate") {
  const auto task = generate_task(2, 1, 2, 400, derive_seed(0, "task"));
  const auto split = split_task(task, 0);
  const auto s = default_qfl(2, 2, 5, 0);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 10;
  cfg.patience = 10;
  const auto r = train(QflFusion(s.spec, s.plan), s.theta, task, split, cfg);
  const double first = r.history.front().loss;
  const double last = r.history[r.history.size() - 2].loss;  // last train row
  INFO("train loss " << first << " -> " << last);
  CHECK(r.history.front().split == "train");
  CHECK(last <= 0.5 * first);
  CHECK(r.best_validation_loss < r.initial_validation_loss);
}
