#include "doctest.h"
#include "json.hpp"
#include "qfl/error.hpp"
#include "qfl/experiments.hpp"

using namespace qfl;
using nlohmann::json;

namespace {

ErrorCode code_of(const ExperimentRequest& req) {
  try {
    resolve_config(req);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInput;
}

ExperimentRequest req(Command c, std::string cfg) {
  ExperimentRequest r;
  r.command = c;
  r.config_json = std::move(cfg);
  return r;
}

const std::string kSmallVerify = R"({"features": [1], "depths": [1, 2], "trials": 2, "torus_points": 4, "layers": 2})";

}  // namespace

TEST_CASE("command names") {
  for (auto c : {Command::kVerifyExpressivity, Command::kTorusScan, Command::kSeparation,
                 Command::kSampleBound, Command::kTrainSynthetic})
    CHECK(command_from_name(command_name(c)) == c);
  CHECK_THROWS_AS(command_from_name("fit"), Error);
}

TEST_CASE("config errors are reported as config errors") {
  CHECK(code_of(req(Command::kSampleBound, "not json")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kSampleBound, "[1]")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kSampleBound, R"({"epsilonn": 0.1})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kSampleBound, R"({"epsilon": "big"})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kSampleBound, R"({"delta": 1.5})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kSampleBound, R"({"trials": 10})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kSampleBound, R"({"command": "separation"})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kSampleBound, R"({"seed": -1})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kSampleBound, R"({"shots": 0})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kTorusScan, R"({"num_features": 3})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kTrainSynthetic, R"({"modalities": 4, "dim": 2})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kTrainSynthetic, R"({"loss": "hinge"})")) == ErrorCode::kConfig);
  CHECK(code_of(req(Command::kVerifyExpressivity, R"({"entangler": "star"})")) == ErrorCode::kConfig);
}

TEST_CASE("echo fills defaults and overrides win") {
  auto r = req(Command::kTrainSynthetic, R"({"seed": 4, "learning_rate": 0.01})");
  auto echo = json::parse(resolve_config(r));
  CHECK(echo["command"] == "train-synthetic");
  CHECK(echo["seed"] == 4);
  CHECK(echo["shots"] == "exact");
  CHECK(echo["learning_rate"] == 0.01);
  CHECK(echo["batch_size"] == 32);
  CHECK(echo["max_epochs"] == 10);
  CHECK(echo["patience"] == 5);
  r.seed = 9;
  r.shots = 100;
  echo = json::parse(resolve_config(r));
  CHECK(echo["seed"] == 9);
  CHECK(echo["shots"] == 100);
  // The echo is itself a valid config that resolves to the same echo.
  const auto again = req(Command::kTrainSynthetic, echo.dump());
  CHECK(json::parse(resolve_config(again)) == echo);
}

TEST_CASE("exact-mode runs are byte-identical and the echo comes first") {
  const auto r = req(Command::kVerifyExpressivity, kSmallVerify);
  const auto a = run_experiment(r);
  const auto b = run_experiment(r);
  CHECK(a.passed);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  CHECK(a.artifacts.front().name == "config_echo.json");
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].name == b.artifacts[i].name);
    CHECK(a.artifacts[i].data == b.artifacts[i].data);
  }
  // Rerun from the echo.
  const auto c = run_experiment(req(Command::kVerifyExpressivity, a.artifacts.front().data));
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) CHECK(a.artifacts[i].data == c.artifacts[i].data);
}

TEST_CASE("negative control makes verify-expressivity fail") {
  const auto r = req(Command::kVerifyExpressivity,
                     R"({"features": [1], "depths": [1], "trials": 1, "torus_points": 4, "layers": 2, "negative_control": true})");
  CHECK_FALSE(run_experiment(r).passed);
}

TEST_CASE("sample-bound honours the shot override") {
  auto r = req(Command::kSampleBound, R"({"trials": 100})");
  CHECK(run_experiment(r).passed);
  r.shots = 1;
  r.config_json = R"({"trials": 200, "epsilon": 0.01})";
  CHECK_FALSE(run_experiment(r).passed);
}

TEST_CASE("torus scan writes one grid per depth") {
  const auto res = run_experiment(req(Command::kTorusScan, R"({"depths": [1, 2], "resolution": 9, "layers": 2})"));
  CHECK(res.passed);
  std::vector<std::string> names;
  for (const auto& a : res.artifacts) names.push_back(a.name);
  CHECK(std::find(names.begin(), names.end(), "torus_P1.csv") != names.end());
  CHECK(std::find(names.begin(), names.end(), "torus_P2.csv") != names.end());
  CHECK(std::find(names.begin(), names.end(), "report.json") != names.end());
}
