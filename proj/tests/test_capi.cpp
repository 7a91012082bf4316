#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "qfl/qfl_c.h"

TEST_CASE("status names and version") {
  CHECK(std::string(qfl_status_name(QFL_OK)) == "ok");
  CHECK(std::strlen(qfl_version()) > 0);
}

TEST_CASE("experiment lifecycle") {
  qfl_experiment* e = nullptr;
  REQUIRE(qfl_experiment_create("sample-bound", "{\"trials\": 100}", &e) == QFL_OK);
  REQUIRE(e != nullptr);
  CHECK(qfl_experiment_set_seed(e, 3) == QFL_OK);
  const char* echo = nullptr;
  REQUIRE(qfl_experiment_config_echo(e, &echo) == QFL_OK);
  CHECK(std::string(echo).find("\"seed\": 3") != std::string::npos);
  CHECK(qfl_experiment_run(e) == QFL_OK);
  CHECK(qfl_experiment_passed(e) == 1);
  REQUIRE(qfl_experiment_artifact_count(e) >= 2);
  CHECK(std::string(qfl_experiment_artifact_name(e, 0)) == "config_echo.json");
  std::size_t len = 0;
  const char* data = qfl_experiment_artifact_data(e, 0, &len);
  CHECK(std::string(data, len) == std::string(echo));
  CHECK(qfl_experiment_artifact_name(e, 99) == nullptr);
  qfl_experiment_destroy(e);
}

TEST_CASE("experiment errors") {
  qfl_experiment* e = nullptr;
  CHECK(qfl_experiment_create("bogus", "{}", &e) == QFL_ERR_CONFIG);
  CHECK(e == nullptr);
  CHECK(std::strlen(qfl_last_error()) > 0);
  CHECK(qfl_experiment_create("sample-bound", "{\"nope\": 1}", &e) == QFL_ERR_CONFIG);
  CHECK(qfl_experiment_create(nullptr, "{}", &e) == QFL_ERR_NULL_ARGUMENT);
  CHECK(qfl_experiment_create("sample-bound", "{}", nullptr) == QFL_ERR_NULL_ARGUMENT);
  CHECK(qfl_experiment_run(nullptr) == QFL_ERR_NULL_ARGUMENT);
  qfl_experiment_destroy(nullptr);
}

TEST_CASE("state preparation through the C API") {
  const double x[] = {0.0};
  qfl_circuit* c = nullptr;
  REQUIRE(qfl_circuit_stateprep(x, 1, &c) == QFL_OK);
  CHECK(qfl_circuit_num_qubits(c) == 2);
  CHECK(qfl_circuit_gate_count(c, "cRy") == 1);
  CHECK(qfl_circuit_gate_count(c, nullptr) == 1);

  std::vector<double> m(2 * 16);
  REQUIRE(qfl_circuit_to_matrix(c, m.data(), m.size()) == QFL_OK);
  // [[1,0,0,0],[0,1,0,0],[0,0,0,-1],[0,0,1,0]]
  CHECK(std::abs(m[2 * (2 * 4 + 3)] + 1.0) < 1e-15);
  CHECK(std::abs(m[2 * (3 * 4 + 2)] - 1.0) < 1e-15);
  CHECK(qfl_circuit_to_matrix(c, m.data(), 3) == QFL_ERR_SIZE);

  qfl_state* s = nullptr;
  REQUIRE(qfl_state_create(2, &s) == QFL_OK);
  std::vector<double> amp(8);
  CHECK(qfl_state_apply(s, c) == QFL_OK);
  REQUIRE(qfl_state_amplitudes(s, amp.data(), amp.size()) == QFL_OK);
  CHECK(amp[0] == 1.0);

  const char* text = nullptr;
  REQUIRE(qfl_circuit_to_json(c, &text) == QFL_OK);
  qfl_circuit* back = nullptr;
  REQUIRE(qfl_circuit_from_json(text, &back) == QFL_OK);
  CHECK(qfl_circuit_gate_count(back, nullptr) == 1);

  qfl_state* wrong = nullptr;
  REQUIRE(qfl_state_create(3, &wrong) == QFL_OK);
  CHECK(qfl_state_apply(wrong, c) != QFL_OK);

  const double bad[] = {1.5};
  qfl_circuit* none = nullptr;
  CHECK(qfl_circuit_stateprep(bad, 1, &none) == QFL_ERR_INPUT);
  CHECK(qfl_circuit_from_json("{", &none) == QFL_ERR_INPUT);
  CHECK(qfl_state_create(40, &wrong) != QFL_OK);

  qfl_state_destroy(s);
  qfl_state_destroy(wrong);
  qfl_circuit_destroy(c);
  qfl_circuit_destroy(back);
}
