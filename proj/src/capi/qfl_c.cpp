#include "qfl/qfl_c.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "qfl/error.hpp"
#include "qfl/experiments.hpp"
#include "qfl/gates.hpp"
#include "qfl/stateprep.hpp"

struct qfl_experiment {
  qfl::ExperimentRequest request;
  qfl::ExperimentResult result;
  std::string echo;
  bool ran = false;
};

struct qfl_circuit {
  qfl::Circuit circuit;
  std::string json;
};

struct qfl_state {
  qfl::QuantumState state;
};

namespace {

thread_local std::string g_last_error;

qfl_status to_status(qfl::ErrorCode code) {
  using qfl::ErrorCode;
  switch (code) {
    case ErrorCode::kInput: return QFL_ERR_INPUT;
    case ErrorCode::kShape: return QFL_ERR_SHAPE;
    case ErrorCode::kSize: return QFL_ERR_SIZE;
    case ErrorCode::kContract: return QFL_ERR_CONTRACT;
    case ErrorCode::kInvariance: return QFL_ERR_INVARIANCE;
    case ErrorCode::kDegreeOverflow: return QFL_ERR_DEGREE_OVERFLOW;
    case ErrorCode::kPromise: return QFL_ERR_PROMISE;
    case ErrorCode::kUnsupportedGradient: return QFL_ERR_UNSUPPORTED_GRADIENT;
    case ErrorCode::kNonFinite: return QFL_ERR_NON_FINITE;
    case ErrorCode::kConfig: return QFL_ERR_CONFIG;
    case ErrorCode::kIo: return QFL_ERR_IO;
  }
  return QFL_ERR_INTERNAL;
}

template <class Fn>
qfl_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return QFL_OK;
  } catch (const qfl::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return QFL_ERR_SIZE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QFL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return QFL_ERR_INTERNAL;
  }
}

qfl_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return QFL_ERR_NULL_ARGUMENT;
}

}  // namespace

extern "C" {

const char* qfl_version(void) { return "0.1.0"; }

const char* qfl_status_name(qfl_status s) {
  switch (s) {
    case QFL_OK: return "ok";
    case QFL_ERR_INPUT: return "input";
    case QFL_ERR_SHAPE: return "shape";
    case QFL_ERR_SIZE: return "size";
    case QFL_ERR_CONTRACT: return "contract";
    case QFL_ERR_INVARIANCE: return "invariance";
    case QFL_ERR_DEGREE_OVERFLOW: return "degree_overflow";
    case QFL_ERR_PROMISE: return "promise";
    case QFL_ERR_UNSUPPORTED_GRADIENT: return "unsupported_gradient";
    case QFL_ERR_NON_FINITE: return "non_finite";
    case QFL_ERR_CONFIG: return "config";
    case QFL_ERR_IO: return "io";
    case QFL_ERR_NULL_ARGUMENT: return "null_argument";
    case QFL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* qfl_last_error(void) { return g_last_error.c_str(); }

qfl_status qfl_experiment_create(const char* command, const char* config_json,
                                 qfl_experiment** out) {
  if (!command) return null_arg("command");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto exp = std::make_unique<qfl_experiment>();
    exp->request.command = qfl::command_from_name(command);
    exp->request.config_json = config_json ? config_json : "{}";
    exp->echo = qfl::resolve_config(exp->request);
    *out = exp.release();
  });
}

qfl_status qfl_experiment_set_seed(qfl_experiment* exp, uint64_t seed) {
  if (!exp) return null_arg("experiment");
  return guarded([&] {
    exp->request.seed = seed;
    exp->echo = qfl::resolve_config(exp->request);
  });
}

qfl_status qfl_experiment_set_shots(qfl_experiment* exp, uint64_t shots) {
  if (!exp) return null_arg("experiment");
  return guarded([&] {
    if (shots == 0) {
      exp->request.shots.reset();
      exp->request.shots_exact = true;
    } else {
      exp->request.shots = static_cast<std::size_t>(shots);
      exp->request.shots_exact = false;
    }
    exp->echo = qfl::resolve_config(exp->request);
  });
}

qfl_status qfl_experiment_config_echo(qfl_experiment* exp, const char** out) {
  if (!exp) return null_arg("experiment");
  if (!out) return null_arg("out");
  *out = exp->echo.c_str();
  return QFL_OK;
}

qfl_status qfl_experiment_run(qfl_experiment* exp) {
  if (!exp) return null_arg("experiment");
  return guarded([&] {
    exp->ran = false;
    exp->result = qfl::run_experiment(exp->request);
    exp->ran = true;
  });
}

int qfl_experiment_passed(const qfl_experiment* exp) {
  return exp && exp->ran && exp->result.passed ? 1 : 0;
}

size_t qfl_experiment_artifact_count(const qfl_experiment* exp) {
  return exp && exp->ran ? exp->result.artifacts.size() : 0;
}

const char* qfl_experiment_artifact_name(const qfl_experiment* exp, size_t index) {
  if (!exp || index >= qfl_experiment_artifact_count(exp)) return nullptr;
  return exp->result.artifacts[index].name.c_str();
}

const char* qfl_experiment_artifact_data(const qfl_experiment* exp, size_t index,
                                         size_t* length) {
  if (!exp || index >= qfl_experiment_artifact_count(exp)) return nullptr;
  const auto& a = exp->result.artifacts[index];
  if (length) *length = a.data.size();
  return a.data.c_str();
}

void qfl_experiment_destroy(qfl_experiment* exp) { delete exp; }

qfl_status qfl_circuit_stateprep(const double* x, size_t n, qfl_circuit** out) {
  if (!x && n > 0) return null_arg("x");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new qfl_circuit{qfl::build_S(std::span<const double>(x, n)), {}};
  });
}

qfl_status qfl_circuit_from_json(const char* json, qfl_circuit** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new qfl_circuit{qfl::circuit_from_json(json), {}}; });
}

qfl_status qfl_circuit_to_json(qfl_circuit* c, const char** out) {
  if (!c) return null_arg("circuit");
  if (!out) return null_arg("out");
  return guarded([&] {
    c->json = qfl::circuit_to_json(c->circuit);
    *out = c->json.c_str();
  });
}

size_t qfl_circuit_num_qubits(const qfl_circuit* c) { return c ? c->circuit.num_qubits() : 0; }

size_t qfl_circuit_gate_count(const qfl_circuit* c, const char* label) {
  if (!c) return 0;
  return label ? c->circuit.ledger().count(label) : c->circuit.ledger().total;
}

qfl_status qfl_circuit_to_matrix(const qfl_circuit* c, double* buffer, size_t capacity) {
  if (!c) return null_arg("circuit");
  if (!buffer) return null_arg("buffer");
  return guarded([&] {
    const qfl::ComplexMatrix m = qfl::to_matrix(c->circuit);
    const std::size_t need = 2 * m.rows() * m.cols();
    if (capacity < need)
      qfl::fail(qfl::ErrorCode::kSize, "matrix buffer needs " + std::to_string(need) + " doubles");
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t k = 0; k < m.cols(); ++k) {
        buffer[2 * (r * m.cols() + k)] = m(r, k).real();
        buffer[2 * (r * m.cols() + k) + 1] = m(r, k).imag();
      }
  });
}

void qfl_circuit_destroy(qfl_circuit* c) { delete c; }

qfl_status qfl_state_create(size_t num_qubits, qfl_state** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    if (num_qubits < 1 || num_qubits > 24)
      qfl::fail(qfl::ErrorCode::kSize, "state width must lie in [1, 24] qubits");
    *out = new qfl_state{qfl::QuantumState(num_qubits)};
  });
}

qfl_status qfl_state_apply(qfl_state* s, const qfl_circuit* c) {
  if (!s) return null_arg("state");
  if (!c) return null_arg("circuit");
  return guarded([&] { s->state = qfl::apply(c->circuit, std::move(s->state)); });
}

qfl_status qfl_state_amplitudes(const qfl_state* s, double* buffer, size_t capacity) {
  if (!s) return null_arg("state");
  if (!buffer) return null_arg("buffer");
  return guarded([&] {
    const auto amps = s->state.amplitudes();
    if (capacity < 2 * amps.size())
      qfl::fail(qfl::ErrorCode::kSize,
                "amplitude buffer needs " + std::to_string(2 * amps.size()) + " doubles");
    for (std::size_t i = 0; i < amps.size(); ++i) {
      buffer[2 * i] = amps[i].real();
      buffer[2 * i + 1] = amps[i].imag();
    }
  });
}

void qfl_state_destroy(qfl_state* s) { delete s; }

}  // extern "C"
