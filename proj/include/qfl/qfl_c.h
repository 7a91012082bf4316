/* C interface to the QFL simulator. All handles are opaque; every call that
 * can fail returns a qfl_status and leaves a message for qfl_last_error(). */
#ifndef QFL_QFL_C_H
#define QFL_QFL_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QFL_API __declspec(dllexport)
#else
#define QFL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qfl_status {
  QFL_OK = 0,
  QFL_ERR_INPUT = 1,
  QFL_ERR_SHAPE = 2,
  QFL_ERR_SIZE = 3,
  QFL_ERR_CONTRACT = 4,
  QFL_ERR_INVARIANCE = 5,
  QFL_ERR_DEGREE_OVERFLOW = 6,
  QFL_ERR_PROMISE = 7,
  QFL_ERR_UNSUPPORTED_GRADIENT = 8,
  QFL_ERR_NON_FINITE = 9,
  QFL_ERR_CONFIG = 10,
  QFL_ERR_IO = 11,
  QFL_ERR_NULL_ARGUMENT = 12,
  QFL_ERR_INTERNAL = 13
} qfl_status;

typedef struct qfl_experiment qfl_experiment;
typedef struct qfl_circuit qfl_circuit;
typedef struct qfl_state qfl_state;

QFL_API const char* qfl_version(void);
QFL_API const char* qfl_status_name(qfl_status status);
/* Message of the last failed call on this thread; "" if none. */
QFL_API const char* qfl_last_error(void);

/* --- experiments ---------------------------------------------------------
 * command: "verify-expressivity" | "torus-scan" | "separation" |
 *          "sample-bound" | "train-synthetic". The config is parsed and
 * validated on create. */
QFL_API qfl_status qfl_experiment_create(const char* command, const char* config_json,
                                         qfl_experiment** out);
QFL_API qfl_status qfl_experiment_set_seed(qfl_experiment* exp, uint64_t seed);
/* shots == 0 selects exact expectations. */
QFL_API qfl_status qfl_experiment_set_shots(qfl_experiment* exp, uint64_t shots);
/* Resolved config (defaults filled, seed and shots included) as JSON. */
QFL_API qfl_status qfl_experiment_config_echo(qfl_experiment* exp, const char** out);
QFL_API qfl_status qfl_experiment_run(qfl_experiment* exp);
/* 1 if the last run passed, 0 otherwise. */
QFL_API int qfl_experiment_passed(const qfl_experiment* exp);
QFL_API size_t qfl_experiment_artifact_count(const qfl_experiment* exp);
QFL_API const char* qfl_experiment_artifact_name(const qfl_experiment* exp, size_t index);
QFL_API const char* qfl_experiment_artifact_data(const qfl_experiment* exp, size_t index,
                                                 size_t* length);
QFL_API void qfl_experiment_destroy(qfl_experiment* exp);

/* --- circuits and states ------------------------------------------------- */

/* Multiplexed state preparation S(x) for features in [-1, 1]. */
QFL_API qfl_status qfl_circuit_stateprep(const double* x, size_t n, qfl_circuit** out);
QFL_API qfl_status qfl_circuit_from_json(const char* json, qfl_circuit** out);
QFL_API qfl_status qfl_circuit_to_json(qfl_circuit* c, const char** out);
QFL_API size_t qfl_circuit_num_qubits(const qfl_circuit* c);
QFL_API size_t qfl_circuit_gate_count(const qfl_circuit* c, const char* label);
/* Dense unitary, row-major, interleaved (re, im); buffer holds 2·4^n doubles. */
QFL_API qfl_status qfl_circuit_to_matrix(const qfl_circuit* c, double* buffer, size_t capacity);
QFL_API void qfl_circuit_destroy(qfl_circuit* c);

QFL_API qfl_status qfl_state_create(size_t num_qubits, qfl_state** out);
QFL_API qfl_status qfl_state_apply(qfl_state* s, const qfl_circuit* c);
/* Interleaved (re, im); buffer holds 2·2^n doubles. */
QFL_API qfl_status qfl_state_amplitudes(const qfl_state* s, double* buffer, size_t capacity);
QFL_API void qfl_state_destroy(qfl_state* s);

#ifdef __cplusplus
}
#endif

#endif /* QFL_QFL_C_H */
