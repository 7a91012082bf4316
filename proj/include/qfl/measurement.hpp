#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qfl/gates.hpp"
#include "qfl/qfl.hpp"

namespace qfl {

enum class PauliPlane { kXZ, kXY, kYZ };

const char* plane_name(PauliPlane plane);
PauliPlane plane_from_name(std::string_view name);

// cos(angle)·σ_a + sin(angle)·σ_b on one qubit, (a, b) given by the plane.
struct Observable {
  PauliPlane plane = PauliPlane::kXZ;
  double angle = 0.0;
  std::size_t target = 0;

  ComplexMatrix matrix() const;

  struct Term {
    double coefficient;
    Axis axis;
  };
  std::vector<Term> pauli_terms() const;
};

struct ObservablePlan {
  std::vector<Observable> observables;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return observables.size(); }
};

// Plane, angle in [0, 2π) and target in [0, n_qubits) drawn per observable.
ObservablePlan draw_plan(std::size_t count, std::size_t n_qubits, std::uint64_t seed);

std::string plan_to_json(const ObservablePlan& plan);
ObservablePlan plan_from_json(std::string_view text);

// 2x2 reduced density matrix of one qubit.
ComplexMatrix reduced_density(const QuantumState& state, std::size_t qubit);

double expectation_exact(const QuantumState& state, const Observable& obs);

// Hoeffding-backed shot budget N = ceil(c · m · ln(2m/δ) / ε²).
struct ShotEstimator {
  double epsilon = 0.1;
  double delta = 0.05;
  std::size_t terms = 2;  // m
  double hoeffding_constant = 2.0;
  std::optional<std::size_t> shots_override;

  std::size_t total_shots() const;
  void validate() const;
};

// N_i ∝ |c_i| by largest remainder; every nonzero term gets at least one shot.
std::vector<std::size_t> allocate_shots(std::span<const double> coefficients,
                                        std::size_t total);

// Per Pauli term: rotate the target into that Pauli's eigenbasis, draw N_i
// computational-basis outcomes from the Born distribution, average the ±1
// records, and combine with the coefficients.
double estimate_shots(const QuantumState& state, const Observable& obs,
                      const ShotEstimator& estimator, std::uint64_t seed);

struct SampleBoundReport {
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t shots = 0;
  double exact = 0.0;
  double fraction_within = 0.0;
  double required_fraction = 0.0;
  double mean_estimate = 0.0;
  bool passed = false;
};

SampleBoundReport validate_sample_bound(double epsilon, double delta, std::size_t trials,
                                            std::uint64_t seed,
                                            std::optional<std::size_t> shots_override = {});

// Fixed single-qubit state and observable used by the sample-bound check.
QuantumState sample_bound_state();
Observable sample_bound_observable();

struct MeasurementMode {
  std::optional<std::size_t> shots;  // empty = exact expectations
  std::uint64_t seed = 0;
};

// Hadamard prefix, then F_P(x), applied to |0...0>; one expectation per plan
// entry. Observables must target index-register qubits.
std::vector<double> fused_output(const QflCircuitSpec& spec, std::span<const double> x,
                                 const ObservablePlan& plan, const MeasurementMode& mode = {});

// Same, from an already assembled state.
std::vector<double> measure_plan(const QuantumState& state, const ObservablePlan& plan,
                                 const MeasurementMode& mode = {});

}  // namespace qfl
