#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qecmag/field.h"

namespace qecmag {

enum class FieldDimension { TwoD, ThreeD };

/// Descriptor of one protocol variant: N sensing qubits prepared in a GHZ
/// state of the given basis, with or without one field-shielded ancilla.
struct ProbeSpec {
  ProbeSpec(int n, ProbeBasis basis, bool ancilla_assisted,
            FieldDimension dim = FieldDimension::TwoD);

  static ProbeSpec ancilla_assisted_z(int n) { return {n, ProbeBasis::Z, true}; }
  static ProbeSpec ancilla_assisted_x(int n) { return {n, ProbeBasis::X, true}; }
  static ProbeSpec ancilla_free_z(int n) { return {n, ProbeBasis::Z, false}; }
  static ProbeSpec three_d_z(int n) {
    return {n, ProbeBasis::Z, true, FieldDimension::ThreeD};
  }

  int total_qubits() const { return n + (ancilla_assisted ? 1 : 0); }

  int n;
  ProbeBasis basis;
  bool ancilla_assisted;
  FieldDimension dim;
};

/// Per-syndrome-class statistics of one protocol run: detection probability
/// p, post-correction relative phase phi, and string-operator outcome
/// probabilities q_plus / q_minus.
struct OutcomeModel {
  std::vector<int> k_values;
  std::vector<double> p;
  std::vector<double> phi;
  std::vector<double> q_plus;
  std::vector<double> q_minus;
};

/// Unnormalized logical-subspace amplitudes of a post-correction state.
struct LogicalAmplitudes {
  std::complex<double> c0, c1;
};

/// Syndrome-class probability distribution (fills k_values and p only).
OutcomeModel syndrome_distribution(const ProbeSpec& probe,
                                   const MagneticField& field, EvolutionTime t);

/// Post-error-correction relative phases per class, ancilla-assisted probes
/// only (ancilla-free post-correction states are not pure phase rotations).
std::vector<double> pec_phases(const ProbeSpec& probe, const MagneticField& field,
                               EvolutionTime t);

/// Outcome probabilities of the +/- string-operator measurement for a state
/// carrying relative phase phi.
std::pair<double, double> string_measurement_probs(double phi);

/// Unnormalized post-correction logical amplitudes of the ancilla-free
/// protocol after detecting k errors, 0 <= k <= floor(n/2).
LogicalAmplitudes pec_state_ancilla_free(const ProbeSpec& probe,
                                         const MagneticField& field,
                                         EvolutionTime t, int k);

/// Full outcome model: probabilities, phases, and string-measurement
/// probabilities for every syndrome class of the variant.
OutcomeModel outcome_model(const ProbeSpec& probe, const MagneticField& field,
                           EvolutionTime t);

/// JSON object with keys k, p, phi, q_plus, q_minus.
std::string to_json_string(const OutcomeModel& model);

}  // namespace qecmag
