#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qecmag/fisher.h"
#include "qecmag/protocol.h"

namespace qecmag {

/// Lookup table from syndrome (stabilizer outcome pattern) to the correction
/// bitmask. Qubit 1 is the first tensor factor; bit (n_physical - i) of a
/// mask refers to qubit i. Syndrome index counts stabilizer outcomes in order
/// Z1Z2 ... Z(n-1)Zn with outcome -1 contributing a set bit, Z1Z2 most
/// significant.
struct DecodingTable {
  int n_physical = 0;
  bool ancilla_assisted = false;
  ProbeBasis basis = ProbeBasis::Z;
  std::vector<std::uint32_t> correction;

  int stabilizer_count() const { return n_physical - 1; }
  int syndrome_count() const { return 1 << stabilizer_count(); }
};

/// Builds the decoding table of the n-qubit repetition code. Ancilla-assisted
/// tables map each error pattern on qubits 2..n to its unique syndrome;
/// ancilla-free tables pick the minimum-weight consistent error, breaking
/// even-weight ties toward the error containing the lowest-index qubit.
DecodingTable build_decoding_table(int n_physical, ProbeBasis basis,
                                   bool ancilla_assisted);

/// Aligned text table with the stabilizer outcomes and both the ancilla-free
/// and ancilla-assisted correction columns.
std::string format_decoding_table(int n_physical,
                                  ProbeBasis basis = ProbeBasis::Z);

/// One syndrome class of an exact protocol simulation: occurrence
/// probability, count of contributing syndromes, and the common normalized
/// post-correction logical amplitudes (gauge: c0 real non-negative).
struct ProtocolClass {
  int k = 0;
  double probability = 0.0;
  int syndrome_count = 0;
  std::complex<double> c0, c1;
  /// Max deviation of any member syndrome's normalized state from the class
  /// representative (up to global phase).
  double max_intra_class_deviation = 0.0;
};

/// Exact statevector simulation of one protocol run: GHZ preparation, field
/// evolution on the sensing qubits, stabilizer projection, and table-driven
/// correction. Limited to 14 total qubits.
std::vector<ProtocolClass> simulate_protocol(const ProbeSpec& probe,
                                             const MagneticField& field,
                                             EvolutionTime t);

/// QFIM of the evolved N-qubit GHZ pure state with state derivatives taken by
/// central finite differences (step 1e-6). Limited to 12 qubits.
FisherMatrix oracle_qfim(ProbeBasis basis, int n, const MagneticField& field,
                         EvolutionTime t);

}  // namespace qecmag
