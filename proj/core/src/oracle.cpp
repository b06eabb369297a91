#include "qecmag/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace qecmag {

namespace {

constexpr int kSimulationQubitLimit = 14;
constexpr int kQfimQubitLimit = 12;
constexpr double kQfimStep = 1e-6;
constexpr double kNegligibleClass = 1e-30;

using Amplitudes = std::vector<std::complex<double>>;

int bit_position(int n_qubits, int qubit) { return n_qubits - qubit; }

/// Applies a single-qubit operator to the given 1-based qubit.
void apply_single_qubit(Amplitudes& amp, int n_qubits, int qubit,
                        const UnitaryElements& u) {
  const std::size_t stride = std::size_t{1} << bit_position(n_qubits, qubit);
  for (std::size_t base = 0; base < amp.size(); base += 2 * stride) {
    for (std::size_t offset = 0; offset < stride; ++offset) {
      const std::size_t i0 = base + offset;
      const std::size_t i1 = i0 + stride;
      const std::complex<double> a0 = amp[i0];
      const std::complex<double> a1 = amp[i1];
      amp[i0] = u.u00 * a0 + u.u01 * a1;
      amp[i1] = u.u10 * a0 + u.u11 * a1;
    }
  }
}

void apply_hadamard_all(Amplitudes& amp, int n_qubits) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const UnitaryElements h{{inv_sqrt2, 0.0},
                          {inv_sqrt2, 0.0},
                          {inv_sqrt2, 0.0},
                          {-inv_sqrt2, 0.0}};
  for (int qubit = 1; qubit <= n_qubits; ++qubit) {
    apply_single_qubit(amp, n_qubits, qubit, h);
  }
}

Amplitudes ghz_z(int n_qubits) {
  Amplitudes amp(std::size_t{1} << n_qubits);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  amp.front() = inv_sqrt2;
  amp.back() = inv_sqrt2;
  return amp;
}

/// Syndrome of a computational basis string: bit j set iff stabilizer
/// Z_(j+1) Z_(j+2) has outcome -1, with the first stabilizer most significant.
std::uint32_t syndrome_of_string(std::uint32_t string, int n_qubits) {
  std::uint32_t syndrome = 0;
  for (int j = 0; j < n_qubits - 1; ++j) {
    const int hi = n_qubits - 1 - j;
    const unsigned b0 = (string >> hi) & 1u;
    const unsigned b1 = (string >> (hi - 1)) & 1u;
    syndrome = (syndrome << 1) | (b0 ^ b1);
  }
  return syndrome;
}

/// The basis string with first qubit 0 consistent with the syndrome; the
/// other consistent string is its bitwise complement.
std::uint32_t representative_string(std::uint32_t syndrome, int n_qubits) {
  std::uint32_t string = 0;
  unsigned current = 0;
  for (int j = 0; j < n_qubits - 1; ++j) {
    current ^= (syndrome >> (n_qubits - 2 - j)) & 1u;
    string = (string << 1) | current;
  }
  return string;  // first qubit's bit is the implicit leading zero
}

int lowest_flipped_qubit(std::uint32_t mask, int n_qubits) {
  for (int qubit = 1; qubit <= n_qubits; ++qubit) {
    if ((mask >> bit_position(n_qubits, qubit)) & 1u) return qubit;
  }
  return n_qubits + 1;
}

}  // namespace

DecodingTable build_decoding_table(int n_physical, ProbeBasis basis,
                                   bool ancilla_assisted) {
  if (n_physical < 2) {
    throw validation_error("decoding table requires at least two qubits");
  }
  if (n_physical > kSimulationQubitLimit) {
    throw size_limit_error("decoding table above the qubit budget");
  }
  DecodingTable table;
  table.n_physical = n_physical;
  table.ancilla_assisted = ancilla_assisted;
  table.basis = basis;
  const std::uint32_t syndromes = std::uint32_t{1} << (n_physical - 1);
  table.correction.assign(syndromes, 0);

  if (ancilla_assisted) {
    // Error patterns act on qubits 2..n only, so each of the 2^(n-1)
    // patterns owns a unique syndrome.
    std::vector<bool> seen(syndromes, false);
    for (std::uint32_t error = 0; error < syndromes; ++error) {
      const std::uint32_t syndrome = syndrome_of_string(error, n_physical);
      if (seen[syndrome]) {
        throw numeric_error("duplicate syndrome in ancilla-assisted table");
      }
      seen[syndrome] = true;
      table.correction[syndrome] = error;
    }
  } else {
    const std::uint32_t full_mask = (std::uint32_t{1} << n_physical) - 1;
    for (std::uint32_t syndrome = 0; syndrome < syndromes; ++syndrome) {
      const std::uint32_t candidate = representative_string(syndrome, n_physical);
      const std::uint32_t partner = candidate ^ full_mask;
      const int w_candidate = std::popcount(candidate);
      const int w_partner = n_physical - w_candidate;
      std::uint32_t chosen;
      if (w_candidate != w_partner) {
        chosen = w_candidate < w_partner ? candidate : partner;
      } else {
        chosen = lowest_flipped_qubit(candidate, n_physical) <
                         lowest_flipped_qubit(partner, n_physical)
                     ? candidate
                     : partner;
      }
      table.correction[syndrome] = chosen;
    }
  }
  return table;
}

std::string format_decoding_table(int n_physical, ProbeBasis basis) {
  const DecodingTable free_table =
      build_decoding_table(n_physical, basis, false);
  const DecodingTable assisted_table =
      build_decoding_table(n_physical, basis, true);
  const char stabilizer_letter = basis == ProbeBasis::Z ? 'Z' : 'X';
  const char correction_letter = basis == ProbeBasis::Z ? 'X' : 'Z';

  auto correction_name = [&](std::uint32_t mask) {
    if (mask == 0) return std::string("I");
    std::string name;
    for (int qubit = 1; qubit <= n_physical; ++qubit) {
      if ((mask >> bit_position(n_physical, qubit)) & 1u) {
        name += correction_letter;
        name += std::to_string(qubit);
      }
    }
    return name;
  };

  std::vector<std::string> headers;
  for (int j = 1; j < n_physical; ++j) {
    headers.push_back(std::string(1, stabilizer_letter) + std::to_string(j) +
                      stabilizer_letter + std::to_string(j + 1));
  }

  std::size_t free_width = std::string("ancilla-free").size();
  std::size_t assisted_width = std::string("ancilla-assisted").size();
  for (std::uint32_t s = 0; s < free_table.correction.size(); ++s) {
    free_width = std::max(free_width,
                          correction_name(free_table.correction[s]).size());
    assisted_width = std::max(
        assisted_width, correction_name(assisted_table.correction[s]).size());
  }

  std::ostringstream out;
  for (const std::string& h : headers) {
    out << ' ' << h;
  }
  out << " | ";
  out << "ancilla-free" << std::string(free_width - 12, ' ');
  out << " | ancilla-assisted\n";

  for (std::uint32_t syndrome = 0; syndrome < free_table.correction.size();
       ++syndrome) {
    for (std::size_t j = 0; j < headers.size(); ++j) {
      const bool minus = (syndrome >> (headers.size() - 1 - j)) & 1u;
      const std::string outcome = minus ? "-1" : "+1";
      out << ' ' << std::string(headers[j].size() - outcome.size(), ' ')
          << outcome;
    }
    const std::string free_name = correction_name(free_table.correction[syndrome]);
    out << " | " << free_name << std::string(free_width - free_name.size(), ' ');
    out << " | " << correction_name(assisted_table.correction[syndrome]) << '\n';
  }
  return out.str();
}

std::vector<ProtocolClass> simulate_protocol(const ProbeSpec& probe,
                                             const MagneticField& field,
                                             EvolutionTime t) {
  const int n_qubits = probe.total_qubits();
  if (n_qubits > kSimulationQubitLimit) {
    throw size_limit_error("simulation above the qubit budget");
  }
  if (field.is_degenerate()) {
    throw degenerate_field_error("protocol simulation requires b > 0");
  }
  if (probe.dim == FieldDimension::TwoD && field.by() != 0.0) {
    throw validation_error("a field with a Y component requires the 3D variant");
  }

  Amplitudes amp = ghz_z(n_qubits);
  if (probe.basis == ProbeBasis::X) {
    apply_hadamard_all(amp, n_qubits);
  }
  const UnitaryElements u = single_qubit_unitary(field, t);
  const int first_sensing = probe.ancilla_assisted ? 2 : 1;
  for (int qubit = first_sensing; qubit <= n_qubits; ++qubit) {
    apply_single_qubit(amp, n_qubits, qubit, u);
  }
  if (probe.basis == ProbeBasis::X) {
    apply_hadamard_all(amp, n_qubits);
  }

  const DecodingTable table =
      build_decoding_table(n_qubits, probe.basis, probe.ancilla_assisted);
  const std::uint32_t full_mask = (std::uint32_t{1} << n_qubits) - 1;
  const int max_k = probe.ancilla_assisted ? probe.n : probe.n / 2;

  std::vector<ProtocolClass> classes(max_k + 1);
  for (int k = 0; k <= max_k; ++k) classes[k].k = k;

  struct RawState {
    std::complex<double> c0, c1;
    bool set = false;
  };
  std::vector<RawState> reference(max_k + 1);

  for (std::uint32_t syndrome = 0;
       syndrome < static_cast<std::uint32_t>(table.syndrome_count());
       ++syndrome) {
    const std::uint32_t rep = representative_string(syndrome, n_qubits);
    const std::uint32_t partner = rep ^ full_mask;
    const std::uint32_t correction = table.correction[syndrome];
    const int k = std::popcount(correction);
    if (k > max_k) {
      throw numeric_error("correction weight outside expected class range");
    }
    // The correction maps one member of the pair to |0...0> and the other to
    // |1...1>; X strings permute basis states without phases.
    const std::uint32_t from_zero = correction;  // string mapped to |0_L>
    const std::complex<double> c0 =
        from_zero == rep ? amp[rep] : amp[partner];
    const std::complex<double> c1 =
        from_zero == rep ? amp[partner] : amp[rep];
    const double weight = std::norm(c0) + std::norm(c1);

    ProtocolClass& cls = classes[k];
    cls.probability += weight;
    cls.syndrome_count += 1;
    if (weight < kNegligibleClass) continue;

    const double inv_norm = 1.0 / std::sqrt(weight);
    const std::complex<double> n0 = c0 * inv_norm;
    const std::complex<double> n1 = c1 * inv_norm;
    if (!reference[k].set) {
      reference[k].c0 = n0;
      reference[k].c1 = n1;
      reference[k].set = true;
    } else {
      // Compare up to global phase via the overlap with the representative.
      const std::complex<double> overlap =
          std::conj(reference[k].c0) * n0 + std::conj(reference[k].c1) * n1;
      const double deviation = std::abs(1.0 - std::abs(overlap));
      cls.max_intra_class_deviation =
          std::max(cls.max_intra_class_deviation, deviation);
    }
  }

  for (int k = 0; k <= max_k; ++k) {
    if (!reference[k].set) continue;
    // Gauge: make c0 real non-negative (fall back to c1 when c0 vanishes).
    std::complex<double> anchor = reference[k].c0;
    if (std::abs(anchor) < 1e-14) anchor = reference[k].c1;
    const std::complex<double> phase =
        std::abs(anchor) > 0.0 ? std::conj(anchor) / std::abs(anchor)
                               : std::complex<double>{1.0, 0.0};
    classes[k].c0 = reference[k].c0 * phase;
    classes[k].c1 = reference[k].c1 * phase;
  }
  return classes;
}

namespace {

Amplitudes evolved_probe_state(ProbeBasis basis, int n,
                               const MagneticField& field, EvolutionTime t) {
  Amplitudes amp = ghz_z(n);
  if (basis == ProbeBasis::X) {
    apply_hadamard_all(amp, n);
  }
  const UnitaryElements u = single_qubit_unitary(field, t);
  for (int qubit = 1; qubit <= n; ++qubit) {
    apply_single_qubit(amp, n, qubit, u);
  }
  return amp;
}

std::complex<double> inner(const Amplitudes& a, const Amplitudes& b) {
  std::complex<double> sum{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += std::conj(a[i]) * b[i];
  }
  return sum;
}

}  // namespace

FisherMatrix oracle_qfim(ProbeBasis basis, int n, const MagneticField& field,
                         EvolutionTime t) {
  if (n < 1) throw validation_error("oracle_qfim requires n >= 1");
  if (n > kQfimQubitLimit) {
    throw size_limit_error("oracle_qfim above the qubit budget");
  }
  if (field.is_degenerate()) {
    throw degenerate_field_error("oracle_qfim requires b > 0");
  }

  auto state = [&](double dbx, double dbz) {
    return evolved_probe_state(
        basis, n, MagneticField(field.bx() + dbx, field.by(), field.bz() + dbz),
        t);
  };
  const Amplitudes psi = state(0.0, 0.0);
  const Amplitudes px = state(kQfimStep, 0.0);
  const Amplitudes mx = state(-kQfimStep, 0.0);
  const Amplitudes pz = state(0.0, kQfimStep);
  const Amplitudes mz = state(0.0, -kQfimStep);

  Amplitudes dx(psi.size()), dz(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    dx[i] = (px[i] - mx[i]) / (2.0 * kQfimStep);
    dz[i] = (pz[i] - mz[i]) / (2.0 * kQfimStep);
  }

  const std::complex<double> dxdx = inner(dx, dx);
  const std::complex<double> dxdz = inner(dx, dz);
  const std::complex<double> dzdz = inner(dz, dz);
  const std::complex<double> dx_psi = inner(dx, psi);
  const std::complex<double> dz_psi = inner(dz, psi);

  FisherMatrix m(2);
  m.at(0, 0) = 4.0 * (dxdx - dx_psi * std::conj(dx_psi)).real();
  m.at(1, 1) = 4.0 * (dzdz - dz_psi * std::conj(dz_psi)).real();
  const double off = 4.0 * (dxdz - dx_psi * std::conj(dz_psi)).real();
  m.at(0, 1) = off;
  m.at(1, 0) = off;
  return m;
}

}  // namespace qecmag
