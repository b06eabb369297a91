#include "qecmag/protocol.h"

#include <cmath>

#include <json.hpp>

namespace qecmag {

namespace {

constexpr double kProbabilityFloor = 1e-300;

double pow_int(double base, int k) {
  double result = 1.0;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 0; i < k; ++i) {
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return c;
}

void check_field(const ProbeSpec& probe, const MagneticField& field) {
  if (field.is_degenerate()) {
    throw degenerate_field_error("protocol statistics require b > 0");
  }
  if (probe.dim == FieldDimension::TwoD && field.by() != 0.0) {
    throw validation_error("a field with a Y component requires the 3D variant");
  }
}

/// Squared weights of the kept and suppressed field components in the probe
/// frame: a = cos^2(Bt) + n_along^2 sin^2(Bt), e = n_perp^2 sin^2(Bt).
struct ClassFactors {
  double a, e;
};

ClassFactors class_factors(const ProbeSpec& probe, const MagneticField& field,
                           EvolutionTime t) {
  const double angle = field.b() * t.value();
  const double s2 = std::sin(angle) * std::sin(angle);
  const double c2 = std::cos(angle) * std::cos(angle);
  const double along2 = probe.basis == ProbeBasis::Z
                            ? field.nz() * field.nz()
                            : field.nx() * field.nx();
  return {c2 + along2 * s2, (1.0 - along2) * s2};
}

double clamp_probability(double p) {
  if (p < kProbabilityFloor) return 0.0;
  return std::min(p, 1.0);
}

int ancilla_free_class_count(int n) { return n / 2 + 1; }

/// Number of syndromes in ancilla-free class k; the self-conjugate middle
/// class at k = n/2 (n even) pairs each pattern with its complement.
double ancilla_free_multiplicity(int n, int k) {
  if (2 * k == n) return binom(n, k) / 2.0;
  return binom(n, k);
}

}  // namespace

ProbeSpec::ProbeSpec(int n_, ProbeBasis basis_, bool ancilla_assisted_,
                     FieldDimension dim_)
    : n(n_), basis(basis_), ancilla_assisted(ancilla_assisted_), dim(dim_) {
  if (n < 1) {
    throw validation_error("probe requires at least one sensing qubit");
  }
  if (dim == FieldDimension::ThreeD && !ancilla_assisted) {
    throw validation_error("the 3D variant is only defined ancilla-assisted");
  }
}

OutcomeModel syndrome_distribution(const ProbeSpec& probe,
                                   const MagneticField& field, EvolutionTime t) {
  check_field(probe, field);
  OutcomeModel model;
  const int n = probe.n;
  if (probe.ancilla_assisted) {
    const auto [a, e] = class_factors(probe, field, t);
    model.k_values.resize(n + 1);
    model.p.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      model.k_values[k] = k;
      model.p[k] =
          clamp_probability(binom(n, k) * pow_int(a, n - k) * pow_int(e, k));
    }
  } else {
    const int classes = ancilla_free_class_count(n);
    model.k_values.resize(classes);
    model.p.resize(classes);
    for (int k = 0; k < classes; ++k) {
      const LogicalAmplitudes amps = pec_state_ancilla_free(probe, field, t, k);
      const double per_syndrome =
          0.5 * (std::norm(amps.c0) + std::norm(amps.c1));
      model.k_values[k] = k;
      model.p[k] =
          clamp_probability(ancilla_free_multiplicity(n, k) * per_syndrome);
    }
  }
  return model;
}

std::vector<double> pec_phases(const ProbeSpec& probe, const MagneticField& field,
                               EvolutionTime t) {
  if (!probe.ancilla_assisted) {
    throw validation_error(
        "post-correction phases are only defined for ancilla-assisted probes");
  }
  check_field(probe, field);
  const double beff = effective_field(field, t, probe.basis);
  std::vector<double> phases(probe.n + 1);
  if (probe.dim == FieldDimension::TwoD) {
    for (int k = 0; k <= probe.n; ++k) {
      phases[k] = 2.0 * beff * (probe.n - k);
    }
  } else {
    // Transverse precession angle of the suppressed components, expressed in
    // the probe frame. Verified against the statevector oracle; enters with
    // the opposite orientation to the longitudinal term.
    const double alpha = probe.basis == ProbeBasis::Z
                             ? std::atan2(field.ny(), field.nx())
                             : std::atan2(-field.ny(), field.nz());
    for (int k = 0; k <= probe.n; ++k) {
      phases[k] = 2.0 * (beff * (probe.n - k) - alpha * k);
    }
  }
  return phases;
}

std::pair<double, double> string_measurement_probs(double phi) {
  const double c = std::cos(0.5 * phi);
  const double s = std::sin(0.5 * phi);
  return {c * c, s * s};
}

LogicalAmplitudes pec_state_ancilla_free(const ProbeSpec& probe,
                                         const MagneticField& field,
                                         EvolutionTime t, int k) {
  if (probe.ancilla_assisted) {
    throw validation_error(
        "pec_state_ancilla_free requires an ancilla-free probe");
  }
  if (k < 0 || k > probe.n / 2) {
    throw validation_error("error weight k out of range for ancilla-free probe");
  }
  check_field(probe, field);
  const UnitaryElements u = probe_frame_unitary(field, t, probe.basis);
  const int n = probe.n;
  LogicalAmplitudes amps;
  amps.c0 = cpow_int(u.u00, n - k) * cpow_int(u.u01, k) +
            cpow_int(u.u01, n - k) * cpow_int(u.u11, k);
  amps.c1 = cpow_int(u.u00, k) * cpow_int(u.u01, n - k) +
            cpow_int(u.u01, k) * cpow_int(u.u11, n - k);
  return amps;
}

OutcomeModel outcome_model(const ProbeSpec& probe, const MagneticField& field,
                           EvolutionTime t) {
  OutcomeModel model = syndrome_distribution(probe, field, t);
  const std::size_t classes = model.k_values.size();
  model.phi.resize(classes);
  model.q_plus.resize(classes);
  model.q_minus.resize(classes);
  if (probe.ancilla_assisted) {
    model.phi = pec_phases(probe, field, t);
    for (std::size_t i = 0; i < classes; ++i) {
      std::tie(model.q_plus[i], model.q_minus[i]) =
          string_measurement_probs(model.phi[i]);
    }
  } else {
    for (std::size_t i = 0; i < classes; ++i) {
      const LogicalAmplitudes amps =
          pec_state_ancilla_free(probe, field, t, model.k_values[i]);
      const double total = std::norm(amps.c0) + std::norm(amps.c1);
      if (total > 0.0) {
        model.q_plus[i] = std::norm(amps.c0 + amps.c1) / (2.0 * total);
        model.q_minus[i] = std::norm(amps.c0 - amps.c1) / (2.0 * total);
        model.phi[i] = std::arg(amps.c1 * std::conj(amps.c0));
      } else {
        model.q_plus[i] = 1.0;
        model.q_minus[i] = 0.0;
        model.phi[i] = 0.0;
      }
    }
  }
  return model;
}

std::string to_json_string(const OutcomeModel& model) {
  nlohmann::json j;
  j["k"] = model.k_values;
  j["p"] = model.p;
  j["phi"] = model.phi;
  j["q_plus"] = model.q_plus;
  j["q_minus"] = model.q_minus;
  return j.dump();
}

}  // namespace qecmag
