#include "qecmag/field.h"

#include <cmath>

namespace qecmag {

namespace {

bool all_finite(double a, double b, double c) {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c);
}

}  // namespace

MagneticField::MagneticField(double bx, double by, double bz)
    : bx_(bx), by_(by), bz_(bz) {
  if (!all_finite(bx, by, bz)) {
    throw validation_error("magnetic field components must be finite");
  }
  b_ = std::sqrt(bx * bx + by * by + bz * bz);
}

double MagneticField::cosine(double component) const {
  if (b_ == 0.0) {
    throw degenerate_field_error(
        "direction cosines are undefined for a zero magnetic field");
  }
  return component / b_;
}

EvolutionTime::EvolutionTime(double t) : t_(t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw validation_error("evolution time must be positive and finite");
  }
}

UnitaryElements single_qubit_unitary(const MagneticField& field, EvolutionTime t) {
  if (field.is_degenerate()) {
    return UnitaryElements{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
  }
  const double angle = field.b() * t.value();
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double nx = field.nx();
  const double ny = field.ny();
  const double nz = field.nz();
  UnitaryElements u;
  u.u00 = {c, -nz * s};
  u.u01 = {-ny * s, -nx * s};
  u.u10 = {ny * s, -nx * s};
  u.u11 = {c, nz * s};
  return u;
}

UnitaryElements probe_frame_unitary(const MagneticField& field, EvolutionTime t,
                                    ProbeBasis basis) {
  if (basis == ProbeBasis::Z) {
    return single_qubit_unitary(field, t);
  }
  // H (nx X + ny Y + nz Z) H = nz X - ny Y + nx Z.
  return single_qubit_unitary(
      MagneticField(field.bz(), -field.by(), field.bx()), t);
}

double effective_field(const MagneticField& field, EvolutionTime t, ProbeBasis basis) {
  if (field.is_degenerate()) {
    throw degenerate_field_error("effective field requires b > 0");
  }
  const double n = basis == ProbeBasis::Z ? field.nz() : field.nx();
  const double angle = field.b() * t.value();
  const double c = std::cos(angle);
  if (c == 0.0) {
    return std::copysign(std::atan2(1.0, 0.0), n);  // limit at odd pi/2
  }
  return std::atan(n * std::tan(angle));
}

std::complex<double> cpow_int(std::complex<double> z, int k) {
  std::complex<double> result{1.0, 0.0};
  while (k > 0) {
    if (k & 1) result *= z;
    z *= z;
    k >>= 1;
  }
  return result;
}

std::complex<double> u_sum_coefficient(int n, int k, const UnitaryElements& u) {
  if (n < 1 || k < 0 || k > n) {
    throw validation_error("u_sum_coefficient requires 0 <= k <= n");
  }
  return cpow_int(u.u00, n - k) * cpow_int(u.u01, k) +
         cpow_int(u.u01, n - k) * cpow_int(u.u11, k);
}

double unitarity_residual(const UnitaryElements& u) {
  const double r0 = std::abs(std::norm(u.u00) + std::norm(u.u01) - 1.0);
  const double r1 = std::abs(std::norm(u.u11) + std::norm(u.u10) - 1.0);
  const double r2 =
      std::abs(u.u00 * std::conj(u.u10) + u.u01 * std::conj(u.u11));
  return std::max({r0, r1, r2});
}

}  // namespace qecmag
