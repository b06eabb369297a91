#pragma once

#include <complex>

#include "qecmag/errors.h"

namespace qecmag {

enum class ProbeBasis { Z, X };

/// Static magnetic field vector. Components are in energy units (hbar = 1).
/// Construction with b = 0 is allowed; direction cosines are undefined there
/// and throw when queried.
class MagneticField {
 public:
  MagneticField(double bx, double by, double bz);

  static MagneticField in_plane(double bx, double bz) {
    return MagneticField(bx, 0.0, bz);
  }

  double bx() const { return bx_; }
  double by() const { return by_; }
  double bz() const { return bz_; }

  /// Field magnitude sqrt(bx^2 + by^2 + bz^2).
  double b() const { return b_; }

  double nx() const { return cosine(bx_); }
  double ny() const { return cosine(by_); }
  double nz() const { return cosine(bz_); }

  bool is_degenerate() const { return b_ == 0.0; }

 private:
  double cosine(double component) const;

  double bx_, by_, bz_, b_;
};

/// Evolution duration in inverse energy units (hbar = 1). Strictly positive.
class EvolutionTime {
 public:
  explicit EvolutionTime(double t);
  double value() const { return t_; }

 private:
  double t_;
};

/// Matrix elements of the single-qubit rotation exp(-i t (B . sigma)).
/// For fields in the XZ plane u10 == u01 and u11 == conj(u00); with a Y
/// component u10 == -conj(u01) (general SU(2) form).
struct UnitaryElements {
  std::complex<double> u00, u01, u10, u11;
};

/// exp(-i t (bx X + by Y + bz Z)) acting on one qubit. A zero field yields
/// the identity elements.
UnitaryElements single_qubit_unitary(const MagneticField& field, EvolutionTime t);

/// Unitary elements in the probe's stabilizer eigenbasis: the Z basis returns
/// single_qubit_unitary unchanged, the X basis returns the Hadamard-conjugated
/// rotation (component map (nx, ny, nz) -> (nz, -ny, nx)).
UnitaryElements probe_frame_unitary(const MagneticField& field, EvolutionTime t,
                                    ProbeBasis basis);

/// Effective precession angle imprinted on the logical qubit after error
/// correction: arctan(nz tan(Bt)) for the Z basis, arctan(nx tan(Bt)) for X.
/// Principal branch (-pi/2, pi/2]; the odd multiples of pi/2 map to the
/// limiting value sign(n) * pi/2. Throws degenerate_field_error when b = 0.
double effective_field(const MagneticField& field, EvolutionTime t, ProbeBasis basis);

/// Binomial-sum amplitude u00^(n-k) u01^k + u01^(n-k) u11^k appearing in the
/// GHZ quantum Fisher information sums. Requires 0 <= k <= n.
std::complex<double> u_sum_coefficient(int n, int k, const UnitaryElements& u);

/// Max deviation of the elements from an exact unitary (rows normalized,
/// columns orthogonal).
double unitarity_residual(const UnitaryElements& u);

/// z^k by repeated squaring, with z^0 == 1 for any z.
std::complex<double> cpow_int(std::complex<double> z, int k);

}  // namespace qecmag
