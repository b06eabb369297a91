#pragma once

#include <array>
#include <span>
#include <vector>

#include "qecmag/protocol.h"

namespace qecmag {

/// Symmetric Fisher information matrix over the field components, parameter
/// order (B_x, B_z) for dim 2 and (B_x, B_y, B_z) for dim 3.
class FisherMatrix {
 public:
  explicit FisherMatrix(int dim);

  int dim() const { return dim_; }
  double operator()(int row, int col) const { return m_[row * dim_ + col]; }
  double& at(int row, int col) { return m_[row * dim_ + col]; }

  FisherMatrix& operator+=(const FisherMatrix& other);
  FisherMatrix operator-(const FisherMatrix& other) const;

  /// Adds weight * g g^T for gradient g.
  void add_outer(double weight, std::span<const double> gradient);

  double trace() const;
  double determinant() const;
  double frobenius_norm() const;
  double max_abs() const;
  /// Smallest eigenvalue (closed form for dim 2 and 3).
  double min_eigenvalue() const;
  double symmetry_residual() const;

 private:
  int dim_;
  std::array<double, 9> m_{};
};

/// Trace of the matrix inverse via the adjugate. Throws singular_matrix_error
/// when |det| < 1e-12 * ||m||_F^dim.
double trace_inverse(const FisherMatrix& m);

/// CFIM of the syndrome-class outcome statistics, with analytic derivatives
/// of p_k with respect to (B_x, B_z). Terms with p_k < 1e-14 are skipped.
FisherMatrix cfim_stabilizer(const ProbeSpec& probe, const MagneticField& field,
                             EvolutionTime t);

/// Probability-weighted average of the per-class string-measurement CFIMs.
/// For ancilla-assisted probes the k = N class carries no phase and is
/// excluded; ancilla-free classes use the post-correction amplitudes.
FisherMatrix cfim_pec(const ProbeSpec& probe, const MagneticField& field,
                      EvolutionTime t);

/// Sum of stabilizer and post-correction CFIMs over all probes.
FisherMatrix cfim_total(std::span<const ProbeSpec> probes,
                        const MagneticField& field, EvolutionTime t);

enum class QfimProbe { Z, X, Dual };

/// QFIM of an N-qubit GHZ probe evolved without error correction, from the
/// binomial amplitude sums; Dual is the sum of the Z- and X-basis matrices.
FisherMatrix qfim(QfimProbe probe, int n, const MagneticField& field,
                  EvolutionTime t);

/// QFIM of the (N+1)-qubit GHZ probe actually used by the protocol: one
/// shielded ancilla plus N field-exposed qubits, no error correction. The
/// combined stabilizer/string measurement saturates this bound at every N;
/// it coincides with the bare N-qubit GHZ QFIM for N >= 3.
FisherMatrix qfim_with_ancilla(QfimProbe probe, int n,
                               const MagneticField& field, EvolutionTime t);

enum class ClosedFormVariant { SingleZ, SingleX, Dual };

/// Closed-form Tr[F^-1] of the ancilla-assisted protocols. Throws
/// no_information_error at Bt = m pi and numeric_error when a closed-form
/// denominator vanishes.
double closed_form_trace_inverse(ClosedFormVariant variant, int n,
                                 const MagneticField& field, EvolutionTime t);

struct PrecisionPoint {
  int n;
  MagneticField field;
  double t;
  double trace_inverse;
};

struct ScalingFit {
  double beta;
  double intercept;
  double r_squared;
};

/// Least-squares fit of log(trace_inverse) = -beta log(n) + c. Requires at
/// least three points with distinct n and positive trace_inverse.
ScalingFit scaling_exponent(std::span<const PrecisionPoint> points);

}  // namespace qecmag
