#include "qecmag/fisher.h"

#include <cmath>
#include <numbers>

#include "qecmag/dual.h"

namespace qecmag {

namespace {

constexpr double kTermFloor = 1e-14;
constexpr double kSingularGuard = 1e-12;
constexpr double kNoInformationSine = 1e-12;

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 0; i < k; ++i) {
    c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return c;
}

void check_two_d(const ProbeSpec& probe, const MagneticField& field) {
  if (field.is_degenerate()) {
    throw degenerate_field_error("Fisher analysis requires b > 0");
  }
  if (probe.dim != FieldDimension::TwoD || field.by() != 0.0) {
    throw validation_error("Fisher matrices are built for in-plane fields");
  }
}

/// Field kinematics over (bx, bz) with exact partial derivatives.
struct DualFrame {
  Dual2 b, nx, nz, angle, s, c;
};

DualFrame make_frame(const MagneticField& field, EvolutionTime t) {
  DualFrame f;
  const Dual2 bx = Dual2::seed_bx(field.bx());
  const Dual2 bz = Dual2::seed_bz(field.bz());
  f.b = sqrt(bx * bx + bz * bz);
  f.nx = bx / f.b;
  f.nz = bz / f.b;
  f.angle = f.b * t.value();
  f.s = sin(f.angle);
  f.c = cos(f.angle);
  return f;
}

Dual2 along_cosine(const DualFrame& f, ProbeBasis basis) {
  return basis == ProbeBasis::Z ? f.nz : f.nx;
}
Dual2 perp_cosine(const DualFrame& f, ProbeBasis basis) {
  return basis == ProbeBasis::Z ? f.nx : f.nz;
}

/// Effective precession angle as atan2(n_along sin, cos); same derivatives as
/// the principal-branch arctan everywhere it is defined.
Dual2 dual_effective_field(const DualFrame& f, ProbeBasis basis) {
  return atan2(along_cosine(f, basis) * f.s, f.c);
}

/// Probe-frame unitary elements with derivative-carrying components.
struct DualUnitary {
  CDual u00, u01, u11;
};

DualUnitary dual_unitary(const DualFrame& f, ProbeBasis basis) {
  const Dual2 along = along_cosine(f, basis);
  const Dual2 perp = perp_cosine(f, basis);
  DualUnitary u;
  u.u00 = {f.c, -(along * f.s)};
  u.u01 = {Dual2::constant(0.0), -(perp * f.s)};
  u.u11 = {f.c, along * f.s};
  return u;
}

struct DualAmplitudes {
  CDual c0, c1;
};

DualAmplitudes dual_pec_amplitudes(const DualUnitary& u, int n, int k) {
  DualAmplitudes a;
  a.c0 = pow_int(u.u00, n - k) * pow_int(u.u01, k) +
         pow_int(u.u01, n - k) * pow_int(u.u11, k);
  a.c1 = pow_int(u.u00, k) * pow_int(u.u01, n - k) +
         pow_int(u.u01, k) * pow_int(u.u11, n - k);
  return a;
}

/// Class probabilities with derivatives, matching outcome_model().
std::vector<Dual2> dual_class_probabilities(const ProbeSpec& probe,
                                            const DualFrame& f) {
  const int n = probe.n;
  std::vector<Dual2> p;
  if (probe.ancilla_assisted) {
    const Dual2 along = along_cosine(f, probe.basis);
    const Dual2 a = f.c * f.c + along * along * f.s * f.s;
    const Dual2 e = 1.0 - a;
    p.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
      p.push_back(binom(n, k) * pow_int(a, n - k) * pow_int(e, k));
    }
  } else {
    const DualUnitary u = dual_unitary(f, probe.basis);
    p.reserve(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) {
      const DualAmplitudes amps = dual_pec_amplitudes(u, n, k);
      const double mult = 2 * k == n ? binom(n, k) / 2.0 : binom(n, k);
      p.push_back(mult * 0.5 * (abs2(amps.c0) + abs2(amps.c1)));
    }
  }
  return p;
}

void add_information_term(FisherMatrix& m, const Dual2& prob) {
  if (prob.v < kTermFloor) return;
  const double g[2] = {prob.dx, prob.dz};
  m.add_outer(1.0 / prob.v, g);
}

}  // namespace

FisherMatrix::FisherMatrix(int dim) : dim_(dim) {
  if (dim != 2 && dim != 3) {
    throw validation_error("FisherMatrix supports dimensions 2 and 3");
  }
}

FisherMatrix& FisherMatrix::operator+=(const FisherMatrix& other) {
  if (other.dim_ != dim_) throw validation_error("dimension mismatch");
  for (int i = 0; i < dim_ * dim_; ++i) m_[i] += other.m_[i];
  return *this;
}

FisherMatrix FisherMatrix::operator-(const FisherMatrix& other) const {
  if (other.dim_ != dim_) throw validation_error("dimension mismatch");
  FisherMatrix result(dim_);
  for (int i = 0; i < dim_ * dim_; ++i) result.m_[i] = m_[i] - other.m_[i];
  return result;
}

void FisherMatrix::add_outer(double weight, std::span<const double> gradient) {
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) {
      m_[r * dim_ + c] += weight * gradient[r] * gradient[c];
    }
  }
}

double FisherMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += m_[i * dim_ + i];
  return t;
}

double FisherMatrix::determinant() const {
  if (dim_ == 2) {
    return m_[0] * m_[3] - m_[1] * m_[2];
  }
  return m_[0] * (m_[4] * m_[8] - m_[5] * m_[7]) -
         m_[1] * (m_[3] * m_[8] - m_[5] * m_[6]) +
         m_[2] * (m_[3] * m_[7] - m_[4] * m_[6]);
}

double FisherMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (int i = 0; i < dim_ * dim_; ++i) sum += m_[i] * m_[i];
  return std::sqrt(sum);
}

double FisherMatrix::max_abs() const {
  double best = 0.0;
  for (int i = 0; i < dim_ * dim_; ++i) best = std::max(best, std::abs(m_[i]));
  return best;
}

double FisherMatrix::min_eigenvalue() const {
  if (dim_ == 2) {
    const double half_trace = 0.5 * (m_[0] + m_[3]);
    const double disc = std::sqrt(std::max(
        0.0, half_trace * half_trace - determinant()));
    return half_trace - disc;
  }
  // Symmetric 3x3 eigenvalues via the trigonometric solution of the
  // characteristic polynomial.
  const double q = trace() / 3.0;
  double p2 = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double centered = m_[r * 3 + c] - (r == c ? q : 0.0);
      p2 += centered * centered;
    }
  }
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return q;
  FisherMatrix b(3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      b.at(r, c) = (m_[r * 3 + c] - (r == c ? q : 0.0)) / p;
    }
  }
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

double FisherMatrix::symmetry_residual() const {
  double worst = 0.0;
  for (int r = 0; r < dim_; ++r) {
    for (int c = r + 1; c < dim_; ++c) {
      worst = std::max(worst, std::abs(m_[r * dim_ + c] - m_[c * dim_ + r]));
    }
  }
  return worst;
}

double trace_inverse(const FisherMatrix& m) {
  const double det = m.determinant();
  const double scale = std::pow(m.frobenius_norm(), m.dim());
  if (std::abs(det) < kSingularGuard * scale || det == 0.0) {
    throw singular_matrix_error("Fisher matrix is singular");
  }
  if (m.dim() == 2) {
    return (m(0, 0) + m(1, 1)) / det;
  }
  const double c00 = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  const double c11 = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  const double c22 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return (c00 + c11 + c22) / det;
}

FisherMatrix cfim_stabilizer(const ProbeSpec& probe, const MagneticField& field,
                             EvolutionTime t) {
  check_two_d(probe, field);
  const DualFrame f = make_frame(field, t);
  FisherMatrix m(2);
  for (const Dual2& p : dual_class_probabilities(probe, f)) {
    add_information_term(m, p);
  }
  return m;
}

FisherMatrix cfim_pec(const ProbeSpec& probe, const MagneticField& field,
                      EvolutionTime t) {
  check_two_d(probe, field);
  const DualFrame f = make_frame(field, t);
  const std::vector<Dual2> p = dual_class_probabilities(probe, f);
  FisherMatrix m(2);
  if (probe.ancilla_assisted) {
    // The two-outcome CFI of q = cos^2((N-k) theta) reduces to
    // 4 (N-k)^2 (d theta)(d theta)^T for every outcome split.
    const Dual2 theta = dual_effective_field(f, probe.basis);
    const double g[2] = {theta.dx, theta.dz};
    for (int k = 0; k < probe.n; ++k) {
      if (p[k].v < kTermFloor) continue;
      const double scale = static_cast<double>(probe.n - k);
      m.add_outer(4.0 * p[k].v * scale * scale, g);
    }
  } else {
    const DualUnitary u = dual_unitary(f, probe.basis);
    for (int k = 0; k <= probe.n / 2; ++k) {
      if (p[k].v < kTermFloor) continue;
      const DualAmplitudes amps = dual_pec_amplitudes(u, probe.n, k);
      const Dual2 total = abs2(amps.c0) + abs2(amps.c1);
      const Dual2 q_plus = abs2(amps.c0 + amps.c1) / (2.0 * total);
      const Dual2 q_minus = abs2(amps.c0 - amps.c1) / (2.0 * total);
      FisherMatrix per_class(2);
      add_information_term(per_class, q_plus);
      add_information_term(per_class, q_minus);
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          m.at(r, c) += p[k].v * per_class(r, c);
        }
      }
    }
  }
  return m;
}

FisherMatrix cfim_total(std::span<const ProbeSpec> probes,
                        const MagneticField& field, EvolutionTime t) {
  if (probes.empty()) {
    throw validation_error("cfim_total requires at least one probe");
  }
  FisherMatrix m(2);
  for (const ProbeSpec& probe : probes) {
    m += cfim_stabilizer(probe, field, t);
    m += cfim_pec(probe, field, t);
  }
  return m;
}

namespace {

FisherMatrix qfim_single_basis(ProbeBasis basis, int n,
                               const MagneticField& field, EvolutionTime t) {
  const DualFrame f = make_frame(field, t);
  const DualUnitary u = dual_unitary(f, basis);

  // Accumulators for Q_ab = 2 Re[G_ab] - Re[V_a conj(V_b)] with
  // G_ab = sum C(n,k) (d_a U_k)* (d_b U_k) and V_a = sum C(n,k) (d_a U_k)* U_k.
  std::complex<double> g_xx{}, g_xz{}, g_zz{}, v_x{}, v_z{};
  for (int k = 0; k <= n; ++k) {
    const double weight = binom(n, k);
    const CDual amp = pow_int(u.u00, n - k) * pow_int(u.u01, k) +
                      pow_int(u.u01, n - k) * pow_int(u.u11, k);
    const std::complex<double> value{amp.re.v, amp.im.v};
    const std::complex<double> dx{amp.re.dx, amp.im.dx};
    const std::complex<double> dz{amp.re.dz, amp.im.dz};
    g_xx += weight * std::conj(dx) * dx;
    g_xz += weight * std::conj(dx) * dz;
    g_zz += weight * std::conj(dz) * dz;
    v_x += weight * std::conj(dx) * value;
    v_z += weight * std::conj(dz) * value;
  }
  FisherMatrix m(2);
  m.at(0, 0) = 2.0 * g_xx.real() - (v_x * std::conj(v_x)).real();
  m.at(1, 1) = 2.0 * g_zz.real() - (v_z * std::conj(v_z)).real();
  const double off = 2.0 * g_xz.real() - (v_x * std::conj(v_z)).real();
  m.at(0, 1) = off;
  m.at(1, 0) = off;
  return m;
}

}  // namespace

namespace {

void check_qfim_args(int n, const MagneticField& field) {
  if (n < 1) throw validation_error("qfim requires n >= 1");
  if (field.is_degenerate()) {
    throw degenerate_field_error("qfim requires b > 0");
  }
  if (field.by() != 0.0) {
    throw validation_error("qfim is built for in-plane fields");
  }
}

FisherMatrix qfim_dispatch(QfimProbe probe, int n, const MagneticField& field,
                           EvolutionTime t,
                           FisherMatrix (*single)(ProbeBasis, int,
                                                  const MagneticField&,
                                                  EvolutionTime)) {
  switch (probe) {
    case QfimProbe::Z:
      return single(ProbeBasis::Z, n, field, t);
    case QfimProbe::X:
      return single(ProbeBasis::X, n, field, t);
    case QfimProbe::Dual: {
      FisherMatrix m = single(ProbeBasis::Z, n, field, t);
      m += single(ProbeBasis::X, n, field, t);
      return m;
    }
  }
  throw validation_error("unknown qfim probe");
}

/// QFIM of the ancilla-tagged product state
/// (|0> chi^(x)N + |1> eta^(x)N)/sqrt(2) with chi = U|0>, eta = U|1>;
/// the shielded ancilla removes every cross-branch overlap.
FisherMatrix qfim_tagged_single(ProbeBasis basis, int n,
                                const MagneticField& field, EvolutionTime t) {
  const DualFrame f = make_frame(field, t);
  const DualUnitary u = dual_unitary(f, basis);

  struct Branch {
    CDual components[2];
  };
  const Branch chi{{u.u00, u.u01}};  // u10 = u01 in the XZ plane
  const Branch eta{{u.u01, u.u11}};

  auto value = [](const CDual& z) { return std::complex<double>{z.re.v, z.im.v}; };
  auto deriv = [](const CDual& z, int axis) {
    return axis == 0 ? std::complex<double>{z.re.dx, z.im.dx}
                     : std::complex<double>{z.re.dz, z.im.dz};
  };

  std::complex<double> dd[2][2] = {};  // <d_a psi | d_b psi>
  std::complex<double> sd[2] = {};     // <psi | d_a psi>
  for (const Branch& branch : {chi, eta}) {
    std::complex<double> overlap_dd[2][2] = {};
    std::complex<double> overlap_sd[2] = {};
    for (const CDual& component : branch.components) {
      const std::complex<double> v = value(component);
      for (int a = 0; a < 2; ++a) {
        overlap_sd[a] += std::conj(v) * deriv(component, a);
        for (int b = 0; b < 2; ++b) {
          overlap_dd[a][b] +=
              std::conj(deriv(component, a)) * deriv(component, b);
        }
      }
    }
    for (int a = 0; a < 2; ++a) {
      sd[a] += 0.5 * static_cast<double>(n) * overlap_sd[a];
      for (int b = 0; b < 2; ++b) {
        dd[a][b] += 0.5 * (static_cast<double>(n) * overlap_dd[a][b] +
                           static_cast<double>(n) * (n - 1.0) *
                               std::conj(overlap_sd[a]) * overlap_sd[b]);
      }
    }
  }

  FisherMatrix m(2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      m.at(a, b) = 4.0 * (dd[a][b] - std::conj(sd[a]) * sd[b]).real();
    }
  }
  return m;
}

}  // namespace

FisherMatrix qfim(QfimProbe probe, int n, const MagneticField& field,
                  EvolutionTime t) {
  check_qfim_args(n, field);
  return qfim_dispatch(probe, n, field, t, qfim_single_basis);
}

FisherMatrix qfim_with_ancilla(QfimProbe probe, int n,
                               const MagneticField& field, EvolutionTime t) {
  check_qfim_args(n, field);
  return qfim_dispatch(probe, n, field, t, qfim_tagged_single);
}

namespace {

/// f-functions of the ancilla-assisted single-probe inverse CFIM, labelled by
/// the role of the diagonal entry they feed: "supp" is the diagonal of the
/// suppressed field component (B_x for the Z probe), "kept" the other one.
/// The X-basis functions are the Z-basis ones with n_x and n_z exchanged.
struct SingleProbeFunctions {
  double f1_supp, f2_supp, f1_kept, f2_kept, f3;
};

SingleProbeFunctions closed_form_functions(ClosedFormVariant variant,
                                           const MagneticField& field,
                                           double angle) {
  const double s = std::sin(angle);
  const double c = std::cos(angle);
  const double s2 = s * s;
  const double sin2bt = 2.0 * s * c;
  const double cot = c / s;
  const double nx2 = field.nx() * field.nx();
  const double nz2 = field.nz() * field.nz();
  const double suppressed2 = variant == ClosedFormVariant::SingleZ ? nx2 : nz2;
  const double kept2 = variant == ClosedFormVariant::SingleZ ? nz2 : nx2;
  const double denom = 1.0 - suppressed2 * s2;
  if (denom <= 0.0) {
    throw numeric_error(
        "single-probe closed form undefined: 1 - n^2 sin^2(Bt) vanishes");
  }
  SingleProbeFunctions f;
  // The f2 functions carry the squared guard denominator; with a single
  // power the closed form misses the assembled matrix by a relative O(1/N).
  const double numer_kept = 2.0 * kept2 * angle + suppressed2 * sin2bt;
  f.f1_supp = numer_kept * numer_kept / (4.0 * s2 * denom);
  f.f2_supp = suppressed2 * kept2 * (1.0 - angle * cot) * (1.0 - angle * cot) /
              (denom * denom);
  const double numer_supp = 2.0 * angle - sin2bt;
  f.f1_kept = suppressed2 * kept2 * numer_supp * numer_supp / (4.0 * s2 * denom);
  const double mix = kept2 + suppressed2 * angle * cot;
  f.f2_kept = mix * mix / (denom * denom);
  f.f3 = suppressed2 * s2 / denom;
  return f;
}

}  // namespace

double closed_form_trace_inverse(ClosedFormVariant variant, int n,
                                 const MagneticField& field, EvolutionTime t) {
  if (n < 1) throw validation_error("closed form requires n >= 1");
  if (field.is_degenerate()) {
    throw degenerate_field_error("closed form requires b > 0");
  }
  const double angle = field.b() * t.value();
  if (std::abs(std::sin(angle)) < kNoInformationSine) {
    throw no_information_error(
        "no phase information at Bt equal to a multiple of pi");
  }
  const double prefactor = 1.0 / (4.0 * n * t.value() * t.value());
  if (variant == ClosedFormVariant::Dual) {
    const double s2 = std::sin(angle) * std::sin(angle);
    const double cos2bt = std::cos(2.0 * angle);
    const double a = s2 * (3.0 - cos2bt);
    const double c = s2 * (1.0 + cos2bt);
    return prefactor *
           (1.0 / (n + 1.0) + 2.0 * angle * angle / (a + c * n));
  }
  const SingleProbeFunctions f = closed_form_functions(variant, field, angle);
  const double supp = prefactor * (f.f1_supp + f.f2_supp / (f.f3 + n));
  const double kept = prefactor * (f.f1_kept + f.f2_kept / (f.f3 + n));
  return supp + kept;
}

ScalingFit scaling_exponent(std::span<const PrecisionPoint> points) {
  if (points.size() < 3) {
    throw validation_error("scaling fit requires at least three points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  const double count = static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].trace_inverse <= 0.0) {
      throw validation_error("scaling fit requires positive trace_inverse");
    }
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i].n == points[j].n) {
        throw validation_error("scaling fit requires distinct n values");
      }
    }
    const double x = std::log(static_cast<double>(points[i].n));
    const double y = std::log(points[i].trace_inverse);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double var_x = sxx - sx * sx / count;
  const double cov_xy = sxy - sx * sy / count;
  const double var_y = syy - sy * sy / count;
  const double slope = cov_xy / var_x;
  ScalingFit fit;
  fit.beta = -slope;
  fit.intercept = (sy - slope * sx) / count;
  fit.r_squared = var_y == 0.0 ? 1.0 : cov_xy * cov_xy / (var_x * var_y);
  return fit;
}

}  // namespace qecmag
