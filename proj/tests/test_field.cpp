#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qecmag/field.h"

using namespace qecmag;
using doctest::Approx;

namespace {
const EvolutionTime kUnitTime(1.0);
}

TEST_CASE("magnetic field magnitude and direction cosines") {
  MagneticField f = MagneticField::in_plane(0.3, 0.4);
  CHECK(f.b() == Approx(0.5).epsilon(1e-15));
  CHECK(f.nx() == Approx(0.6).epsilon(1e-15));
  CHECK(f.nz() == Approx(0.8).epsilon(1e-15));
  CHECK(f.nx() * f.nx() + f.ny() * f.ny() + f.nz() * f.nz() ==
        Approx(1.0).epsilon(1e-12));

  MagneticField zero = MagneticField::in_plane(0.0, 0.0);
  CHECK(zero.is_degenerate());
  CHECK_THROWS_AS(zero.nx(), degenerate_field_error);
  CHECK_THROWS_AS(MagneticField(std::nan(""), 0.0, 0.1), validation_error);
}

TEST_CASE("evolution time must be positive") {
  CHECK_THROWS_AS(EvolutionTime(0.0), validation_error);
  CHECK_THROWS_AS(EvolutionTime(-1.0), validation_error);
  CHECK(EvolutionTime(2.5).value() == 2.5);
}

TEST_CASE("single qubit unitary along the axes") {
  // Field along Z gives a pure phase.
  auto uz = single_qubit_unitary(MagneticField::in_plane(0.0, std::numbers::pi / 4),
                                 kUnitTime);
  CHECK(uz.u00.real() == Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-15));
  CHECK(uz.u00.imag() == Approx(-std::sin(std::numbers::pi / 4)).epsilon(1e-15));
  CHECK(std::abs(uz.u01) == Approx(0.0).epsilon(1e-15));

  // Field along X mixes the basis states.
  auto ux = single_qubit_unitary(MagneticField::in_plane(std::numbers::pi / 4, 0.0),
                                 kUnitTime);
  CHECK(ux.u00.real() == Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-15));
  CHECK(ux.u00.imag() == Approx(0.0).epsilon(1e-15));
  CHECK(ux.u01.imag() == Approx(-std::sin(std::numbers::pi / 4)).epsilon(1e-15));
}

TEST_CASE("single qubit unitary at a generic field point") {
  auto u = single_qubit_unitary(MagneticField::in_plane(0.3, 0.4), kUnitTime);
  CHECK(u.u00.real() == Approx(0.877582561890373).epsilon(1e-12));
  CHECK(u.u00.imag() == Approx(-0.383540430883362).epsilon(1e-12));
  CHECK(u.u01.real() == Approx(0.0).epsilon(1e-15));
  CHECK(u.u01.imag() == Approx(-0.287655323162522).epsilon(1e-12));
  CHECK(u.u11 == std::conj(u.u00));
  CHECK(u.u10 == u.u01);
  CHECK(unitarity_residual(u) < 1e-14);
}

TEST_CASE("zero field yields identity elements") {
  auto u = single_qubit_unitary(MagneticField::in_plane(0.0, 0.0), kUnitTime);
  CHECK(u.u00 == std::complex<double>{1.0, 0.0});
  CHECK(u.u01 == std::complex<double>{0.0, 0.0});
  CHECK(u.u11 == std::complex<double>{1.0, 0.0});
}

TEST_CASE("unitarity residual stays below 1e-12 over the field grid") {
  double worst = 0.0;
  for (int i = 1; i <= 100; ++i) {
    for (int j = 1; j <= 100; ++j) {
      const MagneticField f =
          MagneticField::in_plane(i * std::numbers::pi / 100.0,
                                  j * std::numbers::pi / 100.0);
      worst = std::max(worst, unitarity_residual(single_qubit_unitary(f, kUnitTime)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("unitarity holds with a Y component") {
  auto u = single_qubit_unitary(MagneticField(0.3, 0.2, 0.4), kUnitTime);
  CHECK(unitarity_residual(u) < 1e-14);
  CHECK(u.u10 == -std::conj(u.u01));
}

TEST_CASE("effective field values") {
  CHECK(effective_field(MagneticField::in_plane(0.0, 0.5), kUnitTime,
                        ProbeBasis::Z) == Approx(0.5).epsilon(1e-14));
  const MagneticField f = MagneticField::in_plane(0.3, 0.4);
  CHECK(effective_field(f, kUnitTime, ProbeBasis::Z) ==
        Approx(0.412025950458301).epsilon(1e-12));
  CHECK(effective_field(f, kUnitTime, ProbeBasis::X) ==
        Approx(0.316745604630403).epsilon(1e-12));
  CHECK(effective_field(f, kUnitTime, ProbeBasis::Z) ==
        Approx(std::atan(0.8 * std::tan(0.5))).epsilon(1e-14));
  CHECK_THROWS_AS(effective_field(MagneticField::in_plane(0.0, 0.0), kUnitTime,
                                  ProbeBasis::Z),
                  degenerate_field_error);
}

TEST_CASE("effective field is odd in the direction cosine") {
  for (double bx : {0.1, 0.5, 1.2}) {
    for (double bz : {0.2, 0.7, 1.4}) {
      const double plus = effective_field(MagneticField::in_plane(bx, bz),
                                          kUnitTime, ProbeBasis::Z);
      const double minus = effective_field(MagneticField::in_plane(bx, -bz),
                                           kUnitTime, ProbeBasis::Z);
      CHECK(plus == Approx(-minus).epsilon(1e-13));
    }
  }
}

TEST_CASE("effective field approaches pi/2 at Bt near pi/2") {
  // Bt slightly below an odd multiple of pi/2 stays on the principal branch.
  const double b = std::numbers::pi / 2 - 1e-9;
  const MagneticField f = MagneticField::in_plane(0.6 * b, 0.8 * b);
  const double beff = effective_field(f, kUnitTime, ProbeBasis::Z);
  CHECK(beff > 0.0);
  CHECK(std::abs(beff - std::numbers::pi / 2) < 1e-8);
}

TEST_CASE("u_sum_coefficient examples") {
  const MagneticField along_z = MagneticField::in_plane(0.0, 0.7);
  auto uz = single_qubit_unitary(along_z, kUnitTime);
  CHECK(std::abs(u_sum_coefficient(1, 0, uz) -
                 std::exp(std::complex<double>(0.0, -0.7))) < 1e-14);

  const MagneticField f = MagneticField::in_plane(0.3, 0.4);
  auto u = single_qubit_unitary(f, kUnitTime);
  auto amp = u_sum_coefficient(2, 1, u);
  CHECK(amp.real() == Approx(0.0).epsilon(1e-15));
  CHECK(amp.imag() == Approx(-0.504882590884738).epsilon(1e-12));

  auto top = u_sum_coefficient(3, 3, u);
  CHECK(std::abs(top - (cpow_int(u.u01, 3) + cpow_int(u.u11, 3))) < 1e-15);

  CHECK_THROWS_AS(u_sum_coefficient(2, 3, u), validation_error);
}

TEST_CASE("GHZ amplitude normalization sum equals 2") {
  // sum_k C(n,k) |U_{n,k}|^2 = 2 for the evolved GHZ_Z components.
  for (double bx : {0.2, 0.9}) {
    for (double bz : {0.1, 1.3}) {
      const auto u =
          single_qubit_unitary(MagneticField::in_plane(bx, bz), kUnitTime);
      for (int n : {1, 4, 11}) {
        double total = 0.0;
        double c = 1.0;
        for (int k = 0; k <= n; ++k) {
          total += c * std::norm(u_sum_coefficient(n, k, u));
          c = c * (n - k) / (k + 1.0);
        }
        CHECK(total == Approx(2.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("probe frame unitary swaps components for the X basis") {
  const MagneticField f = MagneticField::in_plane(0.3, 0.4);
  auto ux = probe_frame_unitary(f, kUnitTime, ProbeBasis::X);
  auto swapped = single_qubit_unitary(MagneticField::in_plane(0.4, 0.3), kUnitTime);
  CHECK(std::abs(ux.u00 - swapped.u00) < 1e-15);
  CHECK(std::abs(ux.u01 - swapped.u01) < 1e-15);
}
