#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "qecmag/oracle.h"

using namespace qecmag;
using doctest::Approx;

namespace {

const EvolutionTime kUnitTime(1.0);
const MagneticField kField = MagneticField::in_plane(0.3, 0.4);

std::uint32_t mask_of(std::initializer_list<int> qubits, int n_physical) {
  std::uint32_t mask = 0;
  for (int q : qubits) mask |= 1u << (n_physical - q);
  return mask;
}

std::uint32_t syndrome_index(std::initializer_list<int> outcomes) {
  std::uint32_t idx = 0;
  for (int o : outcomes) idx = (idx << 1) | (o < 0 ? 1u : 0u);
  return idx;
}

}  // namespace

TEST_CASE("five-qubit decoding table matches the expected rows") {
  const auto free_table = build_decoding_table(5, ProbeBasis::Z, false);
  const auto assisted = build_decoding_table(5, ProbeBasis::Z, true);

  CHECK(free_table.syndrome_count() == 16);
  CHECK(assisted.syndrome_count() == 16);

  // All-plus syndrome needs no correction.
  CHECK(free_table.correction[syndrome_index({+1, +1, +1, +1})] == 0);
  CHECK(assisted.correction[syndrome_index({+1, +1, +1, +1})] == 0);

  CHECK(free_table.correction[syndrome_index({-1, +1, +1, +1})] ==
        mask_of({1}, 5));
  CHECK(assisted.correction[syndrome_index({-1, +1, +1, +1})] ==
        mask_of({2, 3, 4, 5}, 5));

  CHECK(free_table.correction[syndrome_index({+1, -1, +1, +1})] ==
        mask_of({1, 2}, 5));
  CHECK(assisted.correction[syndrome_index({+1, -1, +1, +1})] ==
        mask_of({3, 4, 5}, 5));

  CHECK(free_table.correction[syndrome_index({-1, +1, -1, -1})] ==
        mask_of({1, 4}, 5));
  CHECK(assisted.correction[syndrome_index({-1, +1, -1, -1})] ==
        mask_of({2, 3, 5}, 5));

  CHECK(free_table.correction[syndrome_index({-1, -1, -1, -1})] ==
        mask_of({2, 4}, 5));
  CHECK(assisted.correction[syndrome_index({-1, -1, -1, -1})] ==
        mask_of({2, 4}, 5));
}

TEST_CASE("paired corrections across columns multiply to the logical operator") {
  const auto free_table = build_decoding_table(5, ProbeBasis::Z, false);
  const auto assisted = build_decoding_table(5, ProbeBasis::Z, true);
  const std::uint32_t logical = (1u << 5) - 1;
  for (int s = 0; s < 16; ++s) {
    const std::uint32_t product = free_table.correction[s] ^ assisted.correction[s];
    const bool same = product == 0;
    const bool differ_by_logical = product == logical;
    CHECK((same || differ_by_logical));
  }
}

TEST_CASE("corrections return every syndrome to the codespace") {
  for (int n : {4, 5, 6}) {
    for (bool assisted : {false, true}) {
      const auto table = build_decoding_table(n, ProbeBasis::Z, assisted);
      for (int s = 0; s < table.syndrome_count(); ++s) {
        // Syndrome of the correction itself must reproduce the row index so
        // applying it maps the error subspace back to all-stabilizers +1.
        std::uint32_t synd = 0;
        const std::uint32_t e = table.correction[s];
        for (int j = 0; j < n - 1; ++j) {
          const unsigned b0 = (e >> (n - 1 - j)) & 1u;
          const unsigned b1 = (e >> (n - 2 - j)) & 1u;
          synd = (synd << 1) | (b0 ^ b1);
        }
        CHECK(synd == static_cast<std::uint32_t>(s));
      }
    }
  }
}

TEST_CASE("ancilla-assisted corrections never touch the first qubit") {
  const auto table = build_decoding_table(6, ProbeBasis::Z, true);
  for (std::uint32_t mask : table.correction) {
    CHECK(((mask >> 5) & 1u) == 0);
  }
}

TEST_CASE("ancilla-free corrections have weight at most n/2") {
  for (int n : {4, 5, 7, 8}) {
    const auto table = build_decoding_table(n, ProbeBasis::Z, false);
    for (std::uint32_t mask : table.correction) {
      CHECK(std::popcount(mask) <= n / 2);
    }
  }
}

TEST_CASE("formatted table lists every syndrome once") {
  const std::string text = format_decoding_table(3);
  std::istringstream lines(text);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 5);  // header + 2^2 syndromes
  CHECK(text.find("ancilla-free") != std::string::npos);
  CHECK(text.find("ancilla-assisted") != std::string::npos);
}

TEST_CASE("simulation reproduces the closed-form class probabilities") {
  for (auto probe :
       {ProbeSpec::ancilla_assisted_z(2), ProbeSpec::ancilla_assisted_x(3),
        ProbeSpec::ancilla_free_z(3), ProbeSpec::ancilla_free_z(4),
        ProbeSpec::ancilla_free_z(6)}) {
    auto classes = simulate_protocol(probe, kField, kUnitTime);
    auto model = syndrome_distribution(probe, kField, kUnitTime);
    REQUIRE(classes.size() == model.p.size());
    for (std::size_t k = 0; k < model.p.size(); ++k) {
      CHECK(std::abs(classes[k].probability - model.p[k]) < 1e-12);
    }
  }
}

TEST_CASE("simulated N=2 probabilities match the stated values") {
  auto classes =
      simulate_protocol(ProbeSpec::ancilla_assisted_z(2), kField, kUnitTime);
  CHECK(classes[0].probability == Approx(0.841355661940211).epsilon(1e-12));
  CHECK(classes[1].probability == Approx(0.151797506232108).epsilon(1e-12));
  CHECK(classes[2].probability == Approx(0.006846831827681).epsilon(1e-12));
}

TEST_CASE("field along Z leaves a single class with the full GHZ phase") {
  for (int n : {2, 4}) {
    auto classes = simulate_protocol(ProbeSpec::ancilla_assisted_z(n),
                                     MagneticField::in_plane(0.0, 0.45),
                                     kUnitTime);
    CHECK(classes[0].probability == Approx(1.0).epsilon(1e-13));
    const std::complex<double> ratio = classes[0].c1 / classes[0].c0;
    CHECK(std::abs(ratio - std::exp(std::complex<double>(0, 2.0 * 0.45 * n))) <
          1e-12);
  }
}

TEST_CASE("ancilla-assisted post-correction states are equal-weight GHZ") {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (auto basis : {ProbeBasis::Z, ProbeBasis::X}) {
    for (int n = 1; n <= 7; ++n) {
      const ProbeSpec probe(n, basis, true);
      auto classes = simulate_protocol(probe, kField, kUnitTime);
      auto model = outcome_model(probe, kField, kUnitTime);
      for (int k = 0; k <= n; ++k) {
        if (classes[k].probability < 1e-18) continue;
        CHECK(std::abs(std::abs(classes[k].c0) - inv_sqrt2) < 1e-10);
        CHECK(std::abs(std::abs(classes[k].c1) - inv_sqrt2) < 1e-10);
        const std::complex<double> expected =
            std::exp(std::complex<double>(0, model.phi[k]));
        CHECK(std::abs(classes[k].c1 / classes[k].c0 - expected) < 1e-10);
        CHECK(classes[k].max_intra_class_deviation < 1e-12);
      }
    }
  }
}

TEST_CASE("ancilla-free post-correction states match the amplitude formula") {
  for (int n : {3, 4, 5, 6}) {
    const ProbeSpec probe = ProbeSpec::ancilla_free_z(n);
    auto classes = simulate_protocol(probe, kField, kUnitTime);
    for (int k = 0; k <= n / 2; ++k) {
      auto amps = pec_state_ancilla_free(probe, kField, kUnitTime, k);
      const double norm = std::sqrt(std::norm(amps.c0) + std::norm(amps.c1));
      std::complex<double> anchor = amps.c0;
      if (std::abs(anchor) < 1e-14) anchor = amps.c1;
      const std::complex<double> gauge = std::conj(anchor) / std::abs(anchor);
      CHECK(std::abs(amps.c0 * gauge / norm - classes[k].c0) < 1e-10);
      CHECK(std::abs(amps.c1 * gauge / norm - classes[k].c1) < 1e-10);
    }
  }
}

TEST_CASE("within a class every syndrome appears with equal probability") {
  auto classes =
      simulate_protocol(ProbeSpec::ancilla_free_z(5), kField, kUnitTime);
  CHECK(classes[1].syndrome_count == 5);
  CHECK(classes[2].syndrome_count == 10);
  for (const auto& cls : classes) {
    CHECK(cls.max_intra_class_deviation < 1e-12);
  }
}

TEST_CASE("3D simulation matches the 3D outcome model") {
  const MagneticField f(0.3, 0.25, 0.4);
  for (int n : {2, 4}) {
    const ProbeSpec probe = ProbeSpec::three_d_z(n);
    auto classes = simulate_protocol(probe, f, kUnitTime);
    auto model = outcome_model(probe, f, kUnitTime);
    for (int k = 0; k <= n; ++k) {
      CHECK(std::abs(classes[k].probability - model.p[k]) < 1e-12);
      if (classes[k].probability < 1e-18) continue;
      const std::complex<double> expected =
          std::exp(std::complex<double>(0, model.phi[k]));
      CHECK(std::abs(classes[k].c1 / classes[k].c0 - expected) < 1e-10);
    }
  }
}

TEST_CASE("simulation size limit") {
  CHECK_THROWS_AS(simulate_protocol(ProbeSpec::ancilla_assisted_z(14), kField,
                                    kUnitTime),
                  size_limit_error);
  CHECK_THROWS_AS(oracle_qfim(ProbeBasis::Z, 13, kField, kUnitTime),
                  size_limit_error);
}

TEST_CASE("oracle QFIM of a single qubit phase estimation") {
  auto q = oracle_qfim(ProbeBasis::Z, 1, MagneticField::in_plane(0.0, 0.5),
                       kUnitTime);
  CHECK(q(1, 1) == Approx(4.0).epsilon(1e-5));
}

TEST_CASE("oracle QFIM obeys the basis swap symmetry") {
  auto qx = oracle_qfim(ProbeBasis::X, 3, MagneticField::in_plane(0.4, 0.3),
                        kUnitTime);
  auto qz = oracle_qfim(ProbeBasis::Z, 3, kField, kUnitTime);
  CHECK(qx(0, 0) == Approx(qz(1, 1)).epsilon(1e-9));
  CHECK(qx(1, 1) == Approx(qz(0, 0)).epsilon(1e-9));
  CHECK(qx(0, 1) == Approx(qz(0, 1)).epsilon(1e-9));
}
