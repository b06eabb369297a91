#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "qecmag/sampling.h"

using namespace qecmag;
using doctest::Approx;

namespace {
const EvolutionTime kUnitTime(1.0);
const MagneticField kField = MagneticField::in_plane(0.3, 0.4);
}  // namespace

TEST_CASE("deterministic single-class model") {
  OutcomeModel model;
  model.k_values = {0, 1};
  model.p = {1.0, 0.0};
  model.phi = {0.0, 0.0};
  model.q_plus = {1.0, 1.0};
  model.q_minus = {0.0, 0.0};
  auto data = sample_experiment(model, 100, 7);
  CHECK(data.counts_k[0] == 100);
  CHECK(data.counts_k[1] == 0);
  CHECK(data.counts_plus[0] == 100);
  CHECK(data.counts_minus[0] == 0);
}

TEST_CASE("same seed reproduces identical data") {
  auto model = outcome_model(ProbeSpec::ancilla_assisted_z(4), kField, kUnitTime);
  auto a = sample_experiment(model, 5000, 42);
  auto b = sample_experiment(model, 5000, 42);
  CHECK(a.counts_k == b.counts_k);
  CHECK(a.counts_plus == b.counts_plus);
  CHECK(a.counts_minus == b.counts_minus);
  auto c = sample_experiment(model, 5000, 43);
  CHECK(a.counts_k != c.counts_k);
}

TEST_CASE("count bookkeeping invariants") {
  auto model = outcome_model(ProbeSpec::ancilla_assisted_z(6), kField, kUnitTime);
  auto data = sample_experiment(model, 20000, 11);
  std::int64_t total = 0;
  for (std::size_t k = 0; k < data.counts_k.size(); ++k) {
    CHECK(data.counts_plus[k] + data.counts_minus[k] == data.counts_k[k]);
    total += data.counts_k[k];
  }
  CHECK(total == 20000);
}

TEST_CASE("empirical frequencies converge to the class probabilities") {
  auto model = outcome_model(ProbeSpec::ancilla_assisted_z(2), kField, kUnitTime);
  const std::int64_t m = 1000000;
  auto data = sample_experiment(model, m, 2024);
  for (std::size_t k = 0; k < model.p.size(); ++k) {
    const double freq = static_cast<double>(data.counts_k[k]) / m;
    const double sigma = std::sqrt(model.p[k] * (1.0 - model.p[k]) / m);
    CHECK(std::abs(freq - model.p[k]) < 5.0 * sigma + 1e-6);
  }
}

TEST_CASE("plus/minus outcomes pass a chi-square check per class") {
  auto model = outcome_model(ProbeSpec::ancilla_assisted_z(3), kField, kUnitTime);
  auto data = sample_experiment(model, 100000, 99);
  // chi-square with 1 dof; significance 1e-3 corresponds to ~10.83.
  for (std::size_t k = 0; k < model.p.size(); ++k) {
    if (data.counts_k[k] < 100) continue;
    const double expect_plus = data.counts_k[k] * model.q_plus[k];
    const double expect_minus = data.counts_k[k] * model.q_minus[k];
    if (expect_plus < 5 || expect_minus < 5) continue;
    const double chi2 =
        std::pow(data.counts_plus[k] - expect_plus, 2) / expect_plus +
        std::pow(data.counts_minus[k] - expect_minus, 2) / expect_minus;
    CHECK(chi2 < 10.83);
  }
}

TEST_CASE("invalid models are rejected") {
  OutcomeModel model;
  model.k_values = {0, 1};
  model.p = {0.6, 0.3};  // sums to 0.9
  model.phi = {0.0, 0.0};
  model.q_plus = {1.0, 1.0};
  model.q_minus = {0.0, 0.0};
  CHECK_THROWS_AS(sample_experiment(model, 10, 1), validation_error);
  model.p = {0.6, 0.4};
  CHECK_THROWS_AS(sample_experiment(model, 0, 1), validation_error);
}

TEST_CASE("derived streams differ across repetition indices") {
  const std::uint64_t base = 1234;
  RandomStream a(derive_stream_seed(base, 0));
  RandomStream b(derive_stream_seed(base, 1));
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
  CHECK(derive_stream_seed(base, 5) == derive_stream_seed(base, 5));
}

TEST_CASE("uniform doubles stay in the half-open unit interval") {
  RandomStream rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_double();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("experiment data serializes to JSON") {
  auto model = outcome_model(ProbeSpec::ancilla_assisted_z(2), kField, kUnitTime);
  auto data = sample_experiment(model, 100, 5);
  auto j = nlohmann::json::parse(to_json_string(data));
  CHECK(j["m"].get<std::int64_t>() == 100);
  CHECK(j["seed"].get<std::uint64_t>() == 5);
  CHECK(j["counts_k"].size() == 3);
  CHECK(j["counts_plus"].size() == 3);
  CHECK(j["counts_minus"].size() == 3);
}
