#include "qecmag/sampling.h"

#include <cmath>

#include <json.hpp>

namespace qecmag {

std::uint64_t RandomStream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  // One SplitMix64 step over the (seed, index) pair decorrelates streams.
  RandomStream mixer(seed ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  return mixer.next_u64();
}

ExperimentData sample_experiment(const OutcomeModel& model, std::int64_t m,
                                 std::uint64_t seed) {
  if (m < 1) {
    throw validation_error("sample_experiment requires at least one shot");
  }
  const std::size_t classes = model.p.size();
  if (classes == 0 || model.q_plus.size() != classes) {
    throw validation_error("outcome model is incomplete");
  }
  double total = 0.0;
  for (double p : model.p) {
    if (!(p >= 0.0) || p > 1.0) {
      throw validation_error("outcome model probabilities out of range");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw validation_error("outcome model probabilities do not sum to 1");
  }

  std::vector<double> cdf(classes);
  double acc = 0.0;
  for (std::size_t i = 0; i < classes; ++i) {
    acc += model.p[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  ExperimentData data;
  data.counts_k.assign(classes, 0);
  data.counts_plus.assign(classes, 0);
  data.counts_minus.assign(classes, 0);
  data.m = m;
  data.seed = seed;

  RandomStream rng(seed);
  for (std::int64_t shot = 0; shot < m; ++shot) {
    const double u = rng.next_double();
    std::size_t k = 0;
    while (k + 1 < classes && u >= cdf[k]) ++k;
    data.counts_k[k] += 1;
    if (rng.next_double() < model.q_plus[k]) {
      data.counts_plus[k] += 1;
    } else {
      data.counts_minus[k] += 1;
    }
  }
  return data;
}

std::string to_json_string(const ExperimentData& data) {
  nlohmann::json j;
  j["m"] = data.m;
  j["seed"] = data.seed;
  j["counts_k"] = data.counts_k;
  j["counts_plus"] = data.counts_plus;
  j["counts_minus"] = data.counts_minus;
  return j.dump();
}

}  // namespace qecmag
