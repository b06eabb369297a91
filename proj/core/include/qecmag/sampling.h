#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qecmag/protocol.h"

namespace qecmag {

/// Counter-based pseudorandom stream (SplitMix64). Streams for repeated
/// experiments are derived from (seed, repetition index) so every repetition
/// owns an independent, reproducible sequence.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform double in [0, 1) built from the top 53 bits.
  double next_double();

 private:
  std::uint64_t state_;
};

/// Derives the stream seed for one repetition (or any substream index).
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

/// Finite-shot measurement record: syndrome-class counts and per-class +/-
/// string-measurement counts over m shots.
struct ExperimentData {
  std::vector<std::int64_t> counts_k;
  std::vector<std::int64_t> counts_plus;
  std::vector<std::int64_t> counts_minus;
  std::int64_t m = 0;
  std::uint64_t seed = 0;
};

/// Draws m shots from the outcome model: the class k by inverse-CDF sampling,
/// then the +/- outcome from (q_plus[k], q_minus[k]). Deterministic given the
/// seed. Throws validation_error when the class probabilities do not sum to 1
/// within 1e-9.
ExperimentData sample_experiment(const OutcomeModel& model, std::int64_t m,
                                 std::uint64_t seed);

/// JSON object with keys m, seed, counts_k, counts_plus, counts_minus.
std::string to_json_string(const ExperimentData& data);

}  // namespace qecmag
