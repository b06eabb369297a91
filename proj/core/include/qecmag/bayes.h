#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qecmag/sampling.h"

namespace qecmag {

/// Uniform rectangular grid over (bx, bz). The default box keeps b > 0 and
/// Bt below pi/2 everywhere at t = 1.
struct GridSpec {
  double bx_lo = 0.05, bx_hi = 1.0;
  double bz_lo = 0.05, bz_hi = 1.0;
  int nx = 200, nz = 200;

  static GridSpec default_box() { return {}; }
};

/// Discrete probability distribution over grid cell centers; weights sum
/// to 1. Storage is row-major with bx varying fastest.
struct PosteriorGrid {
  std::vector<double> bx_axis;
  std::vector<double> bz_axis;
  std::vector<double> density;

  static PosteriorGrid uniform(const GridSpec& spec);

  double& at(int ix, int iz) { return density[static_cast<std::size_t>(iz) * bx_axis.size() + ix]; }
  double at(int ix, int iz) const { return density[static_cast<std::size_t>(iz) * bx_axis.size() + ix]; }

  double sum() const;
  void normalize();
  double mean_bx() const;
  double mean_bz() const;
  double var_bx() const;
  double var_bz() const;
};

/// Discrete 1D posterior over the effective field in (-pi/2, pi/2], stored as
/// heterogeneous cells (adaptively refined around high-density regions so the
/// credible band is resolved well below the posterior width).
struct BeffPosterior {
  std::vector<double> theta;
  std::vector<double> width;
  std::vector<double> weight;  // cell masses, sum 1
  int probe_n = 0;
};

/// Posterior over (bx, bz) from the syndrome-count likelihood
/// prod_k p_k^(C_k), accumulated in log space and multiplied by the prior.
PosteriorGrid posterior_from_syndromes(const ProbeSpec& probe,
                                       const ExperimentData& data,
                                       EvolutionTime t,
                                       const PosteriorGrid& prior);

/// Posterior over the effective field from the string-measurement likelihood
/// prod_k cos^2(B_eff (N-k))^(C_k+) sin^2(B_eff (N-k))^(C_k-).
/// grid_points sets the base resolution of the B_eff axis.
BeffPosterior posterior_over_beff(const ProbeSpec& probe,
                                  const ExperimentData& data,
                                  int grid_points = 2001);

/// Maps the highest-density credible set of the B_eff posterior (mass level
/// `band`) through B_eff(bx, bz) as a hard indicator and multiplies it with
/// the syndrome posterior. Throws empty_overlap_error when nothing survives.
PosteriorGrid combine_posteriors(const PosteriorGrid& syndrome_post,
                                 const BeffPosterior& beff_post,
                                 const ProbeSpec& probe, EvolutionTime t,
                                 double band);

struct EstimationConfig {
  GridSpec grid;
  int beff_points = 2001;
  double band = 0.99;
  /// Extra zoom passes of the (bx, bz) grid around the posterior mode; each
  /// pass reruns the full pipeline on the finer grid. Keeps estimator
  /// quantization below the posterior width at large N.
  int refine_levels = 3;
};

struct EstimationResult {
  struct Estimate {
    int rep = 0;
    double bx = 0.0;
    double bz = 0.0;
    bool flagged = false;
  };

  std::vector<Estimate> estimates;
  /// Sample covariance of the unflagged estimates, row-major (xx, xz, zx, zz).
  std::optional<std::array<double, 4>> covariance;
  int flagged_count = 0;
  std::int64_t m = 0;
  int r = 0;

  double trace_covariance() const;
};

/// Runs r independent simulated experiments: per repetition each probe's data
/// is sampled at the true field and pushed through the syndrome posterior,
/// B_eff posterior, and overlap steps; probes combine by pointwise product and
/// the posterior mean is the estimate. Repetitions whose overlap is empty are
/// flagged and excluded from the covariance.
EstimationResult run_estimation(std::span<const ProbeSpec> probes,
                                const MagneticField& truth, EvolutionTime t,
                                std::int64_t m, int r,
                                const EstimationConfig& config,
                                std::uint64_t seed);

/// JSON summary with the covariance, M Tr[Cov], and a reference Tr[F^-1].
std::string to_json_string(const EstimationResult& result,
                           double trace_inverse_ref);

}  // namespace qecmag
