#include "qecmag/bayes.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace qecmag {

namespace {

constexpr double kRefineMassCover = 0.9999;
constexpr int kRefineSplit = 16;
constexpr int kMaxBeffRefinePasses = 3;

std::vector<double> linspace_centers(double lo, double hi, int count) {
  std::vector<double> centers(count);
  const double step = (hi - lo) / count;
  for (int i = 0; i < count; ++i) {
    centers[i] = lo + (i + 0.5) * step;
  }
  return centers;
}

double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// log prod_k p_k^(C_k) for one grid cell, up to a field-independent constant.
/// Ancilla-assisted classes collapse to W_a log(a) + W_e log(e).
struct SyndromeLikelihood {
  const ProbeSpec& probe;
  double t;
  double weight_a = 0.0;
  double weight_e = 0.0;
  const ExperimentData& data;

  SyndromeLikelihood(const ProbeSpec& probe_, const ExperimentData& data_,
                     EvolutionTime t_)
      : probe(probe_), t(t_.value()), data(data_) {
    if (probe.ancilla_assisted) {
      for (std::size_t k = 0; k < data.counts_k.size(); ++k) {
        weight_a += static_cast<double>(data.counts_k[k]) *
                    (probe.n - static_cast<double>(k));
        weight_e += static_cast<double>(data.counts_k[k]) * static_cast<double>(k);
      }
    }
  }

  double operator()(double bx, double bz) const {
    const MagneticField field(bx, 0.0, bz);
    if (probe.ancilla_assisted) {
      const double angle = field.b() * t;
      const double s2 = std::sin(angle) * std::sin(angle);
      const double along = probe.basis == ProbeBasis::Z ? field.nz() : field.nx();
      const double a = 1.0 - s2 + along * along * s2;
      const double e = 1.0 - a;
      return weight_a * std::log(a) + weight_e * std::log(e);
    }
    const OutcomeModel model =
        syndrome_distribution(probe, field, EvolutionTime(t));
    double ll = 0.0;
    for (std::size_t k = 0; k < data.counts_k.size(); ++k) {
      if (data.counts_k[k] == 0) continue;
      ll += static_cast<double>(data.counts_k[k]) *
            (std::log(model.p[k]) - log_binom(probe.n, static_cast<int>(k)));
    }
    return ll;
  }
};

/// Intervals of the B_eff axis forming the credible set.
struct CredibleSet {
  std::vector<double> lo, hi;

  bool contains(double theta) const { return intersects(theta, theta); }

  /// True when [tmin, tmax] meets any interval. Grid cells are tested with
  /// their full B_eff range so a band thinner than one cell still selects the
  /// cells it crosses. Intervals are sorted and disjoint, so among those with
  /// lo <= tmax the largest hi is the last one.
  bool intersects(double tmin, double tmax) const {
    const auto it = std::upper_bound(lo.begin(), lo.end(), tmax);
    if (it == lo.begin()) return false;
    const std::size_t last = static_cast<std::size_t>(it - lo.begin()) - 1;
    return hi[last] >= tmin;
  }
};

CredibleSet credible_set(const BeffPosterior& post, double band) {
  std::vector<std::size_t> order(post.theta.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return post.weight[a] / post.width[a] > post.weight[b] / post.width[b];
  });
  std::vector<std::size_t> selected;
  double mass = 0.0;
  for (std::size_t idx : order) {
    selected.push_back(idx);
    mass += post.weight[idx];
    if (mass >= band) break;
  }
  std::vector<std::pair<double, double>> spans;
  spans.reserve(selected.size());
  for (std::size_t idx : selected) {
    spans.emplace_back(post.theta[idx] - 0.5 * post.width[idx],
                       post.theta[idx] + 0.5 * post.width[idx]);
  }
  std::sort(spans.begin(), spans.end());
  CredibleSet set;
  for (const auto& [lo, hi] : spans) {
    if (!set.lo.empty() && lo <= set.hi.back() + 1e-15) {
      set.hi.back() = std::max(set.hi.back(), hi);
    } else {
      set.lo.push_back(lo);
      set.hi.push_back(hi);
    }
  }
  return set;
}

/// log prod_k q_(k,+)^(C_k+) q_(k,-)^(C_k-) at effective field theta,
/// evaluated with a Chebyshev-style recurrence over the multiples of theta.
double log_beff_likelihood(const ExperimentData& data, int n, double theta) {
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  double cm = 1.0, sm = 0.0;  // cos(m theta), sin(m theta) at m = 0
  double ll = 0.0;
  for (int m = 0; m <= n; ++m) {
    const int k = n - m;
    if (k < static_cast<int>(data.counts_k.size())) {
      if (data.counts_plus[k] > 0) {
        ll += static_cast<double>(data.counts_plus[k]) * std::log(cm * cm);
      }
      if (data.counts_minus[k] > 0) {
        ll += static_cast<double>(data.counts_minus[k]) * std::log(sm * sm);
      }
    }
    const double next_c = cm * c1 - sm * s1;
    const double next_s = sm * c1 + cm * s1;
    cm = next_c;
    sm = next_s;
  }
  return ll;
}

void normalize_beff(BeffPosterior& post, std::vector<double>& log_density) {
  const double max_ll =
      *std::max_element(log_density.begin(), log_density.end());
  if (!(max_ll > -std::numeric_limits<double>::infinity())) {
    throw numeric_error("string-measurement data impossible everywhere");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < post.theta.size(); ++i) {
    post.weight[i] = std::exp(log_density[i] - max_ll) * post.width[i];
    total += post.weight[i];
  }
  for (double& w : post.weight) w /= total;
}

}  // namespace

PosteriorGrid PosteriorGrid::uniform(const GridSpec& spec) {
  if (spec.nx < 2 || spec.nz < 2 || spec.bx_hi <= spec.bx_lo ||
      spec.bz_hi <= spec.bz_lo) {
    throw validation_error("invalid grid specification");
  }
  PosteriorGrid grid;
  grid.bx_axis = linspace_centers(spec.bx_lo, spec.bx_hi, spec.nx);
  grid.bz_axis = linspace_centers(spec.bz_lo, spec.bz_hi, spec.nz);
  grid.density.assign(grid.bx_axis.size() * grid.bz_axis.size(),
                      1.0 / (static_cast<double>(spec.nx) * spec.nz));
  return grid;
}

double PosteriorGrid::sum() const {
  return std::accumulate(density.begin(), density.end(), 0.0);
}

void PosteriorGrid::normalize() {
  const double total = sum();
  if (total <= 0.0) {
    throw numeric_error("posterior has no mass");
  }
  for (double& w : density) w /= total;
}

double PosteriorGrid::mean_bx() const {
  double mean = 0.0;
  for (std::size_t iz = 0; iz < bz_axis.size(); ++iz) {
    for (std::size_t ix = 0; ix < bx_axis.size(); ++ix) {
      mean += density[iz * bx_axis.size() + ix] * bx_axis[ix];
    }
  }
  return mean;
}

double PosteriorGrid::mean_bz() const {
  double mean = 0.0;
  for (std::size_t iz = 0; iz < bz_axis.size(); ++iz) {
    for (std::size_t ix = 0; ix < bx_axis.size(); ++ix) {
      mean += density[iz * bx_axis.size() + ix] * bz_axis[iz];
    }
  }
  return mean;
}

double PosteriorGrid::var_bx() const {
  const double mean = mean_bx();
  double var = 0.0;
  for (std::size_t iz = 0; iz < bz_axis.size(); ++iz) {
    for (std::size_t ix = 0; ix < bx_axis.size(); ++ix) {
      const double d = bx_axis[ix] - mean;
      var += density[iz * bx_axis.size() + ix] * d * d;
    }
  }
  return var;
}

double PosteriorGrid::var_bz() const {
  const double mean = mean_bz();
  double var = 0.0;
  for (std::size_t iz = 0; iz < bz_axis.size(); ++iz) {
    for (std::size_t ix = 0; ix < bx_axis.size(); ++ix) {
      const double d = bz_axis[iz] - mean;
      var += density[iz * bx_axis.size() + ix] * d * d;
    }
  }
  return var;
}

PosteriorGrid posterior_from_syndromes(const ProbeSpec& probe,
                                       const ExperimentData& data,
                                       EvolutionTime t,
                                       const PosteriorGrid& prior) {
  if (data.counts_k.empty()) {
    throw validation_error("experiment data has no syndrome counts");
  }
  const SyndromeLikelihood likelihood(probe, data, t);
  PosteriorGrid post = prior;
  std::vector<double> ll(prior.density.size(),
                         -std::numeric_limits<double>::infinity());
  double max_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t iz = 0; iz < prior.bz_axis.size(); ++iz) {
    for (std::size_t ix = 0; ix < prior.bx_axis.size(); ++ix) {
      const std::size_t idx = iz * prior.bx_axis.size() + ix;
      if (prior.density[idx] <= 0.0) continue;
      ll[idx] = likelihood(prior.bx_axis[ix], prior.bz_axis[iz]);
      max_ll = std::max(max_ll, ll[idx]);
    }
  }
  if (!(max_ll > -std::numeric_limits<double>::infinity())) {
    throw numeric_error("syndrome data impossible everywhere on the grid");
  }
  for (std::size_t idx = 0; idx < ll.size(); ++idx) {
    post.density[idx] =
        prior.density[idx] > 0.0
            ? prior.density[idx] * std::exp(ll[idx] - max_ll)
            : 0.0;
  }
  post.normalize();
  return post;
}

BeffPosterior posterior_over_beff(const ProbeSpec& probe,
                                  const ExperimentData& data, int grid_points) {
  if (grid_points < 3) {
    throw validation_error("B_eff grid requires at least three points");
  }
  const double pi = std::acos(-1.0);
  BeffPosterior post;
  post.probe_n = probe.n;
  post.theta.resize(grid_points);
  post.width.assign(grid_points, pi / grid_points);
  post.weight.assign(grid_points, 0.0);
  std::vector<double> log_density(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    post.theta[i] = -pi / 2.0 + (i + 0.5) * pi / grid_points;
    log_density[i] = log_beff_likelihood(data, probe.n, post.theta[i]);
  }
  normalize_beff(post, log_density);

  // Refine the cells carrying the posterior mass until each is much narrower
  // than their combined width. The credible band (possibly split over the
  // +/- reflection modes) then stays resolved far below its own width at
  // every probe size, without a dense global grid.
  for (int pass = 0; pass < kMaxBeffRefinePasses; ++pass) {
    std::vector<std::size_t> order(post.theta.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return post.weight[a] / post.width[a] > post.weight[b] / post.width[b];
    });
    std::vector<bool> refine(post.theta.size(), false);
    double mass = 0.0;
    double selected_width = 0.0;
    std::vector<std::size_t> selected;
    for (std::size_t idx : order) {
      selected.push_back(idx);
      mass += post.weight[idx];
      selected_width += post.width[idx];
      if (mass >= kRefineMassCover) break;
    }
    const double target = std::max(selected_width / 64.0, 1e-7);
    bool any = false;
    for (std::size_t idx : selected) {
      if (post.width[idx] > target) {
        refine[idx] = true;
        any = true;
      }
    }
    if (!any) break;

    BeffPosterior refined;
    refined.probe_n = post.probe_n;
    std::vector<double> refined_log;
    for (std::size_t i = 0; i < post.theta.size(); ++i) {
      if (!refine[i]) {
        refined.theta.push_back(post.theta[i]);
        refined.width.push_back(post.width[i]);
        refined_log.push_back(log_density[i]);
        continue;
      }
      const double lo = post.theta[i] - 0.5 * post.width[i];
      const double sub_width = post.width[i] / kRefineSplit;
      for (int j = 0; j < kRefineSplit; ++j) {
        const double theta = lo + (j + 0.5) * sub_width;
        refined.theta.push_back(theta);
        refined.width.push_back(sub_width);
        refined_log.push_back(log_beff_likelihood(data, probe.n, theta));
      }
    }
    refined.weight.assign(refined.theta.size(), 0.0);
    normalize_beff(refined, refined_log);
    post = std::move(refined);
    log_density = std::move(refined_log);
  }
  return post;
}

PosteriorGrid combine_posteriors(const PosteriorGrid& syndrome_post,
                                 const BeffPosterior& beff_post,
                                 const ProbeSpec& probe, EvolutionTime t,
                                 double band) {
  if (!(band > 0.0) || !(band < 1.0)) {
    throw validation_error("credible band level must lie in (0, 1)");
  }
  const CredibleSet set = credible_set(beff_post, band);
  PosteriorGrid post = syndrome_post;
  const double half_x =
      post.bx_axis.size() > 1 ? 0.5 * (post.bx_axis[1] - post.bx_axis[0]) : 0.0;
  const double half_z =
      post.bz_axis.size() > 1 ? 0.5 * (post.bz_axis[1] - post.bz_axis[0]) : 0.0;
  for (std::size_t iz = 0; iz < post.bz_axis.size(); ++iz) {
    for (std::size_t ix = 0; ix < post.bx_axis.size(); ++ix) {
      const std::size_t idx = iz * post.bx_axis.size() + ix;
      if (post.density[idx] <= 0.0) continue;
      // Effective-field range over the cell, bounded by the corner values.
      double tmin = std::numeric_limits<double>::infinity();
      double tmax = -tmin;
      for (double dx : {-half_x, half_x}) {
        for (double dz : {-half_z, half_z}) {
          const MagneticField corner(post.bx_axis[ix] + dx, 0.0,
                                     post.bz_axis[iz] + dz);
          const double theta = effective_field(corner, t, probe.basis);
          tmin = std::min(tmin, theta);
          tmax = std::max(tmax, theta);
        }
      }
      if (!set.intersects(tmin, tmax)) post.density[idx] = 0.0;
    }
  }
  if (post.sum() <= 0.0) {
    throw empty_overlap_error(
        "credible band and syndrome posterior do not overlap");
  }
  post.normalize();
  return post;
}

namespace {

struct ProbeRun {
  const ProbeSpec* probe;
  ExperimentData data;
  BeffPosterior beff;
};

PosteriorGrid combined_posterior_on_grid(const std::vector<ProbeRun>& runs,
                                         EvolutionTime t,
                                         const EstimationConfig& config,
                                         const GridSpec& grid_spec) {
  const PosteriorGrid prior = PosteriorGrid::uniform(grid_spec);
  PosteriorGrid combined = prior;
  bool first = true;
  for (const ProbeRun& run : runs) {
    const PosteriorGrid syndrome_post =
        posterior_from_syndromes(*run.probe, run.data, t, prior);
    const PosteriorGrid final_post =
        combine_posteriors(syndrome_post, run.beff, *run.probe, t, config.band);
    if (first) {
      combined = final_post;
      first = false;
    } else {
      for (std::size_t i = 0; i < combined.density.size(); ++i) {
        combined.density[i] *= final_post.density[i];
      }
    }
  }
  if (combined.sum() <= 0.0) {
    throw empty_overlap_error("probe posteriors do not overlap");
  }
  combined.normalize();
  return combined;
}

}  // namespace

double EstimationResult::trace_covariance() const {
  if (!covariance) return std::numeric_limits<double>::quiet_NaN();
  return (*covariance)[0] + (*covariance)[3];
}

EstimationResult run_estimation(std::span<const ProbeSpec> probes,
                                const MagneticField& truth, EvolutionTime t,
                                std::int64_t m, int r,
                                const EstimationConfig& config,
                                std::uint64_t seed) {
  if (probes.empty()) {
    throw validation_error("estimation requires at least one probe");
  }
  if (r < 1) {
    throw validation_error("estimation requires at least one repetition");
  }
  if (truth.bx() < config.grid.bx_lo || truth.bx() > config.grid.bx_hi ||
      truth.bz() < config.grid.bz_lo || truth.bz() > config.grid.bz_hi) {
    throw validation_error("true field lies outside the prior box");
  }

  std::vector<OutcomeModel> models;
  models.reserve(probes.size());
  for (const ProbeSpec& probe : probes) {
    models.push_back(outcome_model(probe, truth, t));
  }

  EstimationResult result;
  result.m = m;
  result.r = r;
  result.estimates.reserve(r);

  for (int rep = 0; rep < r; ++rep) {
    const std::uint64_t rep_seed =
        derive_stream_seed(seed, static_cast<std::uint64_t>(rep));
    EstimationResult::Estimate estimate;
    estimate.rep = rep;
    try {
      std::vector<ProbeRun> runs;
      runs.reserve(probes.size());
      for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        ProbeRun run;
        run.probe = &probes[pi];
        run.data = sample_experiment(
            models[pi], m, derive_stream_seed(rep_seed, pi));
        run.beff = posterior_over_beff(probes[pi], run.data, config.beff_points);
        runs.push_back(std::move(run));
      }

      GridSpec grid = config.grid;
      PosteriorGrid combined =
          combined_posterior_on_grid(runs, t, config, grid);
      for (int level = 0; level < config.refine_levels; ++level) {
        const double step_x = grid.bx_hi - grid.bx_lo;
        const double step_z = grid.bz_hi - grid.bz_lo;
        const double cell_x = step_x / grid.nx;
        const double cell_z = step_z / grid.nz;
        const double sx = std::sqrt(combined.var_bx());
        const double sz = std::sqrt(combined.var_bz());
        if (sx >= 4.0 * cell_x && sz >= 4.0 * cell_z) break;
        const double cx = combined.mean_bx();
        const double cz = combined.mean_bz();
        const double half_x = std::max(8.0 * sx, 4.0 * cell_x);
        const double half_z = std::max(8.0 * sz, 4.0 * cell_z);
        GridSpec zoomed = grid;
        zoomed.bx_lo = std::max(config.grid.bx_lo, cx - half_x);
        zoomed.bx_hi = std::min(config.grid.bx_hi, cx + half_x);
        zoomed.bz_lo = std::max(config.grid.bz_lo, cz - half_z);
        zoomed.bz_hi = std::min(config.grid.bz_hi, cz + half_z);
        grid = zoomed;
        combined = combined_posterior_on_grid(runs, t, config, grid);
      }

      estimate.bx = combined.mean_bx();
      estimate.bz = combined.mean_bz();
    } catch (const empty_overlap_error&) {
      estimate.flagged = true;
      result.flagged_count += 1;
    } catch (const numeric_error&) {
      estimate.flagged = true;
      result.flagged_count += 1;
    }
    result.estimates.push_back(estimate);
  }

  int used = 0;
  double mean_x = 0.0, mean_z = 0.0;
  for (const auto& e : result.estimates) {
    if (e.flagged) continue;
    ++used;
    mean_x += e.bx;
    mean_z += e.bz;
  }
  if (used >= 2) {
    mean_x /= used;
    mean_z /= used;
    double cxx = 0.0, cxz = 0.0, czz = 0.0;
    for (const auto& e : result.estimates) {
      if (e.flagged) continue;
      cxx += (e.bx - mean_x) * (e.bx - mean_x);
      cxz += (e.bx - mean_x) * (e.bz - mean_z);
      czz += (e.bz - mean_z) * (e.bz - mean_z);
    }
    const double norm = used - 1.0;
    result.covariance = {cxx / norm, cxz / norm, cxz / norm, czz / norm};
  }
  return result;
}

std::string to_json_string(const EstimationResult& result,
                           double trace_inverse_ref) {
  nlohmann::json j;
  j["shots"] = result.m;
  j["reps"] = result.r;
  j["flagged"] = result.flagged_count;
  if (result.covariance) {
    const auto& c = *result.covariance;
    j["covariance"] = {{c[0], c[1]}, {c[2], c[3]}};
    j["m_trace_cov"] = static_cast<double>(result.m) * (c[0] + c[3]);
  } else {
    j["covariance"] = nullptr;
    j["m_trace_cov"] = nullptr;
  }
  j["trace_inverse_ref"] = trace_inverse_ref;
  return j.dump();
}

}  // namespace qecmag
