#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lindqmc/bss.hpp"
#include "lindqmc/model.hpp"
#include "lindqmc/sampler.hpp"

namespace lindqmc {

/// Mean with a binned standard error. The bin size doubles until the error
/// estimate stops growing (relative change below 5%) or fewer than
/// `min_bins` bins would remain; the largest error seen on the way is kept.
struct BinnedMean {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t bin_size = 1;
};
BinnedMean binned_mean(std::span<const double> samples,
                       std::size_t min_bins = 32);

struct RatioFactor {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  double acceptance = 0.0;
  std::size_t bin_size = 1;
};
RatioFactor summarize(const ChainResult& chain);

/// Per-factor estimates of <weight(c_i) / weight(c_{i+1})>_{c_{i+1}}.
struct RatioChain {
  Observable kind = Observable::purity;
  std::vector<RatioFactor> factors;
  std::vector<double> couplings;  ///< c_0 .. c_N (lambda or w)
};
RatioChain make_ratio_chain(Observable kind, const ModelParams& params,
                            std::span<const ChainResult> chains);

struct LogEstimate {
  double log_ratio = 0.0;
  double std_error = 0.0;
};

/// ln[F(c_N) / F(c_0)] = -sum_i ln <ratio_i>, errors added in quadrature.
/// Throws EstimatorError for a non-positive mean or fewer than two samples.
LogEstimate telescope(const RatioChain& chain);

/// ln M(t, 0) = 2V ln 2 for the echo; ln P(t, 0) = V ln(2 + 2 exp(-gamma t / 2))
/// for the purity (exact trace of the on-site dephasing generator).
double anchor_log(Observable kind, const ModelParams& params, int volume);

/// V ln[2 (1 + exp(-gamma t))], the alternative closed form for the purity
/// anchor. Only reported alongside results; never used in estimates.
double anchor_log_alternative(const ModelParams& params, int volume);

struct SeriesPoint {
  int n_t = 0;
  double t_w = 0.0;
  double log_value = 0.0;  ///< ln[F(t) / 2^{2V}]
  double std_error = 0.0;
  int volume = 0;
  Observable kind = Observable::purity;
  bool ok = true;
  std::string error;
};

struct TimePointChains {
  int n_t = 0;
  std::optional<RatioChain> chain;  ///< empty for n_t == 0 or a failed point
  std::string error;
};

struct FidelitySeries {
  Observable kind = Observable::purity;
  int volume = 0;
  std::vector<SeriesPoint> points;
};

/// Combines telescoped ratios with the analytic anchor into
/// ln[F(t)/2^{2V}] per time point. Failed points are kept with ok = false.
FidelitySeries assemble_series(Observable kind, const ModelParams& params,
                               int volume,
                               std::span<const TimePointChains> points);

}  // namespace lindqmc
