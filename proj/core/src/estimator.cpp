#include "lindqmc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lindqmc/errors.hpp"

namespace lindqmc {
namespace {

double standard_error_of(const std::vector<double>& values) {
  const auto n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1) / n);
}

}  // namespace

BinnedMean binned_mean(std::span<const double> samples, std::size_t min_bins) {
  BinnedMean out;
  out.n = samples.size();
  if (samples.empty()) return out;
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / out.n;

  std::vector<double> bins(samples.begin(), samples.end());
  double previous = standard_error_of(bins);
  out.std_error = previous;
  std::size_t bin_size = 1;
  while (bins.size() / 2 >= std::max<std::size_t>(min_bins, 2)) {
    std::vector<double> merged(bins.size() / 2);
    for (std::size_t i = 0; i < merged.size(); ++i) {
      merged[i] = 0.5 * (bins[2 * i] + bins[2 * i + 1]);
    }
    bins = std::move(merged);
    bin_size *= 2;
    const double current = standard_error_of(bins);
    if (current > out.std_error) {
      out.std_error = current;
      out.bin_size = bin_size;
    }
    if (current <= previous * 1.05) break;
    previous = current;
  }
  return out;
}

RatioFactor summarize(const ChainResult& chain) {
  std::vector<double> values;
  values.reserve(chain.samples.size());
  for (const auto& s : chain.samples) values.push_back(s.value);
  const BinnedMean b = binned_mean(values);
  return {b.mean, b.std_error, b.n, chain.acceptance, b.bin_size};
}

RatioChain make_ratio_chain(Observable kind, const ModelParams& params,
                            std::span<const ChainResult> chains) {
  RatioChain rc;
  rc.kind = kind;
  const double top = kind == Observable::echo ? params.lambda() : params.w;
  for (int i = 0; i <= params.n_ratio; ++i) {
    rc.couplings.push_back(top * i / params.n_ratio);
  }
  std::vector<const ChainResult*> ordered(params.n_ratio, nullptr);
  for (const auto& c : chains) {
    if (c.factor_index < 0 || c.factor_index >= params.n_ratio) {
      throw EstimatorError("chain factor index out of range");
    }
    ordered[c.factor_index] = &c;
  }
  for (int i = 0; i < params.n_ratio; ++i) {
    if (ordered[i] == nullptr) {
      throw EstimatorError("missing chain for factor " + std::to_string(i));
    }
    rc.factors.push_back(summarize(*ordered[i]));
  }
  return rc;
}

LogEstimate telescope(const RatioChain& chain) {
  LogEstimate out;
  double variance = 0.0;
  for (std::size_t i = 0; i < chain.factors.size(); ++i) {
    const auto& f = chain.factors[i];
    if (f.n_samples < 2) {
      throw EstimatorError("factor " + std::to_string(i) +
                           " has fewer than two samples");
    }
    if (!(f.mean > 0.0) || !std::isfinite(f.mean)) {
      throw EstimatorError("factor " + std::to_string(i) +
                           " has non-positive mean " + std::to_string(f.mean));
    }
    out.log_ratio -= std::log(f.mean);
    const double rel = f.std_error / f.mean;
    variance += rel * rel;
  }
  out.std_error = std::sqrt(variance);
  return out;
}

double anchor_log(Observable kind, const ModelParams& params, int volume) {
  if (kind == Observable::echo) return 2.0 * volume * std::numbers::ln2;
  const double decay = std::exp(-0.5 * params.gamma * params.time());
  return volume * std::log(2.0 + 2.0 * decay);
}

double anchor_log_alternative(const ModelParams& params, int volume) {
  return volume * std::log(2.0 * (1.0 + std::exp(-params.gamma * params.time())));
}

FidelitySeries assemble_series(Observable kind, const ModelParams& params,
                               int volume,
                               std::span<const TimePointChains> points) {
  FidelitySeries series;
  series.kind = kind;
  series.volume = volume;
  for (const auto& tp : points) {
    ModelParams at = params;
    at.n_t = tp.n_t;
    SeriesPoint p;
    p.n_t = tp.n_t;
    p.t_w = at.time() * params.w;
    p.volume = volume;
    p.kind = kind;
    if (tp.n_t == 0) {
      series.points.push_back(p);
      continue;
    }
    if (!tp.chain) {
      p.ok = false;
      p.error = tp.error.empty() ? "no chain results" : tp.error;
      series.points.push_back(p);
      continue;
    }
    try {
      const LogEstimate est = telescope(*tp.chain);
      p.log_value = est.log_ratio + anchor_log(kind, at, volume) -
                    2.0 * volume * std::numbers::ln2;
      p.std_error = est.std_error;
    } catch (const EstimatorError& e) {
      p.ok = false;
      p.error = e.what();
    }
    series.points.push_back(p);
  }
  return series;
}

}  // namespace lindqmc
