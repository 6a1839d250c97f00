#include "lindqmc/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace lindqmc {

void ChainSettings::validate() const {
  if (n_warmup < 0) throw std::invalid_argument("n_warmup must be >= 0");
  if (n_sweeps < 1) throw std::invalid_argument("n_sweeps must be >= 1");
  if (meas_interval < 1) throw std::invalid_argument("meas_interval must be >= 1");
  if (n_stab < 1) throw std::invalid_argument("n_stab must be >= 1");
  if (!(drift_tol > 0.0)) throw std::invalid_argument("drift_tol must be > 0");
}

FactorCouplings factor_couplings(const ModelParams& params, int factor_index,
                                 Observable kind) {
  if (factor_index < 0 || factor_index >= params.n_ratio) {
    throw std::invalid_argument("factor index out of range");
  }
  const double lo = static_cast<double>(factor_index) / params.n_ratio;
  const double hi = static_cast<double>(factor_index + 1) / params.n_ratio;
  if (kind == Observable::echo) {
    const double lambda = params.lambda();
    return {{params.w, lo * lambda}, {params.w, hi * lambda}};
  }
  const double lambda = params.lambda();
  return {{lo * params.w, lambda}, {hi * params.w, lambda}};
}

SweepStats sweep(StabilizedGreen& green, FieldConfig& config, Rng& rng) {
  SweepStats stats;
  green.start_sweep(config);
  for (int n = 0; n < config.n_t(); ++n) {
    green.next_slice(config);
    for (int x = 0; x < config.volume(); ++x) {
      const int s_old = config(n, x);
      const FlipRatio ratio = green.propose(x, s_old);
      ++stats.proposed;
      if (rng.uniform() < ratio.weight_ratio) {
        green.accept(ratio, x);
        config.flip(n, x);
        ++stats.accepted;
      }
    }
  }
  green.finish_sweep(config);
  return stats;
}

RatioSample measure_ratio(const FieldConfig& config,
                          const SlicePropagators& props_lo, double lambda_lo,
                          const SlicePropagators& props_hi, double lambda_hi,
                          int n_stab) {
  const double lw_lo = log_weight(config, props_lo, lambda_lo, n_stab);
  const double lw_hi = log_weight(config, props_hi, lambda_hi, n_stab);
  double value = 0.0;
  if (std::isfinite(lw_lo)) value = std::exp(lw_lo - lw_hi);
  return {value, config.hash()};
}

RatioSample measure_ratio(const FieldConfig& config,
                          const HoppingSpectrum& spectrum,
                          const ModelParams& params, CouplingPoint lo,
                          CouplingPoint hi, Observable kind, int n_stab) {
  const auto props_lo =
      SlicePropagators::make(spectrum, lo.w, params.dt, config.n_t(), kind);
  const auto props_hi =
      SlicePropagators::make(spectrum, hi.w, params.dt, config.n_t(), kind);
  return measure_ratio(config, props_lo, lo.lambda, props_hi, hi.lambda,
                       n_stab);
}

ChainResult run_chain(const ChainSettings& settings,
                      const HoppingSpectrum& spectrum,
                      const ModelParams& params, int factor_index,
                      Observable kind) {
  settings.validate();
  params.validate();
  ChainResult result;
  result.factor_index = factor_index;
  result.seed = settings.seed;
  result.couplings = factor_couplings(params, factor_index, kind);
  const auto& [lo, hi] = result.couplings;

  const auto props_lo =
      SlicePropagators::make(spectrum, lo.w, params.dt, params.n_t, kind);
  auto props_hi =
      SlicePropagators::make(spectrum, hi.w, params.dt, params.n_t, kind);

  Rng rng(settings.seed);
  FieldConfig config(params.n_t, spectrum.size());
  for (int n = 0; n < params.n_t; ++n)
    for (int x = 0; x < spectrum.size(); ++x) config.set(n, x, rng.spin());

  StabilizedGreen green(props_hi, hi.lambda, settings.n_stab,
                        settings.drift_tol);
  for (int i = 0; i < settings.n_warmup; ++i) sweep(green, config, rng);

  long proposed = 0;
  long accepted = 0;
  result.samples.reserve(settings.n_sweeps / settings.meas_interval + 1);
  for (int i = 1; i <= settings.n_sweeps; ++i) {
    const SweepStats stats = sweep(green, config, rng);
    proposed += stats.proposed;
    accepted += stats.accepted;
    if (i % settings.meas_interval == 0) {
      result.samples.push_back(measure_ratio(config, props_lo, lo.lambda,
                                             props_hi, hi.lambda,
                                             settings.n_stab));
    }
  }
  result.acceptance =
      proposed > 0 ? static_cast<double>(accepted) / proposed : 1.0;
  result.max_drift = green.max_drift();
  result.rebuilds = green.rebuilds();
  return result;
}

}  // namespace lindqmc
