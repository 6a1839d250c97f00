#pragma once

#include <cstdint>
#include <vector>

#include "lindqmc/bss.hpp"
#include "lindqmc/model.hpp"

namespace lindqmc {

struct ChainSettings {
  int n_warmup = 200;
  int n_sweeps = 2000;
  int meas_interval = 2;
  std::uint64_t seed = 0;
  int n_stab = 10;
  double drift_tol = 1e-6;

  void validate() const;
};

/// Couplings that fully determine one weight along the telescoping path.
struct CouplingPoint {
  double w;
  double lambda;
};

/// Endpoints of telescoping factor i: lambda_i -> lambda_{i+1} at fixed w for
/// the echo, w_i -> w_{i+1} at fixed lambda for the purity.
struct FactorCouplings {
  CouplingPoint lo;
  CouplingPoint hi;
};
FactorCouplings factor_couplings(const ModelParams& params, int factor_index,
                                 Observable kind);

struct SweepStats {
  long proposed = 0;
  long accepted = 0;
};

/// One slice-major Metropolis pass over every (n, x). Expects a fresh
/// StabilizedGreen sweep; leaves the chain rebuilt at position N_t.
SweepStats sweep(StabilizedGreen& green, FieldConfig& config, Rng& rng);

struct RatioSample {
  double value;
  std::uint64_t config_hash;
};

/// weight(lo) / weight(hi) for one configuration, both from scratch.
RatioSample measure_ratio(const FieldConfig& config,
                          const SlicePropagators& props_lo, double lambda_lo,
                          const SlicePropagators& props_hi, double lambda_hi,
                          int n_stab);

RatioSample measure_ratio(const FieldConfig& config,
                          const HoppingSpectrum& spectrum,
                          const ModelParams& params, CouplingPoint lo,
                          CouplingPoint hi, Observable kind, int n_stab = 10);

struct ChainResult {
  int factor_index = 0;
  std::uint64_t seed = 0;
  FactorCouplings couplings{};
  std::vector<RatioSample> samples;
  double acceptance = 0.0;
  double max_drift = 0.0;
  long rebuilds = 0;
};

/// Equilibrates at the upper coupling of the factor, then samples the ratio.
ChainResult run_chain(const ChainSettings& settings,
                      const HoppingSpectrum& spectrum,
                      const ModelParams& params, int factor_index,
                      Observable kind);

}  // namespace lindqmc
