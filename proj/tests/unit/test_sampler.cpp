#include <gtest/gtest.h>

#include <cmath>

#include "lindqmc/estimator.hpp"
#include "lindqmc/lattice.hpp"
#include "lindqmc/oracle.hpp"
#include "lindqmc/sampler.hpp"

namespace lindqmc {
namespace {

TEST(Couplings, EndpointsFollowTheSchedule) {
  const ModelParams p{1.0, 4.0, 0.05, 10, 4};
  const auto echo0 = factor_couplings(p, 0, Observable::echo);
  EXPECT_EQ(echo0.lo.lambda, 0.0);
  EXPECT_DOUBLE_EQ(echo0.hi.lambda, 0.25 * p.lambda());
  EXPECT_EQ(echo0.lo.w, 1.0);
  const auto purity3 = factor_couplings(p, 3, Observable::purity);
  EXPECT_DOUBLE_EQ(purity3.lo.w, 0.75);
  EXPECT_DOUBLE_EQ(purity3.hi.w, 1.0);
  EXPECT_DOUBLE_EQ(purity3.hi.lambda, p.lambda());
  EXPECT_THROW(factor_couplings(p, 4, Observable::echo), std::invalid_argument);
}

TEST(Settings, Validation) {
  ChainSettings s;
  EXPECT_NO_THROW(s.validate());
  s.meas_interval = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Sweep, AcceptsEverythingWithoutCoupling) {
  const auto a = Lattice(2, 2).adjacency();
  const HoppingSpectrum spectrum(a);
  const auto props = SlicePropagators::make(spectrum, 1.0, 0.05, 6, Observable::echo);
  StabilizedGreen green(props, 0.0, 3, 1e-6);
  auto config = FieldConfig::random(6, 4, 1);
  Rng rng(2);
  const auto stats = sweep(green, config, rng);
  EXPECT_EQ(stats.proposed, 24);
  EXPECT_EQ(stats.accepted, 24);
}

TEST(Sweep, AcceptedFlipsMatchScratchWeights) {
  const auto a = Lattice(2, 2).adjacency();
  const HoppingSpectrum spectrum(a);
  const ModelParams p{1.0, 4.0, 0.1, 8, 1};
  const double lam = p.lambda();
  const auto props = SlicePropagators::make(spectrum, 1.0, p.dt, p.n_t, Observable::echo);
  StabilizedGreen green(props, lam, 4, 1e-6);
  auto config = FieldConfig::random(p.n_t, 4, 5);
  Rng rng(6);
  int checked = 0;
  for (int rep = 0; rep < 3; ++rep) {
    green.start_sweep(config);
    for (int n = 0; n < p.n_t; ++n) {
      green.next_slice(config);
      for (int x = 0; x < 4; ++x) {
        const auto ratio = green.propose(x, config(n, x));
        if (rng.uniform() < ratio.weight_ratio) {
          const double before = log_weight(config, props, lam, 4);
          green.accept(ratio, x);
          config.flip(n, x);
          const double after = log_weight(config, props, lam, 4);
          EXPECT_NEAR(ratio.weight_ratio / std::exp(after - before), 1.0, 1e-8);
          ++checked;
        }
      }
    }
    green.finish_sweep(config);
  }
  EXPECT_GT(checked, 10);
}

TEST(Ratio, IdenticalCouplingsGiveOne) {
  const auto a = Lattice(2, 2).adjacency();
  const HoppingSpectrum spectrum(a);
  const ModelParams p{1.0, 4.0, 0.05, 6, 4};
  const auto config = FieldConfig::random(6, 4, 3);
  const CouplingPoint c{1.0, p.lambda()};
  EXPECT_EQ(measure_ratio(config, spectrum, p, c, c, Observable::echo).value, 1.0);
  EXPECT_EQ(measure_ratio(config, spectrum, p, c, c, Observable::echo).config_hash,
            config.hash());
}

TEST(Chain, DeterministicForFixedSeed) {
  const auto a = Lattice(2, 2).adjacency();
  const HoppingSpectrum spectrum(a);
  const ModelParams p{1.0, 4.0, 0.1, 4, 4};
  ChainSettings s;
  s.n_warmup = 20;
  s.n_sweeps = 100;
  s.seed = 77;
  const auto first = run_chain(s, spectrum, p, 2, Observable::purity);
  const auto second = run_chain(s, spectrum, p, 2, Observable::purity);
  ASSERT_EQ(first.samples.size(), 50u);
  for (std::size_t i = 0; i < first.samples.size(); ++i) {
    EXPECT_EQ(first.samples[i].value, second.samples[i].value);
    EXPECT_EQ(first.samples[i].config_hash, second.samples[i].config_hash);
  }
  EXPECT_EQ(first.acceptance, second.acceptance);
}

TEST(Chain, ZeroDephasingEchoRatiosAreOne) {
  const auto a = Lattice(2, 2).adjacency();
  const HoppingSpectrum spectrum(a);
  const ModelParams p{1.0, 0.0, 0.1, 4, 4};
  ChainSettings s;
  s.n_warmup = 5;
  s.n_sweeps = 20;
  s.seed = 1;
  const auto chain = run_chain(s, spectrum, p, 1, Observable::echo);
  for (const auto& sample : chain.samples) EXPECT_NEAR(sample.value, 1.0, 1e-12);
}

// <W_lo / W_hi>_hi equals Z_lo / Z_hi; checked against the exhaustive sum.
TEST(Chain, FactorMeanMatchesExhaustiveRatio) {
  const auto a = Lattice(2, 2).adjacency();
  const HoppingSpectrum spectrum(a);
  const ModelParams p{1.0, 4.0, 0.25, 3, 2};
  for (Observable kind : {Observable::echo, Observable::purity}) {
    const auto c = factor_couplings(p, 1, kind);
    const double z_lo = brute_force_hs(a, c.lo.w, c.lo.lambda, p.dt, p.n_t, kind);
    const double z_hi = brute_force_hs(a, c.hi.w, c.hi.lambda, p.dt, p.n_t, kind);
    ChainSettings s;
    s.n_warmup = 100;
    s.n_sweeps = 4000;
    s.meas_interval = 2;
    s.seed = 123;
    const auto factor = summarize(run_chain(s, spectrum, p, 1, kind));
    EXPECT_NEAR(factor.mean, z_lo / z_hi, 4.0 * factor.std_error)
        << to_string(kind);
    EXPECT_GT(factor.acceptance, 0.0);
  }
}

}  // namespace
}  // namespace lindqmc
