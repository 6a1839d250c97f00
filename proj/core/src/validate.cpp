#include "lindqmc/validate.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "lindqmc/estimator.hpp"
#include "lindqmc/lattice.hpp"
#include "lindqmc/sampler.hpp"

namespace lindqmc {
namespace {

template <typename Fn>
CheckResult timed(std::string name, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = std::move(name);
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  return r;
}

std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << x;
  return s.str();
}

CMatrix random_matrix(int n, Rng& rng, double scale) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5) * scale;
  return m;
}

// Empirical distribution over all configurations of a tiny chain against the
// normalised exact weights; chi-square at the 1% level.
void chi_square_check(CheckResult& r, const Eigen::MatrixXd& adjacency,
                      const ModelParams& params, Observable kind, long sweeps,
                      int thin, std::uint64_t seed) {
  const int v = static_cast<int>(adjacency.rows());
  const int fields = params.n_t * v;
  const HoppingSpectrum spectrum(adjacency);
  const auto props =
      SlicePropagators::make(spectrum, params.w, params.dt, params.n_t, kind);
  const double lambda = params.lambda();

  std::vector<double> exact(std::size_t{1} << fields);
  FieldConfig config(params.n_t, v);
  auto encode = [&](const FieldConfig& c) {
    std::size_t mask = 0;
    for (int f = 0; f < fields; ++f)
      if (c(f / v, f % v) < 0) mask |= std::size_t{1} << f;
    return mask;
  };
  double total = 0.0;
  for (std::size_t mask = 0; mask < exact.size(); ++mask) {
    for (int f = 0; f < fields; ++f)
      config.set(f / v, f % v, ((mask >> f) & 1) ? -1 : 1);
    exact[mask] = std::exp(log_weight(config, props, lambda, 10));
    total += exact[mask];
  }

  Rng rng(seed);
  config = FieldConfig::random(params.n_t, v, seed ^ 0x5eedULL);
  StabilizedGreen green(props, lambda, 10, 1e-6);
  for (int i = 0; i < 200; ++i) sweep(green, config, rng);
  std::vector<long> counts(exact.size(), 0);
  long recorded = 0;
  for (long i = 1; i <= sweeps; ++i) {
    sweep(green, config, rng);
    if (i % thin == 0) {
      ++counts[encode(config)];
      ++recorded;
    }
  }
  double chi2 = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double expected = recorded * exact[k] / total;
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  const double dof = static_cast<double>(exact.size() - 1);
  const double critical = boost::math::quantile(
      boost::math::complement(boost::math::chi_squared(dof), 0.01));
  r.passed = chi2 < critical;
  r.detail += "chi2=" + sci(chi2) + " (critical " + sci(critical) + ", dof " +
              std::to_string(static_cast<int>(dof)) + ") ";
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  std::vector<CheckResult> checks;
  const Eigen::MatrixXd square = Lattice(2, 2).adjacency();

  checks.push_back(timed("hs_identity", [](CheckResult& r) {
    double worst = 0.0;
    for (double gdt : {0.005, 0.05, 0.2, 1.0})
      for (int nc : {0, 1})
        for (int nd : {0, 1}) worst = std::max(worst, hs_identity_residual(nc, nd, gdt));
    r.passed = worst <= 1e-12;
    r.detail = "max residual " + sci(worst);
  }));

  checks.push_back(timed("trace_det_identity", [&](CheckResult& r) {
    Rng rng(options.seed);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const int modes = 1 + k % 4;
      const CMatrix x = random_matrix(modes, rng, 1.0);
      const CMatrix y = random_matrix(modes, rng, 1.0);
      const Complex fock = fock_trace_of_exponentials(x, y);
      const CMatrix one = CMatrix::Identity(modes, modes);
      const Complex det = (one + expm(x) * expm(y)).determinant();
      worst = std::max(worst, std::abs(fock - det) / std::abs(det));
    }
    r.passed = worst <= 1e-10;
    r.detail = "max relative error " + sci(worst) + " over 100 pairs";
  }));

  checks.push_back(timed("liouvillian_lindblad_form", [&](CheckResult& r) {
    const CMatrix direct = lindblad_superoperator(square, 1.0, 4.0);
    const CMatrix split = build_liouvillian(square, 1.0, 4.0).dense();
    const double diff = (direct - split).cwiseAbs().maxCoeff();
    // Trace preservation of a random density matrix.
    Rng rng(options.seed + 1);
    const int dim = 16;
    const CMatrix a = random_matrix(dim, rng, 1.0);
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace();
    Eigen::VectorXcd vec(dim * dim);
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) vec(i + dim * j) = rho(i, j);
    const Eigen::VectorXcd evolved = expm(split * 0.7) * vec;
    Complex trace = 0.0;
    for (int i = 0; i < dim; ++i) trace += evolved(i + dim * i);
    const double trace_err = std::abs(trace - 1.0);
    r.passed = diff <= 1e-12 && trace_err <= 1e-10;
    r.detail = "max |L_direct - L_split| " + sci(diff) + ", |tr rho(t) - 1| " +
               sci(trace_err);
  }));

  checks.push_back(timed("brute_force_vs_trotter", [&](CheckResult& r) {
    double worst = 0.0;
    for (int n_t : {1, 2}) {
      ModelParams p;
      p.w = 1.0;
      p.gamma = 4.0;
      p.dt = 0.05;
      p.n_t = n_t;
      for (Observable kind : {Observable::echo, Observable::purity}) {
        const double hs = brute_force_hs(square, p, kind, options.log_weight);
        const Complex tr = trotter_trace(square, p, kind);
        worst = std::max(worst, std::abs(hs - tr) / std::abs(tr));
      }
    }
    r.passed = worst <= 1e-8;
    r.detail = "max relative error " + sci(worst);
  }));

  checks.push_back(timed("mc_vs_oracle", [&](CheckResult& r) {
    ModelParams p;
    p.w = 1.0;
    p.gamma = 4.0;
    p.dt = 0.05;
    p.n_t = 4;
    p.n_ratio = 4;
    const HoppingSpectrum spectrum(square);
    r.passed = true;
    for (Observable kind : {Observable::echo, Observable::purity}) {
      std::vector<ChainResult> chains;
      for (int f = 0; f < p.n_ratio; ++f) {
        ChainSettings s;
        s.n_warmup = 100;
        s.n_sweeps = 2000;
        s.meas_interval = 2;
        s.seed = derive_seed(options.seed, static_cast<int>(kind), f);
        chains.push_back(run_chain(s, spectrum, p, f, kind));
      }
      const LogEstimate est = telescope(make_ratio_chain(kind, p, chains));
      const double oracle_top = trotter_trace(square, p, kind).real();
      double oracle_bottom = 0.0;
      if (kind == Observable::echo) {
        oracle_bottom = std::pow(4.0, static_cast<double>(square.rows()));
      } else {
        ModelParams free = p;
        free.w = 0.0;
        oracle_bottom = trotter_trace(square, free, kind).real();
      }
      const double expected = std::log(oracle_top / oracle_bottom);
      const double z = std::abs(est.log_ratio - expected) / est.std_error;
      r.passed = r.passed && z <= 3.0;
      r.detail += std::string(to_string(kind)) + ": z=" + sci(z) + " ";
    }
  }));

  checks.push_back(timed("stabilization_drift", [&](CheckResult& r) {
    const Lattice lattice(4, 4);
    ModelParams p;
    p.w = 1.0;
    p.gamma = 4.0;
    p.dt = 0.05;
    p.n_t = 40;
    const HoppingSpectrum spectrum(lattice.adjacency());
    const auto props = SlicePropagators::make(spectrum, p.w, p.dt, p.n_t,
                                              Observable::echo);
    StabilizedGreen green(props, p.lambda(), 10, 1e-6);
    FieldConfig config = FieldConfig::random(p.n_t, lattice.volume(), options.seed);
    Rng rng(options.seed);
    for (int i = 0; i < 3; ++i) sweep(green, config, rng);
    r.passed = green.max_drift() < 1e-8;
    r.detail = "max drift " + sci(green.max_drift()) + " over " +
               std::to_string(green.rebuilds()) + " rebuilds";
  }));

  checks.push_back(timed("detailed_balance", [&](CheckResult& r) {
    ModelParams single;
    single.w = 0.0;
    single.gamma = 4.0;
    single.dt = 0.05;
    single.n_t = 2;
    chi_square_check(r, Lattice(1, 1).adjacency(), single, Observable::purity,
                     100000, 5, options.seed);
    const bool first = r.passed;
    ModelParams small;
    small.w = 1.0;
    small.gamma = 4.0;
    small.dt = 0.05;
    small.n_t = 2;
    chi_square_check(r, square, small, Observable::echo, 100000, 5,
                     options.seed + 3);
    r.passed = r.passed && first;
  }));

  return checks;
}

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  for (const auto& c : checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(28)
        << c.name << std::right << std::fixed << std::setprecision(2)
        << std::setw(8) << c.seconds << " s  " << c.detail << '\n';
  }
  out.unsetf(std::ios::fixed);
}

}  // namespace lindqmc
