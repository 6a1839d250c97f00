#include "lindqmc/oracle.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace lindqmc {
namespace {

void require_volume(int volume, int cap, const char* what) {
  if (volume > cap) {
    throw std::invalid_argument(std::string(what) + " is limited to V <= " +
                                std::to_string(cap) + " (got V = " +
                                std::to_string(volume) + ")");
  }
}

SparseComplex to_complex(const SparseReal& m) { return m.cast<Complex>(); }

}  // namespace

FockOperators::FockOperators(int n_modes) : n_modes_(n_modes) {
  if (n_modes < 1 || n_modes > 16) {
    throw std::invalid_argument("Fock space needs 1..16 modes");
  }
  const int dim = dimension();
  for (int m = 0; m < n_modes; ++m) {
    std::vector<Eigen::Triplet<double>> entries;
    for (int state = 0; state < dim; ++state) {
      if (!((state >> m) & 1)) continue;
      const unsigned below = static_cast<unsigned>(state) & ((1u << m) - 1u);
      const double sign = (std::popcount(below) % 2) ? -1.0 : 1.0;
      entries.emplace_back(state ^ (1 << m), state, sign);
    }
    SparseReal c(dim, dim);
    c.setFromTriplets(entries.begin(), entries.end());
    annihilators_.push_back(std::move(c));
  }
}

SparseReal FockOperators::number(int mode) const {
  return create(mode) * annihilate(mode);
}

CMatrix FockOperators::quadratic(const CMatrix& x) const {
  if (x.rows() != n_modes_ || x.cols() != n_modes_) {
    throw std::invalid_argument("quadratic form size does not match modes");
  }
  CMatrix q = CMatrix::Zero(dimension(), dimension());
  for (int a = 0; a < n_modes_; ++a) {
    for (int b = 0; b < n_modes_; ++b) {
      if (x(a, b) == Complex(0.0)) continue;
      const SparseReal hop = create(a) * annihilate(b);
      q += x(a, b) * CMatrix(hop.cast<Complex>());
    }
  }
  return q;
}

CMatrix LiouvillianMatrix::dense() const {
  return CMatrix(hopping) + CMatrix(interaction);
}

CMatrix LiouvillianMatrix::dense_hopping() const { return CMatrix(hopping); }

LiouvillianMatrix build_liouvillian(const Eigen::MatrixXd& adjacency, double w,
                                    double gamma) {
  const int v = static_cast<int>(adjacency.rows());
  require_volume(v, 6, "build_liouvillian");
  const FockOperators ops(2 * v);
  const int dim = ops.dimension();
  const Complex i(0.0, 1.0);

  LiouvillianMatrix l;
  l.volume = v;
  l.hopping.resize(dim, dim);
  l.interaction.resize(dim, dim);
  for (int a = 0; a < v; ++a) {
    for (int b = 0; b < v; ++b) {
      if (adjacency(a, b) == 0.0) continue;
      const SparseReal hop_c = ops.create(a) * ops.annihilate(b);
      const SparseReal hop_d = ops.create(v + a) * ops.annihilate(v + b);
      l.hopping += (-i * w * adjacency(a, b)) * to_complex(hop_c);
      l.hopping += (i * w * adjacency(a, b)) * to_complex(hop_d);
    }
  }
  SparseReal identity(dim, dim);
  identity.setIdentity();
  for (int x = 0; x < v; ++x) {
    const SparseReal nc = ops.number(x) - 0.5 * identity;
    const SparseReal nd = ops.number(v + x) - 0.5 * identity;
    const SparseReal site = gamma * (nc * nd) - 0.25 * gamma * identity;
    l.interaction += to_complex(site);
  }
  l.hopping.makeCompressed();
  l.interaction.makeCompressed();
  return l;
}

CMatrix lindblad_superoperator(const Eigen::MatrixXd& adjacency, double w,
                               double gamma) {
  const int v = static_cast<int>(adjacency.rows());
  require_volume(v, 4, "lindblad_superoperator");
  const FockOperators ops(v);
  const int dim = ops.dimension();
  const CMatrix one = CMatrix::Identity(dim, dim);
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int a = 0; a < v; ++a)
    for (int b = 0; b < v; ++b)
      if (adjacency(a, b) != 0.0)
        h += w * adjacency(a, b) *
             CMatrix((ops.create(a) * ops.annihilate(b)).cast<Complex>());

  // (A acting on the left ket) (x) (B on the right ket) = kron(B, A) here,
  // because the left-ket index occupies the low bits.
  auto both = [](const CMatrix& left, const CMatrix& right) -> CMatrix {
    return Eigen::kroneckerProduct(right, left).eval();
  };
  const Complex i(0.0, 1.0);
  CMatrix l = -i * both(h, one) + i * both(one, h.transpose());
  for (int x = 0; x < v; ++x) {
    const CMatrix n = CMatrix(ops.number(x).cast<Complex>());
    const CMatrix ndn = n.adjoint() * n;
    l += gamma * (both(n, n.conjugate()) - 0.5 * both(ndn, one) -
                  0.5 * both(one, n.transpose() * n.conjugate()));
  }
  return l;
}

CMatrix expm(const CMatrix& m) { return m.exp(); }

ExactFidelities exact_fidelities(const Eigen::MatrixXd& adjacency, double w,
                                 double gamma, double t) {
  require_volume(static_cast<int>(adjacency.rows()), 4, "exact_fidelities");
  const LiouvillianMatrix l = build_liouvillian(adjacency, w, gamma);
  const CMatrix forward = expm(l.dense() * t);
  const CMatrix backward = expm(-l.dense_hopping() * t);
  return {(backward * forward).trace(), forward.trace()};
}

Complex trotter_trace(const Eigen::MatrixXd& adjacency,
                      const ModelParams& params, Observable kind) {
  require_volume(static_cast<int>(adjacency.rows()), 4, "trotter_trace");
  const LiouvillianMatrix l =
      build_liouvillian(adjacency, params.w, params.gamma);
  const CMatrix k = l.dense_hopping();
  const CMatrix step = expm(k * params.dt) * expm(CMatrix(l.interaction) * params.dt);
  CMatrix product = CMatrix::Identity(l.dimension(), l.dimension());
  for (int n = 0; n < params.n_t; ++n) product = product * step;
  if (kind == Observable::echo) product = expm(-k * params.time()) * product;
  return product.trace();
}

double brute_force_hs(const Eigen::MatrixXd& adjacency, double w,
                      double lambda, double dt, int n_t, Observable kind,
                      const LogWeightFn& weight) {
  const int v = static_cast<int>(adjacency.rows());
  const int fields = n_t * v;
  if (fields > 20) {
    throw std::invalid_argument("brute_force_hs is limited to N_t V <= 20 (got " +
                                std::to_string(fields) + ")");
  }
  const HoppingSpectrum spectrum(adjacency);
  const auto props = SlicePropagators::make(spectrum, w, dt, n_t, kind);
  const LogWeightFn& fn =
      weight ? weight
             : LogWeightFn([](const FieldConfig& c, const SlicePropagators& p,
                              double lam) { return log_weight(c, p, lam, 10); });

  std::vector<double> logs;
  logs.reserve(std::size_t{1} << fields);
  FieldConfig config(n_t, v);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << fields); ++mask) {
    for (int f = 0; f < fields; ++f) {
      config.set(f / v, f % v, ((mask >> f) & 1) ? -1 : 1);
    }
    logs.push_back(fn(config, props, lambda));
  }
  double top = -std::numeric_limits<double>::infinity();
  for (double x : logs) top = std::max(top, x);
  if (!std::isfinite(top)) return 0.0;
  double total = 0.0;
  for (double x : logs) total += std::exp(x - top);
  return std::exp(top) * total;
}

double brute_force_hs(const Eigen::MatrixXd& adjacency,
                      const ModelParams& params, Observable kind,
                      const LogWeightFn& weight) {
  return brute_force_hs(adjacency, params.w, params.lambda(), params.dt,
                        params.n_t, kind, weight);
}

Complex fock_trace_of_exponentials(const CMatrix& x, const CMatrix& y) {
  const FockOperators ops(static_cast<int>(x.rows()));
  return (expm(ops.quadratic(x)) * expm(ops.quadratic(y))).trace();
}

}  // namespace lindqmc
