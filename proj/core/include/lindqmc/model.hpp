#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lindqmc {

/// Physical couplings and Trotter discretisation. Times are in units of 1/w
/// only by convention; nothing here assumes w = 1.
struct ModelParams {
  double w = 1.0;
  double gamma = 0.0;
  double dt = 0.05;
  int n_t = 1;
  int n_ratio = 32;

  double time() const { return n_t * dt; }
  /// Ising coupling with cosh(lambda) = exp(gamma * dt / 2).
  double lambda() const;
  void validate() const;
};

/// arccosh(exp(gamma_dt / 2)). Throws std::invalid_argument for negative input.
double lambda_from_gamma(double gamma_dt);

/// |lhs - rhs| of the discrete decoupling of exp(dt*gamma*(nc-1/2)(nd-1/2))
/// into a two-valued Ising sum, evaluated for one occupation pair.
double hs_identity_residual(int nc, int nd, double gamma_dt);

/// ln of the prefactor (exp(-gamma*dt/2) / 2)^(n_t * volume).
double log_normalization(const ModelParams& params, int volume);

/// Same prefactor written through the coupling: -n_t * volume * ln(2 cosh lambda).
/// This is the form used when lambda is varied at fixed n_t.
double log_normalization_from_lambda(double lambda, int n_t, int volume);

/// 64-bit splitmix step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic per-chain seed from a master seed and a (time, factor) index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t time_index,
                          std::uint64_t factor_index);

/// Chain-local random source. Draws are bit-reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int spin() { return (engine_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
};

/// n_t x volume array of Ising fields s_{n,x} in {-1, +1}, slice-major.
class FieldConfig {
 public:
  FieldConfig(int n_t, int volume, int fill = 1);
  static FieldConfig random(int n_t, int volume, std::uint64_t seed);

  int n_t() const { return n_t_; }
  int volume() const { return volume_; }
  int operator()(int n, int x) const { return s_[index(n, x)]; }
  /// Sum of all fields.
  long sum() const { return sum_; }
  /// Sum over slices at one site.
  long site_sum(int x) const;

  void set(int n, int x, int value);
  /// Negates one entry. Throws std::out_of_range for bad indices.
  void flip(int n, int x);
  /// FNV-1a over the entries.
  std::uint64_t hash() const;

  bool operator==(const FieldConfig& other) const = default;

 private:
  std::size_t index(int n, int x) const {
    return static_cast<std::size_t>(n) * volume_ + x;
  }
  void check(int n, int x) const;

  int n_t_;
  int volume_;
  std::vector<signed char> s_;
  long sum_;
};

}  // namespace lindqmc
