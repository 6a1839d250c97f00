#include "lindqmc/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lindqmc {

double ModelParams::lambda() const { return lambda_from_gamma(gamma * dt); }

void ModelParams::validate() const {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (n_t < 0) throw std::invalid_argument("n_t must be >= 0");
  if (n_ratio < 1) throw std::invalid_argument("n_ratio must be >= 1");
  if (!std::isfinite(w)) throw std::invalid_argument("w must be finite");
}

double lambda_from_gamma(double gamma_dt) {
  if (!(gamma_dt >= 0.0)) {
    throw std::invalid_argument("gamma*dt must be >= 0, got " +
                                std::to_string(gamma_dt));
  }
  // acosh(e^{a}) = ln(e^a + sqrt(e^{2a} - 1)); expm1 keeps small a accurate.
  const double half = 0.5 * gamma_dt;
  return std::log(std::exp(half) + std::sqrt(std::expm1(2.0 * half)));
}

double hs_identity_residual(int nc, int nd, double gamma_dt) {
  if ((nc != 0 && nc != 1) || (nd != 0 && nd != 1)) {
    throw std::invalid_argument("occupations must be 0 or 1");
  }
  const double lam = lambda_from_gamma(gamma_dt);
  const double lhs = std::exp(gamma_dt * (nc - 0.5) * (nd - 0.5));
  const int density = nc + nd - 1;
  const double rhs = 0.5 * std::exp(-0.25 * gamma_dt) *
                     (std::exp(lam * density) + std::exp(-lam * density));
  return std::abs(lhs - rhs);
}

double log_normalization(const ModelParams& params, int volume) {
  const double sites = static_cast<double>(params.n_t) * volume;
  return sites * (-0.5 * params.gamma * params.dt - std::numbers::ln2);
}

double log_normalization_from_lambda(double lambda, int n_t, int volume) {
  const double sites = static_cast<double>(n_t) * volume;
  // ln(2 cosh l) = l + ln(1 + e^{-2l}) for l >= 0.
  const double a = std::abs(lambda);
  return -sites * (a + std::log1p(std::exp(-2.0 * a)));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t time_index,
                          std::uint64_t factor_index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (time_index + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (factor_index + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

FieldConfig::FieldConfig(int n_t, int volume, int fill)
    : n_t_(n_t), volume_(volume) {
  if (n_t < 0 || volume < 1) {
    throw std::invalid_argument("field config needs n_t >= 0 and volume >= 1");
  }
  if (fill != 1 && fill != -1) {
    throw std::invalid_argument("field entries must be +1 or -1");
  }
  s_.assign(static_cast<std::size_t>(n_t) * volume,
            static_cast<signed char>(fill));
  sum_ = static_cast<long>(fill) * n_t * volume;
}

FieldConfig FieldConfig::random(int n_t, int volume, std::uint64_t seed) {
  FieldConfig config(n_t, volume);
  Rng rng(seed);
  for (int n = 0; n < n_t; ++n)
    for (int x = 0; x < volume; ++x) config.set(n, x, rng.spin());
  return config;
}

long FieldConfig::site_sum(int x) const {
  if (x < 0 || x >= volume_) throw std::out_of_range("site index out of range");
  long total = 0;
  for (int n = 0; n < n_t_; ++n) total += s_[index(n, x)];
  return total;
}

void FieldConfig::set(int n, int x, int value) {
  check(n, x);
  if (value != 1 && value != -1) {
    throw std::invalid_argument("field entries must be +1 or -1");
  }
  auto& entry = s_[index(n, x)];
  sum_ += value - entry;
  entry = static_cast<signed char>(value);
}

void FieldConfig::flip(int n, int x) {
  check(n, x);
  auto& entry = s_[index(n, x)];
  sum_ -= 2 * entry;
  entry = static_cast<signed char>(-entry);
}

std::uint64_t FieldConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (signed char v : s_) {
    h ^= static_cast<unsigned char>(v);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void FieldConfig::check(int n, int x) const {
  if (n < 0 || n >= n_t_ || x < 0 || x >= volume_) {
    throw std::out_of_range("field index (" + std::to_string(n) + "," +
                            std::to_string(x) + ") outside " +
                            std::to_string(n_t_) + "x" +
                            std::to_string(volume_));
  }
}

}  // namespace lindqmc
