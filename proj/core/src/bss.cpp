#include "lindqmc/bss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lindqmc/errors.hpp"

namespace lindqmc {

std::string_view to_string(Observable kind) {
  return kind == Observable::echo ? "echo" : "purity";
}

Observable parse_observable(std::string_view name) {
  if (name == "echo") return Observable::echo;
  if (name == "purity") return Observable::purity;
  throw std::invalid_argument("unknown observable '" + std::string(name) +
                              "' (expected echo or purity)");
}

HoppingSpectrum::HoppingSpectrum(const Eigen::MatrixXd& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw std::invalid_argument("hopping matrix must be square");
  }
  if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument("hopping matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(adjacency);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolve failed for " << adjacency.rows() << "x"
        << adjacency.cols() << " hopping matrix (max |entry| "
        << adjacency.cwiseAbs().maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  vectors_ = solver.eigenvectors();
  values_ = solver.eigenvalues();
}

CMatrix HoppingSpectrum::exp_minus_i(double theta) const {
  const Eigen::VectorXcd phases =
      (Complex(0.0, -theta) * values_.cast<Complex>()).array().exp();
  const CMatrix q = vectors_.cast<Complex>();
  return q * phases.asDiagonal() * q.transpose();
}

CMatrix exp_hopping(const Eigen::MatrixXd& adjacency, double theta) {
  return HoppingSpectrum(adjacency).exp_minus_i(theta);
}

SlicePropagators SlicePropagators::make(const HoppingSpectrum& spectrum,
                                        double w, double dt, int n_t,
                                        Observable kind) {
  SlicePropagators p;
  p.kind = kind;
  p.n_t = n_t;
  p.exp_k = spectrum.exp_minus_i(w * dt);
  p.exp_k_inv = spectrum.exp_minus_i(-w * dt);
  p.exp_k_conj = p.exp_k.conjugate();
  const int v = spectrum.size();
  if (kind == Observable::echo) {
    const double t = n_t * dt;
    p.boundary = spectrum.exp_minus_i(-w * t);
    p.boundary_inv = spectrum.exp_minus_i(w * t);
  } else {
    p.boundary = CMatrix::Identity(v, v);
    p.boundary_inv = CMatrix::Identity(v, v);
  }
  return p;
}

CMatrix slice_matrix(const CMatrix& exp_k, const FieldConfig& config,
                     double lambda, int n) {
  CMatrix b = exp_k;
  for (int x = 0; x < config.volume(); ++x) {
    b.col(x) *= std::exp(lambda * config(n, x));
  }
  return b;
}

CMatrix naive_chain(const CMatrix& exp_k, const FieldConfig& config,
                    double lambda) {
  const int v = config.volume();
  CMatrix b = CMatrix::Identity(v, v);
  for (int n = 0; n < config.n_t(); ++n) {
    b = b * slice_matrix(exp_k, config, lambda, n);
  }
  return b;
}

namespace {

void check_shape(const FieldConfig& config, const SlicePropagators& props) {
  if (config.volume() != props.volume() || config.n_t() != props.n_t) {
    throw std::invalid_argument(
        "field config shape (" + std::to_string(config.n_t()) + "x" +
        std::to_string(config.volume()) + ") does not match propagators (" +
        std::to_string(props.n_t) + "x" + std::to_string(props.volume()) +
        ")");
  }
}

// Plain product of slices [first, last); short enough to stay well scaled.
CMatrix block_product(const FieldConfig& config, const CMatrix& exp_k,
                      double lambda, int first, int last) {
  const int v = config.volume();
  CMatrix b = CMatrix::Identity(v, v);
  for (int n = first; n < last; ++n) b = b * slice_matrix(exp_k, config, lambda, n);
  return b;
}

UDT left_block(const FieldConfig& config, const SlicePropagators& props,
               double lambda, int n_stab, int position) {
  UDT left = UDT::from_unitary(props.boundary);
  for (int start = 0; start < position; start += n_stab) {
    const int stop = std::min(start + n_stab, position);
    left = right_multiply(left, block_product(config, props.exp_k, lambda,
                                              start, stop));
  }
  return left;
}

}  // namespace

UDT build_chain(const FieldConfig& config, const SlicePropagators& props,
                double lambda, int n_stab, int first, int last) {
  check_shape(config, props);
  if (n_stab < 1) throw std::invalid_argument("n_stab must be >= 1");
  if (first < 0 || last > config.n_t() || first > last) {
    throw std::invalid_argument("slice range out of bounds");
  }
  UDT chain = UDT::identity(config.volume());
  for (int stop = last; stop > first; stop -= n_stab) {
    const int start = std::max(first, stop - n_stab);
    chain = left_multiply(block_product(config, props.exp_k, lambda, start, stop),
                          chain);
  }
  return chain;
}

UDT build_chain(const FieldConfig& config, const SlicePropagators& props,
                double lambda, int n_stab) {
  return build_chain(config, props, lambda, n_stab, 0, config.n_t());
}

Complex log_det_one_plus(const FieldConfig& config,
                         const SlicePropagators& props, double lambda,
                         int n_stab) {
  check_shape(config, props);
  const UDT left = left_block(config, props, lambda, n_stab, config.n_t());
  return log_det_one_plus(UDT::identity(config.volume()), left);
}

double log_weight(const FieldConfig& config, const SlicePropagators& props,
                  double lambda, int n_stab) {
  const Complex ld = log_det_one_plus(config, props, lambda, n_stab);
  if (std::isinf(ld.real()) && ld.real() < 0) {
    return -std::numeric_limits<double>::infinity();
  }
  return log_normalization_from_lambda(lambda, config.n_t(), config.volume()) -
         lambda * static_cast<double>(config.sum()) + 2.0 * ld.real();
}

GreenState green_from_scratch(const FieldConfig& config,
                              const SlicePropagators& props, double lambda,
                              int position, int n_stab) {
  check_shape(config, props);
  if (position < 0 || position > config.n_t()) {
    throw std::invalid_argument("green position " + std::to_string(position) +
                                " outside [0, " + std::to_string(config.n_t()) +
                                "]");
  }
  const UDT left = left_block(config, props, lambda, n_stab, position);
  const UDT right =
      build_chain(config, props, lambda, n_stab, position, config.n_t());
  OnePlusInverse inv = invert_one_plus(right, left);
  return {std::move(inv.inverse), position, inv.log_det};
}

FlipRatio flip_ratio(const GreenState& green, int s_old, double lambda, int x) {
  const double delta = std::expm1(-2.0 * lambda * s_old);
  const Complex r = 1.0 + delta * (1.0 - green.g(x, x));
  return {std::exp(2.0 * lambda * s_old) * std::norm(r), r, delta};
}

void apply_flip(GreenState& green, const FlipRatio& ratio, int x) {
  // The flipped diagonal is the rightmost factor of the wrapped chain:
  // G' = G - (delta / R) (1 - G) e_x e_x^T G.
  const Complex factor = ratio.delta / ratio.det_ratio;
  Eigen::VectorXcd column = -green.g.col(x);
  column(x) += 1.0;
  const Eigen::RowVectorXcd row = green.g.row(x);
  green.g.noalias() -= factor * column * row;
  green.log_det += std::log(ratio.det_ratio);
}

void wrap(GreenState& green, const SlicePropagators& props,
          const FieldConfig& config, double lambda) {
  const int n_t = config.n_t();
  if (n_t == 0) return;
  if (green.position == n_t) {
    green.g = props.boundary_inv * green.g * props.boundary;
    green.position = 0;
  }
  const int n = green.position;
  CMatrix g = props.exp_k_inv * green.g * props.exp_k;
  for (int x = 0; x < config.volume(); ++x) {
    const double scale = std::exp(lambda * config(n, x));
    g.row(x) /= scale;
    g.col(x) *= scale;
  }
  green.g = std::move(g);
  green.position = n + 1;
}

StabilizedGreen::StabilizedGreen(SlicePropagators props, double lambda,
                                 int n_stab, double drift_tol)
    : props_(std::move(props)),
      lambda_(lambda),
      n_stab_(n_stab),
      drift_tol_(drift_tol),
      left_(UDT::identity(props_.volume())) {
  if (n_stab < 1) throw std::invalid_argument("n_stab must be >= 1");
  if (!(drift_tol > 0.0)) throw std::invalid_argument("drift_tol must be > 0");
  for (int p = 0; p < props_.n_t; p += n_stab) checkpoints_.push_back(p);
  checkpoints_.push_back(props_.n_t);
}

void StabilizedGreen::start_sweep(const FieldConfig& config) {
  check_shape(config, props_);
  const std::size_t k = checkpoints_.size();
  right_.assign(k, UDT::identity(config.volume()));
  for (std::size_t i = k - 1; i-- > 0;) {
    right_[i] = left_multiply(block_product(config, props_.exp_k, lambda_,
                                            checkpoints_[i], checkpoints_[i + 1]),
                              right_[i + 1]);
  }
  left_ = UDT::from_unitary(props_.boundary);
  left_index_ = 0;
  OnePlusInverse inv = invert_one_plus(right_[0], left_);
  green_ = {std::move(inv.inverse), 0, inv.log_det};
}

void StabilizedGreen::stabilize(const FieldConfig& config) {
  const std::size_t k = left_index_ + 1;
  left_ = right_multiply(left_, block_product(config, props_.exp_k, lambda_,
                                              checkpoints_[left_index_],
                                              checkpoints_[k]));
  left_index_ = k;
  OnePlusInverse inv = invert_one_plus(right_[k], left_);
  last_drift_ = (green_.g - inv.inverse).cwiseAbs().maxCoeff();
  max_drift_ = std::max(max_drift_, last_drift_);
  ++rebuilds_;
  green_.g = std::move(inv.inverse);
  green_.log_det = inv.log_det;
  if (!(last_drift_ <= drift_tol_)) {
    std::ostringstream msg;
    msg << "Green's function drift " << last_drift_ << " exceeds tolerance "
        << drift_tol_ << " at slice " << green_.position << " (n_stab "
        << n_stab_ << ", lambda " << lambda_ << ")";
    throw StabilizationError(msg.str(), last_drift_, green_.position);
  }
}

void StabilizedGreen::next_slice(const FieldConfig& config) {
  const int p = green_.position;
  if (p >= props_.n_t) {
    throw std::logic_error("next_slice called past the end of the chain");
  }
  if (p > 0 && left_index_ + 1 < checkpoints_.size() &&
      checkpoints_[left_index_ + 1] == p) {
    stabilize(config);
  }
  wrap(green_, props_, config, lambda_);
}

void StabilizedGreen::finish_sweep(const FieldConfig& config) {
  if (props_.n_t == 0) return;
  if (green_.position != props_.n_t) {
    throw std::logic_error("finish_sweep called before the last slice");
  }
  stabilize(config);
}

}  // namespace lindqmc
