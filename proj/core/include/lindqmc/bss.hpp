#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lindqmc/linalg.hpp"
#include "lindqmc/model.hpp"

namespace lindqmc {

/// Which fidelity a weight belongs to. The echo inserts the backward free
/// evolution as boundary matrix, the purity uses the identity.
enum class Observable { echo, purity };

std::string_view to_string(Observable kind);
/// Parses "echo" or "purity"; throws std::invalid_argument otherwise.
Observable parse_observable(std::string_view name);

/// Eigendecomposition of the real symmetric bond matrix, reused for every
/// hopping exponential at different couplings.
class HoppingSpectrum {
 public:
  explicit HoppingSpectrum(const Eigen::MatrixXd& adjacency);

  int size() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  /// exp(-i theta A).
  CMatrix exp_minus_i(double theta) const;

 private:
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd values_;
};

/// exp(-i theta A) for a real symmetric A. Throws NumericalError when the
/// eigensolver fails.
CMatrix exp_hopping(const Eigen::MatrixXd& adjacency, double theta);

/// Single-particle matrices of one spin sector.
struct SlicePropagators {
  CMatrix exp_k;       ///< exp(-i w dt A), spin up
  CMatrix exp_k_inv;   ///< its inverse (adjoint)
  CMatrix exp_k_conj;  ///< spin-down propagator, elementwise conjugate
  CMatrix boundary;    ///< identity for purity, exp(+i w t A) for echo
  CMatrix boundary_inv;
  Observable kind = Observable::purity;
  int n_t = 0;

  static SlicePropagators make(const HoppingSpectrum& spectrum, double w,
                               double dt, int n_t, Observable kind);
  int volume() const { return static_cast<int>(exp_k.rows()); }
};

/// exp_k * diag(exp(lambda * s_{n,.})) for slice n (0-based).
CMatrix slice_matrix(const CMatrix& exp_k, const FieldConfig& config,
                     double lambda, int n);

/// Plain product b_0 b_1 ... b_{N_t-1}. Only for short chains and tests.
CMatrix naive_chain(const CMatrix& exp_k, const FieldConfig& config,
                    double lambda);

/// UDT form of b_first ... b_{last-1}, refactorised every n_stab slices.
UDT build_chain(const FieldConfig& config, const SlicePropagators& props,
                double lambda, int n_stab, int first, int last);
/// UDT form of the whole spin-up chain B = b_0 ... b_{N_t-1}.
UDT build_chain(const FieldConfig& config, const SlicePropagators& props,
                double lambda, int n_stab);

/// log det(1 + boundary * B) from the stabilised chain.
Complex log_det_one_plus(const FieldConfig& config,
                         const SlicePropagators& props, double lambda,
                         int n_stab);

/// ln of the semi-positive Monte Carlo weight
///   -N_t V ln(2 cosh lambda) - lambda S + 2 Re log det(1 + boundary B).
/// Returns -inf for a configuration of zero weight.
double log_weight(const FieldConfig& config, const SlicePropagators& props,
                  double lambda, int n_stab);

/// Equal-time Green's function at chain position p in [0, N_t]:
///   G(p) = (1 + b_p ... b_{N_t-1} boundary b_0 ... b_{p-1})^{-1}.
/// A flip on slice n is evaluated with G(n + 1). log_det is that of the
/// matrix being inverted and equals log det(1 + boundary B) up to 2 pi i.
struct GreenState {
  CMatrix g;
  int position = 0;
  Complex log_det;
};

/// Throws SingularMatrixError when 1 + B is singular.
GreenState green_from_scratch(const FieldConfig& config,
                              const SlicePropagators& props, double lambda,
                              int position, int n_stab);

struct FlipRatio {
  double weight_ratio;  ///< ratio of full (both-sector) weights, >= 0
  Complex det_ratio;    ///< spin-up determinant ratio R
  double delta;         ///< exp(-2 lambda s_old) - 1
};

/// Rank-one weight ratio for negating s at site x on the slice G is wrapped to.
FlipRatio flip_ratio(const GreenState& green, int s_old, double lambda, int x);

/// Sherman-Morrison update of G after an accepted flip:
///   G' = G - (delta / R) (1 - G) e_x e_x^T G.
void apply_flip(GreenState& green, const FlipRatio& ratio, int x);

/// Advances G from position p to p + 1 by similarity with b_p; position N_t
/// wraps across the boundary matrix to position 1.
void wrap(GreenState& green, const SlicePropagators& props,
          const FieldConfig& config, double lambda);

/// Green's function kept along a sweep with periodic stabilised rebuilds.
///
/// A right stack of UDT factors is built at the start of each sweep; the left
/// factor grows n_stab slices at a time as the sweep passes. At every
/// checkpoint the wrapped G is replaced by a rebuild and the max-abs drift is
/// recorded; a drift above drift_tol throws StabilizationError.
class StabilizedGreen {
 public:
  StabilizedGreen(SlicePropagators props, double lambda, int n_stab,
                  double drift_tol);

  void start_sweep(const FieldConfig& config);
  /// Rebuilds if the current position is a checkpoint, then wraps forward.
  void next_slice(const FieldConfig& config);
  /// Rebuilds at position N_t.
  void finish_sweep(const FieldConfig& config);

  FlipRatio propose(int x, int s_old) const {
    return flip_ratio(green_, s_old, lambda_, x);
  }
  void accept(const FlipRatio& ratio, int x) { apply_flip(green_, ratio, x); }

  const GreenState& state() const { return green_; }
  const SlicePropagators& propagators() const { return props_; }
  double lambda() const { return lambda_; }
  double max_drift() const { return max_drift_; }
  long rebuilds() const { return rebuilds_; }
  double last_drift() const { return last_drift_; }

 private:
  void stabilize(const FieldConfig& config);

  SlicePropagators props_;
  double lambda_;
  int n_stab_;
  double drift_tol_;
  std::vector<int> checkpoints_;
  std::vector<UDT> right_;
  UDT left_;
  std::size_t left_index_ = 0;
  GreenState green_;
  double max_drift_ = 0.0;
  double last_drift_ = 0.0;
  long rebuilds_ = 0;
};

}  // namespace lindqmc
