#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "lindqmc/bss.hpp"
#include "lindqmc/linalg.hpp"
#include "lindqmc/model.hpp"

namespace lindqmc {

using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

/// Jordan-Wigner fermion operators on the 2^n_modes Fock space. Mode m is bit
/// m of the basis index; the sign string runs over all lower modes.
class FockOperators {
 public:
  explicit FockOperators(int n_modes);

  int modes() const { return n_modes_; }
  int dimension() const { return 1 << n_modes_; }
  const SparseReal& annihilate(int mode) const { return annihilators_.at(mode); }
  SparseReal create(int mode) const { return annihilate(mode).transpose(); }
  SparseReal number(int mode) const;
  /// sum_ab X_ab c+_a c_b as a dense many-body matrix.
  CMatrix quadratic(const CMatrix& x) const;

 private:
  int n_modes_;
  std::vector<SparseReal> annihilators_;
};

/// Generator of the vectorised master equation on the doubled space, split as
/// hopping part K and dephasing part U. Modes 0..V-1 are the left-ket (c)
/// fermions, V..2V-1 the right-ket (d) fermions.
struct LiouvillianMatrix {
  SparseComplex hopping;
  SparseComplex interaction;
  int volume = 0;

  int dimension() const { return static_cast<int>(hopping.rows()); }
  CMatrix dense() const;
  CMatrix dense_hopping() const;
};

/// K = -i w sum A_ab c+_a c_b + i w sum A_ab d+_a d_b,
/// U = sum_x [gamma (n^c_x - 1/2)(n^d_x - 1/2) - gamma / 4]. Requires V <= 6.
LiouvillianMatrix build_liouvillian(const Eigen::MatrixXd& adjacency, double w,
                                    double gamma);

/// The same generator built straight from the Lindblad form with H the hopping
/// Hamiltonian and jump operators n_x, acting on rho_ij |i>|j> with the left
/// index in the low bits. Requires V <= 4.
CMatrix lindblad_superoperator(const Eigen::MatrixXd& adjacency, double w,
                               double gamma);

/// Dense matrix exponential (Pade scaling and squaring).
CMatrix expm(const CMatrix& m);

struct ExactFidelities {
  Complex echo;    ///< tr exp(-K t) exp(L t)
  Complex purity;  ///< tr exp(L t)
};
/// Requires V <= 4.
ExactFidelities exact_fidelities(const Eigen::MatrixXd& adjacency, double w,
                                 double gamma, double t);

/// tr [boundary * prod_n exp(K dt) exp(U dt)] with boundary exp(-K t) for the
/// echo and 1 for the purity. Requires V <= 4.
Complex trotter_trace(const Eigen::MatrixXd& adjacency,
                      const ModelParams& params, Observable kind);

using LogWeightFn = std::function<double(
    const FieldConfig&, const SlicePropagators&, double lambda)>;

/// Sum of exp(log_weight) over all 2^(N_t V) field configurations. Requires
/// N_t V <= 20. `weight` defaults to the production log_weight.
double brute_force_hs(const Eigen::MatrixXd& adjacency,
                      const ModelParams& params, Observable kind,
                      const LogWeightFn& weight = {});

/// Exhaustive version with explicit couplings, used for telescoping factors.
double brute_force_hs(const Eigen::MatrixXd& adjacency, double w,
                      double lambda, double dt, int n_t, Observable kind,
                      const LogWeightFn& weight = {});

/// Many-body tr[exp(c+ X c) exp(c+ Y c)] on the Fock space of X.rows() modes.
Complex fock_trace_of_exponentials(const CMatrix& x, const CMatrix& y);

}  // namespace lindqmc
