#pragma once

#include <complex>

#include <Eigen/Dense>

namespace lindqmc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// M = U * diag(D) * T with U unitary, D > 0 and T of unit row scale.
///
/// Built from a column-pivoted Householder QR, so the large and small scales
/// of a long matrix chain live in D and never mix inside a single product.
struct UDT {
  CMatrix u;
  Eigen::VectorXd d;
  CMatrix t;

  static UDT identity(int n);
  /// Treats a unitary matrix as an already-stable factor (D = 1, T = 1).
  static UDT from_unitary(const CMatrix& u);
  static UDT factorize(const CMatrix& m);

  int size() const { return static_cast<int>(d.size()); }
  CMatrix product() const;
};

/// x * f, refactorised.
UDT left_multiply(const CMatrix& x, const UDT& f);
/// f * y, refactorised.
UDT right_multiply(const UDT& f, const CMatrix& y);

/// Complex log-determinant through partial-pivot LU. A singular matrix gives
/// a real part of -inf.
Complex log_det(const CMatrix& m);

struct OnePlusInverse {
  CMatrix inverse;
  Complex log_det;
};

/// (1 + R L)^{-1} and log det(1 + R L) for R and L held in UDT form.
///
/// The diagonal scales are split into parts above and below one so that the
/// matrix actually inverted has entries of order one. Throws
/// SingularMatrixError when 1 + R L is exactly singular.
OnePlusInverse invert_one_plus(const UDT& right, const UDT& left);

/// log det(1 + R L) only; -inf real part for a singular matrix.
Complex log_det_one_plus(const UDT& right, const UDT& left);

}  // namespace lindqmc
