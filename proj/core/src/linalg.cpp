#include "lindqmc/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lindqmc/errors.hpp"

namespace lindqmc {
namespace {

// Pieces shared by the inverse and determinant routes.
struct Balanced {
  Eigen::VectorXd right_big;
  Eigen::VectorXd left_big;
  Eigen::PartialPivLU<CMatrix> left_t_lu;
  CMatrix middle;
};

Balanced balance(const UDT& right, const UDT& left) {
  const int n = right.size();
  Balanced b;
  b.right_big = right.d.cwiseMax(1.0);
  b.left_big = left.d.cwiseMax(1.0);
  const Eigen::VectorXd right_small = right.d.cwiseMin(1.0);
  const Eigen::VectorXd left_small = left.d.cwiseMin(1.0);

  b.left_t_lu.compute(left.t);
  const CMatrix first = right.u.adjoint() * b.left_t_lu.inverse();
  CMatrix second = right.t * left.u;
  b.middle.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      b.middle(i, j) = first(i, j) / (b.right_big(i) * b.left_big(j)) +
                       right_small(i) * second(i, j) * left_small(j);
    }
  }
  return b;
}

Complex log_det_lu(const Eigen::PartialPivLU<CMatrix>& lu) {
  const auto& packed = lu.matrixLU();
  Complex total = 0.0;
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const Complex pivot = packed(i, i);
    if (pivot == Complex(0.0)) {
      return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    total += std::log(pivot);
  }
  if (lu.permutationP().determinant() < 0) total += Complex(0.0, std::numbers::pi);
  return total;
}

std::string describe(const CMatrix& m) {
  std::ostringstream out;
  out << m.rows() << "x" << m.cols() << " matrix, max |entry| "
      << m.cwiseAbs().maxCoeff() << ", finite=" << std::boolalpha
      << m.allFinite();
  return out.str();
}

}  // namespace

UDT UDT::identity(int n) {
  return {CMatrix::Identity(n, n), Eigen::VectorXd::Ones(n),
          CMatrix::Identity(n, n)};
}

UDT UDT::from_unitary(const CMatrix& u) {
  const int n = static_cast<int>(u.rows());
  return {u, Eigen::VectorXd::Ones(n), CMatrix::Identity(n, n)};
}

UDT UDT::factorize(const CMatrix& m) {
  if (!m.allFinite()) {
    throw NumericalError("UDT factorisation of non-finite " + describe(m));
  }
  const int n = static_cast<int>(m.rows());
  Eigen::ColPivHouseholderQR<CMatrix> qr(m);
  UDT f;
  f.u = qr.householderQ();
  const CMatrix r = qr.matrixR().triangularView<Eigen::Upper>();
  f.d.resize(n);
  CMatrix scaled_r(n, n);
  for (int i = 0; i < n; ++i) {
    const double di = std::abs(r(i, i));
    if (!(di > 0.0) || !std::isfinite(di)) {
      throw NumericalError("UDT factorisation lost rank at column " +
                           std::to_string(i) + " of " + describe(m));
    }
    f.d(i) = di;
    scaled_r.row(i) = r.row(i) / di;
  }
  f.t = scaled_r * qr.colsPermutation().transpose();
  return f;
}

CMatrix UDT::product() const { return u * d.asDiagonal() * t; }

UDT left_multiply(const CMatrix& x, const UDT& f) {
  CMatrix m = x * f.u;
  m = m * f.d.asDiagonal();
  UDT g = UDT::factorize(m);
  g.t = g.t * f.t;
  return g;
}

UDT right_multiply(const UDT& f, const CMatrix& y) {
  CMatrix m = f.d.asDiagonal() * (f.t * y);
  UDT g = UDT::factorize(m);
  g.u = f.u * g.u;
  return g;
}

Complex log_det(const CMatrix& m) {
  Eigen::PartialPivLU<CMatrix> lu(m);
  return log_det_lu(lu);
}

OnePlusInverse invert_one_plus(const UDT& right, const UDT& left) {
  Balanced b = balance(right, left);
  Eigen::PartialPivLU<CMatrix> middle_lu(b.middle);
  const Complex middle_log_det = log_det_lu(middle_lu);
  if (std::isinf(middle_log_det.real())) {
    throw SingularMatrixError("1 + B is singular");
  }
  OnePlusInverse out;
  out.log_det = log_det(right.u) + b.right_big.array().log().sum() +
                middle_log_det + b.left_big.array().log().sum() +
                log_det_lu(b.left_t_lu);

  CMatrix inner = middle_lu.inverse();
  inner = b.left_big.cwiseInverse().asDiagonal() * inner *
          b.right_big.cwiseInverse().asDiagonal();
  out.inverse = b.left_t_lu.solve(inner) * right.u.adjoint();
  if (!out.inverse.allFinite()) {
    throw NumericalError("non-finite Green's function from " +
                         describe(b.middle));
  }
  return out;
}

Complex log_det_one_plus(const UDT& right, const UDT& left) {
  Balanced b = balance(right, left);
  const Complex middle_log_det = log_det(b.middle);
  if (std::isinf(middle_log_det.real())) return middle_log_det;
  return log_det(right.u) + b.right_big.array().log().sum() + middle_log_det +
         b.left_big.array().log().sum() + log_det_lu(b.left_t_lu);
}

}  // namespace lindqmc
