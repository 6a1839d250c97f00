#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lindqmc/errors.hpp"
#include "lindqmc/linalg.hpp"

namespace lindqmc {
namespace {

CMatrix random_matrix(int n, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(normal(gen), normal(gen));
  return m;
}

double rel_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

TEST(UDT, FactorizeReproducesMatrix) {
  std::mt19937_64 gen(3);
  for (int n : {1, 4, 9}) {
    const CMatrix m = random_matrix(n, gen);
    const UDT f = UDT::factorize(m);
    EXPECT_LT(rel_diff(f.product(), m), 1e-13);
    EXPECT_LT((f.u.adjoint() * f.u - CMatrix::Identity(n, n)).norm(), 1e-13);
    EXPECT_GT(f.d.minCoeff(), 0.0);
  }
}

TEST(UDT, FactorizeRejectsNonFinite) {
  CMatrix m = CMatrix::Identity(3, 3);
  m(1, 2) = Complex(std::nan(""), 0.0);
  EXPECT_THROW(UDT::factorize(m), NumericalError);
}

TEST(UDT, IdentityAndUnitary) {
  EXPECT_LT((UDT::identity(5).product() - CMatrix::Identity(5, 5)).norm(),
            1e-15);
  std::mt19937_64 gen(4);
  const CMatrix q = random_matrix(4, gen).householderQr().householderQ();
  EXPECT_LT(rel_diff(UDT::from_unitary(q).product(), q), 1e-15);
}

TEST(UDT, ChainedProductsMatchNaiveProduct) {
  std::mt19937_64 gen(5);
  const int n = 6;
  UDT left = UDT::identity(n);
  UDT right = UDT::identity(n);
  CMatrix naive = CMatrix::Identity(n, n);
  for (int k = 0; k < 8; ++k) {
    const CMatrix m = random_matrix(n, gen, 0.7);
    left = left_multiply(m, left);
    naive = m * naive;
  }
  EXPECT_LT(rel_diff(left.product(), naive), 1e-10);
  naive.setIdentity();
  for (int k = 0; k < 8; ++k) {
    const CMatrix m = random_matrix(n, gen, 0.7);
    right = right_multiply(right, m);
    naive = naive * m;
  }
  EXPECT_LT(rel_diff(right.product(), naive), 1e-10);
}

TEST(LogDet, MatchesDeterminant) {
  std::mt19937_64 gen(6);
  const CMatrix m = random_matrix(5, gen);
  const Complex expected = m.determinant();
  const Complex got = std::exp(log_det(m));
  EXPECT_LT(std::abs(got - expected), 1e-11 * std::abs(expected));
  EXPECT_EQ(std::real(log_det(CMatrix::Zero(3, 3))),
            -std::numeric_limits<double>::infinity());
}

TEST(OnePlus, MatchesDirectInverse) {
  std::mt19937_64 gen(7);
  const int n = 5;
  const CMatrix r = random_matrix(n, gen);
  const CMatrix l = random_matrix(n, gen);
  const CMatrix direct = CMatrix::Identity(n, n) + r * l;
  const auto got = invert_one_plus(UDT::factorize(r), UDT::factorize(l));
  EXPECT_LT(rel_diff(got.inverse, direct.inverse()), 1e-11);
  const Complex det = direct.determinant();
  EXPECT_LT(std::abs(std::exp(got.log_det) - det), 1e-11 * std::abs(det));
  const Complex ld = log_det_one_plus(UDT::factorize(r), UDT::factorize(l));
  EXPECT_NEAR(std::real(ld), std::real(got.log_det), 1e-12);
}

TEST(OnePlus, SurvivesWidelySeparatedScales) {
  // diag(e^{200}, e^{-200}) : 1 + D has determinant ~ e^{200}.
  const int n = 2;
  UDT huge = UDT::identity(n);
  huge.d << std::exp(200.0), std::exp(-200.0);
  const auto got = invert_one_plus(huge, UDT::identity(n));
  EXPECT_NEAR(std::abs(got.inverse(0, 0)), std::exp(-200.0), 1e-100);
  EXPECT_NEAR(std::abs(got.inverse(1, 1)), 1.0, 1e-15);
  EXPECT_NEAR(std::real(got.log_det), 200.0, 1e-12);
}

TEST(OnePlus, SingularThrows) {
  UDT minus = UDT::identity(2);
  minus.u = -CMatrix::Identity(2, 2);
  EXPECT_THROW(invert_one_plus(minus, UDT::identity(2)), SingularMatrixError);
  EXPECT_EQ(std::real(log_det_one_plus(minus, UDT::identity(2))),
            -std::numeric_limits<double>::infinity());
}

}  // namespace
}  // namespace lindqmc
