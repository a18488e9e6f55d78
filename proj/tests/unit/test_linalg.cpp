#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "vrcov/error.hpp"
#include "vrcov/linalg.hpp"
#include "vrcov/rng.hpp"

using namespace vrcov;

namespace {

SymMatrix random_symmetric(std::size_t n, Engine& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) s.set(i, j, u(rng));
  return s;
}

SymMatrix random_spd(std::size_t n, Engine& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix b(n, n);
  for (double& x : b.data()) x = u(rng);
  SymMatrix s = SymMatrix::from_dense(b * b.transpose(), 1e-12);
  for (std::size_t i = 0; i < n; ++i) s.add(i, i, 0.1);
  return s;
}

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  return e;
}

SymMatrix hilbert(std::size_t n) {
  SymMatrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) h.set(i, j, 1.0 / static_cast<double>(i + j + 1));
  return h;
}

}  // namespace

TEST(Matrix, BasicAlgebra) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0, 1}, {1, 0}};
  EXPECT_EQ(a * b, (Matrix{{2, 1}, {4, 3}}));
  EXPECT_EQ(a.transpose(), (Matrix{{1, 3}, {2, 4}}));
  EXPECT_EQ(a + b, (Matrix{{1, 3}, {4, 4}}));
  EXPECT_EQ(a * Matrix::identity(2), a);
  EXPECT_DOUBLE_EQ(trace(a), 5.0);
  EXPECT_DOUBLE_EQ(infinity_norm(a), 7.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(a), std::sqrt(30.0));
}

TEST(SymMatrix, FromDenseRejectsAsymmetric) {
  EXPECT_THROW(SymMatrix::from_dense(Matrix{{1, 2}, {3, 4}}), Error);
  const auto s = SymMatrix::from_dense(Matrix{{1, 2}, {2, 4}});
  EXPECT_EQ(s(0, 1), 2.0);
}

TEST(Jacobi, MatchesEigenOracle) {
  auto rng = make_engine(1, {});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const auto a = random_symmetric(n, rng);
    const auto ours = jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(a.dense()));
    for (std::size_t i = 0; i < n; ++i)
      EXPECT_NEAR(ours.values[i], ref.eigenvalues()(i), 1e-12) << n;
    // A v = lambda v and V orthonormal.
    const Matrix av = a.dense() * ours.vectors;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        EXPECT_NEAR(av(i, j), ours.values[j] * ours.vectors(i, j), 1e-11);
    const Matrix vtv = ours.vectors.transpose() * ours.vectors;
    EXPECT_LE(max_abs(vtv - Matrix::identity(n)), 1e-12);
  }
}

TEST(Jacobi, DiagonalInputNeedsNoRotation) {
  std::vector<double> d{3.0, -1.0, 2.0};
  const auto e = jacobi_eigen(SymMatrix::from_dense(Matrix::diagonal(d)));
  EXPECT_EQ(e.values, (std::vector<double>{-1.0, 2.0, 3.0}));
  EXPECT_EQ(e.sweeps, 0);
}

TEST(Cholesky, ReconstructsAndMatchesEigen) {
  auto rng = make_engine(2, {});
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto a = random_spd(n, rng);
    const Matrix g = cholesky(a);
    EXPECT_LE(relative_residual(g * g.transpose(), a.dense()), 1e-13);
    const Eigen::MatrixXd ref = to_eigen(a.dense()).llt().matrixL();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(g(i, j), ref(i, j), 1e-10);
  }
}

TEST(Cholesky, IndefiniteThrowsWithWitness) {
  const auto a = SymMatrix::from_dense(Matrix{{1, 2}, {2, 1}});
  try {
    cholesky(a);
    FAIL();
  } catch (const NotPositiveDefinite& e) {
    ASSERT_EQ(e.witness().size(), 2u);
    // The witness is a direction of negative curvature.
    EXPECT_LT(quadratic_form(a, e.witness()), 0.0);
  }
}

TEST(Lu, ReconstructsWithPivoting) {
  auto rng = make_engine(3, {});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 8;
    Matrix a(n, n);
    for (double& x : a.data()) x = u(rng);
    const auto f = lu(a);
    EXPECT_FALSE(f.singular);
    EXPECT_LE(relative_residual(f.reconstruct(), a), 1e-13);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(f.lower(i, i), 1.0);
      for (std::size_t j = i + 1; j < n; ++j) {
        EXPECT_EQ(f.lower(i, j), 0.0);
        EXPECT_EQ(f.upper(j, i), 0.0);
      }
    }
    EXPECT_NEAR(det(a), to_eigen(a).determinant(), 1e-12);
  }
}

TEST(Lu, SingularIsRecordedNotThrown) {
  const Matrix a{{1, 2}, {2, 4}};
  EXPECT_TRUE(lu(a).singular);
  EXPECT_EQ(det(a), 0.0);
  EXPECT_THROW(inverse(a), Error);
}

TEST(Inverse, RandomMatricesAndHilbertDeterminant) {
  auto rng = make_engine(4, {});
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_spd(1 + trial % 6, rng);
    const Matrix inv = inverse(a.dense());
    EXPECT_LE(infinity_norm(a.dense() * inv - Matrix::identity(a.size())), 1e-10);
  }
  // det H_4 = 1/6048000 exactly, computed with rational arithmetic.
  boost::rational<long long> m[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = boost::rational<long long>(1, i + j + 1);
  boost::rational<long long> exact(1);
  for (int c = 0; c < 4; ++c) {
    exact *= m[c][c];
    for (int r = c + 1; r < 4; ++r) {
      const auto f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  ASSERT_EQ(exact, boost::rational<long long>(1, 6048000));
  const double ref = boost::rational_cast<double>(exact);
  EXPECT_NEAR(det(hilbert(4).dense()), ref, 1e-12 * ref);
}

TEST(SqrtPsd, SquaresBack) {
  auto rng = make_engine(5, {});
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_spd(1 + trial % 6, rng);
    const auto r = sqrt_psd(a);
    EXPECT_LE(relative_residual(r.dense() * r.dense(), a.dense()), 1e-12);
    EXPECT_GE(jacobi_eigen(r).values.front(), 0.0);
  }
}

TEST(Spectral, SummaryAndLoewnerOrder) {
  const std::vector<double> v{1.0, 2.0, 0.0};
  const auto s = spectral_summary(SymMatrix::from_dense(Matrix::diagonal(v)));
  EXPECT_EQ(s.rank, 2);
  EXPECT_TRUE(s.positive_semidefinite);
  EXPECT_FALSE(s.positive_definite);
  EXPECT_DOUBLE_EQ(s.max_eigenvalue, 2.0);
  const auto i2 = SymMatrix::from_dense(Matrix::identity(2));
  EXPECT_TRUE(loewner_geq(2.0 * i2, i2));
  EXPECT_FALSE(loewner_geq(i2, 2.0 * i2));
  EXPECT_NEAR(spectral_norm(SymMatrix::from_dense(Matrix{{0, 3}, {3, 0}})), 3.0, 1e-14);
}
