#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vrcov/error.hpp"
#include "vrcov/rng.hpp"
#include "vrcov/statistics.hpp"

using namespace vrcov;

TEST(RunningMoments, MergeEqualsSequential) {
  auto rng = make_engine(1, {});
  std::normal_distribution<double> g(3.0, 2.0);
  std::vector<double> x(1000);
  for (double& v : x) v = g(rng);
  RunningMoments all, a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    all.add(x[i]);
    (i < 337 ? a : b).add(x[i]);
  }
  a.merge(b);
  EXPECT_EQ(a.count, all.count);
  EXPECT_NEAR(a.mean, all.mean, 1e-13);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-12);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(all.variance(), ss / (x.size() - 1), 1e-12);
  EXPECT_NEAR(all.standard_error(), std::sqrt(all.variance() / x.size()), 1e-15);
}

TEST(RunningMoments, MergeWithEmpty) {
  RunningMoments a, e;
  a.add(1.0);
  a.add(3.0);
  a.merge(e);
  EXPECT_EQ(a.count, 2u);
  e.merge(a);
  EXPECT_EQ(e.mean, 2.0);
  EXPECT_EQ(RunningMoments{}.variance(), 0.0);
}

TEST(EmpiricalCovariance, MatchesTwoPassAndMerges) {
  auto rng = make_engine(2, {});
  std::normal_distribution<double> g;
  const std::size_t n = 3, N = 500;
  std::vector<std::vector<double>> rows(N, std::vector<double>(n));
  for (auto& r : rows) {
    const double z = g(rng);
    r = {z + g(rng), 2.0 * z, g(rng) - z};
  }
  EmpiricalCovariance all(n), a(n), b(n);
  for (std::size_t t = 0; t < N; ++t) {
    all.add(rows[t]);
    (t % 3 ? a : b).add(rows[t]);
  }
  a.merge(b);
  const auto s = all.covariance();
  const auto sm = a.covariance();
  std::vector<double> mean(n, 0.0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < n; ++i) mean[i] += r[i] / N;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double c = 0.0;
      for (const auto& r : rows) c += (r[i] - mean[i]) * (r[j] - mean[j]);
      c /= N - 1;
      EXPECT_NEAR(s(i, j), c, 1e-12);
      EXPECT_NEAR(sm(i, j), c, 1e-12);
      EXPECT_EQ(s(i, j), s(j, i));
    }
  EXPECT_EQ(all.count(), N);
  const auto r = all.correlation();
  EXPECT_NEAR(r(0, 0), 1.0, 1e-14);
  EXPECT_LE(std::abs(r(0, 1)), 1.0);
}

TEST(EmpiricalCovariance, InsufficientData) {
  EmpiricalCovariance c(2);
  EXPECT_THROW(c.covariance(), Error);
  c.add(std::vector<double>{1.0, 2.0});
  try {
    c.covariance();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
  EXPECT_THROW(c.add(std::vector<double>{1.0}), Error);
}

TEST(EmpiricalCovariance, NormalTheoryStandardErrors) {
  EmpiricalCovariance c(2);
  for (int i = 0; i < 101; ++i) c.add(std::vector<double>{double(i), double(i % 7)});
  const auto ref = SymMatrix::from_dense(Matrix{{4.0, 1.0}, {1.0, 9.0}});
  const auto se = c.covariance_standard_errors(ref);
  EXPECT_NEAR(se(0, 0), std::sqrt(2.0 * 16.0 / 100.0), 1e-15);
  EXPECT_NEAR(se(0, 1), std::sqrt((36.0 + 1.0) / 100.0), 1e-15);
}

TEST(Correlation, PearsonAndSpearman) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  const std::vector<double> z{1, 8, 27, 64, 125};
  const std::vector<double> w{5, 4, 3, 2, 1};
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-15);
  EXPECT_LT(pearson(x, z), 1.0);
  EXPECT_NEAR(spearman(x, z), 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, w), -1.0, 1e-15);
  EXPECT_EQ(mid_ranks(std::vector<double>{3, 1, 3, 2}), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(LeastSquares, ExactLine) {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, -1, -3, -5};
  const auto f = least_squares(x, y);
  EXPECT_NEAR(f.slope, -2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
}
