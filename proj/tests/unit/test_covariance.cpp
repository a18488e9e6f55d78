#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vrcov/covariance.hpp"
#include "vrcov/error.hpp"
#include "vrcov/linalg.hpp"
#include "vrcov/moments.hpp"
#include "vrcov/rng.hpp"

using namespace vrcov;

namespace {

MomentTable table_for(const AdmissibleSequence& s, std::uint64_t samples = 4000) {
  MomentTable t(s.d);
  MomentOptions opt;
  opt.samples = samples;
  ensure_moments(t, s.specs, opt);
  return t;
}

bool has_condition(const std::vector<Violation>& v, int c) {
  return std::any_of(v.begin(), v.end(), [c](const Violation& x) { return x.condition == c; });
}

}  // namespace

TEST(Admissible, ExampleConfigurationIsValid) {
  EXPECT_TRUE(validate({3, {{1, 1.0}, {2, 1.0}, {3, 1.0}}}).empty());
  EXPECT_NO_THROW(require_admissible({3, {{1, 1.0}, {2, 1.0}, {3, 1.0}}}));
}

TEST(Admissible, EachConditionIsReported) {
  EXPECT_TRUE(has_condition(validate({2, {{2, 0.0}, {1, 0.0}}}), 1));
  EXPECT_TRUE(has_condition(validate({2, {{1, 0.5}, {1, 0.5}}}), 2));
  EXPECT_TRUE(has_condition(validate({2, {{1, -2.0}}}), 3));
  EXPECT_TRUE(has_condition(validate({2, {{3, 1.0}}}), 4));
  EXPECT_TRUE(has_condition(validate({2, {}}), 0));
  // Integrability of the squared functional (i = j) is part of condition 3.
  EXPECT_TRUE(validate({2, {{1, -1.1}}}).size() == 1);
  EXPECT_TRUE(has_condition(validate({2, {{1, -1.1}}}), 3));
  EXPECT_TRUE(validate({2, {{1, -0.4}}}).empty());
  EXPECT_THROW(require_admissible({2, {{2, 0.0}, {1, 0.0}}}), Error);
}

TEST(Admissible, AllViolationsAreListed) {
  const auto v = validate({2, {{3, 1.0}, {1, 0.0}, {1, 0.0}}});
  EXPECT_TRUE(has_condition(v, 1));
  EXPECT_TRUE(has_condition(v, 2));
  EXPECT_TRUE(has_condition(v, 4));
}

TEST(Regime, CriticalBranchMustMatchC) {
  EXPECT_EQ(Regime::critical(0.5).branch, Regime::Branch::Low);
  EXPECT_EQ(Regime::critical(2.0).branch, Regime::Branch::High);
  EXPECT_EQ(Regime::critical(1.0).branch, Regime::Branch::Low);
  EXPECT_NO_THROW(Regime::critical(1.0, Regime::Branch::High));
  EXPECT_THROW(Regime::critical(0.5, Regime::Branch::High), Error);
  EXPECT_THROW(Regime::critical(2.0, Regime::Branch::Low), Error);
  EXPECT_THROW(Regime::critical(0.0), Error);
}

TEST(Factorial, ExactSmallValues) {
  EXPECT_EQ(factorial(0), 1.0);
  EXPECT_EQ(factorial(5), 120.0);
  EXPECT_EQ(factorial(20), 2432902008176640000.0);
  EXPECT_THROW(factorial(-1), Error);
}

TEST(Sigma, SubcriticalOneByOneIsHalfMu) {
  const AdmissibleSequence s{2, {{1, 0.0}}};
  const auto t = table_for(s);
  const auto m = assemble_sigma(s, Regime::sub(), t);
  EXPECT_NEAR(m.sigma(0, 0), std::numbers::pi / 2.0, 1e-15);
  EXPECT_EQ(m.standard_error(0, 0), 0.0);  // closed form
}

TEST(Sigma, SubcriticalDistinctKIsDiagonal) {
  const AdmissibleSequence s{2, {{1, 1.0}, {2, 0.5}, {3, 0.0}}};
  const auto t = table_for(s);
  const auto m = assemble_sigma(s, Regime::sub(), t);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) { EXPECT_EQ(m.sigma(i, j), 0.0); }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& sp = s.specs[i];
    EXPECT_DOUBLE_EQ(m.sigma(i, i),
                     resolve_single(t, sp.k, 2.0 * sp.alpha).value / factorial(sp.k + 1));
  }
}

TEST(Sigma, SupercriticalIsRankOneOuterProduct) {
  const AdmissibleSequence s{3, {{1, 1.0}, {2, 1.0}, {3, 1.0}}};
  const auto t = table_for(s);
  const auto m = assemble_sigma(s, Regime::super(), t);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& a = s.specs[i];
      const auto& b = s.specs[j];
      const double expect = resolve_single(t, a.k, a.alpha).value *
                            resolve_single(t, b.k, b.alpha).value /
                            (factorial(a.k) * factorial(b.k));
      EXPECT_NEAR(m.sigma(i, j), expect, 1e-14 * expect);
    }
  EXPECT_EQ(spectral_summary(m.sigma).rank, 1);
  EXPECT_EQ(m.table_hash, t.hash());
}

TEST(Sigma, ZeroDimensionalEntriesFlagMuZero) {
  const AdmissibleSequence s{2, {{0, 0.0}, {1, 0.0}}};
  const auto t = table_for(s);
  const auto sub = assemble_sigma(s, Regime::sub(), t);
  EXPECT_TRUE(sub.uses_mu_zero);
  EXPECT_EQ(sub.sigma(0, 0), 1.0);  // Var(N)/t -> 1
  const AdmissibleSequence dense{2, {{1, 0.0}, {2, 0.0}}};
  EXPECT_FALSE(assemble_sigma(dense, Regime::super(), table_for(dense)).uses_mu_zero);
}

TEST(Sigma, MatricesAreSymmetricAndErrorsNonNegative) {
  const AdmissibleSequence s{2, {{1, 0.0}, {1, 1.0}, {2, 0.0}, {2, 1.0}}};
  const auto t = table_for(s);
  for (int m = 0; m <= 4; ++m) {
    const auto a = build_a_lt1(m, s, t);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(a.value(i, j), a.value(j, i));
        EXPECT_GE(a.standard_error(i, j), 0.0);
      }
  }
  EXPECT_THROW(build_a_lt1(5, s, t), Error);
  EXPECT_THROW(build_a_gt1(3, s, t), Error);
}

TEST(Sigma, OffParityEntriesVanish) {
  // k = 1 vs k = 2 differ by one, so A_m^{<1} is zero on that entry for even m.
  const AdmissibleSequence s{2, {{1, 0.0}, {2, 0.0}}};
  const auto t = table_for(s);
  EXPECT_EQ(build_a_lt1(0, s, t).value(0, 1), 0.0);
  EXPECT_EQ(build_a_lt1(2, s, t).value(0, 1), 0.0);
  EXPECT_NE(build_a_lt1(1, s, t).value(0, 1), 0.0);
  EXPECT_NE(build_a_lt1(3, s, t).value(0, 1), 0.0);
  EXPECT_EQ(build_a_gt1(2, s, t).value(0, 1), 0.0);
}

TEST(Sigma, CriticalBranchesCoincideAtOne) {
  auto rng = make_engine(77, {});
  std::uniform_int_distribution<int> kd(0, 3);
  std::uniform_int_distribution<int> ad(0, 4);
  for (int trial = 0; trial < 10; ++trial) {
    AdmissibleSequence s{2 + trial % 2, {}};
    while (s.specs.size() < 3) {
      FunctionalSpec f{kd(rng), 0.5 * ad(rng)};
      if (f.k > s.d) f.alpha = 0.0;
      if (std::find(s.specs.begin(), s.specs.end(), f) == s.specs.end()) s.specs.push_back(f);
    }
    std::sort(s.specs.begin(), s.specs.end(), [](auto& a, auto& b) {
      return std::pair(a.k, a.alpha) < std::pair(b.k, b.alpha);
    });
    const auto t = table_for(s, 2000);
    EXPECT_LE(check_sum_identity(s, t).relative(), 1e-12);
    const auto lo = assemble_sigma(s, Regime::critical(1.0, Regime::Branch::Low), t);
    const auto hi = assemble_sigma(s, Regime::critical(1.0, Regime::Branch::High), t);
    EXPECT_LE(relative_residual(lo.sigma.dense(), hi.sigma.dense()), 1e-12);
  }
}

TEST(Sigma, CriticalLimitsApproachTheOtherRegimes) {
  // c -> 0 on the low branch and c -> infinity on the high branch recover
  // the sub and super matrices.
  const AdmissibleSequence s{2, {{1, 0.0}, {2, 0.0}}};
  const auto t = table_for(s);
  const auto lo = critical_low_sum(s, t, 1e-12);
  const auto sub = assemble_sigma(s, Regime::sub(), t);
  EXPECT_LE(relative_residual(lo.value.dense(), sub.sigma.dense()), 1e-5);
  const auto hi = critical_high_sum(s, t, 1e12);
  const auto super = assemble_sigma(s, Regime::super(), t);
  EXPECT_LE(relative_residual(hi.value.dense(), super.sigma.dense()), 1e-11);
}

TEST(Sigma, TableDimensionMustMatch) {
  const AdmissibleSequence s{2, {{1, 0.0}}};
  MomentTable t(3);
  EXPECT_THROW(assemble_sigma(s, Regime::sub(), t), Error);
  MomentTable empty(2);
  EXPECT_THROW(assemble_sigma({2, {{2, 0.0}}}, Regime::sub(), empty), Error);
}

TEST(Sigma, TextReportContainsHash) {
  const AdmissibleSequence s{2, {{1, 0.0}, {1, 1.0}}};
  const auto t = table_for(s);
  const auto m = assemble_sigma(s, Regime::sub(), t);
  EXPECT_NE(m.to_text().find(t.hash()), std::string::npos);
}
