// Copyright 2026 The FMECA Workbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fmeca/agreement.h"

#include <gtest/gtest.h>

#include <random>

#include "fmeca/error.h"
#include "oracles.h"

namespace fmeca {
namespace {

RatingTable table(const std::vector<std::vector<int>>& rows) {
  RatingTable t;
  for (const auto& r : rows) {
    RatingRow row;
    for (int v : r) row.emplace_back(v);
    t.push_back(row);
  }
  return t;
}

// Two raters, 2x2 contingency counts: (yes,yes), (yes,no), (no,yes), (no,no).
std::pair<std::vector<int>, std::vector<int>> contingency(int yy, int yn, int ny, int nn) {
  std::vector<int> a, b;
  auto add = [&](int n, int x, int y) {
    for (int i = 0; i < n; ++i) {
      a.push_back(x);
      b.push_back(y);
    }
  };
  add(yy, 1, 1);
  add(yn, 1, 0);
  add(ny, 0, 1);
  add(nn, 0, 0);
  return {a, b};
}

RatingTable pair_table(const std::vector<int>& a, const std::vector<int>& b) {
  RatingTable t;
  for (std::size_t i = 0; i < a.size(); ++i) t.push_back({a[i], b[i]});
  return t;
}

TEST(CohenKappaTest, ContingencyFixture) {
  auto [a, b] = contingency(20, 5, 10, 15);
  AgreementEstimate e = cohen_kappa(a, b);
  ASSERT_TRUE(e.defined());
  EXPECT_NEAR(*e.value, 0.4, 1e-12);
  EXPECT_NEAR(e.diagnostics.at("p_o"), 0.7, 1e-12);
  EXPECT_NEAR(e.diagnostics.at("p_e"), 0.5, 1e-12);
  EXPECT_EQ(e.n_units, 50u);
}

TEST(CohenKappaTest, SingleCategoryUndefined) {
  std::vector<int> a(10, 1), b(10, 1);
  AgreementEstimate e = cohen_kappa(a, b);
  EXPECT_FALSE(e.defined());
  EXPECT_EQ(e.undefined_reason, "p_e = 1");
}

TEST(CohenKappaTest, PerfectAndOpposite) {
  std::vector<int> a = {0, 1, 0, 1}, b = {1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(*cohen_kappa(a, a).value, 1.0);
  EXPECT_DOUBLE_EQ(*cohen_kappa(a, b).value, -1.0);
}

TEST(CohenKappaTest, LengthMismatch) {
  std::vector<int> a = {0, 1}, b = {0};
  try {
    cohen_kappa(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.error_class(), ErrorClass::kDomain);
  }
}

TEST(GwetAc1Test, ParadoxFixture) {
  auto [a, b] = contingency(96, 1, 1, 2);
  std::vector<int> cats = {0, 1};
  double kappa = *cohen_kappa(a, b).value;
  double ac1 = *gwet_ac1(pair_table(a, b), cats).value;
  EXPECT_NEAR(kappa, 0.6564, 5e-5);
  EXPECT_NEAR(ac1, 0.9788, 5e-5);
  EXPECT_GE(ac1 - kappa, 0.3);
}

TEST(GwetAc1Test, FixedCategoriesExtendQ) {
  RatingTable t = table({{1, 1}, {1, 1}, {1, 0}});
  std::vector<int> cats = {0, 1, 2};
  auto fixed = gwet_ac1(t, cats);
  EXPECT_EQ(fixed.diagnostics.at("q"), 3.0);
  EXPECT_NEAR(*fixed.value, *oracle::ac1(t, cats), 1e-12);
  EXPECT_NE(*fixed.value, *gwet_ac1(t).value);
}

TEST(GwetAc1Test, SingleCategoryUndefined) {
  EXPECT_FALSE(gwet_ac1(table({{1, 1}, {1, 1}})).defined());
  std::vector<int> cats = {0, 1};
  EXPECT_TRUE(gwet_ac1(table({{1, 1}, {1, 1}}), cats).defined());
}

TEST(GwetAc1Test, OutOfSetRatingRejected) {
  std::vector<int> cats = {0, 1};
  EXPECT_THROW(gwet_ac1(table({{1, 2}}), cats), Error);
}

TEST(FleissKappaTest, YesCountFixture) {
  // yes-counts 3, 0, 2, 1 among three raters
  RatingTable t = table({{1, 1, 1}, {0, 0, 0}, {1, 1, 0}, {1, 0, 0}});
  EXPECT_NEAR(*fleiss_kappa(t).value, 1.0 / 3.0, 1e-12);
}

TEST(FleissKappaTest, MissingCellRejected) {
  RatingTable t = table({{1, 1, 1}, {0, 0, 0}});
  t[0][1].reset();
  EXPECT_THROW(fleiss_kappa(t), Error);
}

TEST(KrippendorffAlphaTest, FourUnitFixture) {
  RatingTable t = table({{1, 1}, {0, 0}, {1, 0}, {0, 0}});
  EXPECT_NEAR(*krippendorff_alpha(t).value, 0.5333, 5e-5);
  EXPECT_NEAR(*krippendorff_alpha(t).value, 8.0 / 15.0, 1e-12);
}

TEST(KrippendorffAlphaTest, MissingValuesSkipUnpairableUnits) {
  RatingTable t = table({{1, 1, 0}, {0, 0, 0}, {1, 0, 1}, {0, 1, 0}});
  t[1][2].reset();
  t[3][0].reset();
  t[3][1].reset();
  AgreementEstimate e = krippendorff_alpha(t);
  EXPECT_EQ(e.n_units, 3u);
  EXPECT_NEAR(*e.value, *oracle::alpha(t), 1e-12);
}

TEST(KrippendorffAlphaTest, NoVariationUndefined) {
  EXPECT_FALSE(krippendorff_alpha(table({{1, 1}, {1, 1}})).defined());
}

TEST(SpearmanTest, RankFixture) {
  std::vector<double> x = {1, 2, 3, 4}, y = {1, 3, 2, 4};
  EXPECT_NEAR(*spearman_rho(x, y).value, 0.8, 1e-12);
}

TEST(SpearmanTest, AverageRanksWithTies) {
  std::vector<double> v = {3, 1, 3, 2};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(PearsonTest, ZeroVarianceUndefined) {
  std::vector<double> x = {2, 2, 2}, y = {1, 2, 3};
  AgreementEstimate e = pearson_r(x, y);
  EXPECT_FALSE(e.defined());
  EXPECT_EQ(e.undefined_reason, "zero variance");
}

TEST(PearsonTest, MatchesOracle) {
  std::vector<double> x = {1, 4, 2, 5, 3}, y = {2, 5, 1, 4, 4};
  EXPECT_NEAR(*pearson_r(x, y).value, *oracle::pearson(x, y), 1e-12);
}

TEST(IccTest, ThreeByTwoFixture) {
  std::vector<std::vector<double>> m = {{2, 3}, {4, 4}, {5, 4}};
  EXPECT_NEAR(*icc_2_1(m).value, 0.7143, 5e-5);
  EXPECT_NEAR(*icc_2_1(m).value, 5.0 / 7.0, 1e-12);
}

TEST(IccTest, ConstantMatrixUndefined) {
  std::vector<std::vector<double>> m = {{3, 3}, {3, 3}};
  EXPECT_FALSE(icc_2_1(m).defined());
}

TEST(IccTest, RequiresCompleteMatrix) {
  RatingTable t = table({{1, 2}, {3, 4}});
  t[1][0].reset();
  EXPECT_THROW(icc_2_1(t), Error);
  EXPECT_THROW(icc_2_1(std::vector<std::vector<double>>{{1, 2}}), Error);
}

TEST(ToleranceTest, PairFixture) {
  std::vector<int> x = {1, 3, 5, 4}, y = {2, 3, 1, 5};
  EXPECT_DOUBLE_EQ(*tolerance_agreement(x, y, 0).value, 0.25);
  EXPECT_DOUBLE_EQ(*tolerance_agreement(x, y, 1).value, 0.75);
  EXPECT_DOUBLE_EQ(*tolerance_agreement(x, y, 2).value, 0.75);
  EXPECT_DOUBLE_EQ(*tolerance_agreement(x, y, 4).value, 1.0);
}

TEST(ToleranceTest, RejectsBadInput) {
  std::vector<int> x = {1, 6}, y = {1, 1};
  EXPECT_THROW(tolerance_agreement(x, y, 1), Error);
  std::vector<int> ok = {1, 2};
  EXPECT_THROW(tolerance_agreement(ok, ok, -1), Error);
}

TEST(ToleranceTest, MultiRaterUsesCoRatedUnits) {
  RatingTable t = table({{1, 2, 5}, {3, 3, 3}, {4, 1, 4}});
  t[0][2].reset();
  EXPECT_NEAR(*tolerance_agreement(t, 1).value, *oracle::tolerance(t, 1), 1e-12);
}

TEST(UnanimityTest, Fraction) {
  RatingTable t = table({{1, 1, 1}, {0, 1, 1}, {0, 0, 0}, {1, 0, 1}});
  EXPECT_DOUBLE_EQ(*unanimity_rate(t).value, 0.5);
}

TEST(RaterSummaryTest, SampleStandardDeviation) {
  RatingTable t = table({{1, 2}, {3, 2}, {5, 2}});
  auto s = rater_summaries(t, {"a", "b"});
  EXPECT_DOUBLE_EQ(*s[0].mean, 3.0);
  EXPECT_DOUBLE_EQ(*s[0].sd, 2.0);
  EXPECT_DOUBLE_EQ(*s[1].sd, 0.0);
}

TEST(OracleAgreementTest, RandomBinaryTables) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    int units = 2 + static_cast<int>(rng() % 9);
    std::bernoulli_distribution yes(0.1 + 0.8 * (trial % 5) / 4.0);
    RatingTable t;
    for (int u = 0; u < units; ++u) t.push_back({yes(rng) ? 1 : 0, yes(rng) ? 1 : 0, yes(rng) ? 1 : 0});
    auto check = [&](const AgreementEstimate& e, std::optional<double> o) {
      ASSERT_EQ(e.defined(), o.has_value());
      if (o) EXPECT_NEAR(*e.value, *o, 1e-12);
    };
    check(fleiss_kappa(t), oracle::fleiss(t));
    check(krippendorff_alpha(t), oracle::alpha(t));
    check(gwet_ac1(t), oracle::ac1(t));
    std::vector<int> a, b;
    for (const auto& row : t) {
      a.push_back(*row[0]);
      b.push_back(*row[1]);
    }
    check(cohen_kappa(a, b), oracle::cohen(a, b));
    EXPECT_NEAR(*unanimity_rate(t).value, oracle::unanimity(t), 1e-12);
  }
}

}  // namespace
}  // namespace fmeca
