#include <cmath>

#include <gtest/gtest.h>

#include "knotenergy/audit.hpp"
#include "knotenergy/error.hpp"

using namespace knotenergy;

namespace {

constexpr double kTwoPi = 6.283185307179586;

const std::vector<std::string> kAllIds = {"A1",  "A2",  "A3",  "A4",  "A5a", "A5b", "A6", "A7a",
                                          "A7b", "A7c", "A7d", "A8a", "A8b", "A9",  "A10"};

PhiModel quartic() {
  return PhiModel::custom([](double x) { return x * x + std::pow(x, 4); },
                          [](double x) { return 2 * x + 4 * std::pow(x, 3); },
                          [](double x) { return 2 + 12 * x * x; }, "x^2+x^4");
}

}  // namespace

TEST(Audit, ReportsEveryCondition) {
  const AuditReport r = audit(PhiModel::power_law(2.0), kTwoPi);
  ASSERT_EQ(r.conditions.size(), kAllIds.size());
  for (std::size_t k = 0; k < kAllIds.size(); ++k) EXPECT_EQ(r.conditions[k].id, kAllIds[k]);
}

TEST(Audit, PowerLawInRangePassesCheckable) {
  for (auto [alpha, length] : {std::pair{2.0, kTwoPi}, {2.5, kTwoPi}, {2.9, kTwoPi}, {2.9, 1.0}}) {
    const AuditReport r = audit(PhiModel::power_law(alpha), length);
    EXPECT_TRUE(r.all_checkable_pass()) << alpha;
    EXPECT_TRUE(r.basic_assumptions_hold());
    for (const auto& c : r.conditions) {
      if (c.checkable) EXPECT_EQ(c.verdict, Verdict::Pass) << c.id;
    }
    EXPECT_FALSE(r.condition("A7d").checkable);
    EXPECT_EQ(r.condition("A7d").verdict, Verdict::Indeterminate);
  }
}

TEST(Audit, SubquadraticPowerLawFailsNonnegativeWeight) {
  const double alpha = 1.5;
  const AuditReport r = audit(PhiModel::power_law(alpha), 6.28);
  const auto& c = r.condition("A5b");
  EXPECT_EQ(c.verdict, Verdict::Fail);
  ASSERT_FALSE(c.witnesses.empty());
  for (const auto& w : c.witnesses) {
    ASSERT_EQ(w.at.front().first, "x");
    const double x = w.at.front().second;
    EXPECT_LT(w.value, 0.0);
    EXPECT_NEAR(w.value, (alpha - 2) / ((alpha - 1) * std::pow(x, alpha)), 1e-12 * std::abs(w.value));
  }
  EXPECT_FALSE(r.basic_assumptions_hold());
}

TEST(Audit, EveryFailCarriesWitness) {
  for (double alpha : {1.2, 1.5, 3.5}) {
    for (const auto& c : audit(PhiModel::power_law(alpha), 2.0).conditions) {
      if (c.verdict == Verdict::Fail) EXPECT_FALSE(c.witnesses.empty()) << alpha << " " << c.id;
    }
  }
}

TEST(Audit, PowerLawIndependentOfGrid) {
  AuditGrid coarse = AuditGrid::standard(kTwoPi);
  coarse.x.resize(10);
  for (double alpha : {1.5, 2.5}) {
    const AuditReport a = audit(PhiModel::power_law(alpha), kTwoPi);
    const AuditReport b = audit(PhiModel::power_law(alpha), kTwoPi, coarse);
    for (std::size_t k = 0; k < a.conditions.size(); ++k) EXPECT_EQ(a.conditions[k].verdict, b.conditions[k].verdict);
  }
}

TEST(Audit, InsufficientGrid) {
  AuditGrid g = AuditGrid::standard(1.0);
  g.x.resize(7);
  try {
    audit(quartic(), 1.0, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientGrid);
  }
}

TEST(Audit, NumericCustomPowerLawAgreesWithAnalytic) {
  // A custom kernel wrapping x^2.5 goes through the sampled checks.
  const PhiModel m = PhiModel::custom([](double x) { return std::pow(x, 2.5); },
                                      [](double x) { return 2.5 * std::pow(x, 1.5); },
                                      [](double x) { return 3.75 * std::pow(x, 0.5); }, "x^2.5");
  const AuditReport r = audit(m, kTwoPi);
  for (const char* id : {"A1", "A2", "A5a", "A5b", "A6", "A7a", "A7b", "A8a", "A8b"}) {
    EXPECT_EQ(r.condition(id).verdict, Verdict::Pass) << id;
  }
  EXPECT_NE(r.condition("A9").verdict, Verdict::Fail);
  EXPECT_NE(r.condition("A10").verdict, Verdict::Fail);
  EXPECT_EQ(r.condition("A3").verdict, Verdict::Indeterminate);
}

TEST(Audit, NumericDetectsSubquadratic) {
  const PhiModel m = PhiModel::custom([](double x) { return std::pow(x, 1.5); },
                                      [](double x) { return 1.5 * std::pow(x, 0.5); }, {}, "x^1.5");
  const AuditReport r = audit(m, kTwoPi);
  EXPECT_EQ(r.condition("A5b").verdict, Verdict::Fail);
  EXPECT_FALSE(r.condition("A5b").witnesses.empty());
  EXPECT_NE(r.condition("A6").verdict, Verdict::Pass);
}

TEST(Audit, QuarticKernelBasics) {
  const AuditReport r = audit(quartic(), 2.0);
  EXPECT_EQ(r.condition("A1").verdict, Verdict::Pass);
  EXPECT_EQ(r.condition("A2").verdict, Verdict::Pass);
  EXPECT_EQ(r.condition("A5a").verdict, Verdict::Pass);
  EXPECT_EQ(r.condition("A6").verdict, Verdict::Pass);
}

TEST(Audit, DecreasingKernelFailsMonotonicity) {
  const PhiModel m = PhiModel::custom([](double x) { return x * x * (2.0 + std::cos(5.0 * x)); });
  const AuditReport r = audit(m, 4.0);
  EXPECT_EQ(r.condition("A1").verdict, Verdict::Fail);
  EXPECT_FALSE(r.condition("A1").witnesses.empty());
}
