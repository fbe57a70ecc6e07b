#include <cmath>

#include <gtest/gtest.h>

#include "knotenergy/curves.hpp"
#include "knotenergy/energy.hpp"
#include "knotenergy/error.hpp"
#include "oracles.hpp"

using namespace knotenergy;
using oracle::kPi;

namespace {

ClosedCurve curve(const char* name, Index n) { return resample_arclength(builtin_curve(name, std::max<Index>(2048, 2 * n)), n); }

// A curve with two straight stretches: a stadium of two half-circles joined by segments.
NodeMatrix stadium(Index per_side) {
  NodeMatrix p(2, 4 * per_side);
  Index k = 0;
  for (Index i = 0; i < per_side; ++i) p.col(k++) << -1.0 + 2.0 * i / per_side, -1.0;
  for (Index i = 0; i < per_side; ++i) {
    const double t = -kPi / 2 + kPi * i / per_side;
    p.col(k++) << 1.0 + std::cos(t), std::sin(t);
  }
  for (Index i = 0; i < per_side; ++i) p.col(k++) << 1.0 - 2.0 * i / per_side, 1.0;
  for (Index i = 0; i < per_side; ++i) {
    const double t = kPi / 2 + kPi * i / per_side;
    p.col(k++) << -1.0 + std::cos(t), std::sin(t);
  }
  return p;
}

}  // namespace

TEST(Densities, AntipodalCircleValues) {
  const ClosedCurve c = curve("circle", 512);
  const PhiModel m = PhiModel::power_law(2.0);
  const Index i = 10, j = 266;
  EXPECT_NEAR(density_total(c, i, j, m), 0.25 - 1.0 / (kPi * kPi), 1e-6);
  EXPECT_NEAR(density_m1(c, i, j, m), 0.5, 1e-6);
  EXPECT_NEAR(density_m2(c, i, j, m), -0.5, 1e-6);
}

TEST(Densities, DiagonalRejected) {
  const ClosedCurve c = curve("circle", 64);
  const PhiModel m = PhiModel::power_law(2.0);
  for (auto fn : {density_total, density_m1, density_m2}) {
    try {
      fn(c, 3, 3, m);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DiagonalSingularity);
    }
  }
}

TEST(Densities, VanishOnStraightPieces) {
  const ClosedCurve c = resample_arclength(stadium(400), 256);
  const PhiModel m = PhiModel::power_law(2.5);
  // Nodes 10 and 40 both lie on the bottom segment, away from the bends.
  const Index i = 10, j = 40;
  ASSERT_NEAR(c.point(i)[1], -1.0, 1e-9);
  ASSERT_NEAR(c.point(j)[1], -1.0, 1e-9);
  EXPECT_NEAR(density_total(c, i, j, m), 0.0, 1e-6 * std::pow(chord(c, i, j), -2.5));
  EXPECT_NEAR(density_m1(c, i, j, m), 0.0, 1e-12);
  EXPECT_NEAR(density_m2(c, i, j, m), 0.0, 1e-12);
}

TEST(Densities, SignsAndSymmetry) {
  const ClosedCurve c = curve("trefoil", 128);
  const PhiModel m = PhiModel::power_law(2.5);
  for (Index i = 0; i < c.size(); i += 7) {
    for (Index j = 0; j < c.size(); j += 5) {
      if (i == j) continue;
      EXPECT_GE(density_m1(c, i, j, m), 0.0);
      EXPECT_NEAR(density_m1(c, i, j, m), density_m1(c, j, i, m), 1e-12 * density_m1(c, i, j, m) + 1e-15);
      EXPECT_NEAR(density_m2(c, i, j, m), density_m2(c, j, i, m), 1e-12 * std::abs(density_m2(c, i, j, m)) + 1e-15);
      if (chord(c, i, j) < intrinsic_distance(c.total_length(), c.node(i), c.node(j))) {
        EXPECT_GT(density_total(c, i, j, m), 0.0);
      }
    }
  }
}

TEST(DecompositionConstant, Examples) {
  for (double L : {1.0, 2 * kPi, 17.0}) EXPECT_NEAR(decomposition_constant(PhiModel::power_law(2.0), L), 4.0, 1e-14);
  EXPECT_NEAR(decomposition_constant(PhiModel::power_law(3.0), 2.0), 2.0, 1e-14);
  for (double alpha : {1.5, 2.5, 2.9}) {
    EXPECT_NEAR(decomposition_constant(PhiModel::power_law(alpha), 2 * kPi),
                oracle::power_law_constant(alpha, 2 * kPi), 1e-14);
  }
}

TEST(CircleClosedForm, Examples) {
  const CircleEnergies a = circle_closed_form(2.0, 2 * kPi);
  EXPECT_NEAR(a.e_total, 4.0, 1e-12);
  EXPECT_NEAR(a.e1, 2 * kPi * kPi, 1e-11);
  EXPECT_NEAR(a.e2, -2 * kPi * kPi, 1e-11);
  EXPECT_NEAR(circle_closed_form(2.0, 4 * kPi).e_total, 4.0, 1e-12);
}

TEST(CircleClosedForm, MatchesOneDimensionalQuadrature) {
  for (double alpha : {1.3, 1.5, 2.0, 2.5, 2.9}) {
    for (double L : {1.0, 2 * kPi}) {
      const CircleEnergies c = circle_closed_form(alpha, L);
      EXPECT_NEAR(c.e_total / oracle::circle_total(alpha, L), 1.0, 1e-10) << alpha;
      EXPECT_NEAR(c.e1 / oracle::circle_e1(alpha, L), 1.0, 1e-10) << alpha;
      EXPECT_NEAR(c.e2, c.e_total - c.e1 - oracle::power_law_constant(alpha, L), 1e-10 * std::abs(c.e1));
    }
  }
}

TEST(CircleClosedForm, Errors) {
  for (double alpha : {3.0, 3.5}) {
    try {
      circle_closed_form(alpha, 1.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Pole);
    }
  }
  EXPECT_THROW(circle_closed_form(1.0, 1.0), Error);
}

TEST(Energy, UnitCircleMobiusValue) {
  const ClosedCurve c = curve("circle", 512);
  const PhiModel m = PhiModel::power_law(2.0);
  EXPECT_NEAR(energy(c, m, Which::Total), 4.0, 0.02 * 4.0);
  EXPECT_NEAR(energy(c, m, Which::M1), 2 * kPi * kPi, 0.02 * 2 * kPi * kPi);
  EXPECT_GE(energy(c, m, Which::M1), 0.0);
}

TEST(Energy, CircleConvergesToClosedForm) {
  for (double alpha : {2.0, 2.5, 2.9}) {
    const double exact = circle_closed_form(alpha, 2 * kPi).e_total;
    double prev = INFINITY;
    for (Index n : {128, 256, 512}) {
      const double err = std::abs(energy(curve("circle", n), PhiModel::power_law(alpha), Which::Total) - exact);
      EXPECT_LT(err, prev) << alpha << " " << n;
      prev = err;
    }
    EXPECT_LT(prev / exact, 1e-3) << alpha;
  }
}

TEST(Energy, SkipDiagonalSchemeHasLargerError) {
  const ClosedCurve c = curve("circle", 256);
  const PhiModel m = PhiModel::power_law(2.5);
  const double exact = circle_closed_form(2.5, 2 * kPi).e_total;
  EnergyOptions skip;
  skip.scheme = QuadratureScheme::SkipDiagonal;
  const double e_skip = std::abs(energy(c, m, Which::Total, skip) - exact);
  const double e_zeta = std::abs(energy(c, m, Which::Total) - exact);
  EXPECT_GT(e_skip, 10 * e_zeta);
}

TEST(Energy, OffsetWeights) {
  const PhiModel m = PhiModel::power_law(2.5);
  const auto skip = offset_weights(16, m, 1.0, QuadratureScheme::SkipDiagonal);
  const auto zeta = offset_weights(16, m, 1.0, QuadratureScheme::ZetaCorrected);
  ASSERT_EQ(zeta.size(), 16u);
  EXPECT_EQ(skip[0], 0.0);
  EXPECT_EQ(zeta[0], 0.0);
  for (int k = 2; k < 15; ++k) EXPECT_EQ(zeta[k], 1.0);
  // 1 - zeta(1/2).
  EXPECT_NEAR(zeta[1], 1.0 + 1.4603545088095868, 1e-12);
  EXPECT_EQ(zeta[1], zeta[15]);
}

TEST(Energy, DecompositionResidualShrinks) {
  for (const char* name : {"circle", "ellipse", "trefoil"}) {
    for (double alpha : {2.0, 2.5, 2.9}) {
      const PhiModel m = PhiModel::power_law(alpha);
      double prev = INFINITY;
      for (Index n : {128, 256, 512, 1024}) {
        const EnergyReport r = check_decomposition(curve(name, n), m);
        EXPECT_LT(std::abs(r.residual) / std::max(1.0, r.e_total), 1e-2);
        EXPECT_LT(std::abs(r.residual), 2.0 * prev) << name << " " << alpha << " " << n;
        prev = std::abs(r.residual);
        EXPECT_NEAR(r.residual, r.e_total - r.e1 - r.e2 - r.constant_term, 1e-12 * r.e1);
      }
    }
  }
}

TEST(Energy, ReportFields) {
  const EnergyReport r = check_decomposition(curve("ellipse", 128), PhiModel::power_law(2.5));
  EXPECT_EQ(r.n, 128);
  ASSERT_TRUE(r.alpha.has_value());
  EXPECT_EQ(*r.alpha, 2.5);
  EXPECT_TRUE(r.assumptions_verified);
  EXPECT_GE(r.runtime_ms, 0.0);
  const EnergyReport sub = check_decomposition(curve("ellipse", 128), PhiModel::power_law(1.5));
  EXPECT_FALSE(sub.assumptions_verified);
}

TEST(Energy, ScaleCovariance) {
  const ClosedCurve c = curve("trefoil", 128);
  for (double alpha : {2.0, 2.5}) {
    const PhiModel m = PhiModel::power_law(alpha);
    const Energies e = energies(c, m);
    const double lambda = 1.7;
    const Energies s = energies(c.similarity(lambda, Eigen::Vector3d(0.3, 0, 1)), m);
    const double f = std::pow(lambda, 2.0 - alpha);
    EXPECT_NEAR(s.total, f * e.total, 1e-8 * std::abs(f * e.total));
    EXPECT_NEAR(s.m1, f * e.m1, 1e-8 * std::abs(f * e.m1));
    EXPECT_NEAR(s.m2, f * e.m2, 1e-8 * std::abs(f * e.m2));
  }
}

TEST(Energy, NonnegativeBendingPlusTwisting) {
  for (const char* name : {"circle", "ellipse", "trefoil"}) {
    const ClosedCurve c = curve(name, 128);
    for (double alpha : {2.0, 2.5, 2.9}) {
      const PhiModel m = PhiModel::power_law(alpha);
      double worst = INFINITY;
      for (Index i = 0; i < c.size(); ++i) {
        for (Index j = 0; j < c.size(); ++j) {
          if (i != j) worst = std::min(worst, density_m1(c, i, j, m) + density_m2(c, i, j, m));
        }
      }
      EXPECT_GE(worst, -1e-12) << name << " " << alpha;
    }
  }
}

TEST(Energy, MobiusInvariance) {
  const PhiModel m = PhiModel::power_law(2.0);
  const NodeMatrix base = builtin_curve("circle", 4096);
  const Energies a = energies(resample_arclength(base, 512), m);
  const Energies b = energies(resample_arclength(sphere_inversion(base, Eigen::Vector3d(3, 0, 0)), 512), m);
  EXPECT_NEAR(b.m1 / a.m1, 1.0, 0.02);
  EXPECT_NEAR(b.m2 / a.m2, 1.0, 0.02);
  // Inverting the trefoil about an outside point changes its shape but not E at alpha = 2.
  const NodeMatrix t = builtin_curve("trefoil", 4096);
  const double e0 = energy(resample_arclength(t, 512), m, Which::Total);
  const double e1 = energy(resample_arclength(sphere_inversion(t, Eigen::Vector3d(6, 1, 0)), 512), m, Which::Total);
  EXPECT_NEAR(e1 / e0, 1.0, 0.02);
}

TEST(Energy, ParametrizationInvariance) {
  std::vector<double> uniform, warped;
  for (int k = 0; k < 3000; ++k) {
    const double t = 2 * kPi * k / 3000.0;
    uniform.push_back(t);
    warped.push_back(t + 0.4 * std::sin(t));
  }
  const PhiModel m = PhiModel::power_law(2.5);
  const Energies a = energies(resample_arclength(oracle::ellipse_at(uniform, 2, 1), 256), m);
  const Energies b = energies(resample_arclength(oracle::ellipse_at(warped, 2, 1), 256), m);
  EXPECT_NEAR(b.total / a.total, 1.0, 1e-3);
  EXPECT_NEAR(b.m1 / a.m1, 1.0, 1e-3);
  EXPECT_NEAR(b.m2 / a.m2, 1.0, 1e-3);
}

TEST(Energy, ThreadCountDoesNotChangeResult) {
  const ClosedCurve c = curve("trefoil", 200);
  const PhiModel m = PhiModel::power_law(2.5);
  EnergyOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const Energies a = energies(c, m, one), b = energies(c, m, four);
  EXPECT_EQ(a.total, b.total);
  EXPECT_EQ(a.m1, b.m1);
  EXPECT_EQ(a.m2, b.m2);
}

TEST(Energy, DivergenceFlag) {
  const PhiModel m = PhiModel::power_law(2.0);
  const ClosedCurve smooth = curve("circle", 128);
  EXPECT_FALSE(divergence_suspected(smooth, m, Which::Total, energy(smooth, m, Which::Total)));
  // Figure eight: the polygon crosses itself, so refining the grid finds ever closer pairs.
  NodeMatrix p(2, 2000);
  for (Index k = 0; k < 2000; ++k) {
    const double t = 2 * kPi * k / 2000.0;
    p.col(k) << std::sin(t), std::sin(t) * std::cos(t);
  }
  const ClosedCurve eight = resample_arclength(p, 128);
  EXPECT_TRUE(divergence_suspected(eight, m, Which::Total, energy(eight, m, Which::Total)));
}

TEST(Energy, CustomKernelMatchesPowerLaw) {
  const ClosedCurve c = curve("ellipse", 128);
  const PhiModel ref = PhiModel::power_law(2.5);
  const PhiModel custom = PhiModel::custom([](double x) { return std::pow(x, 2.5); },
                                           [](double x) { return 2.5 * std::pow(x, 1.5); }, {}, "x^2.5");
  const Energies a = energies(c, ref), b = energies(c, custom);
  EXPECT_NEAR(b.total / a.total, 1.0, 1e-7);
  EXPECT_NEAR(b.m1 / a.m1, 1.0, 1e-7);
  EXPECT_NEAR(b.m2 / a.m2, 1.0, 1e-7);
}

TEST(Energy, QuarticKernelDecomposes) {
  const PhiModel m = PhiModel::custom([](double x) { return x * x + std::pow(x, 4); },
                                      [](double x) { return 2 * x + 4 * std::pow(x, 3); },
                                      [](double x) { return 2 + 12 * x * x; }, "x^2+x^4");
  const EnergyReport r = check_decomposition(curve("trefoil", 512), m);
  EXPECT_LT(std::abs(r.residual) / std::max(1.0, r.e_total), 1e-3);
}
