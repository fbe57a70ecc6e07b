#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "knotenergy/curves.hpp"
#include "knotenergy/error.hpp"
#include "knotenergy/variation.hpp"
#include "oracles.hpp"

using namespace knotenergy;

namespace {

ClosedCurve curve(const char* name, Index n) { return resample_arclength(builtin_curve(name, 4096), n); }

PhiModel quartic() {
  return PhiModel::custom([](double x) { return x * x + std::pow(x, 4); },
                          [](double x) { return 2 * x + 4 * std::pow(x, 3); },
                          [](double x) { return 2 + 12 * x * x; }, "x^2+x^4");
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST(Operators, BendingOperatorOnCurveIsTangentDifference) {
  const ClosedCurve c = curve("trefoil", 64);
  const PhiModel m = PhiModel::power_law(2.5);
  const PairFrame fr = pair_frame(c, 3, 20, m);
  const PairField f = curve_pair(c, 3, 20);
  const Vec expected = c.tangent(3) - c.tangent(20);
  EXPECT_LT((q_op(1, 1, fr, f) - expected).norm(), 1e-14);
  EXPECT_LT((q_op(1, 2, fr, f) - expected).norm(), 1e-14);
}

TEST(Operators, TwistingOperatorVanishesForChordAlignedTangent) {
  // On a straight stretch the tangent is parallel to the chord.
  NodeMatrix p(2, 400);
  for (Index k = 0; k < 400; ++k) {
    const double t = 2 * oracle::kPi * k / 400.0;
    p.col(k) << 3 * std::cos(t), std::sin(t) + 0.0 * t;
  }
  const ClosedCurve c = resample_arclength(p, 128);
  const PhiModel m = PhiModel::power_law(2.0);
  // Build a frame and force tau_1 parallel to u.
  PairFrame fr = pair_frame(c, 0, 40, m);
  PairField f = curve_pair(c, 0, 40);
  f.d1 = fr.u;
  fr.tau1 = fr.u;
  EXPECT_LT(q_op(2, 1, fr, f).norm(), 1e-14);
}

TEST(Operators, ConstantFieldGivesZero) {
  const ClosedCurve c = curve("ellipse", 64);
  const PhiModel m = PhiModel::power_law(2.0);
  NodeMatrix v(3, 64);
  v.colwise() = Eigen::Vector3d(1, -2, 0.5);
  const VariationField field = VariationField::on(c, v);
  const PairFrame fr = pair_frame(c, 5, 30, m);
  const PairField pf = field_pair(field, 5, 30);
  for (int j : {1, 2}) {
    for (int i : {1, 2}) EXPECT_LT(q_op(j, i, fr, pf).norm(), 1e-12);
  }
  EXPECT_LT(r1_op(fr, pf).norm(), 1e-12);
  EXPECT_LT(r2_op(pf).norm(), 1e-12);
}

TEST(Operators, FrameInvariants) {
  const ClosedCurve c = curve("trefoil", 128);
  const PhiModel m = PhiModel::power_law(2.5);
  for (Index i = 0; i < 128; i += 9) {
    for (Index k = 0; k < 128; k += 7) {
      if (i == k) continue;
      const PairFrame fr = pair_frame(c, i, k, m);
      EXPECT_NEAR(fr.u.norm(), 1.0, 1e-10);
      const double sign = fr.ds > 0 ? 1.0 : -1.0;
      EXPECT_LT((fr.r1_direction - sign * fr.u).norm(), 1e-14);
    }
  }
  EXPECT_THROW(pair_frame(c, 4, 4, m), Error);
}

TEST(Operators, ReconstructDensities) {
  std::mt19937_64 rng(3);
  for (const char* name : {"circle", "ellipse", "trefoil"}) {
    const ClosedCurve c = curve(name, 256);
    std::uniform_int_distribution<Index> pick(0, c.size() - 1);
    for (const PhiModel& m : {PhiModel::power_law(2.0), PhiModel::power_law(2.5), quartic()}) {
      for (int n = 0; n < 300; ++n) {
        const Index i = pick(rng), k = pick(rng);
        if (i == k) continue;
        const PairFrame fr = pair_frame(c, i, k, m);
        const PairField f = curve_pair(c, i, k);
        // Custom kernels reach the tail through the evaluator table.
        const double tol = m.alpha() ? 1e-12 : 1e-9;
        const double d1 = density_m1(c, i, k, m), d2 = density_m2(c, i, k, m);
        EXPECT_NEAR(m_via_operators(1, fr, f), d1, 1e-12 * std::max(1.0, d1));
        EXPECT_NEAR(m_via_operators(2, fr, f), d2, tol * std::max(1.0, std::abs(d2))) << m.name();
      }
    }
  }
}

TEST(Operators, IntegrandLinearInField) {
  const ClosedCurve c = curve("ellipse", 128);
  const PhiModel m = quartic();
  std::mt19937_64 rng(9);
  const VariationField phi = VariationField::on(c, oracle::smooth_field(3, 128, rng));
  const VariationField psi = VariationField::on(c, oracle::smooth_field(3, 128, rng));
  const VariationField mix = VariationField::on(c, 2.0 * phi.values() - 0.5 * psi.values());
  const PairFrame fr = pair_frame(c, 7, 50, m);
  const PairField f = curve_pair(c, 7, 50);
  for (int j : {1, 2}) {
    const double a = g_integrand(j, fr, f, field_pair(phi, 7, 50));
    const double b = g_integrand(j, fr, f, field_pair(psi, 7, 50));
    EXPECT_NEAR(g_integrand(j, fr, f, field_pair(mix, 7, 50)), 2.0 * a - 0.5 * b, 1e-12 * (std::abs(a) + std::abs(b)));
    const double h_ab = h_integrand(j, fr, f, field_pair(phi, 7, 50), field_pair(psi, 7, 50));
    const double h_ba = h_integrand(j, fr, f, field_pair(psi, 7, 50), field_pair(phi, 7, 50));
    EXPECT_NEAR(h_ab, h_ba, 1e-12 * std::abs(h_ab));
  }
}

class FirstVariation : public ::testing::TestWithParam<double> {};

TEST_P(FirstVariation, MatchesFiniteDifferences) {
  const double alpha = GetParam();
  const ClosedCurve c = curve("ellipse", 256);
  const PhiModel m = PhiModel::power_law(alpha);
  std::mt19937_64 rng(17);
  for (int n = 0; n < 3; ++n) {
    const NodeMatrix phi = oracle::smooth_field(3, 256, rng);
    const double analytic = first_variation(Part::Sum, c, VariationField::on(c, phi), m);
    const double fd = oracle::fd_first(c, phi, m, 1e-4 * c.diameter());
    EXPECT_LT(rel(analytic, fd), 1e-6) << analytic << " vs " << fd;
  }
}

INSTANTIATE_TEST_SUITE_P(Alphas, FirstVariation, ::testing::Values(2.0, 2.5, 2.9));

TEST(FirstVariationParts, EachPartMatchesItsEnergy) {
  const ClosedCurve c = curve("trefoil", 128);
  const PhiModel m = PhiModel::power_law(2.5);
  std::mt19937_64 rng(23);
  const NodeMatrix phi = oracle::smooth_field(3, 128, rng);
  const double step = 1e-4 * c.diameter();
  for (auto [part, target] : {std::pair{Part::M1, FdTarget::M1}, {Part::M2, FdTarget::M2}}) {
    const double analytic = first_variation(part, c, VariationField::on(c, phi), m);
    EXPECT_LT(rel(analytic, fd_first_variation(c, phi, m, target, step).value), 1e-6);
  }
}

TEST(FirstVariationParts, CustomKernel) {
  // Without the offset-one reweighting the discrete energy has no mesh-dependent weight.
  const PhiModel m = quartic();
  EnergyOptions skip;
  skip.scheme = QuadratureScheme::SkipDiagonal;
  const ClosedCurve c = curve("trefoil", 128).similarity(0.3, Eigen::Vector3d::Zero());
  std::mt19937_64 rng(29);
  const NodeMatrix phi = oracle::smooth_field(3, 128, rng);
  const double analytic = first_variation(Part::Sum, c, VariationField::on(c, phi), m, skip);
  const double fd = fd_first_variation(c, phi, m, FdTarget::Sum, 1e-4 * c.diameter(), skip).value;
  EXPECT_LT(rel(analytic, fd), 1e-8);
}

TEST(FirstVariationParts, CustomKernelZetaGapVanishesWithRefinement) {
  // The local exponent behind the offset-one weight is read at the mesh width, so it moves with L.
  const PhiModel m = quartic();
  double previous = 0.0;
  for (Index n : {128, 256, 512}) {
    const ClosedCurve c = curve("trefoil", n).similarity(0.3, Eigen::Vector3d::Zero());
    std::mt19937_64 rng(29);
    const NodeMatrix phi = oracle::smooth_field(3, n, rng);
    const double gap = rel(first_variation(Part::Sum, c, VariationField::on(c, phi), m),
                           oracle::fd_first(c, phi, m, 1e-4 * c.diameter()));
    if (previous > 0.0) EXPECT_LT(gap, previous / 8.0) << n;
    previous = gap;
  }
  EXPECT_LT(previous, 1e-6);
}

TEST(FirstVariationFd, LibraryOracleAgreesWithStandaloneOracle) {
  const ClosedCurve c = curve("ellipse", 128);
  const PhiModel m = PhiModel::power_law(2.5);
  std::mt19937_64 rng(31);
  const NodeMatrix phi = oracle::smooth_field(3, 128, rng);
  const double step = 1e-4 * c.diameter();
  const FdEstimate est = fd_first_variation(c, phi, m, FdTarget::Sum, step);
  EXPECT_LT(rel(est.value, oracle::fd_first(c, phi, m, step)), 1e-8);
  EXPECT_NEAR(est.order_estimate, 2.0, 0.1);
}

TEST(FirstVariationFd, StepTooLarge) {
  const ClosedCurve c = curve("circle", 64);
  NodeMatrix phi = NodeMatrix::Zero(3, 64);
  // A step of 0.5 carries node 10 almost onto node 11.
  phi.col(10) = 1.8 * (c.point(11) - c.point(10));
  try {
    fd_first_variation(c, phi, PhiModel::power_law(2.0), FdTarget::Sum, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepTooLarge);
  }
}

TEST(FirstVariationFd, TotalAndDecomposedDifferByLengthTerm) {
  // E_total - (E1 + E2) = C(L) up to discretization, with C(L) = 2^alpha / ((alpha - 1) L^(alpha - 2)).
  const double alpha = 2.5;
  const PhiModel m = PhiModel::power_law(alpha);
  double previous = 0.0;
  for (Index n : {256, 1024}) {
    const ClosedCurve c = curve("ellipse", n);
    std::mt19937_64 rng(37);
    const NodeMatrix phi = oracle::smooth_field(3, n, rng);
    const double step = 1e-4 * c.diameter();
    const double d_total = fd_first_variation(c, phi, m, FdTarget::Total, step).value;
    const double d_sum = fd_first_variation(c, phi, m, FdTarget::Sum, step).value;
    auto length = [&](double s) {
      return ClosedCurve::from_nodes(c.points() + s * phi, c.parameter_step()).total_length();
    };
    const double d_length = (length(step) - length(-step)) / (2 * step);
    const double d_constant =
        -(alpha - 2) * oracle::power_law_constant(alpha, c.total_length()) / c.total_length() * d_length;
    const double gap = std::abs(d_total - d_sum - d_constant) / std::abs(d_constant);
    if (previous > 0.0) EXPECT_LT(gap, previous / 10.0);
    previous = gap;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Invariance, TranslationAndRotation) {
  const ClosedCurve c = curve("trefoil", 128);
  for (const PhiModel& m : {PhiModel::power_law(2.0), PhiModel::power_law(2.5)}) {
    NodeMatrix constant(3, 128);
    constant.colwise() = Eigen::Vector3d(0.3, -1.0, 2.0);
    const double norm = constant.norm() / std::sqrt(128.0);
    EXPECT_LE(std::abs(first_variation(Part::Sum, c, VariationField::on(c, constant), m)), 1e-10 * norm);
    Eigen::Matrix3d a;
    a << 0, 1, -2,
        -1, 0, 0.5,
         2, -0.5, 0;
    const NodeMatrix rotation = a * c.points();
    const double rnorm = rotation.norm() / std::sqrt(128.0);
    EXPECT_LE(std::abs(first_variation(Part::Sum, c, VariationField::on(c, rotation), m)), 1e-10 * rnorm);
  }
}

TEST(Invariance, ScalingIdentity) {
  const ClosedCurve c = curve("ellipse", 256);
  for (double alpha : {2.0, 2.5, 2.9}) {
    const PhiModel m = PhiModel::power_law(alpha);
    const Energies e = energies(c, m);
    const double dv = first_variation(Part::Sum, c, VariationField::on(c, c.points()), m);
    EXPECT_NEAR(dv, (2 - alpha) * (e.m1 + e.m2), 1e-2 * std::abs(e.m1 + e.m2) * std::max(1e-12, 2 - alpha) + 1e-9);
  }
}

TEST(SecondVariation, MatchesMixedFiniteDifferencesAndIsSymmetric) {
  const ClosedCurve c = curve("ellipse", 128);
  std::mt19937_64 rng(41);
  for (const PhiModel& m : {PhiModel::power_law(2.0), PhiModel::power_law(2.5)}) {
    for (int n = 0; n < 2; ++n) {
      const NodeMatrix phi = oracle::smooth_field(3, 128, rng), psi = oracle::smooth_field(3, 128, rng);
      const VariationField vphi = VariationField::on(c, phi), vpsi = VariationField::on(c, psi);
      const double ab = second_variation(Part::Sum, c, vphi, vpsi, m);
      const double ba = second_variation(Part::Sum, c, vpsi, vphi, m);
      EXPECT_NEAR(ab, ba, 1e-10 * std::abs(ab));
      EXPECT_LT(rel(ab, oracle::fd_second(c, phi, psi, m, 1e-3 * c.diameter())), 1e-4);
    }
  }
}

TEST(SecondVariation, CustomKernelExercisesXiDerivativeTerms) {
  const ClosedCurve c = curve("trefoil", 128).similarity(0.3, Eigen::Vector3d::Zero());
  const PhiModel m = quartic();
  std::mt19937_64 rng(43);
  const NodeMatrix phi = oracle::smooth_field(3, 128, rng), psi = oracle::smooth_field(3, 128, rng);
  const double analytic = second_variation(Part::Sum, c, VariationField::on(c, phi), VariationField::on(c, psi), m);
  EXPECT_LT(rel(analytic, oracle::fd_second(c, phi, psi, m, 1e-3 * c.diameter())), 1e-4);
}

TEST(SecondVariation, NeedsSecondDerivative) {
  const ClosedCurve c = curve("circle", 64);
  const PhiModel m = PhiModel::custom([](double x) { return x * x; }, [](double x) { return 2 * x; });
  const VariationField f = VariationField::on(c, c.points());
  EXPECT_NO_THROW(first_variation(Part::Sum, c, f, m));
  try {
    second_variation(Part::Sum, c, f, f, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingDerivative);
  }
}

TEST(Gradient, RepresentsFirstVariation) {
  const ClosedCurve c = curve("trefoil", 128);
  std::mt19937_64 rng(47);
  for (const PhiModel& m : {PhiModel::power_law(2.5), quartic()}) {
    for (Part part : {Part::M1, Part::M2, Part::Sum}) {
      const NodeMatrix g = assemble_gradient(c, m, part);
      const NodeMatrix phi = oracle::smooth_field(3, 128, rng);
      const double pairing = (g.cwiseProduct(phi)).sum() * c.total_length() / 128.0;
      const double direct = first_variation(part, c, VariationField::on(c, phi), m);
      EXPECT_NEAR(pairing, direct, 1e-10 * std::abs(direct));
    }
  }
}

TEST(Gradient, TranslationComponentVanishes) {
  const ClosedCurve c = curve("trefoil", 128);
  const NodeMatrix g = assemble_gradient(c, PhiModel::power_law(2.5));
  EXPECT_LT(g.rowwise().sum().norm(), 1e-8);
}

TEST(Gradient, CircleIsCritical) {
  for (Index n : {64, 128, 256}) {
    const ClosedCurve c = curve("circle", n);
    const NodeMatrix g = assemble_gradient(c, PhiModel::power_law(2.0));
    EXPECT_LT(g.colwise().norm().maxCoeff(), 1e-2 / static_cast<double>(n));
  }
}

TEST(Gradient, ThreadCountDoesNotChangeResult) {
  const ClosedCurve c = curve("trefoil", 96);
  EnergyOptions one, three;
  one.threads = 1;
  three.threads = 3;
  const PhiModel m = PhiModel::power_law(2.5);
  EXPECT_EQ((assemble_gradient(c, m, Part::Sum, one) - assemble_gradient(c, m, Part::Sum, three)).cwiseAbs().maxCoeff(),
            0.0);
}
