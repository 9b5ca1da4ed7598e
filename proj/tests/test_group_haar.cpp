#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "repkit/builtins.hpp"
#include "repkit/error.hpp"
#include "repkit/group.hpp"
#include "repkit/haar.hpp"

using namespace repkit;

namespace {

constexpr double kPi = std::numbers::pi;

bool throws_kind(ErrorKind expected, const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == expected;
  }
  return false;
}

FiniteGroupTable table_from(const std::vector<std::vector<std::size_t>>& rows, std::vector<std::size_t> inverse) {
  FiniteGroupTable t;
  t.order = rows.size();
  for (const auto& r : rows) t.mult.insert(t.mult.end(), r.begin(), r.end());
  t.inverse = std::move(inverse);
  t.identity = 0;
  return t;
}

std::string invalid_group_message(const FiniteGroupTable& t) {
  try {
    GroupSpec::finite(t);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidGroup) return e.what();
    return "wrong kind";
  }
  return "accepted";
}

AxiomAuditReport standard_audit(const GroupSpec& g, std::size_t resolution) {
  return axiom_audit(haar_rule(g, resolution), standard_probes(g), standard_shifts(g));
}

}  // namespace

TEST(HaarRule, FiniteZ2IsUniform) {
  const auto rule = haar_rule(cyclic_group(2), 1);
  ASSERT_EQ(rule.size(), 2u);
  EXPECT_EQ(as_index(rule.nodes()[0]), 0u);
  EXPECT_EQ(as_index(rule.nodes()[1]), 1u);
  EXPECT_EQ(rule.weights()[0], 0.5);
  EXPECT_EQ(rule.weights()[1], 0.5);
}

TEST(HaarRule, CircleResolution4) {
  const auto rule = haar_rule(GroupSpec::circle(), 4);
  ASSERT_EQ(rule.size(), 4u);
  const double expected[] = {0.0, kPi / 2, kPi, 3 * kPi / 2};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(as_angle(rule.nodes()[k]), expected[k], 1e-15);
    EXPECT_EQ(rule.weights()[k], 0.25);
  }
}

TEST(HaarRule, Su2Resolution8Normalized) {
  const auto rule = haar_rule(GroupSpec::su2(), 8);
  EXPECT_NEAR(exact_sum(rule.weights()), 1.0, 1e-14);
  for (const auto& x : rule.nodes()) EXPECT_LE(su2_defect(as_su2(x)), 1e-12);
}

TEST(HaarRule, RejectsZeroResolution) {
  EXPECT_TRUE(throws_kind(ErrorKind::InvalidResolution, [] { haar_rule(GroupSpec::circle(), 0); }));
  EXPECT_TRUE(throws_kind(ErrorKind::InvalidResolution, [] { haar_rule(cyclic_group(3), 0); }));
}

// Property: every rule is normalized with positive weights.
TEST(HaarRule, WeightsPositiveAndSumToOne) {
  std::vector<GroupSpec> groups{cyclic_group(1), cyclic_group(2), cyclic_group(7), symmetric_group_3(),
                                GroupSpec::circle(), GroupSpec::su2()};
  for (const auto& g : groups)
    for (std::size_t res : {1u, 2u, 3u, 5u, 8u, 13u}) {
      const auto rule = haar_rule(g, res);
      EXPECT_NEAR(exact_sum(rule.weights()), 1.0, 1e-14) << g.name() << " " << res;
      for (double w : rule.weights()) EXPECT_GT(w, 0.0);
    }
}

TEST(Integrate, ScalarExamples) {
  for (const auto& g : {cyclic_group(3), GroupSpec::circle(), GroupSpec::su2()}) {
    const auto rule = haar_rule(g, 8);
    EXPECT_NEAR(std::abs(integrate_scalar(rule, [](const GroupElement&) { return Complex(1.0); }) - 1.0), 0.0, 1e-15);
  }
  const auto circle = haar_rule(GroupSpec::circle(), 3);
  EXPECT_LE(std::abs(integrate_scalar(circle, [](const GroupElement& x) { return std::polar(1.0, as_angle(x)); })), 1e-12);
  const auto z2 = haar_rule(cyclic_group(2), 1);
  EXPECT_EQ(integrate_scalar(z2, [](const GroupElement& x) { return Complex(as_index(x) == 0 ? 1.0 : -1.0); }), Complex(0.0));
}

TEST(Integrate, MatrixExamples) {
  const auto z3 = haar_rule(cyclic_group(3), 1);
  EXPECT_EQ(max_abs_diff(integrate_matrix(z3, [](const GroupElement&) { return ComplexMatrix::identity(2); }),
                         ComplexMatrix::identity(2)),
            0.0);
  const ComplexMatrix rho = integrate_matrix(z3, [](const GroupElement& x) {
    const double t = 2.0 * kPi * static_cast<double>(as_index(x)) / 3.0;
    return ComplexMatrix::diagonal({std::polar(1.0, t), std::polar(1.0, 2.0 * t)});
  });
  EXPECT_LE(rho.max_abs(), 1e-15);  // omega is rounded
  const ComplexMatrix c{{1.5, Complex(0.0, -2.0)}, {0.25, 7.0}};
  const auto su2 = haar_rule(GroupSpec::su2(), 4);
  EXPECT_LE(max_abs_diff(integrate_matrix(su2, [&](const GroupElement&) { return c; }), c), 1e-14);
}

TEST(Integrate, Errors) {
  const auto rule = haar_rule(GroupSpec::circle(), 8);
  EXPECT_TRUE(throws_kind(ErrorKind::EvaluationFailure, [&] {
    integrate_scalar(rule, [](const GroupElement& x) { return Complex(1.0 / as_angle(x)); });
  }));
  EXPECT_TRUE(throws_kind(ErrorKind::EvaluationFailure, [&] {
    integrate_matrix(rule, [](const GroupElement&) { return ComplexMatrix::diagonal({std::nan(""), 1.0}); });
  }));
  EXPECT_TRUE(throws_kind(ErrorKind::ShapeMismatch, [&] {
    integrate_matrix(rule, [](const GroupElement& x) { return ComplexMatrix(as_angle(x) == 0.0 ? 1 : 2, 1); });
  }));
}

TEST(Integrate, MatchesPlainSumWithinRoundoff) {
  const auto rule = haar_rule(GroupSpec::su2(), 6);
  auto f = [](const GroupElement& x) { return as_su2(x)(0, 0) * std::conj(as_su2(x)(1, 1)) + 0.3; };
  EXPECT_LE(std::abs(integrate_scalar(rule, f) - oracle::naive_integral(rule, f)), 1e-13);
}

// Circle rule of resolution N is exact on e^{ik theta}, 0 < |k| < N.
TEST(Integrate, CircleExactOnBandLimitedExponentials) {
  for (std::size_t n : {3u, 8u, 64u}) {
    const auto rule = haar_rule(GroupSpec::circle(), n);
    const int limit = static_cast<int>(n);
    for (int k = -limit + 1; k < limit; ++k) {
      const Complex v = integrate_scalar(rule, [k](const GroupElement& x) { return std::polar(1.0, k * as_angle(x)); });
      EXPECT_LE(std::abs(v - (k == 0 ? 1.0 : 0.0)), 1e-14) << "n=" << n << " k=" << k;
    }
  }
}

// Analytic Haar moments of U = [[a, -conj b], [b, conj a]]: E|a|^2 = 1/2,
// E|a|^4 = 1/3, E a = 0, E a^2 = 0.
TEST(Integrate, Su2MatchesAnalyticMoments) {
  const auto rule = haar_rule(GroupSpec::su2(), 16);
  auto a = [](const GroupElement& x) { return as_su2(x)(0, 0); };
  EXPECT_NEAR(integrate_scalar(rule, [&](const GroupElement& x) { return Complex(std::norm(a(x))); }).real(), 0.5, 1e-12);
  EXPECT_NEAR(integrate_scalar(rule, [&](const GroupElement& x) { return Complex(std::pow(std::norm(a(x)), 2)); }).real(),
              1.0 / 3.0, 1e-12);
  EXPECT_LE(std::abs(integrate_scalar(rule, a)), 1e-12);
  EXPECT_LE(std::abs(integrate_scalar(rule, [&](const GroupElement& x) { return a(x) * a(x); })), 1e-12);
}

TEST(AxiomAudit, FiniteGroupsExactlyZero) {
  for (const auto& g : {cyclic_group(2), cyclic_group(3), symmetric_group_3(), cyclic_group(12)}) {
    const auto r = standard_audit(g, 1);
    EXPECT_EQ(r.homogeneity, 0.0) << g.name();
    EXPECT_EQ(r.additivity, 0.0) << g.name();
    EXPECT_GT(r.positivity_margin, 0.0) << g.name();
    EXPECT_EQ(r.normalization, 0.0) << g.name();
    EXPECT_EQ(r.translation, 0.0) << g.name();
    EXPECT_EQ(r.inversion, 0.0) << g.name();
    EXPECT_EQ(r.shift_labels.size(), g.order());
  }
}

TEST(AxiomAudit, CircleResolution64) {
  const auto r = standard_audit(GroupSpec::circle(), 64);
  EXPECT_LE(r.homogeneity, 1e-12);
  EXPECT_LE(r.additivity, 1e-12);
  EXPECT_GT(r.positivity_margin, 0.0);
  EXPECT_LE(r.normalization, 1e-12);
  EXPECT_LE(r.translation, 1e-12);
  EXPECT_LE(r.inversion, 1e-12);
  EXPECT_EQ(r.probe_names.size(), 17u);
}

TEST(AxiomAudit, Su2Resolution12And16) {
  for (std::size_t res : {12u, 16u}) {
    const auto r = standard_audit(GroupSpec::su2(), res);
    EXPECT_LE(r.homogeneity, 1e-6);
    EXPECT_LE(r.additivity, 1e-6);
    EXPECT_GT(r.positivity_margin, 0.0);
    EXPECT_LE(r.normalization, 1e-14);
    EXPECT_LE(r.translation, 1e-6) << res;
    EXPECT_LE(r.inversion, 1e-6) << res;
  }
}

TEST(AxiomAudit, Su2TranslationResidualShrinksWithResolution) {
  double previous = standard_audit(GroupSpec::su2(), 2).translation;
  for (std::size_t res : {4u, 8u, 16u}) {
    const double current = standard_audit(GroupSpec::su2(), res).translation;
    EXPECT_LT(current, previous) << "resolution " << res;
    previous = current;
  }
}

TEST(AxiomAudit, RejectsEmptyInventoriesAndForeignShifts) {
  const auto rule = haar_rule(GroupSpec::circle(), 8);
  const auto probes = standard_probes(GroupSpec::circle());
  EXPECT_TRUE(throws_kind(ErrorKind::InvalidArgument, [&] { axiom_audit(rule, {}, {Angle{0.0}}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::InvalidArgument, [&] { axiom_audit(rule, probes, {}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::KindMismatch, [&] { axiom_audit(rule, probes, {std::size_t{1}}); }));
}

TEST(GroupOps, FiniteInverseAndIdentity) {
  const auto s3 = symmetric_group_3();
  for (std::size_t g = 0; g < 6; ++g) {
    EXPECT_EQ(as_index(multiply(s3, g, inverse(s3, g))), as_index(identity(s3)));
    EXPECT_EQ(as_index(multiply(s3, identity(s3), g)), g);
  }
  // transpositions do not commute
  EXPECT_NE(as_index(multiply(s3, std::size_t{1}, std::size_t{2})), as_index(multiply(s3, std::size_t{2}, std::size_t{1})));
}

TEST(GroupOps, CircleAddsAngles) {
  const auto c = GroupSpec::circle();
  EXPECT_NEAR(as_angle(multiply(c, Angle{3 * kPi / 2}, Angle{3 * kPi / 2})), kPi, 1e-15);
  EXPECT_NEAR(as_angle(inverse(c, Angle{kPi / 3})), 5 * kPi / 3, 1e-15);
}

TEST(GroupOps, Su2InverseIsAdjoint) {
  const auto g = GroupSpec::su2();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix u = random_su2(rng);
    EXPECT_LE(max_abs_diff(as_su2(inverse(g, u)), u.adjoint()), 0.0);
    EXPECT_LE(max_abs_diff(as_su2(multiply(g, u, inverse(g, u))), ComplexMatrix::identity(2)), 1e-10);
  }
}

TEST(GroupOps, Su2AxisAngleMatchesDirectFormula) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 3> n{gauss(rng), gauss(rng), gauss(rng)};
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    for (double& x : n) x /= len;
    const double t = 4.0 * kPi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    EXPECT_LE(max_abs_diff(su2_from_axis_angle(n, t), oracle::spin_half_rotation(n, t)), 1e-14);
    EXPECT_NEAR(su2_class_angle(su2_from_axis_angle(n, t)), t <= 2 * kPi ? t : 4 * kPi - t, 1e-7);
  }
}

TEST(GroupOps, LongSu2ProductChainStaysOnGroup) {
  const auto g = GroupSpec::su2();
  std::mt19937_64 rng(21);
  GroupElement acc = identity(g);
  for (int k = 0; k < 5000; ++k) acc = multiply(g, acc, random_su2(rng));
  EXPECT_LE(su2_defect(as_su2(acc)), 1e-12);
  EXPECT_TRUE(g.contains(acc));
}

TEST(GroupOps, KindMismatch) {
  EXPECT_TRUE(throws_kind(ErrorKind::KindMismatch, [] { multiply(GroupSpec::circle(), std::size_t{0}, Angle{1.0}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::KindMismatch, [] { inverse(cyclic_group(3), std::size_t{5}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::KindMismatch, [] { inverse(GroupSpec::su2(), Angle{0.0}); }));
  EXPECT_TRUE(throws_kind(ErrorKind::KindMismatch, [] { GroupSpec::circle().table(); }));
}

TEST(GroupOps, SamplingIsDeterministic) {
  const auto a = enumerate_or_sample(GroupSpec::su2(), 5, 42);
  const auto b = enumerate_or_sample(GroupSpec::su2(), 5, 42);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(max_abs_diff(as_su2(a[k]), as_su2(b[k])), 0.0);
  EXPECT_EQ(enumerate_or_sample(symmetric_group_3(), 0).size(), 6u);
  EXPECT_EQ(enumerate_or_sample(symmetric_group_3(), 3).size(), 3u);
}

TEST(GroupSpec, RejectsBrokenTables) {
  EXPECT_NE(invalid_group_message(table_from({{0, 1}, {1, 1}}, {0, 1})).find("Latin square"), std::string::npos);
  EXPECT_NE(invalid_group_message(table_from({{1, 0}, {0, 1}}, {0, 1})).find("identity"), std::string::npos);
  EXPECT_NE(invalid_group_message(table_from({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, {0, 1, 2})).find("inverse"),
            std::string::npos);
  // a Latin square loop of order 5 with every element self-inverse; no group of order 5 has that
  const auto loop = table_from({{0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}},
                               {0, 1, 2, 3, 4});
  EXPECT_NE(invalid_group_message(loop).find("associativity"), std::string::npos);
  EXPECT_NE(invalid_group_message(FiniteGroupTable{}).find("at least one element"), std::string::npos);
}

TEST(GroupSpec, BuiltinsValidate) {
  EXPECT_EQ(symmetric_group_3().order(), 6u);
  EXPECT_EQ(cyclic_group(12).order(), 12u);
  EXPECT_TRUE(same_group(builtin_group("s3"), symmetric_group_3()));
  EXPECT_FALSE(same_group(cyclic_group(6), symmetric_group_3()));
}
