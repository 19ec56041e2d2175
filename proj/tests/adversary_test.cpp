#include <gtest/gtest.h>

#include "elicit/adversary.hpp"
#include "elicit/learner.hpp"
#include "elicit/robust.hpp"
#include "support/support.hpp"

using namespace elicit;

namespace {

Vector<Rational> vec(std::initializer_list<Rational> v) {
  Vector<Rational> out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const auto& x : v) out(i++) = x;
  return out;
}

// Smallest order at which the two gap vectors answer some reduced query
// differently, by brute-force enumeration.
int minimal_distinguishing_order(const Vector<Rational>& g1, const Vector<Rational>& g2, int limit) {
  for (int k = 1; k <= limit; ++k) {
    for (const auto& c : support::brute_reduced_queries(static_cast<int>(g1.size()), k)) {
      if (support::dot_sign(c, g1) != support::dot_sign(c, g2)) return k;
      std::vector<int> neg = c;
      for (int& x : neg) x = -x;
      if (support::dot_sign(neg, g1) != support::dot_sign(neg, g2)) return k;
    }
  }
  return -1;
}

}  // namespace

TEST(Theorem2Instance, OrderTwoConstants) {
  const auto p = theorem2_instance(2);
  EXPECT_EQ(p.u1.weights()(0), Rational(6, 13));
  EXPECT_EQ(p.u1.weights()(1), Rational(7, 13));
  EXPECT_EQ(1 - p.u1.gaps()(1), Rational(1, 14));
  EXPECT_EQ(1 - p.u2.gaps()(1), Rational(2, 7));
  EXPECT_EQ(p.analytic_risk(0, 0), Rational(1, 26));
  EXPECT_EQ(p.analytic_risk(1, 1), Rational(1, 13));
  EXPECT_EQ(excess_risk(p.u1, p.cls[0], p.cls), Rational(1, 26));
  EXPECT_EQ(excess_risk(p.u2, p.cls[1], p.cls), Rational(1, 13));
  EXPECT_EQ(excess_risk(p.u1, p.cls[1], p.cls), Rational(0));
  EXPECT_EQ(excess_risk(p.u2, p.cls[0], p.cls), Rational(0));
}

TEST(Theorem2Instance, OrderFourRisks) {
  const auto p = theorem2_instance(4);
  EXPECT_EQ(p.analytic_risk(0, 0), Rational(1, 50));
  EXPECT_EQ(p.analytic_risk(1, 1), Rational(1, 25));
  EXPECT_GE(std::min(p.analytic_risk(0, 0), p.analytic_risk(1, 1)), Rational(2, 25) / 4);
  EXPECT_THROW(theorem2_instance(1), std::invalid_argument);
}

TEST(Theorem2Instance, GapRatioWithinIndistinguishableWindow) {
  for (int k = 2; k <= 64; ++k) {
    const auto p = theorem2_instance(k);
    for (const auto* inst : {&p.u1, &p.u2}) {
      const Rational r = inst->gaps()(1) / inst->gaps()(0);
      EXPECT_GE(r, 1 - Rational(1, k));
      EXPECT_LE(r, 1);
    }
  }
}

TEST(Indistinguishable, LowerBoundPairAtOrderK) {
  for (const int k : {2, 4, 8, 16}) {
    const auto p = theorem2_instance(k);
    EXPECT_TRUE(indistinguishable(p.u1, p.u2, k).indistinguishable) << k;
  }
}

TEST(Indistinguishable, LowerBoundPairSeparatesAtHigherOrder) {
  for (const int k : {2, 3, 4, 6}) {
    const auto p = theorem2_instance(k);
    // The gap vectors (1, 1 - gamma_j) are separated by c = (a, -b) iff
    // b/a lies between the two ratios, the lower end included by the >= rule;
    // the smallest a + b is 3k + 1 for even k and 3k for odd k, where the lower
    // ratio (3k - 1)/(3k + 1) reduces to halves summing to 3k.
    const int order = minimal_distinguishing_order(p.u1.gaps(), p.u2.gaps(), 6 * k + 1);
    EXPECT_EQ(order, k % 2 == 0 ? 3 * k + 1 : 3 * k) << k;
    EXPECT_TRUE(indistinguishable(p.u1, p.u2, order - 1).indistinguishable);
    const auto d = indistinguishable(p.u1, p.u2, order);
    ASSERT_FALSE(d.indistinguishable);
    ASSERT_TRUE(d.witness.has_value());
    const std::vector<int> c(d.witness->data(), d.witness->data() + 2);
    EXPECT_NE(support::dot_sign(c, p.u1.gaps()), support::dot_sign(c, p.u2.gaps()));
    // The construction-level witness: 3k+1 copies of x- against 3k of x+.
    const std::vector<int> wide{-3 * k, 3 * k + 1};
    EXPECT_NE(support::dot_sign(wide, p.u1.gaps()), support::dot_sign(wide, p.u2.gaps()));
    EXPECT_FALSE(indistinguishable(p.u1, p.u2, 6 * k + 1).indistinguishable);
  }
  const auto d = indistinguishable(theorem2_instance(2).u1, theorem2_instance(2).u2, 7);
  EXPECT_EQ(*d.witness, labeling({3, -4}));
}

TEST(Indistinguishable, IdenticalUtilities) {
  support::Gen gen(51);
  const auto inst = support::rational_instance(gen, 3);
  for (int k = 1; k <= 8; ++k) EXPECT_TRUE(indistinguishable(inst, inst, k).indistinguishable);
}

TEST(Indistinguishable, HalfVersusSixTenths) {
  const auto a = vec({1, Rational(1, 2)});
  const auto b = vec({1, Rational(3, 5)});
  // (1, -2) has L1 norm 3, so order 2 cannot separate the pair.
  EXPECT_TRUE(indistinguishable(a, b, 2).indistinguishable);
  const auto d = indistinguishable(a, b, 3);
  ASSERT_FALSE(d.indistinguishable);
  EXPECT_EQ(*d.witness, labeling({1, -2}));
  EXPECT_EQ(reduced_truth(*d.witness, a), 1);
  EXPECT_EQ(reduced_truth(*d.witness, b), 0);
  EXPECT_EQ(minimal_distinguishing_order(a, b, 6), 3);
}

TEST(Indistinguishable, LabelMismatchAndCapacity) {
  const auto p = theorem2_instance(2);
  UtilityTable<Rational> u(2, 2);
  u << 1, 0, 0, 1;
  const auto flipped = build_instance<Rational>(support::points(2), p.u1.weights(), u);
  EXPECT_THROW(indistinguishable(p.u1, flipped, 2), std::invalid_argument);
  EXPECT_THROW(indistinguishable(p.u1, p.u2, 2000, 1000), CapacityError);
}

TEST(Prop2Instance, Constants) {
  const auto b = prop2_instance(16);
  EXPECT_EQ(b.p, Rational(1, 24));
  const Rational k(16);
  const Rational lo = Rational(2) / ((k + 2) * (k + 2));
  const Rational mid = Rational(8) / ((k + 2) * (k + 2) + 12);
  const Rational hi = Rational(2) / (k + 8);
  EXPECT_LT(lo, mid);
  EXPECT_LT(mid, b.p);
  EXPECT_LT(b.p, hi);
  EXPECT_NEAR(to_double(lo), 0.00617, 1e-5);
  EXPECT_NEAR(to_double(mid), 0.02381, 1e-5);
  EXPECT_NEAR(to_double(hi), 0.08333, 1e-5);
  EXPECT_EQ(b.cls[b.f_plus], labeling({1, 1, 0}));
  EXPECT_EQ(b.cls[b.f_minus], labeling({0, 0, 1}));
  EXPECT_THROW(prop2_instance(8), std::invalid_argument);
}

TEST(Prop2Instance, ChoicesAtSixteen) {
  const auto b = prop2_instance(16);
  EXPECT_EQ(evaluate(b.instance, b.cls).maximizer, b.f_plus);
  ComparisonOracle<Rational> o1(b.instance, OracleConfig{16, Noiseless{}, 0});
  const auto est = comptron(o1);
  EXPECT_EQ(plugin<Rational>(b.instance.weights(), est, b.cls).chosen, b.f_minus);
  ComparisonOracle<Rational> o2(b.instance, OracleConfig{16, Noiseless{}, 0});
  const auto alt = comptron(o2, b.alternate_options());
  EXPECT_EQ(plugin<Rational>(b.instance.weights(), alt, b.cls).chosen, b.f_plus);
  // x_3 measured against x_2 lands on 12/k^2 against the exact 2/k^2; still
  // an overestimate.
  EXPECT_EQ(alt.coefficient<Rational>(2), Rational(12, 256));
  EXPECT_GE(alt.coefficient<Rational>(2), b.instance.gaps()(2));
}

TEST(Prop2Instance, AlternateChoiceSafeOverConsistentInterval) {
  const int k = 16;
  const auto b = prop2_instance(k);
  // f_plus stays optimal for every value of the third gap in [0, 8/k^2].
  for (int j = 0; j <= 64; ++j) {
    const Rational g3 = Rational(8, k * k) * Rational(j, 64);
    Vector<Rational> g = b.instance.gaps();
    g(2) = g3;
    EXPECT_EQ(payoff(b.cls[b.f_plus], g, b.instance.weights(), b.instance.labels(), b.cls), Rational(0)) << j;
  }
}

TEST(Properties, PluginRiskFormula) {
  for (const int k : {16, 32, 64, 128, 256}) {
    const auto b = prop2_instance(k);
    ComparisonOracle<Rational> oracle(b.instance, OracleConfig{k, Noiseless{}, 0});
    const auto est = comptron(oracle);
    const auto chosen = plugin<Rational>(b.instance.weights(), est, b.cls).chosen;
    ASSERT_EQ(chosen, b.f_minus) << k;
    const Rational kk(k);
    EXPECT_EQ(excess_risk(b.instance, b.cls[chosen], b.cls), (kk * kk + 2 * kk - 12) / (kk * kk * (kk + 8)));
    EXPECT_EQ(prop2_plugin_risk(k), (kk * kk + 2 * kk - 12) / (kk * kk * (kk + 8)));
  }
}

TEST(Properties, RatioWindowImpliesIndistinguishable) {
  // Pairs (a, b1) and (a, b2) with b_j / a in [1 - 1/k, 1) give identical
  // answers at order k.
  support::Gen gen(52);
  for (int t = 0; t < 1000; ++t) {
    const int k = gen.integer(1, 10);
    const Rational a(gen.integer(1, 100), 100);
    auto ratio = [&] {
      const Rational lo = 1 - Rational(1, k);
      return lo + (Rational(1, k)) * Rational(gen.integer(0, 999), 1000);
    };
    const auto g1 = vec({a, a * ratio()});
    const auto g2 = vec({a, a * ratio()});
    ASSERT_TRUE(indistinguishable(g1, g2, k).indistinguishable) << t;
  }
}
