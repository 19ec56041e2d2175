#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "elicit/adversary.hpp"
#include "elicit/robust.hpp"
#include "support/support.hpp"

using namespace elicit;

namespace {

// max c.x over {A x <= b, x >= 0} in two variables by enumerating every
// intersection of two active constraints.
std::optional<Rational> brute_lp_2d(const Matrix<Rational>& A, const Vector<Rational>& b, const Vector<Rational>& c) {
  std::vector<std::array<Rational, 3>> rows;
  for (Index i = 0; i < A.rows(); ++i) rows.push_back({A(i, 0), A(i, 1), b(i)});
  rows.push_back({Rational(-1), Rational(0), Rational(0)});
  rows.push_back({Rational(0), Rational(-1), Rational(0)});
  std::optional<Rational> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const Rational det = rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0];
      if (det == 0) continue;
      const Rational x = (rows[i][2] * rows[j][1] - rows[i][1] * rows[j][2]) / det;
      const Rational y = (rows[i][0] * rows[j][2] - rows[i][2] * rows[j][0]) / det;
      bool ok = true;
      for (const auto& r : rows) ok = ok && r[0] * x + r[1] * y <= r[2];
      if (!ok) continue;
      const Rational v = c(0) * x + c(1) * y;
      if (!best || v > *best) best = v;
    }
  }
  return best;
}

std::set<std::pair<std::vector<int>, int>> constraint_set(const ConsistentPolytope<Rational>& poly) {
  std::set<std::pair<std::vector<int>, int>> out;
  for (std::size_t j = 0; j < poly.size(); ++j) {
    const auto& c = poly.coefficients()[j];
    out.insert({std::vector<int>(c.data(), c.data() + c.size()), poly.responses()[j]});
  }
  return out;
}

TabularInstance<double> small_instance(support::Gen& gen, Index n) {
  // Gaps bounded away from zero so the polytope is built.
  UtilityTable<double> u(n, 2);
  const auto raw = gen.raw_weights(n);
  Vector<double> w(n);
  for (Index i = 0; i < n; ++i) w(i) = raw[static_cast<std::size_t>(i)];
  w /= w.sum();
  for (Index i = 0; i < n; ++i) {
    const double g = 0.05 + 0.95 * gen.unit();
    if (gen.coin()) {
      u(i, 0) = 0.0;
      u(i, 1) = g;
    } else {
      u(i, 0) = g;
      u(i, 1) = 0.0;
    }
  }
  return build_instance<double>(support::points(n), w, u);
}

}  // namespace

TEST(Simplex, MatchesVertexEnumeration) {
  support::Gen gen(61);
  for (int t = 0; t < 300; ++t) {
    const Index m = gen.integer(1, 4);
    Matrix<Rational> A(m, 2);
    Vector<Rational> b(m);
    for (Index i = 0; i < m; ++i) {
      A(i, 0) = gen.integer(-3, 5);
      A(i, 1) = gen.integer(-3, 5);
      b(i) = gen.integer(-2, 8);
    }
    // A bounding row keeps the brute force finite.
    Matrix<Rational> Ab(m + 1, 2);
    Vector<Rational> bb(m + 1);
    Ab.topRows(m) = A;
    bb.head(m) = b;
    Ab(m, 0) = 1;
    Ab(m, 1) = 1;
    bb(m) = 10;
    Vector<Rational> c(2);
    c << gen.integer(-4, 4), gen.integer(-4, 4);
    const auto lp = maximize<Rational>(Ab, bb, c);
    const auto brute = brute_lp_2d(Ab, bb, c);
    if (!brute) {
      EXPECT_EQ(lp.status, LpStatus::Infeasible) << t;
      continue;
    }
    ASSERT_EQ(lp.status, LpStatus::Optimal) << t;
    EXPECT_EQ(lp.value, *brute) << t;
  }
}

TEST(Simplex, DetectsUnbounded) {
  Matrix<Rational> A(1, 2);
  A << 1, -1;
  Vector<Rational> b(1);
  b << 1;
  Vector<Rational> c(2);
  c << 1, 1;
  EXPECT_EQ(maximize<Rational>(A, b, c).status, LpStatus::Unbounded);
}

TEST(MatrixGame, MatchingPennies) {
  Matrix<Rational> A(2, 2);
  A << 1, 0, 0, 1;
  const auto [p, value] = solve_matrix_game<Rational>(A);
  EXPECT_EQ(value, Rational(1, 2));
  EXPECT_EQ(p(0), Rational(1, 2));
  Matrix<Rational> dominated(2, 2);
  dominated << 0, 0, 1, 1;
  const auto [q, v2] = solve_matrix_game<Rational>(dominated);
  EXPECT_EQ(v2, 0);
  EXPECT_EQ(q(0), 1);
}

TEST(ConsistentPolytope, SinglePointIsSignOnly) {
  UtilityTable<Rational> u(1, 2);
  u << 0, Rational(1, 3);
  const auto inst = build_instance<Rational>(support::points(1), Vector<Rational>::Ones(1), u);
  const auto poly = build_polytope(inst, 2);
  ASSERT_EQ(poly.size(), 2u);
  EXPECT_EQ(poly.coefficients()[0], labeling({1}));
  EXPECT_EQ(poly.coefficients()[1], labeling({2}));
  EXPECT_EQ(poly.responses(), (std::vector<int>{1, 1}));
  for (int j = 0; j <= 10; ++j) {
    Vector<Rational> g(1);
    g << Rational(j, 10);
    EXPECT_TRUE(poly.contains(g));
  }
}

TEST(ConsistentPolytope, LowerBoundPairBothInside) {
  const auto p = theorem2_instance(2);
  const auto poly = build_polytope(p.u1, 2);
  EXPECT_TRUE(poly.contains(p.u1.gaps()));
  EXPECT_TRUE(poly.contains(p.u2.gaps()));
  EXPECT_TRUE(poly.consistent(p.u2.gaps()));
}

TEST(ConsistentPolytope, RestrictedThreePointMembershipMatchesBruteForce) {
  const auto b = prop2_instance(16);
  const auto inst = b.instance.restrict_to({0, 2});
  const auto poly = build_polytope(inst, 16);
  const auto queries = support::brute_reduced_queries(2, 16);
  const int steps = 100;
  int inside = 0;
  for (int a = 0; a <= steps; ++a) {
    for (int c = 0; c <= steps; ++c) {
      Vector<Rational> g(2);
      g << Rational(a, steps), Rational(c, steps);
      const bool brute = support::brute_consistent(queries, inst.gaps(), g);
      ASSERT_EQ(poly.consistent(g), brute) << a << " " << c;
      // The closure only adds boundary points.
      if (brute) {
        ASSERT_TRUE(poly.contains(g));
      }
      inside += brute;
    }
  }
  EXPECT_GT(inside, 0);
  EXPECT_TRUE(poly.contains(inst.gaps()));
}

TEST(Payoff, Examples) {
  const auto p = theorem2_instance(2);
  const auto& w = p.u1.weights();
  const auto& y = p.u1.labels();
  // Under u2 the better hypothesis is (1,0); (0,1) loses 1/13.
  EXPECT_EQ(payoff(p.cls[0], p.u2.gaps(), w, y, p.cls), Rational(0));
  EXPECT_EQ(payoff(p.cls[1], p.u2.gaps(), w, y, p.cls), Rational(1, 13));
  EXPECT_EQ(payoff(p.cls[0], p.u1.gaps(), w, y, p.cls), Rational(1, 26));
  const GapGame<Rational> game(w, y, p.cls);
  EXPECT_EQ(game.payoff(game.selector(p.u1.gaps()), p.u1.gaps()), 0);
}

TEST(Payoff, MatchesCoreExcessRisk) {
  support::Gen gen(62);
  for (int t = 0; t < 300; ++t) {
    const Index n = gen.integer(1, 6);
    const auto inst = support::rational_instance(gen, n);
    const auto cls = support::random_class(gen, n);
    Vector<Rational> g(n);
    UtilityTable<Rational> u(n, 2);
    for (Index i = 0; i < n; ++i) {
      g(i) = Rational(gen.integer(0, 16), 16);
      u(i, inst.labels()(i)) = g(i);
      u(i, 1 - inst.labels()(i)) = 0;
    }
    const auto other = build_instance<Rational>(inst.points(), inst.weights(), u);
    const Index f = gen.integer(0, static_cast<int>(cls.size()) - 1);
    ASSERT_EQ(payoff(cls[f], g, inst.weights(), inst.labels(), cls), excess_risk(other, cls[f], cls));
  }
}

TEST(SolveProbust, SinglePointPolytopeHasValueZero) {
  support::Gen gen(63);
  const auto inst = support::rational_instance(gen, 3, 16, true);
  const auto cls = HypothesisClass::all_dichotomies(3);
  Vector<Rational> g(3);
  g << 1, Rational(1, 2), Rational(1, 4);
  // Ratios 2:1 between consecutive coordinates pin a ray through g; the
  // strict row -g_1 < 0 removes the apex.
  const std::vector<Labeling> coeffs = {labeling({1, -2, 0}), labeling({-1, 2, 0}), labeling({0, 1, -2}),
                                        labeling({0, -1, 2}), labeling({-1, 0, 0})};
  const std::vector<int> responses = {1, 1, 1, 1, 0};
  ConsistentPolytope<Rational> line(3, coeffs, responses);
  const auto pol = solve_probust<Rational>(inst.weights(), inst.labels(), line, cls, g);
  // Every point t (1, 1/2, 1/4), t > 0, has the same maximizer, so the
  // value is 0.
  EXPECT_EQ(pol.game_value, 0);
  EXPECT_EQ(pol.worst_case, 0);
  EXPECT_EQ(pol.probabilities.sum(), 1);
  const auto mod = local_modulus_exact<Rational>(inst.weights(), inst.labels(), line, cls);
  EXPECT_EQ(mod.lower, 0);
  EXPECT_EQ(mod.upper, 0);
}

TEST(SolveProbust, LowerBoundPairValue) {
  const auto p = theorem2_instance(2);
  const auto poly = build_polytope(p.u1, 2);
  const auto pol = solve_probust(p.u1, poly, p.cls);
  EXPECT_EQ(pol.game_value, Rational(6, 91));
  EXPECT_EQ(pol.worst_case, Rational(6, 91));
  for (Index h = 0; h < 2; ++h) {
    Vector<Rational> point = Vector<Rational>::Zero(2);
    point(h) = 1;
    EXPECT_GE(worst_case_risk(p.u1.weights(), p.u1.labels(), poly, p.cls, point), Rational(1, 26));
  }
  EXPECT_LE(pol.game_value, Rational(1, 13));
  EXPECT_GE(pol.game_value, Rational(1, 26));
  const auto w = p.u1.weights().cast<double>();
  const double grid = support::grid_game_value_2x2({to_double(w(0)), to_double(w(1))}, p.u1.labels(), p.cls,
                                                   {1.0, to_double(p.u1.gaps()(1))}, 2);
  EXPECT_NEAR(to_double(pol.game_value), grid, 5e-3);
}

TEST(SolveProbust, ThreePointInstancePicksPlus) {
  const auto b = prop2_instance(16);
  const auto poly = build_polytope(b.instance, 16);
  const auto pol = solve_probust(b.instance, poly, b.cls);
  EXPECT_EQ(pol.probabilities(b.f_plus), 1);
  EXPECT_EQ(pol.worst_case, 0);
}

TEST(Moduli, LowerBoundPairUpperModulus) {
  const auto p = theorem2_instance(2);
  const auto poly = build_polytope(p.u1, 2);
  const auto mod = local_modulus_exact<Rational>(p.u1.weights(), p.u1.labels(), poly, p.cls);
  EXPECT_GE(mod.upper, Rational(1, 13));
  EXPECT_EQ(local_modulus(p.u1.weights(), p.u1.labels(), poly, p.cls, ModulusMode::Upper), mod.upper);
}

TEST(SamplePolytope, Restrictions) {
  const auto b = prop2_instance(16);
  const auto poly = build_polytope(b.instance, 16);
  const auto same = sample_polytope(poly, {2, 0, 1});
  EXPECT_EQ(constraint_set(same), constraint_set(poly));
  const auto one = sample_polytope(poly, {0});
  for (const auto& c : one.coefficients()) EXPECT_GT(c(0), 0);
  EXPECT_EQ(constraint_set(sample_polytope(poly, {0, 2})),
            constraint_set(build_polytope(b.instance.restrict_to({0, 2}), 16)));
  EXPECT_THROW(sample_polytope(poly, {}), std::invalid_argument);
  EXPECT_THROW(sample_polytope(poly, {5}), std::invalid_argument);
}

TEST(BuildPolytope, ZeroGapIsAnError) {
  UtilityTable<Rational> u(2, 2);
  u << 0, 1, Rational(1, 2), Rational(1, 2);
  const auto inst = build_instance<Rational>(support::points(2), Vector<Rational>::Constant(2, Rational(1, 2)), u);
  EXPECT_THROW(build_polytope(inst, 2), std::invalid_argument);
}

TEST(Properties, MembershipSoundness) {
  support::Gen gen(64);
  for (int t = 0; t < 200; ++t) {
    const Index n = gen.integer(1, 4);
    const int k = gen.integer(1, 6);
    const auto inst = support::rational_instance(gen, n, 16, true);
    const auto poly = build_polytope(inst, k);
    ASSERT_TRUE(poly.consistent(inst.gaps()));
    ASSERT_TRUE(poly.contains(inst.gaps()));
    for (int s = 0; s < 20; ++s) {
      Vector<Rational> g(n);
      for (Index i = 0; i < n; ++i) g(i) = Rational(gen.integer(0, 16), 16);
      if (poly.consistent(g)) {
        ASSERT_TRUE(poly.contains(g));
      }
    }
  }
}

TEST(Properties, QueryAccounting) {
  support::Gen gen(65);
  for (int t = 0; t < 30; ++t) {
    const Index n = gen.integer(1, 4);
    const int k = gen.integer(1, 6);
    const auto inst = support::rational_instance(gen, n, 16, true);
    QueryLedger ledger;
    build_polytope(inst, k, &ledger);
    EXPECT_EQ(ledger.count(Phase::RobustEnumeration), count_canonical_queries(n, k));
    EXPECT_EQ(ledger.total(), count_canonical_queries(n, k));
  }
}

TEST(Properties, SolverCertificateAndSandwich) {
  support::Gen gen(66);
  const int ks[] = {2, 4, 8};
  for (int t = 0; t < 60; ++t) {
    const Index n = gen.integer(2, 3);
    const int k = ks[gen.integer(0, 2)];
    const auto inst = small_instance(gen, n);
    const auto cls = support::random_class(gen, n, 4);
    const auto poly = build_polytope(inst, k);
    const auto pol = solve_probust(inst, poly, cls);
    ASSERT_NEAR(pol.probabilities.sum(), 1.0, 1e-9);
    ASSERT_GE(pol.probabilities.minCoeff(), 0.0);
    ASSERT_LE(pol.convergence_gap, 1e-6);
    const double worst = worst_case_risk(inst.weights(), inst.labels(), poly, cls, pol.probabilities);
    ASSERT_NEAR(worst, pol.worst_case, 1e-9);
    const auto mod = local_modulus_exact<double>(inst.weights(), inst.labels(), poly, cls);
    ASSERT_LE(mod.lower / 2, pol.worst_case + 1e-6) << t;
    ASSERT_LE(pol.worst_case, mod.upper + 1e-6) << t;
  }
}

TEST(Properties, GridModuliBoundedByExact) {
  support::Gen gen(67);
  int positive = 0;
  for (int t = 0; t < 30; ++t) {
    const Index n = 2;
    const int k = 1 << gen.integer(1, 3);
    const auto inst = small_instance(gen, n);
    const auto cls = support::random_class(gen, n, 3);
    const auto poly = build_polytope(inst, k);
    const auto exact = local_modulus_exact<double>(inst.weights(), inst.labels(), poly, cls);
    const auto grid = local_modulus_grid(inst.weights(), inst.labels(), poly, cls);
    EXPECT_LE(grid.lower, exact.lower + 1e-9) << t;
    EXPECT_LE(grid.upper, exact.upper + 1e-9) << t;
    EXPECT_GE(grid.upper, exact.upper - 1e-2) << t;
    positive += exact.upper > 0;
  }
  EXPECT_GT(positive, 0);
}
