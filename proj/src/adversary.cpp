#include "elicit/adversary.hpp"

#include <string>

namespace elicit {

namespace {

TabularInstance<Rational> two_point(int k, const Rational& gamma) {
  const Rational denom(6 * k + 1);
  Vector<Rational> w(2);
  w << Rational(3 * k) / denom, Rational(3 * k + 1) / denom;
  UtilityTable<Rational> u(2, 2);
  u << Rational(0), Rational(1), Rational(0), Rational(1) - gamma;
  return build_instance<Rational>({{"x+", 1.0}, {"x-", -1.0}}, w, u);
}

int sign_of(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

HardInstancePair theorem2_instance(int k) {
  if (k < 2) throw std::invalid_argument("theorem2_instance needs k >= 2");
  HardInstancePair pair{
      k,
      two_point(k, Rational(1, 2 * (3 * k + 1))),
      two_point(k, Rational(2, 3 * k + 1)),
      HypothesisClass({labeling({1, 0}), labeling({0, 1})}),
      Matrix<Rational>::Zero(2, 2),
  };
  const Rational denom(6 * k + 1);
  // Predicting x+ correctly loses under u1; predicting x- loses under u2.
  pair.analytic_risk(0, 0) = Rational(1) / (Rational(2) * denom);
  pair.analytic_risk(1, 1) = Rational(1) / denom;
  return pair;
}

ComptronOptions Prop2Bundle::alternate_options() const {
  ComptronOptions opts;
  const auto ref = alternate_reference;
  opts.reference_policy = [ref](Index n, Index) {
    if (static_cast<Index>(ref.size()) != n) throw std::invalid_argument("reference size mismatch");
    return ref;
  };
  return opts;
}

Prop2Bundle prop2_instance(int k) {
  if (k <= 10) throw std::invalid_argument("prop2_instance needs k > 10");
  const Rational kk(k);
  const Rational p = Rational(1) / Rational(k + 8);
  Vector<Rational> w(3);
  w << p, p, Rational(1) - Rational(2) * p;
  UtilityTable<Rational> u(3, 2);
  u << Rational(0), Rational(1), Rational(0), Rational(4) / kk, Rational(0), Rational(2) / (kk * kk);
  auto inst = build_instance<Rational>({{"x1", 1.0}, {"x2", 2.0}, {"x3", -1.0}}, w, u);
  auto cls = induce_threshold_class(inst);
  Prop2Bundle b{k, p, std::move(inst), std::move(cls), 0, 1, {0, 0, 1}};
  b.f_plus = *b.cls.find(labeling({1, 1, 0}));
  b.f_minus = *b.cls.find(labeling({0, 0, 1}));
  return b;
}

Rational prop2_plugin_risk(int k) {
  const Rational kk(k);
  return (kk * kk + Rational(2) * kk - Rational(12)) / (kk * kk * (kk + Rational(8)));
}

DistinguishResult indistinguishable(const Vector<Rational>& g1, const Vector<Rational>& g2, int k,
                                    std::size_t cap) {
  if (g1.size() != g2.size()) throw std::invalid_argument("gap vectors differ in length");
  DistinguishResult out;
  for (const Labeling& c : enumerate_reduced_queries(g1.size(), k, cap)) {
    Rational s1(0);
    Rational s2(0);
    for (Index i = 0; i < c.size(); ++i) {
      s1 += Rational(c(i)) * g1(i);
      s2 += Rational(c(i)) * g2(i);
    }
    const int a = sign_of(s1);
    const int b = sign_of(s2);
    if (a == b) continue;
    out.indistinguishable = false;
    // c separates when exactly one side is nonnegative; otherwise -c does.
    out.witness = ((a >= 0) != (b >= 0)) ? c : Labeling(-c);
    return out;
  }
  return out;
}

DistinguishResult indistinguishable(const TabularInstance<Rational>& u1,
                                    const TabularInstance<Rational>& u2, int k, std::size_t cap) {
  if (u1.labels() != u2.labels()) {
    throw std::invalid_argument("utilities induce different labels; a 1-comparison separates them");
  }
  return indistinguishable(u1.gaps(), u2.gaps(), k, cap);
}

}  // namespace elicit
