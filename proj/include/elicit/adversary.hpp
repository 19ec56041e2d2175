#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "elicit/comptron.hpp"
#include "elicit/instance.hpp"
#include "elicit/query.hpp"

namespace elicit {

/// Two utilities on a shared support and distribution that a k-oracle cannot
/// tell apart, with their analytic excess risks.
struct HardInstancePair {
  int k = 2;
  TabularInstance<Rational> u1;
  TabularInstance<Rational> u2;
  HypothesisClass cls;
  /// analytic_risk(h, j): excess risk of hypothesis h under utility j+1.
  Matrix<Rational> analytic_risk;
};

/// Two points x+ = +1, x- = -1 with u(., 0) = 0, u(x+, 1) = 1 and
/// u(x-, 1) = 1 - gamma_j, gamma_1 = 1/(2(3k+1)), gamma_2 = 2/(3k+1);
/// P(x+) = 3k/(6k+1). Class: the two threshold dichotomies (1,0), (0,1).
HardInstancePair theorem2_instance(int k);

/// Three-point instance on which the Comptron plug-in is not instance
/// optimal, together with the alternate reference schedule.
struct Prop2Bundle {
  int k = 16;
  Rational p;
  TabularInstance<Rational> instance;
  HypothesisClass cls;
  Index f_plus = 0;   // labeling (1, 1, 0)
  Index f_minus = 1;  // labeling (0, 0, 1)
  /// Reference index per point for the alternate schedule: x_3 against x_2.
  std::vector<Index> alternate_reference;

  /// Comptron options running the alternate schedule.
  ComptronOptions alternate_options() const;
};

/// Support {1, 2, -1}, u(x, 1) = (1, 4/k, 2/k^2), u(x, 0) = 0, weights
/// (p, p, 1 - 2p) with p = 1/(k + 8). Requires k > 10.
Prop2Bundle prop2_instance(int k);

/// (k^2 + 2k - 12) / (k^2 (k + 8)): exact excess risk of the Comptron plug-in
/// choice on prop2_instance(k), valid when the plug-in picks f_minus.
Rational prop2_plugin_risk(int k);

struct DistinguishResult {
  bool indistinguishable = true;
  /// First separating reduced query in canonical order, oriented so that
  /// I[c . g1 >= 0] != I[c . g2 >= 0].
  std::optional<Labeling> witness;
};

/// Compares the oracle responses of two gap vectors (shared labels) on every
/// reduced query of order <= k, in both orientations.
DistinguishResult indistinguishable(const Vector<Rational>& g1, const Vector<Rational>& g2, int k,
                                    std::size_t cap = kDefaultEnumerationCap);

/// Same, for two instances; throws when their labels differ.
DistinguishResult indistinguishable(const TabularInstance<Rational>& u1,
                                    const TabularInstance<Rational>& u2, int k,
                                    std::size_t cap = kDefaultEnumerationCap);

}  // namespace elicit
