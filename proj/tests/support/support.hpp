#pragma once

// Hand-rolled generators and brute-force reference computations for tests.
// Nothing here calls into the library routines it is used to check.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "elicit/instance.hpp"
#include "elicit/query.hpp"

namespace support {

using elicit::Index;
using elicit::Labeling;
using elicit::Rational;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  /// Uniform on (0, 1].
  double open_unit() { return 1.0 - unit(); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

  /// Positive integer weights normalized to sum one.
  std::vector<int> raw_weights(Index n, int hi = 8) {
    std::vector<int> w;
    for (Index i = 0; i < n; ++i) w.push_back(integer(1, hi));
    return w;
  }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<elicit::Point> points(Index n) {
  std::vector<elicit::Point> p;
  for (Index i = 0; i < n; ++i) p.push_back({"x" + std::to_string(i), static_cast<double>(i + 1)});
  return p;
}

/// Gap-form instance: u(x, y) = g, u(x, 1 - y) = 0, gaps in (0, 1], weights
/// uniform.
inline elicit::TabularInstance<double> gap_instance(Gen& gen, Index n) {
  elicit::UtilityTable<double> u(n, 2);
  for (Index i = 0; i < n; ++i) {
    const int y = gen.coin() ? 1 : 0;
    u(i, y) = gen.open_unit();
    u(i, 1 - y) = 0.0;
  }
  return elicit::build_instance<double>(points(n), elicit::Vector<double>::Constant(n, 1.0 / static_cast<double>(n)),
                                        u);
}

/// Rational instance with utilities on the grid j/den and random weights.
inline elicit::TabularInstance<Rational> rational_instance(Gen& gen, Index n, int den = 16, bool positive_gaps = false) {
  elicit::UtilityTable<Rational> u(n, 2);
  const auto raw = gen.raw_weights(n);
  int total = 0;
  for (const int w : raw) total += w;
  elicit::Vector<Rational> w(n);
  for (Index i = 0; i < n; ++i) {
    int a = gen.integer(0, den);
    int b = gen.integer(0, den);
    while (positive_gaps && a == b) b = gen.integer(0, den);
    u(i, 0) = Rational(a) / den;
    u(i, 1) = Rational(b) / den;
    w(i) = Rational(raw[static_cast<std::size_t>(i)]) / total;
  }
  return elicit::build_instance<Rational>(points(n), w, u);
}

/// Random nonempty sub-class of all dichotomies on n points.
inline elicit::HypothesisClass random_class(Gen& gen, Index n, int max_size = 8) {
  std::vector<Labeling> all;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Labeling f(n);
    for (Index i = 0; i < n; ++i) f(i) = (mask >> i) & 1;
    all.push_back(f);
  }
  std::shuffle(all.begin(), all.end(), gen.engine());
  const int size = gen.integer(1, std::min<int>(max_size, static_cast<int>(all.size())));
  all.resize(static_cast<std::size_t>(size));
  return elicit::HypothesisClass(all);
}

/// Random raw query of length <= k over n points.
inline elicit::Query random_query(Gen& gen, Index n, int k) {
  elicit::Query q;
  const int len = gen.integer(1, k);
  for (int j = 0; j < len; ++j) q.add(gen.integer(0, static_cast<int>(n) - 1), gen.integer(0, 1), gen.integer(0, 1));
  return q;
}

/// sum_i w_i u(x_i, f_i) by a plain loop.
template <typename Scalar>
Scalar brute_utility(const elicit::TabularInstance<Scalar>& inst, const Labeling& f) {
  Scalar s(0);
  for (Index i = 0; i < inst.size(); ++i) s += inst.weights()(i) * inst.utility()(i, f(i));
  return s;
}

template <typename Scalar>
Scalar brute_excess(const elicit::TabularInstance<Scalar>& inst, const Labeling& f,
                    const elicit::HypothesisClass& cls) {
  Scalar best = brute_utility(inst, cls[0]);
  for (Index j = 1; j < cls.size(); ++j) best = std::max(best, brute_utility(inst, cls[j]));
  return best - brute_utility(inst, f);
}

/// Raw cumulative comparison of a query, straight from the utility table.
template <typename Scalar>
int raw_answer(const elicit::TabularInstance<Scalar>& inst, const elicit::Query& q) {
  Scalar a(0);
  Scalar b(0);
  for (const auto& e : q.entries) {
    a += inst.utility()(e.point, e.first);
    b += inst.utility()(e.point, e.second);
  }
  return a >= b ? 1 : 0;
}

/// Every nonzero vector in [-k, k]^n with L1 norm <= k whose first nonzero
/// entry is positive, sorted lexicographically.
inline std::vector<std::vector<int>> brute_reduced_queries(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(static_cast<std::size_t>(n), -k);
  while (true) {
    int l1 = 0;
    int first = 0;
    for (const int v : c) {
      l1 += std::abs(v);
      if (first == 0) first = v;
    }
    if (l1 <= k && first > 0) out.push_back(c);
    int pos = n - 1;
    while (pos >= 0 && ++c[static_cast<std::size_t>(pos)] > k) c[static_cast<std::size_t>(pos--)] = -k;
    if (pos < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Scalar>
int dot_sign(const std::vector<int>& c, const elicit::Vector<Scalar>& g) {
  Scalar s(0);
  for (std::size_t i = 0; i < c.size(); ++i) s += Scalar(c[i]) * g(static_cast<Index>(i));
  return s >= Scalar(0) ? 1 : 0;
}

/// True when g answers every reduced query of order <= k as g_star does.
template <typename Scalar>
bool brute_consistent(const std::vector<std::vector<int>>& queries, const elicit::Vector<Scalar>& g_star,
                      const elicit::Vector<Scalar>& g) {
  for (const auto& c : queries) {
    if (dot_sign(c, g) != dot_sign(c, g_star)) return false;
  }
  return true;
}

/// Lowest-index maximizer of sum_i w_i g_i I[f_i = y_i].
inline Index brute_select(const std::vector<double>& w, const Labeling& y, const std::vector<double>& g,
                          const elicit::HypothesisClass& cls, std::vector<double>* values = nullptr) {
  std::vector<double> v;
  for (Index f = 0; f < cls.size(); ++f) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (cls[f](static_cast<Index>(i)) == y(static_cast<Index>(i))) s += w[i] * g[i];
    }
    v.push_back(s);
  }
  Index best = 0;
  for (Index f = 1; f < cls.size(); ++f) {
    if (v[static_cast<std::size_t>(f)] > v[static_cast<std::size_t>(best)] + 1e-12) best = f;
  }
  if (values) *values = v;
  return best;
}

/// Exact E_eps sup_f |(1/n) sum_i eps_i u(x_i, f_i)| by enumerating all sign
/// patterns.
inline double exact_rademacher(const elicit::UtilityTable<double>& u, const elicit::HypothesisClass& cls) {
  const Index n = u.rows();
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double best = 0.0;
    for (Index f = 0; f < cls.size(); ++f) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += ((mask >> i) & 1 ? 1.0 : -1.0) * u(i, cls[f](i));
      best = std::max(best, std::abs(s) / static_cast<double>(n));
    }
    total += best;
  }
  return total / static_cast<double>(1u << n);
}

/// Grid value of min_q max_{g consistent} E_{f~(q, 1-q)} payoff(f, g) for
/// two points and a two-hypothesis class: policy step 1e-3, gap step 1e-3,
/// membership by brute-force query evaluation.
inline double grid_game_value_2x2(const std::vector<double>& w, const Labeling& y, const elicit::HypothesisClass& cls,
                                  const std::vector<double>& g_star, int k) {
  const auto queries = brute_reduced_queries(2, k);
  elicit::Vector<double> gs(2);
  gs << g_star[0], g_star[1];
  // Payoff pairs (payoff of f0, payoff of f1); only the Pareto frontier matters.
  std::vector<std::pair<double, double>> pts;
  const int steps = 1000;
  elicit::Vector<double> g(2);
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; b <= steps; ++b) {
      g << a / static_cast<double>(steps), b / static_cast<double>(steps);
      if (!brute_consistent(queries, gs, g)) continue;
      std::vector<double> v;
      brute_select(w, y, {g(0), g(1)}, cls, &v);
      const double top = std::max(v[0], v[1]);
      pts.emplace_back(top - v[0], top - v[1]);
    }
  }
  std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) {
    return l.first != r.first ? l.first > r.first : l.second > r.second;
  });
  std::vector<std::pair<double, double>> frontier;
  double best_second = -1.0;
  for (const auto& p : pts) {
    if (p.second > best_second) {
      frontier.push_back(p);
      best_second = p.second;
    }
  }
  double value = 1e300;
  for (int s = 0; s <= steps; ++s) {
    const double q = s / static_cast<double>(steps);
    double worst = 0.0;
    for (const auto& [a, b] : frontier) worst = std::max(worst, q * a + (1.0 - q) * b);
    value = std::min(value, worst);
  }
  return value;
}

}  // namespace support
