#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elicit/oracle.hpp"

namespace elicit {

/// Gap estimates in units of the unknown largest gap u_max: point i has
/// relative coefficient numerator[i] / 2^scale_log2[i].
struct GapEstimate {
  Labeling labels;
  Index i_max = 0;
  int T = 0;
  std::vector<std::int64_t> numerator;
  std::vector<int> scale_log2;
  /// Point each coefficient was measured against (i_max unless a custom
  /// reference policy was used).
  std::vector<Index> reference;

  Index size() const { return labels.size(); }

  template <typename Scalar>
  Scalar coefficient(Index i) const {
    const auto u = static_cast<std::size_t>(i);
    if constexpr (ScalarTraits<Scalar>::exact) {
      Scalar den(1);
      for (int s = 0; s < scale_log2[u]; ++s) den *= 2;
      return Scalar(numerator[u]) / den;
    } else {
      return std::ldexp(static_cast<double>(numerator[u]), -scale_log2[u]);
    }
  }

  template <typename Scalar>
  Vector<Scalar> coefficients() const {
    Vector<Scalar> c(size());
    for (Index i = 0; i < size(); ++i) c(i) = coefficient<Scalar>(i);
    return c;
  }

  /// Numeric gaps c_i * u_max; only meaningful with ground-truth access.
  template <typename Scalar>
  Vector<Scalar> scaled(const Scalar& u_max) const {
    return coefficients<Scalar>() * u_max;
  }
};

/// True when k is a power of two and k >= 2.
inline bool is_power_of_two(std::int64_t k) { return k >= 2 && (k & (k - 1)) == 0; }

/// Largest power of two <= k (k >= 2).
inline std::int64_t floor_power_of_two(std::int64_t k) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  std::int64_t p = 1;
  while (p * 2 <= k) p *= 2;
  return p;
}

/// log2(k) - 1 for a power of two k.
inline int refinement_depth(std::int64_t k) {
  if (!is_power_of_two(k)) {
    throw std::invalid_argument("k = " + std::to_string(k) + " is not a power of two >= 2");
  }
  int T = -1;
  while (k > 1) {
    k >>= 1;
    ++T;
  }
  return T;
}

/// Repetition count ceil(8 / (1 - 2 eta)^2 * ln(max(nT, 1) / delta)).
inline int repetitions(Index n, int T, double eta, double delta) {
  if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double nT = std::max<double>(static_cast<double>(n) * T, 1.0);
  const double margin = 1.0 - 2.0 * eta;
  return static_cast<int>(std::ceil(8.0 / (margin * margin) * std::log(nT / delta)));
}

namespace detail {

/// Majority response over `repeats` calls, I[mean >= 1/2].
template <typename Scalar>
int vote(ComparisonOracle<Scalar>& oracle, const Query& q, Phase phase, int repeats) {
  int ones = 0;
  for (int j = 0; j < repeats; ++j) ones += oracle.answer(q, phase);
  return 2 * ones >= repeats ? 1 : 0;
}

}  // namespace detail

/// y_i from the 1-comparison ((x_i, 1, 0)), repeated `repeats` times.
template <typename Scalar>
Labeling elicit_labels(ComparisonOracle<Scalar>& oracle, int repeats = 1) {
  const Index n = oracle.instance().size();
  Labeling y(n);
  for (Index i = 0; i < n; ++i) y(i) = detail::vote(oracle, Query::label_probe(i), Phase::Labels, repeats);
  return y;
}

/// Linear tournament over gap duels; the champion keeps its seat on ties.
template <typename Scalar>
Index find_max_gap(ComparisonOracle<Scalar>& oracle, const Labeling& labels, int repeats = 1) {
  const Index n = oracle.instance().size();
  if (labels.size() != n) throw std::invalid_argument("label vector length mismatch");
  Index champion = 0;
  for (Index b = 1; b < n; ++b) {
    const Query q = Query::gap_duel(champion, labels(champion), b, labels(b));
    if (detail::vote(oracle, q, Phase::MaxGap, repeats) == 0) champion = b;
  }
  return champion;
}

struct ComptronOptions {
  /// Per-point reference index; defaults to i_max everywhere. A point
  /// measured against r gets coefficient (num / 2^T) * coefficient(r), so
  /// references must form chains ending at i_max.
  std::function<std::vector<Index>(Index n, Index i_max)> reference_policy;
  /// Called after every refinement round with the round number and the
  /// current numerators over 2^T (relative to each point's reference).
  std::function<void(int t, const std::vector<std::int64_t>&)> on_round;
  /// Repetitions per query; 1 for the noiseless algorithm.
  int repeats = 1;
};

namespace detail {

inline void compose_references(GapEstimate& est) {
  const Index n = est.size();
  std::vector<std::int64_t> own = est.numerator;
  for (Index i = 0; i < n; ++i) {
    std::int64_t num = 1;
    int scale = 0;
    Index cur = i;
    int hops = 0;
    while (true) {
      if (cur == est.i_max) break;
      if (scale + est.T > 62) throw std::invalid_argument("reference chain too long for 64-bit coefficients");
      num *= own[static_cast<std::size_t>(cur)];
      scale += est.T;
      cur = est.reference[static_cast<std::size_t>(cur)];
      if (++hops > n) throw std::invalid_argument("reference policy contains a cycle");
    }
    if (hops == 0) {
      // i_max measures itself; its own refinement stays informative only
      // under noise, so keep the measured numerator.
      num = own[static_cast<std::size_t>(i)];
      scale = est.T;
    }
    est.numerator[static_cast<std::size_t>(i)] = num;
    est.scale_log2[static_cast<std::size_t>(i)] = scale;
  }
  // Reduce each fraction to lowest terms.
  for (Index i = 0; i < n; ++i) {
    auto& num = est.numerator[static_cast<std::size_t>(i)];
    auto& s = est.scale_log2[static_cast<std::size_t>(i)];
    while (s > 0 && num % 2 == 0 && num != 0) {
      num /= 2;
      --s;
    }
  }
}

}  // namespace detail

/// Comptron with the oracle's k (a power of two >= 2). Issues n label
/// probes, n - 1 gap duels and n * T refinement queries, each repeated
/// `options.repeats` times.
template <typename Scalar>
GapEstimate comptron(ComparisonOracle<Scalar>& oracle, const ComptronOptions& options = {}) {
  const std::int64_t k = oracle.k();
  const int T = refinement_depth(k);
  if (T > 30) throw std::invalid_argument("k too large for 64-bit dyadic coefficients");
  const int repeats = options.repeats;
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  const Index n = oracle.instance().size();

  GapEstimate est;
  est.T = T;
  est.labels = elicit_labels(oracle, repeats);
  est.i_max = find_max_gap(oracle, est.labels, repeats);
  est.reference = options.reference_policy ? options.reference_policy(n, est.i_max)
                                           : std::vector<Index>(static_cast<std::size_t>(n), est.i_max);
  if (static_cast<Index>(est.reference.size()) != n) {
    throw std::invalid_argument("reference policy returned the wrong length");
  }

  const std::int64_t half = std::int64_t{1} << T;  // k / 2
  std::vector<std::int64_t> num(static_cast<std::size_t>(n), half);
  for (int t = 1; t <= T; ++t) {
    const std::int64_t step = std::int64_t{1} << (T - t);
    for (Index i = 0; i < n; ++i) {
      auto& c = num[static_cast<std::size_t>(i)];
      const Index ref = est.reference[static_cast<std::size_t>(i)];
      if (ref < 0 || ref >= n) throw std::invalid_argument("reference index out of range");
      const std::int64_t lambda = c - step;
      Query q;
      q.add(i, est.labels(i), 1 - est.labels(i), static_cast<int>(half));
      q.add(ref, 1 - est.labels(ref), est.labels(ref), static_cast<int>(lambda));
      const int r = detail::vote(oracle, q, Phase::Refinement, repeats);
      if (r == 0) c -= step;
    }
    if (options.on_round) options.on_round(t, num);
  }
  est.numerator = num;
  est.scale_log2.assign(static_cast<std::size_t>(n), T);
  detail::compose_references(est);
  return est;
}

/// Comptron with every query repeated J times and majority aggregation,
/// for an oracle whose flip rates are bounded by eta.
template <typename Scalar>
GapEstimate rob_comptron(ComparisonOracle<Scalar>& oracle, double eta, double delta,
                         ComptronOptions options = {}) {
  if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const int T = refinement_depth(oracle.k());
  options.repeats = repetitions(oracle.instance().size(), T, eta, delta);
  return comptron(oracle, options);
}

/// max_i |c_i u_max - g_i| against ground truth, u_max = max_i g_i.
template <typename Scalar>
Scalar estimation_error(const GapEstimate& est, const TabularInstance<Scalar>& inst) {
  const Scalar u_max = inst.max_gap();
  const Vector<Scalar> g_hat = est.scaled<Scalar>(u_max);
  Scalar worst(0);
  for (Index i = 0; i < inst.size(); ++i) worst = std::max(worst, abs_value<Scalar>(g_hat(i) - inst.gaps()(i)));
  return worst;
}

}  // namespace elicit
