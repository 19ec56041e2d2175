#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "elicit/comptron.hpp"
#include "elicit/instance.hpp"

namespace elicit {

enum class EstimateSource { Comptron, RobComptron, GroundTruth };

const char* source_name(EstimateSource source);

/// Lowest-index maximizer of sum_i w_i g_i I[f(x_i) = y_i].
template <typename Scalar>
Index erm(const Vector<Scalar>& weights, const Labeling& labels, const Vector<Scalar>& gaps,
          const HypothesisClass& cls) {
  return argmax_over<Scalar>(cls, [&](const Labeling& f) {
           return gap_utility(weights, labels, gaps, f);
         }).best;
}

template <typename Scalar>
struct PluginResult {
  Index chosen = 0;
  Scalar empirical_utility{0};
  std::vector<Index> tie_set;
  EstimateSource source = EstimateSource::Comptron;
};

/// argmax_f sum_i w_i c_i I[f(x_i) = y_i] over estimated labels and
/// (possibly unnormalized) gap estimates c.
template <typename Scalar>
PluginResult<Scalar> plugin(const Vector<Scalar>& weights, const Labeling& labels,
                            const Vector<Scalar>& estimates, const HypothesisClass& cls,
                            EstimateSource source) {
  if (labels.size() != weights.size() || estimates.size() != weights.size() ||
      cls.support_size() != weights.size()) {
    throw std::invalid_argument("plugin: label, estimate, weight and class lengths disagree");
  }
  auto am = argmax_over<Scalar>(
      cls, [&](const Labeling& f) { return gap_utility(weights, labels, estimates, f); });
  PluginResult<Scalar> out;
  out.chosen = am.best;
  out.empirical_utility = am.values(am.best);
  out.tie_set = std::move(am.ties);
  out.source = source;
  return out;
}

/// Plug-in on Comptron's symbolic coefficients (u_max never enters).
template <typename Scalar>
PluginResult<Scalar> plugin(const Vector<Scalar>& weights, const GapEstimate& est,
                            const HypothesisClass& cls,
                            EstimateSource source = EstimateSource::Comptron) {
  return plugin<Scalar>(weights, est.labels, est.coefficients<Scalar>(), cls, source);
}

/// Every term of the excess-risk decomposition for one plug-in run.
/// "Sample" quantities use the empirical weights; population ones use the
/// instance weights.
template <typename Scalar>
struct BoundReport {
  Index erm_choice = 0;
  Index plugin_choice = 0;

  /// sup_f |U(f) - U_n(f)|, full utilities.
  Scalar uniform_term{0};
  /// Same supremum in gap-normalized form.
  Scalar uniform_term_gap{0};
  /// max over sample points and decisions of |u(x, y) - u_hat(x, y)| with
  /// both utilities in gap-normalized form (u(x, ybar) = 0).
  Scalar est_error_sup{0};
  /// max over sample points of |g_hat - g|.
  Scalar est_error_gap{0};
  /// max over sample points of g_hat - g (>= 0 for upper estimates).
  Scalar overestimate{0};
  /// max over sample points of g - g_hat.
  Scalar underestimate{0};
  /// Sample fraction where f_ERM and the plug-in choice disagree.
  Scalar mismatch{0};
  /// Sample error fraction of f_ERM against the true labels.
  Scalar erm_error{0};

  bool labels_correct = false;
  bool upper_estimates = false;

  Scalar theorem1_rhs{0};
  /// 2 * uniform + overestimate * erm_error; holds for upper estimates.
  Scalar prop1_rhs{0};
  /// 2 * uniform + 2 * underestimate * erm_error, as literally written for
  /// lower estimates. Reported, not checked.
  Scalar prop1_signed_rhs{0};
  /// 2 * uniform + (2 u_max / k) * erm_error; present when k is given.
  std::optional<Scalar> corollary1_rhs;

  /// Population excess risk of the plug-in choice.
  Scalar excess_risk{0};

  bool prop1_applicable() const { return labels_correct && upper_estimates; }
  bool corollary1_applicable() const { return labels_correct && corollary1_rhs.has_value(); }

  /// Names of applicable bounds that the measured risk exceeds.
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (excess_risk > theorem1_rhs + ScalarTraits<Scalar>::tolerance()) out.push_back("theorem1");
    if (prop1_applicable() && excess_risk > prop1_rhs + ScalarTraits<Scalar>::tolerance()) {
      out.push_back("prop1");
    }
    if (corollary1_applicable() && excess_risk > *corollary1_rhs + ScalarTraits<Scalar>::tolerance()) {
      out.push_back("corollary1");
    }
    return out;
  }
};

/// Builds the report for a plug-in learner fed gap estimates `est_gaps`
/// (in utility units) and estimated labels, trained on `sample_weights`.
/// Pass `k` when the estimates come from Comptron with that order, to get
/// the corollary bound.
template <typename Scalar>
BoundReport<Scalar> bound_report(const TabularInstance<Scalar>& inst,
                                 const Vector<Scalar>& sample_weights,
                                 const Labeling& est_labels, const Vector<Scalar>& est_gaps,
                                 const HypothesisClass& cls, std::optional<int> k = std::nullopt) {
  const Index n = inst.size();
  if (sample_weights.size() != n || est_labels.size() != n || est_gaps.size() != n) {
    throw std::invalid_argument("bound_report: length mismatch");
  }
  const Labeling& y = inst.labels();
  const Vector<Scalar>& g = inst.gaps();
  BoundReport<Scalar> rep;

  for (Index j = 0; j < cls.size(); ++j) {
    const Scalar full = abs_value<Scalar>(population_utility(inst.weights(), inst.utility(), cls[j]) -
                                          population_utility(sample_weights, inst.utility(), cls[j]));
    const Scalar gap = abs_value<Scalar>(gap_utility(inst.weights(), y, g, cls[j]) -
                                         gap_utility(sample_weights, y, g, cls[j]));
    rep.uniform_term = std::max(rep.uniform_term, full);
    rep.uniform_term_gap = std::max(rep.uniform_term_gap, gap);
  }

  rep.erm_choice = erm(sample_weights, y, g, cls);
  rep.plugin_choice = plugin(sample_weights, est_labels, est_gaps, cls, EstimateSource::Comptron).chosen;
  const Labeling& f_erm = cls[rep.erm_choice];
  const Labeling& f_hat = cls[rep.plugin_choice];

  rep.labels_correct = true;
  rep.upper_estimates = true;
  Scalar u_max(0);
  bool first = true;
  for (Index i = 0; i < n; ++i) {
    const Scalar w = sample_weights(i);
    if (w == Scalar(0)) continue;
    const bool same_label = est_labels(i) == y(i);
    rep.labels_correct = rep.labels_correct && same_label;
    const Scalar diff = est_gaps(i) - g(i);
    // Gap-normalized utilities: u(x, y) = g, u(x, ybar) = 0, same for u_hat
    // with its own label.
    const Scalar sup_i = same_label ? abs_value<Scalar>(diff) : std::max(g(i), est_gaps(i));
    rep.est_error_sup = std::max(rep.est_error_sup, sup_i);
    rep.est_error_gap = std::max(rep.est_error_gap, abs_value<Scalar>(diff));
    if (first) {
      rep.overestimate = diff;
      rep.underestimate = -diff;
      first = false;
    } else {
      rep.overestimate = std::max(rep.overestimate, diff);
      rep.underestimate = std::max(rep.underestimate, Scalar(-diff));
    }
    if (diff < Scalar(0)) rep.upper_estimates = false;
    u_max = std::max(u_max, g(i));
    if (f_erm(i) != f_hat(i)) rep.mismatch += w;
    if (f_erm(i) != y(i)) rep.erm_error += w;
  }

  const Scalar two(2);
  rep.theorem1_rhs = two * rep.uniform_term + two * rep.est_error_sup * rep.mismatch;
  rep.prop1_rhs = two * rep.uniform_term + rep.overestimate * rep.erm_error;
  rep.prop1_signed_rhs = two * rep.uniform_term + two * rep.underestimate * rep.erm_error;
  if (k) {
    if (*k < 1) throw std::invalid_argument("k must be >= 1");
    rep.corollary1_rhs = two * rep.uniform_term + two * u_max / Scalar(*k) * rep.erm_error;
  }
  rep.excess_risk = excess_risk(inst, f_hat, cls);
  return rep;
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int draws = 0;
};

/// Monte Carlo estimate of E_eps sup_f |(1/n) sum_i eps_i u(x_i, f(x_i))|
/// over the n rows of `sample_utility`.
McEstimate rademacher_mc(const UtilityTable<double>& sample_utility, const HypothesisClass& cls,
                         int num_draws, std::uint64_t seed);

}  // namespace elicit
