#pragma once

#include <json.hpp>

#include "elicit/comptron.hpp"
#include "elicit/learner.hpp"
#include "elicit/oracle.hpp"
#include "elicit/robust.hpp"

namespace elicit {

nlohmann::json ledger_to_json(const QueryLedger& ledger);

/// Exact rationals serialize as {"value": double, "exact": "p/q"}.
nlohmann::json number_to_json(double x);
nlohmann::json number_to_json(const Rational& x);

nlohmann::json estimate_to_json(const GapEstimate& est);

/// Field names: erm_choice, plugin_choice, uniform_term, uniform_term_gap,
/// est_error_sup, est_error_gap, overestimate, underestimate, mismatch,
/// erm_error, labels_correct, upper_estimates, theorem1_rhs, prop1_rhs,
/// prop1_signed_rhs, corollary1_rhs (null when absent), excess_risk,
/// violations.
template <typename Scalar>
nlohmann::json bound_report_to_json(const BoundReport<Scalar>& r) {
  nlohmann::json j;
  j["erm_choice"] = r.erm_choice;
  j["plugin_choice"] = r.plugin_choice;
  j["uniform_term"] = number_to_json(r.uniform_term);
  j["uniform_term_gap"] = number_to_json(r.uniform_term_gap);
  j["est_error_sup"] = number_to_json(r.est_error_sup);
  j["est_error_gap"] = number_to_json(r.est_error_gap);
  j["overestimate"] = number_to_json(r.overestimate);
  j["underestimate"] = number_to_json(r.underestimate);
  j["mismatch"] = number_to_json(r.mismatch);
  j["erm_error"] = number_to_json(r.erm_error);
  j["labels_correct"] = r.labels_correct;
  j["upper_estimates"] = r.upper_estimates;
  j["theorem1_rhs"] = number_to_json(r.theorem1_rhs);
  j["prop1_rhs"] = number_to_json(r.prop1_rhs);
  j["prop1_signed_rhs"] = number_to_json(r.prop1_signed_rhs);
  j["corollary1_rhs"] = r.corollary1_rhs ? number_to_json(*r.corollary1_rhs) : nlohmann::json(nullptr);
  j["excess_risk"] = number_to_json(r.excess_risk);
  j["violations"] = r.violations();
  return j;
}

/// {"game_value", "policy", "lower_modulus", "upper_modulus", "queries_used"}
/// plus worst_case, convergence_gap and iterations.
template <typename Scalar>
nlohmann::json robust_to_json(const RobustPolicy<Scalar>& policy, const ExactModuli<Scalar>& moduli,
                              std::uint64_t queries_used) {
  nlohmann::json j;
  j["game_value"] = to_double(policy.game_value);
  j["policy"] = nlohmann::json::array();
  for (Index f = 0; f < policy.probabilities.size(); ++f) j["policy"].push_back(to_double(policy.probabilities(f)));
  j["lower_modulus"] = to_double(moduli.lower);
  j["upper_modulus"] = to_double(moduli.upper);
  j["queries_used"] = queries_used;
  j["worst_case"] = to_double(policy.worst_case);
  j["convergence_gap"] = to_double(policy.convergence_gap);
  j["iterations"] = policy.iterations;
  return j;
}

}  // namespace elicit
