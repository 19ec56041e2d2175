#include "elicit/report_io.hpp"

namespace elicit {

nlohmann::json ledger_to_json(const QueryLedger& ledger) {
  nlohmann::json j;
  j["total"] = ledger.total();
  for (int p = 0; p < kPhaseCount; ++p) {
    j[phase_name(static_cast<Phase>(p))] = ledger.count(static_cast<Phase>(p));
  }
  return j;
}

nlohmann::json number_to_json(double x) { return x; }

nlohmann::json number_to_json(const Rational& x) {
  return {{"value", to_double(x)}, {"exact", x.str()}};
}

nlohmann::json estimate_to_json(const GapEstimate& est) {
  nlohmann::json j;
  j["labels"] = std::vector<int>(est.labels.data(), est.labels.data() + est.labels.size());
  j["i_max"] = est.i_max;
  j["T"] = est.T;
  j["coefficients"] = nlohmann::json::array();
  for (Index i = 0; i < est.size(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    j["coefficients"].push_back(std::to_string(est.numerator[u]) + "/2^" + std::to_string(est.scale_log2[u]));
  }
  j["reference"] = est.reference;
  return j;
}

}  // namespace elicit
