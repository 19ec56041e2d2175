#include "elicit/oracle.hpp"

#include <stdexcept>

namespace elicit {

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::Labels:
      return "labels";
    case Phase::MaxGap:
      return "max-gap";
    case Phase::Refinement:
      return "refinement";
    case Phase::RobustEnumeration:
      return "robust-enumeration";
  }
  return "unknown";
}

void QueryLedger::charge(Phase phase, std::uint64_t calls) {
  by_phase_[static_cast<int>(phase)] += calls;
  total_ += calls;
}

QueryLedger& QueryLedger::operator+=(const QueryLedger& other) {
  for (int p = 0; p < kPhaseCount; ++p) by_phase_[p] += other.by_phase_[p];
  total_ += other.total_;
  return *this;
}

double noise_bound(const NoiseModel& noise) {
  if (const auto* c = std::get_if<ConstantRate>(&noise)) return c->eta;
  if (const auto* p = std::get_if<PerQueryRate>(&noise)) return p->bound;
  return 0.0;
}

void validate(const OracleConfig& config) {
  if (config.k < 1) throw std::invalid_argument("oracle order k must be >= 1");
  const double eta = noise_bound(config.noise);
  if (!(eta >= 0.0 && eta < 0.5)) {
    throw std::invalid_argument("noise rate must lie in [0, 1/2)");
  }
  if (const auto* p = std::get_if<PerQueryRate>(&config.noise)) {
    if (!p->rate) throw std::invalid_argument("per-query noise needs a rate function");
  }
}

}  // namespace elicit
