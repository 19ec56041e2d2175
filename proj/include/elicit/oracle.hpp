#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <variant>

#include "elicit/instance.hpp"
#include "elicit/query.hpp"

namespace elicit {

enum class Phase : int { Labels = 0, MaxGap = 1, Refinement = 2, RobustEnumeration = 3 };

inline constexpr int kPhaseCount = 4;

const char* phase_name(Phase phase);

/// Oracle call counts, total and per phase.
class QueryLedger {
 public:
  void charge(Phase phase, std::uint64_t calls = 1);
  std::uint64_t count(Phase phase) const { return by_phase_[static_cast<int>(phase)]; }
  std::uint64_t total() const { return total_; }
  QueryLedger& operator+=(const QueryLedger& other);

 private:
  std::array<std::uint64_t, kPhaseCount> by_phase_{};
  std::uint64_t total_ = 0;
};

struct Noiseless {};

/// Every response is flipped with probability eta.
struct ConstantRate {
  double eta = 0.0;
};

/// Flip probability depends on the query; `rate` must stay within [0, bound].
struct PerQueryRate {
  double bound = 0.0;
  std::function<double(const Query&)> rate;
};

using NoiseModel = std::variant<Noiseless, ConstantRate, PerQueryRate>;

/// Upper bound on the flip probability; 0 when noiseless.
double noise_bound(const NoiseModel& noise);

struct OracleConfig {
  int k = 2;
  NoiseModel noise = Noiseless{};
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument for k < 1 or a rate outside [0, 1/2).
void validate(const OracleConfig& config);

/// Simulated k-comparison oracle over a fixed instance. Holds mutable RNG and
/// ledger state, so a handle must not be shared between threads.
template <typename Scalar>
class ComparisonOracle {
 public:
  ComparisonOracle(TabularInstance<Scalar> instance, OracleConfig config)
      : instance_(std::move(instance)), config_(std::move(config)), rng_(config_.seed) {
    validate(config_);
  }

  /// Noiseless bit I[u(x, y1) >= u(x, y2)] from raw cumulative utilities.
  int truth(const Query& query) const {
    check_length(query);
    Scalar lhs(0);
    Scalar rhs(0);
    for (const auto& e : query.entries) {
      if (e.point < 0 || e.point >= instance_.size()) {
        throw std::invalid_argument("query references point outside the support");
      }
      lhs += instance_.utility_at(e.point, e.first);
      rhs += instance_.utility_at(e.point, e.second);
    }
    return lhs >= rhs ? 1 : 0;
  }

  /// One noisy oracle call, charged to `phase`.
  int answer(const Query& query, Phase phase) {
    const int bit = truth(query);
    const double eta = flip_rate(query);
    int response = bit;
    if (eta > 0.0) {
      std::bernoulli_distribution flip(eta);
      if (flip(rng_)) response = 1 - bit;
    }
    ledger_.charge(phase);
    if (transcript_ != nullptr) log(query, phase, bit, response);
    return response;
  }

  /// Charges `calls` to the ledger without evaluating anything (used when a
  /// caller evaluates reduced queries in bulk).
  void charge(Phase phase, std::uint64_t calls) { ledger_.charge(phase, calls); }

  const QueryLedger& ledger() const { return ledger_; }
  const TabularInstance<Scalar>& instance() const { return instance_; }
  const OracleConfig& config() const { return config_; }
  int k() const { return config_.k; }
  double noise_bound() const { return elicit::noise_bound(config_.noise); }

  /// JSON-lines transcript sink; nullptr disables logging.
  void set_transcript(std::ostream* out) { transcript_ = out; }

 private:
  void check_length(const Query& query) const {
    if (query.length() > static_cast<std::size_t>(config_.k)) {
      throw std::invalid_argument("query of length " + std::to_string(query.length()) +
                                  " exceeds oracle order " + std::to_string(config_.k));
    }
  }

  double flip_rate(const Query& query) const {
    if (const auto* c = std::get_if<ConstantRate>(&config_.noise)) return c->eta;
    if (const auto* p = std::get_if<PerQueryRate>(&config_.noise)) {
      const double eta = p->rate(query);
      if (!(eta >= 0.0 && eta <= p->bound)) {
        throw std::invalid_argument("per-query noise rate outside [0, bound]");
      }
      return eta;
    }
    return 0.0;
  }

  void log(const Query& query, Phase phase, int bit, int response) {
    const Labeling c = reduce_query(query, instance_.labels());
    *transcript_ << "{\"phase\":\"" << phase_name(phase) << "\",\"c\":[";
    for (Index i = 0; i < c.size(); ++i) *transcript_ << (i ? "," : "") << c(i);
    *transcript_ << "],\"truth\":" << bit << ",\"response\":" << response << "}\n";
  }

  TabularInstance<Scalar> instance_;
  OracleConfig config_;
  std::mt19937_64 rng_;
  QueryLedger ledger_;
  std::ostream* transcript_ = nullptr;
};

/// I[c . g >= 0] evaluated exactly.
template <typename Scalar>
int reduced_truth(const Labeling& c, const Vector<Scalar>& g) {
  Scalar s(0);
  for (Index i = 0; i < c.size(); ++i) s += Scalar(c(i)) * g(i);
  return s >= Scalar(0) ? 1 : 0;
}

}  // namespace elicit
