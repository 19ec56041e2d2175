#include "elicit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "elicit/adversary.hpp"
#include "elicit/comptron.hpp"
#include "elicit/errors.hpp"
#include "elicit/instance_io.hpp"
#include "elicit/learner.hpp"
#include "elicit/report_io.hpp"
#include "elicit/rng.hpp"
#include "elicit/robust.hpp"

namespace elicit {

namespace {

constexpr const char* kVersion = "elicit 1.0.0";

// Stream tags for derive_seed.
constexpr std::uint64_t kTagInstance = 1;
constexpr std::uint64_t kTagOracle = 2;
constexpr std::uint64_t kTagAudit = 3;

const std::set<std::string> kExperiments{"sweep-k", "comptron-run", "lowerbound", "prop2", "robust", "bound-audit"};

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + key + "' in " + where + " has the wrong type");
  }
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex64(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

bool needs_instance(const std::string& experiment) {
  return experiment != "lowerbound" && experiment != "prop2" && experiment != "bound-audit";
}

// Runs jobs [0, count) on up to `threads` workers; the first exception wins.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(workers, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

HypothesisClass make_class(const std::string& name, const TabularInstance<double>& inst) {
  if (name == "all") {
    if (inst.size() > 20) throw ConfigError("class 'all' needs at most 20 points");
    return HypothesisClass::all_dichotomies(inst.size());
  }
  if (name == "threshold") return induce_threshold_class(inst);
  throw ConfigError("unknown class '" + name + "'");
}

int comptron_order(int k, std::vector<std::string>& warnings) {
  if (k < 2) throw ConfigError("k must be >= 2 for Comptron experiments");
  if (is_power_of_two(k)) return k;
  const auto rounded = static_cast<int>(floor_power_of_two(k));
  warnings.push_back("k=" + std::to_string(k) + " is not a power of two; rounded down to " + std::to_string(rounded));
  return rounded;
}

struct TrialOutput {
  SweepRecord record;
  QueryLedger ledger;
  nlohmann::json detail;
};

TabularInstance<double> resolve_instance(const ExperimentConfig& cfg, int trial) {
  const auto& spec = cfg.instance;
  if (spec.contains("path")) return load_instance(spec.at("path").get<std::string>());
  const std::uint64_t seed = cfg.resample ? derive_seed(cfg.seed, {kTagInstance, static_cast<std::uint64_t>(trial)})
                                          : derive_seed(cfg.seed, {kTagInstance});
  return generate_instance(spec, seed);
}

TrialOutput comptron_trial(const ExperimentConfig& cfg, const TabularInstance<double>& inst,
                           const HypothesisClass& cls, int k, int trial, bool with_detail) {
  const auto start = std::chrono::steady_clock::now();
  OracleConfig oc{k, Noiseless{}, derive_seed(cfg.seed, {kTagOracle, static_cast<std::uint64_t>(k),
                                                         static_cast<std::uint64_t>(trial)})};
  if (cfg.eta > 0.0) oc.noise = ConstantRate{cfg.eta};
  ComparisonOracle<double> oracle(inst, oc);
  const GapEstimate est = cfg.eta > 0.0 ? rob_comptron(oracle, cfg.eta, cfg.delta) : comptron(oracle);
  const auto choice = plugin<double>(inst.weights(), est, cls);

  TrialOutput out;
  out.record.k = k;
  out.record.trial = trial;
  out.record.est_error = estimation_error(est, inst);
  out.record.excess_risk = excess_risk(inst, cls[choice.chosen], cls);
  out.record.queries = oracle.ledger().total();
  if (cfg.record_timing) {
    out.record.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  out.ledger = oracle.ledger();
  if (with_detail) {
    const auto report = bound_report<double>(inst, inst.weights(), est.labels, est.scaled<double>(inst.max_gap()),
                                             cls, k);
    out.detail = {{"k", k},
                  {"trial", trial},
                  {"estimate", estimate_to_json(est)},
                  {"plugin_choice", choice.chosen},
                  {"ledger", ledger_to_json(oracle.ledger())},
                  {"bound_report", bound_report_to_json(report)}};
  }
  return out;
}

void run_sweep(const ExperimentConfig& cfg, RunResult& res, bool with_detail) {
  std::vector<int> ks;
  for (const int k : cfg.k) ks.push_back(comptron_order(k, res.warnings));

  // Instances are resolved up front so that worker threads share nothing mutable.
  std::vector<TabularInstance<double>> instances;
  const int distinct = cfg.resample ? cfg.trials : 1;
  for (int t = 0; t < distinct; ++t) instances.push_back(resolve_instance(cfg, t));
  std::vector<HypothesisClass> classes;
  for (const auto& inst : instances) classes.push_back(make_class(cfg.hypothesis_class, inst));

  const std::size_t jobs = ks.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<TrialOutput> outputs(jobs);
  parallel_for(jobs, cfg.threads, [&](std::size_t j) {
    const int k = ks[j / static_cast<std::size_t>(cfg.trials)];
    const int trial = static_cast<int>(j % static_cast<std::size_t>(cfg.trials));
    const auto slot = static_cast<std::size_t>(cfg.resample ? trial : 0);
    outputs[j] = comptron_trial(cfg, instances[slot], classes[slot], k, trial, with_detail);
  });

  QueryLedger total;
  nlohmann::json runs = nlohmann::json::array();
  for (auto& o : outputs) {
    res.records.push_back(o.record);
    total += o.ledger;
    if (with_detail) runs.push_back(std::move(o.detail));
  }
  std::stable_sort(res.records.begin(), res.records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return std::tie(a.k, a.trial) < std::tie(b.k, b.trial);
  });
  res.manifest["ledger"] = ledger_to_json(total);
  if (with_detail) res.details["runs"] = std::move(runs);

  std::map<int, std::pair<double, int>> mean;
  for (const auto& r : res.records) {
    mean[r.k].first += r.est_error;
    mean[r.k].second += 1;
  }
  for (const auto& [k, acc] : mean) {
    res.summary.push_back("k=" + std::to_string(k) + " mean est_error " + format_double(acc.first / acc.second));
  }
  const RateFit fit = fit_rate(res.records);
  res.summary.push_back(fit.defined ? "slope " + format_double(fit.slope) : fit.message);
}

void run_lowerbound(const ExperimentConfig& cfg, RunResult& res) {
  nlohmann::json rows = nlohmann::json::array();
  QueryLedger total;
  for (const int k : cfg.k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    const auto pair = theorem2_instance(k);
    const auto d = indistinguishable(pair.u1, pair.u2, k);
    const Rational r1 = pair.analytic_risk(0, 0);
    const Rational r2 = pair.analytic_risk(1, 1);
    nlohmann::json row{{"k", k},
                       {"risk_u1", number_to_json(r1)},
                       {"risk_u2", number_to_json(r2)},
                       {"indistinguishable", d.indistinguishable}};
    const auto poly = build_polytope(pair.u1, k, &total);
    const auto policy = solve_probust(pair.u1, poly, pair.cls);
    row["game_value"] = number_to_json(policy.game_value);
    rows.push_back(row);
    res.summary.push_back("k=" + std::to_string(k) + " risks " + r1.str() + " and " + r2.str() +
                          " indistinguishable: " + (d.indistinguishable ? "true" : "false") +
                          " game value " + policy.game_value.str());
  }
  res.details["lowerbound"] = rows;
  res.manifest["ledger"] = ledger_to_json(total);
}

std::string labeling_string(const Labeling& f) {
  std::string s = "(";
  for (Index i = 0; i < f.size(); ++i) s += (i ? "," : "") + std::to_string(f(i));
  return s + ")";
}

void run_prop2(const ExperimentConfig& cfg, RunResult& res) {
  constexpr std::uint64_t kRobustLimit = 5'000;
  nlohmann::json rows = nlohmann::json::array();
  QueryLedger total;
  for (const int k : cfg.k) {
    if (k <= 10 || !is_power_of_two(k)) throw ConfigError("prop2 needs k a power of two above 10");
    const auto b = prop2_instance(k);
    const auto best = evaluate(b.instance, b.cls).maximizer;

    ComparisonOracle<Rational> oracle(b.instance, OracleConfig{k, Noiseless{}, 0});
    const auto est = comptron(oracle);
    const auto choice = plugin<Rational>(b.instance.weights(), est, b.cls);
    const Rational risk = excess_risk(b.instance, b.cls[choice.chosen], b.cls);
    total += oracle.ledger();

    ComparisonOracle<Rational> alt_oracle(b.instance, OracleConfig{k, Noiseless{}, 0});
    const auto alt = comptron(alt_oracle, b.alternate_options());
    const auto alt_choice = plugin<Rational>(b.instance.weights(), alt, b.cls);
    total += alt_oracle.ledger();

    nlohmann::json row{{"k", k},
                       {"optimal", best == b.f_plus ? "f_plus" : "f_minus"},
                       {"plugin_choice", choice.chosen == b.f_plus ? "f_plus" : "f_minus"},
                       {"plugin_risk", number_to_json(risk)},
                       {"plugin_estimate", estimate_to_json(est)},
                       {"alternate_choice", alt_choice.chosen == b.f_plus ? "f_plus" : "f_minus"},
                       {"alternate_estimate", estimate_to_json(alt)}};
    std::string line = "k=" + std::to_string(k) + " plug-in choice " +
                       (choice.chosen == b.f_minus ? "f_{-1} " : "f_{+1} ") + labeling_string(b.cls[choice.chosen]) +
                       " optimal " + (best == b.f_plus ? "f_{+1} " : "f_{-1} ") + labeling_string(b.cls[best]) +
                       " plug-in risk " + format_double(to_double(risk)) + " (" + risk.str() + ")";
    if (count_canonical_queries(3, k) <= kRobustLimit) {
      const auto poly = build_polytope(b.instance, k, &total);
      const auto policy = solve_probust(b.instance, poly, b.cls);
      Rational true_risk(0);
      for (Index f = 0; f < b.cls.size(); ++f) {
        true_risk += policy.probabilities(f) * excess_risk(b.instance, b.cls[f], b.cls);
      }
      row["robust_policy"] = nlohmann::json::array();
      for (Index f = 0; f < b.cls.size(); ++f) row["robust_policy"].push_back(to_double(policy.probabilities(f)));
      row["robust_worst_case"] = number_to_json(policy.worst_case);
      row["robust_risk"] = number_to_json(true_risk);
      line += " robust risk " + true_risk.str();
    } else {
      res.warnings.push_back("k=" + std::to_string(k) + ": robust solve skipped, query enumeration too large");
    }
    rows.push_back(row);
    res.summary.push_back(line);
  }
  res.details["prop2"] = rows;
  res.manifest["ledger"] = ledger_to_json(total);
}

void run_robust(const ExperimentConfig& cfg, RunResult& res) {
  const auto inst = resolve_instance(cfg, 0);
  const auto cls = make_class(cfg.hypothesis_class, inst);
  nlohmann::json rows = nlohmann::json::array();
  QueryLedger total;
  for (const int k : cfg.k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    QueryLedger ledger;
    const auto poly = build_polytope(inst, k, &ledger);
    const auto policy = solve_probust(inst, poly, cls);
    const auto moduli = local_modulus_exact<double>(inst.weights(), inst.labels(), poly, cls);
    auto j = robust_to_json(policy, moduli, ledger.total());
    j["k"] = k;
    rows.push_back(j);
    total += ledger;
    res.summary.push_back("k=" + std::to_string(k) + " game value " + format_double(to_double(policy.game_value)) +
                          " moduli [" + format_double(moduli.lower) + ", " + format_double(moduli.upper) + "]");
  }
  res.details["robust"] = rows;
  res.manifest["ledger"] = ledger_to_json(total);
}

// One randomized (instance, sample, class, estimate) tuple in exact arithmetic.
struct AuditCase {
  TabularInstance<Rational> inst;
  Vector<Rational> sample_weights;
  HypothesisClass cls;
  Labeling est_labels;
  Vector<Rational> est_gaps;
  int k = 2;
  QueryLedger ledger;
};

AuditCase audit_case(std::uint64_t seed, const std::vector<int>& ks, double eta) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const Index n = uniform_int(2, 6);
  const int den = 16;

  std::vector<Point> points;
  UtilityTable<Rational> util(n, 2);
  Vector<Rational> w(n);
  int wsum = 0;
  std::vector<int> wraw;
  for (Index i = 0; i < n; ++i) {
    points.push_back({"x" + std::to_string(i), static_cast<double>(i)});
    const int a = uniform_int(0, den);
    const int b = uniform_int(0, den);
    util(i, 0) = ratio<Rational>(a, den);
    util(i, 1) = ratio<Rational>(b, den);
    wraw.push_back(uniform_int(1, 8));
    wsum += wraw.back();
  }
  for (Index i = 0; i < n; ++i) w(i) = ratio<Rational>(wraw[static_cast<std::size_t>(i)], wsum);
  AuditCase c{build_instance<Rational>(points, w, util), {}, HypothesisClass::all_dichotomies(1), {}, {}, 2, {}};

  // Sample drawn from the population distribution.
  std::discrete_distribution<int> draw(wraw.begin(), wraw.end());
  const int m = uniform_int(1, static_cast<int>(2 * n));
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (int s = 0; s < m; ++s) ++counts[static_cast<std::size_t>(draw(rng))];
  c.sample_weights.resize(n);
  std::vector<Index> support;
  for (Index i = 0; i < n; ++i) {
    c.sample_weights(i) = ratio<Rational>(counts[static_cast<std::size_t>(i)], m);
    if (counts[static_cast<std::size_t>(i)] > 0) support.push_back(i);
  }

  const auto all = HypothesisClass::all_dichotomies(n);
  std::vector<Labeling> chosen;
  const int size = uniform_int(1, static_cast<int>(std::min<Index>(all.size(), 8)));
  std::vector<Index> order(static_cast<std::size_t>(all.size()));
  for (Index j = 0; j < all.size(); ++j) order[static_cast<std::size_t>(j)] = j;
  std::shuffle(order.begin(), order.end(), rng);
  std::sort(order.begin(), order.begin() + size);
  for (int j = 0; j < size; ++j) chosen.push_back(all[order[static_cast<std::size_t>(j)]]);
  c.cls = HypothesisClass(std::move(chosen));

  // Comptron sees only the sample support, so its unit is the sample u_max.
  c.k = ks[static_cast<std::size_t>(uniform_int(0, static_cast<int>(ks.size()) - 1))];
  const auto sub = c.inst.restrict_to(support);
  OracleConfig oc{c.k, Noiseless{}, splitmix64(seed)};
  const bool noisy = eta > 0.0 && uniform_int(0, 1) == 1;
  if (noisy) oc.noise = ConstantRate{eta};
  ComparisonOracle<Rational> oracle(sub, oc);
  const GapEstimate est = comptron(oracle);
  c.ledger = oracle.ledger();
  Rational u_max(0);
  for (const Index i : support) u_max = std::max(u_max, c.inst.gaps()(i));
  const Vector<Rational> scaled = est.scaled<Rational>(u_max);
  c.est_labels = c.inst.labels();
  c.est_gaps = Vector<Rational>::Zero(n);
  for (std::size_t t = 0; t < support.size(); ++t) {
    c.est_labels(support[t]) = est.labels(static_cast<Index>(t));
    c.est_gaps(support[t]) = scaled(static_cast<Index>(t));
  }
  return c;
}

void run_bound_audit(const ExperimentConfig& cfg, RunResult& res) {
  std::vector<int> ks;
  for (const int k : cfg.k) ks.push_back(comptron_order(k, res.warnings));
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<std::string>> violations(trials);
  std::vector<QueryLedger> ledgers(trials);
  std::vector<char> applicable(trials * 3, 0);
  parallel_for(trials, cfg.threads, [&](std::size_t t) {
    auto c = audit_case(derive_seed(cfg.seed, {kTagAudit, t}), ks, cfg.eta);
    const auto rep = bound_report<Rational>(c.inst, c.sample_weights, c.est_labels, c.est_gaps, c.cls, c.k);
    violations[t] = rep.violations();
    ledgers[t] = c.ledger;
    applicable[3 * t] = 1;
    applicable[3 * t + 1] = rep.prop1_applicable();
    applicable[3 * t + 2] = rep.corollary1_applicable();
  });
  QueryLedger total;
  std::size_t checked[3] = {0, 0, 0};
  nlohmann::json failed = nlohmann::json::array();
  for (std::size_t t = 0; t < trials; ++t) {
    total += ledgers[t];
    for (int b = 0; b < 3; ++b) checked[b] += static_cast<std::size_t>(applicable[3 * t + static_cast<std::size_t>(b)]);
    if (!violations[t].empty()) failed.push_back({{"trial", t}, {"violations", violations[t]}});
  }
  res.failures = failed.size();
  res.details["audit"] = {{"tuples", trials},
                          {"theorem1_checked", checked[0]},
                          {"prop1_checked", checked[1]},
                          {"corollary1_checked", checked[2]},
                          {"failures", failed}};
  res.manifest["ledger"] = ledger_to_json(total);
  res.summary.push_back(std::to_string(trials) + " tuples, " + std::to_string(checked[1]) + " prop1 and " +
                        std::to_string(checked[2]) + " corollary1 checks, " + std::to_string(res.failures) +
                        " violations");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  check_keys(j, {"experiment", "instance", "k", "eta", "delta", "trials", "seed", "resample", "class", "out",
                 "record_timing", "threads"},
             "config");
  const std::string where = "config";
  ExperimentConfig c;
  if (!j.contains("experiment")) throw ConfigError("config needs 'experiment'");
  c.experiment = get_as<std::string>(j, "experiment", where);
  if (!kExperiments.count(c.experiment)) throw ConfigError("unknown experiment '" + c.experiment + "'");
  if (!j.contains("k")) throw ConfigError("config needs 'k'");
  c.k = get_as<std::vector<int>>(j, "k", where);
  if (c.k.empty()) throw ConfigError("'k' must list at least one order");
  if (j.contains("instance")) c.instance = j.at("instance");
  if (j.contains("eta")) c.eta = get_as<double>(j, "eta", where);
  if (j.contains("delta")) c.delta = get_as<double>(j, "delta", where);
  if (j.contains("trials")) c.trials = get_as<int>(j, "trials", where);
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", where);
  if (j.contains("resample")) c.resample = get_as<bool>(j, "resample", where);
  if (j.contains("class")) c.hypothesis_class = get_as<std::string>(j, "class", where);
  if (j.contains("out")) c.out = get_as<std::string>(j, "out", where);
  if (j.contains("record_timing")) c.record_timing = get_as<bool>(j, "record_timing", where);
  if (j.contains("threads")) c.threads = get_as<int>(j, "threads", where);

  if (!(c.eta >= 0.0 && c.eta < 0.5)) throw ConfigError("eta must lie in [0, 1/2)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.hypothesis_class != "all" && c.hypothesis_class != "threshold") {
    throw ConfigError("class must be 'all' or 'threshold'");
  }
  if (needs_instance(c.experiment)) {
    check_keys(c.instance, {"path", "generator", "n", "seed", "k"}, "instance");
    if (c.instance.contains("path") == c.instance.contains("generator")) {
      throw ConfigError("instance needs exactly one of 'path' and 'generator'");
    }
  } else if (!c.instance.empty()) {
    throw ConfigError("experiment '" + c.experiment + "' builds its own instance; drop 'instance'");
  }
  if (c.eta > 0.0 && (c.experiment == "robust" || c.experiment == "lowerbound" || c.experiment == "prop2")) {
    throw ConfigError("experiment '" + c.experiment + "' needs a noiseless oracle");
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"experiment", experiment}, {"k", k},         {"eta", eta},
                   {"delta", delta},           {"trials", trials}, {"seed", seed},
                   {"resample", resample},     {"class", hypothesis_class},
                   {"out", out},               {"record_timing", record_timing},
                   {"threads", threads}};
  if (!instance.empty()) j["instance"] = instance;
  return j;
}

ExperimentConfig load_config(const std::string& path) { return ExperimentConfig::from_json(read_json_file(path)); }

std::uint64_t config_hash(const ExperimentConfig& config) {
  // Output location and threading do not change results.
  nlohmann::json j = config.to_json();
  j.erase("out");
  j.erase("threads");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

TabularInstance<double> uniform_gap_instance(Index n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("uniform-gaps needs n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<Point> points;
  UtilityTable<double> util(n, 2);
  for (Index i = 0; i < n; ++i) {
    points.push_back({"x" + std::to_string(i), static_cast<double>(i)});
    const double gap = 1.0 - unit(rng);  // (0, 1]
    const int y = coin(rng) ? 1 : 0;
    util(i, y) = gap;
    util(i, 1 - y) = 0.0;
  }
  return build_instance<double>(std::move(points), Vector<double>::Constant(n, 1.0 / static_cast<double>(n)),
                                std::move(util));
}

TabularInstance<double> generate_instance(const nlohmann::json& spec, std::uint64_t seed) {
  const std::string where = "instance";
  check_keys(spec, {"generator", "n", "seed", "k"}, where);
  const auto name = get_as<std::string>(spec, "generator", where);
  if (name == "uniform-gaps") {
    if (!spec.contains("n")) throw ConfigError("uniform-gaps needs 'n'");
    if (spec.contains("seed")) seed = get_as<std::uint64_t>(spec, "seed", where);
    return uniform_gap_instance(get_as<int>(spec, "n", where), seed);
  }
  const int k = spec.contains("k") ? get_as<int>(spec, "k", where) : (name == "prop2" ? 16 : 2);
  if (name == "theorem2") return theorem2_instance(k).u1.cast<double>();
  if (name == "prop2") return prop2_instance(k).instance.cast<double>();
  throw ConfigError("unknown generator '" + name + "'");
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kSweepHeader << "\n";
  for (const auto& r : records) {
    char wall[64];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
    out << r.k << "," << r.trial << "," << format_double(r.excess_risk) << "," << format_double(r.est_error) << ","
        << r.queries << "," << wall << "\n";
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw ConfigError(std::string("CSV header must be exactly '") + kSweepHeader + "'");
  }
  std::vector<SweepRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ConfigError("CSV row " + std::to_string(row) + " needs 6 fields");
    try {
      SweepRecord r;
      r.k = std::stoi(cells[0]);
      r.trial = std::stoi(cells[1]);
      r.excess_risk = std::stod(cells[2]);
      r.est_error = std::stod(cells[3]);
      r.queries = std::stoull(cells[4]);
      r.wall_ms = std::stod(cells[5]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw ConfigError("CSV row " + std::to_string(row) + " is malformed");
    }
  }
  return out;
}

std::vector<SweepRecord> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_sweep_csv(in);
}

RateFit fit_loglog(const std::vector<std::pair<double, double>>& xy) {
  RateFit fit;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, y] : xy) {
    if (x > 0.0 && y > 0.0) pts.emplace_back(std::log(x), std::log(y));
  }
  fit.points = pts.size();
  if (pts.size() < 3) {
    fit.message = "rate undefined: need at least 3 k values with nonzero mean error, have " +
                  std::to_string(pts.size());
    return fit;
  }
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) {
    fit.message = "rate undefined: all k values coincide";
    return fit;
  }
  fit.defined = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [x, y] : pts) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(pts.size()));
  fit.message = "slope " + format_double(fit.slope);
  return fit;
}

RateFit fit_rate(const std::vector<SweepRecord>& records) {
  std::map<int, std::pair<double, int>> acc;
  for (const auto& r : records) {
    acc[r.k].first += r.est_error;
    acc[r.k].second += 1;
  }
  std::vector<std::pair<double, double>> xy;
  for (const auto& [k, s] : acc) xy.emplace_back(static_cast<double>(k), s.first / s.second);
  return fit_loglog(xy);
}

RunResult run_experiment(const ExperimentConfig& config) {
  RunResult res;
  res.manifest["ledger"] = ledger_to_json(QueryLedger{});
  if (config.experiment == "sweep-k") {
    run_sweep(config, res, false);
  } else if (config.experiment == "comptron-run") {
    run_sweep(config, res, true);
  } else if (config.experiment == "lowerbound") {
    run_lowerbound(config, res);
  } else if (config.experiment == "prop2") {
    run_prop2(config, res);
  } else if (config.experiment == "robust") {
    run_robust(config, res);
  } else if (config.experiment == "bound-audit") {
    run_bound_audit(config, res);
  } else {
    throw ConfigError("unknown experiment '" + config.experiment + "'");
  }

  res.manifest["experiment"] = config.experiment;
  res.manifest["config"] = config.to_json();
  res.manifest["config_hash"] = hex64(config_hash(config));
  res.manifest["version"] = kVersion;
  res.manifest["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION);
  res.manifest["records"] = res.records.size();
  res.manifest["warnings"] = res.warnings;
  res.manifest["failures"] = res.failures;
  return res;
}

RunResult run(const ExperimentConfig& config) {
  RunResult res = run_experiment(config);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw std::runtime_error("cannot create '" + config.out + "': " + ec.message());
  const fs::path dir(config.out);

  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  res.manifest["created"] = stamp;

  if (!res.records.empty()) {
    std::ofstream csv(dir / "records.csv");
    if (!csv) throw std::runtime_error("cannot write records.csv");
    write_sweep_csv(csv, res.records);
  }
  std::ofstream details(dir / (config.experiment + ".json"));
  details << res.details.dump(2) << "\n";
  std::ofstream manifest(dir / "manifest.json");
  manifest << res.manifest.dump(2) << "\n";
  if (!details || !manifest) throw std::runtime_error("cannot write outputs under '" + config.out + "'");
  return res;
}

}  // namespace elicit
