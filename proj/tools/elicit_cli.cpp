// Command-line front end for the elicitation experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "elicit/adversary.hpp"
#include "elicit/errors.hpp"
#include "elicit/experiment.hpp"
#include "elicit/instance_io.hpp"
#include "elicit/report_io.hpp"
#include "elicit/robust.hpp"

namespace {

using namespace elicit;

int cmd_gen_instance(const std::string& generator, int n, std::optional<int> k, std::uint64_t seed,
                     const std::string& out) {
  nlohmann::json spec{{"generator", generator}};
  if (generator == "uniform-gaps") spec["n"] = n;
  if (k) spec["k"] = *k;
  const auto inst = generate_instance(spec, seed);
  if (out.empty() || out == "-") {
    std::cout << instance_to_json(inst).dump(2) << "\n";
  } else {
    save_instance(out, inst);
  }
  return kExitOk;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::string> out,
            std::optional<int> trials, std::optional<int> threads) {
  nlohmann::json j = read_json_file(config_path);
  if (seed) j["seed"] = *seed;
  if (out) j["out"] = *out;
  if (trials) j["trials"] = *trials;
  if (threads) j["threads"] = *threads;
  const auto config = ExperimentConfig::from_json(j);
  const auto res = run(config);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& line : res.summary) std::cout << line << "\n";
  std::cout << "wrote " << config.out << "\n";
  return res.failures == 0 ? kExitOk : kExitFailure;
}

int cmd_fit_rate(const std::string& csv) {
  const auto fit = fit_rate(read_sweep_csv(csv));
  if (!fit.defined) {
    std::cout << fit.message << "\n";
    return kExitOk;
  }
  std::printf("slope %.6f intercept %.6f residual %.6g points %zu\n", fit.slope, fit.intercept, fit.residual,
              fit.points);
  return kExitOk;
}

int cmd_adversary(int k, const std::string& out) {
  const auto pair = theorem2_instance(k);
  namespace fs = std::filesystem;
  fs::create_directories(out);
  const fs::path dir(out);
  std::ofstream(dir / "u1.json") << instance_to_json(pair.u1).dump(2) << "\n";
  std::ofstream(dir / "u2.json") << instance_to_json(pair.u2).dump(2) << "\n";
  std::ofstream csv(dir / "risks.csv");
  csv << "hypothesis,utility,excess_risk\n";
  for (Index h = 0; h < pair.cls.size(); ++h) {
    std::string label;
    for (Index i = 0; i < pair.cls[h].size(); ++i) label += std::to_string(pair.cls[h](i));
    for (Index j = 0; j < 2; ++j) csv << label << ",u" << (j + 1) << "," << pair.analytic_risk(h, j).str() << "\n";
  }
  if (!csv) throw std::runtime_error("cannot write risks.csv");
  const auto d = indistinguishable(pair.u1, pair.u2, k);
  std::cout << "risks " << pair.analytic_risk(0, 0).str() << " and " << pair.analytic_risk(1, 1).str()
            << " indistinguishable: " << (d.indistinguishable ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_robust(const std::string& instance_path, int k, const std::string& cls_name) {
  const auto inst = load_instance(instance_path);
  const auto cls = cls_name == "threshold" ? induce_threshold_class(inst) : HypothesisClass::all_dichotomies(inst.size());
  QueryLedger ledger;
  const auto poly = build_polytope(inst, k, &ledger);
  const auto policy = solve_probust(inst, poly, cls);
  const auto moduli = local_modulus_exact<double>(inst.weights(), inst.labels(), poly, cls);
  std::cout << robust_to_json(policy, moduli, ledger.total()).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison-oracle utility elicitation experiments"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-instance", "Write a generated instance as JSON");
  std::string generator = "uniform-gaps";
  int gen_n = 8;
  std::optional<int> gen_k;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--generator", generator, "uniform-gaps | theorem2 | prop2")
      ->check(CLI::IsMember({"uniform-gaps", "theorem2", "prop2"}));
  gen->add_option("--n", gen_n, "Support size for uniform-gaps");
  gen->add_option("--k", gen_k, "Oracle order for theorem2 / prop2");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  std::string config_path;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_out;
  std::optional<int> run_trials;
  std::optional<int> run_threads;
  run_cmd->add_option("--config", config_path, "Experiment JSON")->required();
  run_cmd->add_option("--seed", run_seed, "Override the master seed");
  run_cmd->add_option("--out", run_out, "Override the output directory");
  run_cmd->add_option("--trials", run_trials, "Override the trial count");
  run_cmd->add_option("--threads", run_threads, "Override the worker count");

  auto* fit = app.add_subcommand("fit-rate", "Log-log slope of mean est_error against k");
  std::string csv_path;
  fit->add_option("csv", csv_path, "Sweep CSV")->required();

  auto* adv = app.add_subcommand("adversary", "Write the two-point hard instance pair and its risk table");
  int adv_k = 2;
  std::string adv_out = "adversary";
  adv->add_option("--k", adv_k, "Oracle order");
  adv->add_option("--out", adv_out, "Output directory");

  auto* rob = app.add_subcommand("robust", "Solve the robust game for an instance");
  std::string rob_instance;
  int rob_k = 2;
  std::string rob_class = "all";
  rob->add_option("--instance", rob_instance, "Instance JSON")->required();
  rob->add_option("--k", rob_k, "Oracle order");
  rob->add_option("--class", rob_class, "all | threshold")->check(CLI::IsMember({"all", "threshold"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) return cmd_gen_instance(generator, gen_n, gen_k, gen_seed, gen_out);
    if (*run_cmd) return cmd_run(config_path, run_seed, run_out, run_trials, run_threads);
    if (*fit) return cmd_fit_rate(csv_path);
    if (*adv) return cmd_adversary(adv_k, adv_out);
    if (*rob) return cmd_robust(rob_instance, rob_k, rob_class);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
