// Command-line front end: design mechanisms under a leakage budget, analyze
// existing mechanisms, enumerate trade-off curves, and regenerate the
// experiment tables.
//
// Exit codes: 0 success, 2 invalid input, 3 solver numerical failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pml/core.hpp"
#include "pml/experiments.hpp"
#include "pml/feasibility.hpp"
#include "pml/io.hpp"
#include "pml/leakage.hpp"
#include "pml/mechanisms.hpp"
#include "pml/optimizer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string scenario_path;
  std::string mechanism_path;
  std::optional<double> eps;
  std::optional<int> h;
  std::string mode = "safe";
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int trials = 1000;
  std::string out = ".";
  int log_base = 0;  // 0 = nats, 2 = display in bits
  std::string figure;
};

double display(double nats, int log_base) { return log_base == 2 ? nats / std::log(2.0) : nats; }

pml::Mode parse_mode(const std::string& mode) {
  if (mode == "safe") return pml::Mode::kSafe;
  if (mode == "optimal") return pml::Mode::kOptimal;
  throw std::invalid_argument("mode must be 'safe' or 'optimal'");
}

void ensure_out_dir(const std::string& out) {
  if (!fs::exists(out)) fs::create_directories(out);
}

int run_design(const Options& opt) {
  const pml::Scenario scenario = pml::scenario_from_json(pml::load_json_file(opt.scenario_path));
  if (opt.eps.has_value() == opt.h.has_value())
    throw std::invalid_argument("design: provide exactly one of --eps / --h");
  const pml::Mode mode = parse_mode(opt.mode);

  pml::TradeoffPoint point =
      opt.eps ? pml::max_h_for_budget(scenario.prior, scenario.order, *opt.eps, mode, opt.tol)
              : pml::min_epsilon(scenario.prior, scenario.order, *opt.h, mode, opt.tol);

  ensure_out_dir(opt.out);
  const pml::json params = {{"h", point.h},
                            {"min_eps_nats", point.min_eps},
                            {"mode", pml::mode_name(point.mode)}};
  pml::save_json_file(opt.out + "/mechanism.json",
                      pml::mechanism_to_json(point.witness, "design", params));
  pml::save_json_file(opt.out + "/leakage.json",
                      pml::leakage_report_to_json(pml::analyze_leakage(scenario.prior, point.witness)));
  std::cout << "h=" << point.h << " min_eps=" << pml::format_real(display(point.min_eps, opt.log_base))
            << (opt.log_base == 2 ? " bits" : " nats") << " mode=" << pml::mode_name(point.mode)
            << "\n";
  return kExitOk;
}

int run_analyze(const Options& opt) {
  const pml::Scenario scenario = pml::scenario_from_json(pml::load_json_file(opt.scenario_path));
  const pml::Mechanism mech = pml::mechanism_from_json(pml::load_json_file(opt.mechanism_path));
  if (mech.inputs() != scenario.order.inputs() || mech.outputs() != scenario.order.outputs())
    throw std::invalid_argument("analyze: mechanism dimensions do not match scenario");

  const pml::LeakageReport report = pml::analyze_leakage(scenario.prior, mech);
  ensure_out_dir(opt.out);
  pml::save_json_file(opt.out + "/leakage.json", pml::leakage_report_to_json(report));

  std::cout << "worst_case_pml=" << pml::format_real(display(report.worst_case, opt.log_base))
            << " argmax_output=" << report.argmax_output
            << " worst_case_order=" << pml::worst_case_order(mech, scenario.order);
  if (scenario.values)
    std::cout << " worst_case_value=" << pml::format_real(pml::worst_case_value(mech, *scenario.values));
  std::cout << "\n";
  return kExitOk;
}

int run_tradeoff(const Options& opt) {
  const pml::Scenario scenario = pml::scenario_from_json(pml::load_json_file(opt.scenario_path));
  const pml::Mode mode = parse_mode(opt.mode);
  const auto curve = pml::tradeoff_curve(scenario.prior, scenario.order, mode, opt.tol);

  ensure_out_dir(opt.out);
  std::vector<std::string> witness_files;
  bool all_failed = true;
  for (const auto& entry : curve) {
    if (!entry.point) {
      witness_files.emplace_back("");
      continue;
    }
    all_failed = false;
    const std::string name = "witness_h" + std::to_string(entry.h) + ".json";
    const pml::json params = {{"h", entry.h},
                              {"min_eps_nats", entry.point->min_eps},
                              {"mode", pml::mode_name(mode)}};
    pml::save_json_file(opt.out + "/" + name,
                        pml::mechanism_to_json(entry.point->witness, "tradeoff", params));
    witness_files.push_back(name);
  }
  pml::write_text_file(opt.out + "/tradeoff.csv", pml::curve_csv(curve, witness_files));
  std::cout << "wrote " << opt.out << "/tradeoff.csv (" << curve.size() << " points)\n";
  return all_failed ? kExitSolver : kExitOk;
}

int run_reproduce(const Options& opt) {
  ensure_out_dir(opt.out);
  pml::json meta = {{"seed", opt.seed},
                    {"trials", opt.trials},
                    {"tol", opt.tol},
                    {"artifact_version", "1.0.0"},
                    {"figure", opt.figure}};

  if (opt.figure == "fig1") {
    const auto records = pml::fig1_run(opt.trials, opt.seed);
    pml::write_text_file(opt.out + "/fig1.csv", pml::fig1_csv(records));
  } else if (opt.figure == "fig2" || opt.figure == "fig3") {
    const auto records = opt.figure == "fig2" ? pml::fig2_run(opt.tol) : pml::fig3_run(opt.tol);
    for (const auto& r : records)
      if (r.failed) throw pml::SolverError("reproduce " + opt.figure + ": " + r.error);
    pml::write_text_file(opt.out + "/" + opt.figure + ".csv", pml::sweep_csv(records));
  } else {
    throw std::invalid_argument("reproduce: figure must be fig1, fig2 or fig3");
  }
  pml::save_json_file(opt.out + "/" + opt.figure + "_meta.json", meta);
  std::cout << "wrote " << opt.out << "/" << opt.figure << ".csv\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design and analysis of discrete privacy mechanisms under pointwise maximal leakage"};
  app.require_subcommand(1);
  // long-only help so the short option namespace stays free for --h
  app.set_help_flag("--help", "Print help");

  Options opt;
  double eps_arg = 0.0;
  int h_arg = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    cmd->set_help_flag("--help", "Print help");
    if (needs_scenario)
      cmd->add_option("--scenario", opt.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--out", opt.out, "Output directory");
    cmd->add_option("--tol", opt.tol, "Bisection tolerance (nats)");
    cmd->add_option("--log-base", opt.log_base, "Display base for leakage values (2 for bits)")
        ->check(CLI::IsMember({0, 2}));
  };

  CLI::App* design = app.add_subcommand("design", "Design a mechanism for a budget or threshold");
  add_common(design, true);
  auto* eps_opt = design->add_option("--eps", eps_arg, "PML budget in nats");
  auto* h_opt = design->add_option("--h", h_arg, "Worst-case utility order threshold");
  design->add_option("--mode", opt.mode, "safe | optimal")->check(CLI::IsMember({"safe", "optimal"}));

  CLI::App* analyze = app.add_subcommand("analyze", "Leakage report for a mechanism file");
  add_common(analyze, true);
  analyze->add_option("--mechanism", opt.mechanism_path, "Mechanism JSON file")->required();

  CLI::App* tradeoff = app.add_subcommand("tradeoff", "Full privacy-utility trade-off curve");
  add_common(tradeoff, true);
  tradeoff->add_option("--mode", opt.mode, "safe | optimal")->check(CLI::IsMember({"safe", "optimal"}));

  CLI::App* reproduce = app.add_subcommand("reproduce", "Regenerate experiment tables");
  reproduce->add_option("figure", opt.figure, "fig1 | fig2 | fig3")->required();
  add_common(reproduce, false);
  reproduce->add_option("--seed", opt.seed, "Master RNG seed");
  reproduce->add_option("--trials", opt.trials, "Monte Carlo trials per grid point")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (*eps_opt) opt.eps = eps_arg;
  if (*h_opt) opt.h = h_arg;

  try {
    if (design->parsed()) return run_design(opt);
    if (analyze->parsed()) return run_analyze(opt);
    if (tradeoff->parsed()) return run_tradeoff(opt);
    if (reproduce->parsed()) return run_reproduce(opt);
  } catch (const pml::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
