#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "gsqc/report.hpp"

namespace {

gsqc::Config make_config(const std::map<std::string, std::string>& kv) {
  gsqc::Config cfg;
  cfg.kv = kv;
  for (const auto& [k, v] : kv) cfg.text += k + " = " + v + "\n";
  return cfg;
}

int finish(const gsqc::RunOutcome& out, const std::string& out_dir) {
  for (const std::string& f : out.failures) std::cerr << "FAIL: " << f << "\n";
  if (out.exit_code == 0 || out.exit_code == 1) {
    for (const std::string& a : out.artifacts)
      std::cout << "wrote " << out_dir << "/" << a << "\n";
  }
  if (out.exit_code >= 2)
    std::cerr << "error: " << out.summary << "\n";
  else
    std::cout << out.summary << "\n";
  return out.exit_code;
}

// Shared flow: assemble a key/value config from the parsed flags and hand it
// to the experiment runner so the CLI and config files behave identically.
struct Collected {
  std::map<std::string, std::string> kv;
  std::string out_dir;

  void put(const std::string& key, const std::string& value) {
    if (!value.empty()) kv[key] = value;
  }

  int run(const std::string& kind) {
    kv["experiment"] = kind;
    const std::string dir = out_dir.empty() ? "runs/" + kind : out_dir;
    return finish(gsqc::run_experiment_config(make_config(kv), dir), dir);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ground-state gate-array toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "solve a program's ground state and report row content");
  std::string sim_circuit, sim_delta, sim_eps, sim_seed, sim_expect, sim_out;
  sim->add_option("circuit", sim_circuit, "program file")->required();
  sim->add_option("--delta", sim_delta, "bias magnitude (default 1e-3)");
  sim->add_option("--epsilon", sim_eps, "energy unit (default 1)");
  sim->add_option("--seed", sim_seed, "solver seed (default 12345)");
  sim->add_option("--expect", sim_expect,
                  "bit string the final row must carry");
  sim->add_option("--out", sim_out, "artifact directory");

  // gap-scan
  auto* gap = app.add_subcommand(
      "gap-scan", "gap or splitting of identity ladders across sizes");
  std::string gap_ns, gap_delta, gap_eps, gap_seed, gap_out;
  gap->add_option("--ns", gap_ns, "comma list of lengths (default 4,8,16,32,64)");
  gap->add_option("--delta", gap_delta, "bias; 0 scans the gap, else the splitting");
  gap->add_option("--epsilon", gap_eps, "energy unit (default 1)");
  gap->add_option("--seed", gap_seed, "solver seed (default 12345)");
  gap->add_option("--out", gap_out, "artifact directory");

  // nonunitary
  auto* non = app.add_subcommand(
      "nonunitary", "tailored row-amplitude chain diagnostics");
  std::string non_n, non_profile, non_ratio, non_boost, non_eps, non_out;
  non->add_option("--n", non_n, "steps (default 16)");
  non->add_option("--profile", non_profile, "geometric | centered | uniform");
  non->add_option("--ratio", non_ratio, "geometric ratio (default 2)");
  non->add_option("--boost", non_boost, "centered peak height (default 4)");
  non->add_option("--epsilon", non_eps, "energy unit (default 1)");
  non->add_option("--out", non_out, "artifact directory");

  // teleport
  auto* tel = app.add_subcommand(
      "teleport", "parallel gate machine: success weight, fidelity, gap");
  std::string tel_n, tel_lambda, tel_lambdas, tel_delta, tel_seed,
      tel_unitaries, tel_maxdim, tel_out;
  bool tel_budget = false;
  tel->add_option("--n", tel_n, "gate count (default 3)");
  tel->add_option("--lambda", tel_lambda, "measurement strength (default 4)");
  tel->add_option("--lambdas", tel_lambdas,
                  "comma list for the gap sweep (default 2,4,8)");
  tel->add_option("--delta", tel_delta, "bias magnitude (default 1e-3)");
  tel->add_option("--seed", tel_seed, "gate/solver seed (default 12345)");
  tel->add_option("--unitaries", tel_unitaries,
                  "random | identity | comma list of gate names");
  tel->add_flag("--budget-override", tel_budget,
                "lift the default dimension budget");
  tel->add_option("--max-dim", tel_maxdim, "budget when overridden");
  tel->add_option("--out", tel_out, "artifact directory");

  // manybody
  auto* mb = app.add_subcommand(
      "manybody", "occupation-form cross-checks against the ladder matrix");
  std::string mb_n, mb_trials, mb_delta, mb_seed, mb_out;
  mb->add_option("--n", mb_n, "steps (default 4)");
  mb->add_option("--trials", mb_trials, "random programs to check (default 3)");
  mb->add_option("--delta", mb_delta, "bias (default -1e-3)");
  mb->add_option("--seed", mb_seed, "gate seed (default 12345)");
  mb->add_option("--out", mb_out, "artifact directory");

  // run
  auto* run = app.add_subcommand("run", "execute an experiment config file");
  std::string run_config, run_out;
  run->add_option("config", run_config, "key = value experiment file")
      ->required();
  run->add_option("--out", run_out, "artifact directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Collected c;
  if (sim->parsed()) {
    c.kv["circuit"] = sim_circuit;
    c.put("delta", sim_delta);
    c.put("epsilon", sim_eps);
    c.put("seed", sim_seed);
    c.put("expect_output", sim_expect);
    c.out_dir = sim_out;
    return c.run("simulate");
  }
  if (gap->parsed()) {
    c.put("ns", gap_ns);
    c.put("delta", gap_delta);
    c.put("epsilon", gap_eps);
    c.put("seed", gap_seed);
    c.out_dir = gap_out;
    return c.run("gap-scan");
  }
  if (non->parsed()) {
    c.put("n", non_n);
    c.put("profile", non_profile);
    c.put("ratio", non_ratio);
    c.put("boost", non_boost);
    c.put("epsilon", non_eps);
    c.out_dir = non_out;
    return c.run("nonunitary");
  }
  if (tel->parsed()) {
    c.put("n", tel_n);
    c.put("lambda", tel_lambda);
    c.put("lambdas", tel_lambdas);
    c.put("delta", tel_delta);
    c.put("seed", tel_seed);
    c.put("unitaries", tel_unitaries);
    if (tel_budget) c.kv["budget_override"] = "true";
    c.put("max_dim", tel_maxdim);
    c.out_dir = tel_out;
    return c.run("teleport");
  }
  if (mb->parsed()) {
    c.put("n", mb_n);
    c.put("trials", mb_trials);
    c.put("delta", mb_delta);
    c.put("seed", mb_seed);
    c.out_dir = mb_out;
    return c.run("manybody");
  }
  if (run->parsed()) {
    gsqc::Config cfg;
    try {
      cfg = gsqc::Config::parse_file(run_config);
    } catch (const gsqc::ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    const std::string dir =
        !run_out.empty() ? run_out
                         : cfg.str("out", "runs/" + cfg.str("experiment", "x"));
    return finish(gsqc::run_experiment_config(cfg, dir), dir);
  }
  return 2;
}
