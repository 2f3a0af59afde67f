#include "gsqc/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gsqc/analysis.hpp"
#include "gsqc/builders.hpp"
#include "gsqc/circuit.hpp"
#include "gsqc/eigensolver.hpp"
#include "gsqc/manybody.hpp"
#include "gsqc/oracle.hpp"
#include "gsqc/teleport.hpp"

namespace gsqc {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  cfg.text = text;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (cfg.kv.count(key))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key \"" + key + "\"");
    cfg.kv[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  Config cfg = parse(buf.str());
  cfg.origin = path;
  return cfg;
}

std::string Config::str(const std::string& key,
                        const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("config is missing key \"" + key + "\"");
  return it->second;
}

double Config::num(const std::string& key, double fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key \"" + key + "\" is not a number: " +
                      it->second);
  }
}

long Config::integer(const std::string& key, long fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    size_t used = 0;
    const long v = std::stol(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key \"" + key + "\" is not an integer: " +
                      it->second);
  }
}

bool Config::flag(const std::string& key, bool fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key \"" + key + "\" is not a boolean: " + v);
}

std::vector<double> Config::num_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::vector<double> out;
  for (const std::string& tok : split(it->second, ',')) {
    if (tok.empty())
      throw ConfigError("config key \"" + key + "\" has an empty element");
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("config key \"" + key + "\" element is not a number: " +
                        tok);
    }
  }
  return out;
}

std::vector<int> Config::int_list(const std::string& key,
                                  const std::vector<int>& fallback) const {
  std::vector<int> out;
  std::vector<double> d;
  d = num_list(key, {});
  if (d.empty() && !has(key)) return fallback;
  for (double v : d) {
    if (v != std::floor(v))
      throw ConfigError("config key \"" + key + "\" needs integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  };
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += field(cells[i]);
    }
    out += '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Assertions {
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

json gap_scan_json(const GapScan& scan) {
  json rows = json::array();
  for (const GapScanRow& r : scan.rows) {
    rows.push_back({{"parameter", r.parameter},
                    {"e0", r.e0},
                    {"e1", r.e1},
                    {"e2", r.e2},
                    {"splitting", r.splitting},
                    {"gap", r.gap},
                    {"reference", r.reference},
                    {"converged", r.converged}});
  }
  json j{{"kind", scan.kind}, {"rows", rows}};
  if (scan.has_slope) j["slope"] = scan.slope;
  return j;
}

std::vector<std::vector<std::string>> gap_scan_cells(const GapScan& scan) {
  std::vector<std::vector<std::string>> cells;
  for (const GapScanRow& r : scan.rows)
    cells.push_back({format_double(r.parameter), format_double(r.e0),
                     format_double(r.e1), format_double(r.e2),
                     format_double(r.splitting), format_double(r.gap),
                     format_double(r.reference), r.converged ? "1" : "0"});
  return cells;
}

std::string two_column(const GapScan& scan, bool use_gap) {
  std::string out;
  for (const GapScanRow& r : scan.rows) {
    out += format_double(r.parameter);
    out += ' ';
    out += format_double(use_gap ? r.gap : r.splitting);
    out += '\n';
  }
  return out;
}

std::vector<Matrix2> gates_from_spec(const std::string& spec, int n,
                                     std::uint64_t seed) {
  if (spec == "identity")
    return std::vector<Matrix2>(n, GateLibrary::identity());
  if (spec == "random") {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<Matrix2> gates;
    for (int i = 0; i < n; ++i) gates.push_back(random_unitary(rng));
    return gates;
  }
  std::vector<Matrix2> gates;
  for (const std::string& tok : split(spec, ',')) {
    auto m = GateLibrary::resolve(tok);
    if (!m) throw ConfigError("unknown gate name in unitaries: " + tok);
    gates.push_back(*m);
  }
  if (static_cast<int>(gates.size()) != n)
    throw ConfigError("unitaries list length disagrees with n");
  return gates;
}

struct Experiment {
  const Config& cfg;
  std::string out_dir;
  Assertions asserts;
  std::vector<std::string> artifacts;
  json report;

  void artifact(const std::string& name, const std::string& content) {
    write_text_file(out_dir + "/" + name, content);
    artifacts.push_back(name);
  }
};

void run_gap_scan(Experiment& ex) {
  const std::vector<int> ns = ex.cfg.int_list("ns", {4, 8, 16, 32, 64});
  const double delta = ex.cfg.num("delta", 0.0);
  const double eps = ex.cfg.num("epsilon", kDefaultEpsilon);
  SolverOptions solver;
  solver.seed = static_cast<std::uint64_t>(ex.cfg.integer("seed", 12345));

  const GapScan scan = standard_gap_scan(ns, delta, eps, solver);
  for (const GapScanRow& r : scan.rows) {
    ex.asserts.check(r.converged, "solver did not converge at n = " +
                                      format_double(r.parameter));
    if (delta == 0.0)
      ex.asserts.check(std::abs(r.gap - r.reference) <= 1e-8 * r.reference,
                       "gap off the closed form at n = " +
                           format_double(r.parameter));
    else
      ex.asserts.check(std::abs(r.splitting - r.reference) <=
                           0.01 * r.reference,
                       "splitting off first order at n = " +
                           format_double(r.parameter));
  }
  if (delta == 0.0) {
    ex.asserts.check(scan.has_slope && std::abs(scan.slope + 2.0) <= 0.05,
                     "log-log slope outside -2 +- 0.05");
  }

  ex.report = gap_scan_json(scan);
  ex.artifact("gap_scan.csv",
              csv_table({"parameter", "e0", "e1", "e2", "splitting", "gap",
                         "reference", "converged"},
                        gap_scan_cells(scan)));
  ex.artifact("gap_scan.dat", two_column(scan, delta == 0.0));
  ex.artifact("gap_scan.json", ex.report.dump(2) + "\n");
}

void run_nonunitary(Experiment& ex) {
  const int n = static_cast<int>(ex.cfg.integer("n", 16));
  const double eps = ex.cfg.num("epsilon", kDefaultEpsilon);
  const std::string shape = ex.cfg.str("profile", "geometric");

  std::vector<double> lambda;
  if (shape == "geometric")
    lambda = geometric_lambda(n + 1, ex.cfg.num("ratio", 2.0));
  else if (shape == "centered")
    lambda = centered_lambda(n + 1, ex.cfg.num("boost", 4.0));
  else if (shape == "uniform")
    lambda = std::vector<double>(n + 1, 1.0);
  else
    throw ConfigError("unknown profile shape: " + shape);

  Circuit c;
  c.qubits = 1;
  c.input = {0};
  for (int k = 0; k < n; ++k)
    c.steps.push_back({{make_unitary(GateLibrary::identity(), "I"), {0}}});

  const ChainProfile profile = profile_from_lambda(lambda);
  const NonunitaryReport rep = nonunitary_report(c, profile, eps);

  ex.asserts.check(rep.converged, "solver did not converge");
  ex.asserts.check(rep.e0 >= -1e-10, "operator is not PSD at zero bias");
  ex.asserts.check(rep.kernel_residual <= 1e-12,
                   "target state is not annihilated");
  ex.asserts.check(rep.max_weight_error <= 1e-8,
                   "row weights disagree with the amplitude profile");
  if (shape == "centered") {
    const NonunitaryReport uni = nonunitary_report(
        c, profile_from_lambda(std::vector<double>(n + 1, 1.0)), eps);
    ex.asserts.check(rep.gap > uni.gap,
                     "centered profile gap does not beat uniform");
    ex.report["uniform_gap"] = uni.gap;
  }

  ex.report["profile"] = {{"lambda", rep.profile.lambda},
                          {"v", rep.profile.v},
                          {"t", rep.profile.t},
                          {"scale", rep.profile.scale}};
  ex.report["e0"] = rep.e0;
  ex.report["gap"] = rep.gap;
  ex.report["kernel_residual"] = rep.kernel_residual;
  ex.report["weights"] = rep.weights;
  ex.report["weight_targets"] = rep.weight_targets;
  ex.report["max_weight_error"] = rep.max_weight_error;

  std::vector<std::vector<std::string>> cells;
  std::string dat;
  for (size_t i = 0; i < rep.weights.size(); ++i) {
    cells.push_back({std::to_string(i), format_double(rep.weights[i]),
                     format_double(rep.weight_targets[i])});
    dat += std::to_string(i) + " " + format_double(rep.weights[i]) + "\n";
  }
  ex.artifact("weights.csv", csv_table({"row", "weight", "target"}, cells));
  ex.artifact("weights.dat", dat);
  ex.artifact("nonunitary.json", ex.report.dump(2) + "\n");
}

void run_teleport(Experiment& ex) {
  const int n = static_cast<int>(ex.cfg.integer("n", 3));
  const double lambda = ex.cfg.num("lambda", 4.0);
  TeleportOptions opt;
  opt.epsilon = ex.cfg.num("epsilon", kDefaultEpsilon);
  opt.delta_mag = ex.cfg.num("delta", kDefaultDelta);
  opt.seed = static_cast<std::uint64_t>(ex.cfg.integer("seed", 12345));
  opt.skip_plain_ground = !ex.cfg.flag("plain_ground", true);
  if (ex.cfg.flag("budget_override", false))
    opt.max_dim = static_cast<Index>(
        ex.cfg.num("max_dim", 2e9));
  const std::vector<Matrix2> gates =
      gates_from_spec(ex.cfg.str("unitaries", "random"), n, opt.seed);

  const TeleportReport rep = teleport_run(gates, lambda, opt);
  ex.asserts.check(rep.converged, "solver did not converge");
  ex.asserts.check(rep.p >= rep.p_min - 1e-12,
                   "success probability below the bound");
  ex.asserts.check(rep.conditional_fidelity >= 1.0 - 1e-6,
                   "conditional output fidelity below 1 - 1e-6");

  GapScan sweep;
  const std::vector<double> lambdas = ex.cfg.num_list("lambdas", {2, 4, 8});
  if (!lambdas.empty()) {
    sweep = teleport_gap_scan(gates, lambdas, opt);
    for (const GapScanRow& r : sweep.rows) {
      ex.asserts.check(r.converged, "gap probe failed at lambda = " +
                                        format_double(r.parameter));
      ex.asserts.check(r.gap <= 3.0 * r.reference && r.gap >= r.reference / 3.0,
                       "gap strays beyond factor 3 at lambda = " +
                           format_double(r.parameter));
    }
  }

  ex.report = {{"n_gates", rep.n_gates},
               {"lambda", rep.lambda},
               {"p", rep.p},
               {"p_min", rep.p_min},
               {"conditional_fidelity", rep.conditional_fidelity},
               {"comp_energy", rep.comp_energy},
               {"kernel_residual", rep.kernel_residual},
               {"ground_energy", rep.ground_energy},
               {"ground_success", rep.ground_success},
               {"ground_is_computational", rep.ground_is_computational},
               {"gap", rep.gap},
               {"gap_estimate", rep.gap_estimate},
               {"kernel_levels_seen", rep.kernel_levels_seen},
               {"matvecs", rep.matvecs},
               {"converged", rep.converged}};
  if (!sweep.rows.empty()) {
    ex.artifact("teleport_sweep.csv",
                csv_table({"lambda", "e0", "e1", "e2", "splitting", "gap",
                           "reference", "converged"},
                          gap_scan_cells(sweep)));
    ex.artifact("teleport_sweep.dat", two_column(sweep, true));
    ex.report["sweep"] = gap_scan_json(sweep);
  }
  ex.artifact("teleport.json", ex.report.dump(2) + "\n");
}

void run_manybody(Experiment& ex) {
  const int n = static_cast<int>(ex.cfg.integer("n", 4));
  const double eps = ex.cfg.num("epsilon", kDefaultEpsilon);
  const double delta = ex.cfg.num("delta", -kDefaultDelta);
  const int trials = static_cast<int>(ex.cfg.integer("trials", 3));
  std::mt19937_64 rng(static_cast<std::uint64_t>(ex.cfg.integer("seed", 12345)));

  double worst_mismatch = 0.0, worst_leakage = 0.0;
  for (int t = 0; t < trials; ++t) {
    Circuit c;
    c.qubits = 1;
    c.input = {0};
    for (int k = 0; k < n; ++k)
      c.steps.push_back({{make_unitary(random_unitary(rng)), {0}}});

    const ManybodyOperator mb = build_manybody_single_qubit(c, delta, eps);
    const MeaningfulProjection proj = meaningful_projection(mb.op, mb.basis);
    const BuiltOperator std_op = build_single_qubit(c, delta, eps);
    const double mismatch =
        (proj.reduced - std_op.op.dense()).cwiseAbs().maxCoeff();
    worst_mismatch = std::max(worst_mismatch, mismatch);
    worst_leakage = std::max(worst_leakage, proj.leakage);
  }
  ex.asserts.check(worst_mismatch <= 1e-12,
                   "occupation restriction disagrees with the ladder matrix");
  ex.asserts.check(worst_leakage <= 1e-12,
                   "meaningful sector is not invariant");

  // Idle dominance at the uniform history state.
  Circuit c;
  c.qubits = 1;
  c.input = {0};
  for (int k = 0; k < n; ++k)
    c.steps.push_back({{make_unitary(GateLibrary::identity(), "I"), {0}}});
  const ManybodyOperator mb = build_manybody_single_qubit(c, delta, eps);
  const Vector lifted = embed_meaningful(mimic_state(evolve(c)), mb.basis);
  const IdleDominance dom = idle_dominance(lifted, mb.basis);
  ex.asserts.check(std::abs(dom.min_ratio - n) <= 1e-9,
                   "idle dominance ratio is not N at the uniform state");
  ex.asserts.check(std::abs(dom.total_nonidle - 1.0) <= 1e-12,
                   "active-electron weight is not 1");

  ex.report = {{"n", n},
               {"trials", trials},
               {"worst_mismatch", worst_mismatch},
               {"worst_leakage", worst_leakage},
               {"idle_min_ratio", dom.min_ratio},
               {"total_nonidle", dom.total_nonidle}};
  ex.artifact("manybody.json", ex.report.dump(2) + "\n");
}

void run_simulate(Experiment& ex) {
  std::string path = ex.cfg.require("circuit");
  const double mag = ex.cfg.num("delta", kDefaultDelta);
  const double eps = ex.cfg.num("epsilon", kDefaultEpsilon);
  // Relative circuit paths resolve against the config file first.
  if (!ex.cfg.origin.empty() && std::filesystem::path(path).is_relative()) {
    const auto anchored =
        std::filesystem::path(ex.cfg.origin).parent_path() / path;
    if (std::filesystem::exists(anchored)) path = anchored.string();
  }
  Circuit c;
  try {
    c = parse_circuit_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  BuiltOperator built = build_multi_qubit(c, input_deltas(c, mag), eps);
  SolverOptions solver;
  solver.k = 1;
  solver.seed = static_cast<std::uint64_t>(ex.cfg.integer("seed", 12345));
  const SpectrumResult sr = lowest_eigenpairs(built.op, solver);
  ex.asserts.check(sr.converged, "solver did not converge");

  const EvolutionTrace trace = evolve(c);
  const MimicExtract mex =
      extract_mimic(sr.eigenvectors.col(0), built.layout, trace);

  const std::string expect = ex.cfg.str("expect_output", "");
  if (!expect.empty()) {
    if (static_cast<int>(expect.size()) != c.qubits)
      throw ConfigError("expect_output length must match the qubit count");
    Index idx = 0;
    for (char ch : expect) {
      if (ch != '0' && ch != '1')
        throw ConfigError("expect_output must be a bit string");
      idx = idx * 2 + (ch - '0');
    }
    const Vector& last = mex.blocks.back();
    const double fid =
        last.norm() > 0.0 ? std::abs(last[idx]) / last.norm() : 0.0;
    const double min_fid = ex.cfg.num("min_fidelity", 1.0 - 1e-8);
    ex.asserts.check(fid >= min_fid,
                     "final-row state misses the expected output");
    ex.report["final_row_fidelity"] = fid;
  }

  ex.report["qubits"] = c.qubits;
  ex.report["steps"] = c.n_steps();
  ex.report["e0"] = sr.eigenvalues[0];
  ex.report["weights"] = mex.weights;
  {
    json fids = json::array();
    for (double f : mex.fidelities)
      fids.push_back(std::isnan(f) ? json() : json(f));
    ex.report["fidelities"] = fids;
  }
  ex.report["aligned_weight"] = mex.aligned_weight;
  ex.report["final_row_weight"] = mex.final_row_weight;

  std::vector<std::vector<std::string>> cells;
  for (size_t i = 0; i < mex.weights.size(); ++i)
    cells.push_back({std::to_string(i), format_double(mex.weights[i]),
                     format_double(mex.fidelities[i])});
  ex.artifact("rows.csv", csv_table({"row", "weight", "fidelity"}, cells));
  ex.artifact("simulate.json", ex.report.dump(2) + "\n");
}

}  // namespace

RunOutcome run_experiment_config(const Config& cfg,
                                 const std::string& out_dir_override) {
  RunOutcome outcome;
  Experiment ex{cfg, "", {}, {}, json::object()};
  try {
    const std::string kind = cfg.require("experiment");
    ex.out_dir = !out_dir_override.empty()
                     ? out_dir_override
                     : cfg.str("out", "runs/" + kind);

    if (kind == "gap-scan")
      run_gap_scan(ex);
    else if (kind == "nonunitary")
      run_nonunitary(ex);
    else if (kind == "teleport")
      run_teleport(ex);
    else if (kind == "manybody")
      run_manybody(ex);
    else if (kind == "simulate")
      run_simulate(ex);
    else
      throw ConfigError("unknown experiment kind: " + kind);

    json manifest{{"experiment", kind},
                  {"config_hash", fnv1a_hex(cfg.text)},
                  {"seed", cfg.integer("seed", 12345)},
                  {"versions",
                   {{"gsqc", kVersion},
                    {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                  std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)}}},
                  {"artifacts", ex.artifacts},
                  {"failures", ex.asserts.failures}};
    write_text_file(ex.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    ex.artifacts.push_back("manifest.json");
  } catch (const ConfigError& e) {
    outcome.exit_code = 2;
    outcome.summary = e.what();
    return outcome;
  } catch (const ResourceError& e) {
    outcome.exit_code = 3;
    outcome.summary = e.what();
    return outcome;
  } catch (const Error& e) {
    outcome.exit_code = 1;
    outcome.summary = e.what();
    return outcome;
  }

  outcome.failures = ex.asserts.failures;
  outcome.artifacts = ex.artifacts;
  outcome.exit_code = ex.asserts.failures.empty() ? 0 : 1;
  outcome.summary = ex.asserts.failures.empty()
                        ? "all assertions passed"
                        : std::to_string(ex.asserts.failures.size()) +
                              " assertion(s) failed";
  return outcome;
}

RunOutcome run_experiment(const std::string& config_path) {
  Config cfg;
  try {
    cfg = Config::parse_file(config_path);
  } catch (const ConfigError& e) {
    RunOutcome out;
    out.exit_code = 2;
    out.summary = e.what();
    return out;
  }
  return run_experiment_config(cfg);
}

}  // namespace gsqc
