#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsqc/builders.hpp"
#include "gsqc/circuit.hpp"
#include "gsqc/eigensolver.hpp"
#include "gsqc/oracle.hpp"
#include "gsqc/teleport.hpp"
#include "gsqc/types.hpp"

namespace gsqc {

// Row-resolved content of a register-ladder state.  For several registers
// the blocks cover the aligned sector (all electrons on the same row); the
// weight outside that sector is reported separately.
struct MimicExtract {
  std::vector<Vector> blocks;       // per row, length 2^q
  std::vector<double> weights;      // squared norms of the blocks
  std::vector<double> fidelities;   // vs the trace, NaN for empty blocks
  double aligned_weight = 0.0;      // sum of weights
  double final_row_weight = 0.0;    // readout weight (row N)
  int output_row = 0;
};

MimicExtract extract_mimic(const Vector& state, const BasisLayout& layout,
                           const EvolutionTrace& trace);

// One solved point of a parameter sweep.
struct GapScanRow {
  double parameter = 0.0;
  double e0 = 0.0, e1 = 0.0, e2 = 0.0;
  double splitting = 0.0;
  double gap = 0.0;
  double reference = 0.0;
  bool gap_is_upper_bound = false;
  bool converged = false;
};

struct GapScan {
  std::string kind;
  std::vector<GapScanRow> rows;
  double slope = 0.0;       // log(gap) vs log(N+1) least squares
  bool has_slope = false;
};

// Identity-gate ladders of length n for n in ns.  With delta == 0 the
// reference column holds the closed-form gap 2 eps (1 - cos(pi/(n+1))) and a
// log-log slope is fitted; with delta != 0 it holds the first-order
// splitting 2 eps delta/(n+1).
GapScan standard_gap_scan(const std::vector<int>& ns, double delta,
                          double epsilon = kDefaultEpsilon,
                          const SolverOptions& solver = {});

// Tailored-chain diagnostics at zero bias: PSD floor, kernel residual of the
// target state, gap, and ground-state row weights against lambda^2/(N+1).
struct NonunitaryReport {
  ChainProfile profile;
  double e0 = 0.0, e1 = 0.0, e2 = 0.0, gap = 0.0;
  double kernel_residual = 0.0;
  std::vector<double> weights;
  std::vector<double> weight_targets;
  double max_weight_error = 0.0;
  bool converged = false;
};

NonunitaryReport nonunitary_report(const Circuit& c,
                                   const ChainProfile& profile,
                                   double epsilon = kDefaultEpsilon,
                                   const SolverOptions& solver = {});

// Convenience row-amplitude families.
std::vector<double> geometric_lambda(int rows, double ratio);
std::vector<double> centered_lambda(int rows, double boost);

struct TeleportOptions {
  double delta_mag = kDefaultDelta;  // bias for the diagnostic ground solve
  double epsilon = kDefaultEpsilon;
  Index max_dim = 537824;
  std::uint64_t seed = 12345;
  double cg_tol = 1e-5;          // inner linear solves, relative residual
  double rq_tol = 1e-4;          // gap stop: relative Rayleigh-quotient change
  int max_outer = 40;            // inverse-iteration sweeps for the gap
  long matvec_budget = 400000;   // cap on operator applications for the gap
  double ground_tol = 1e-4;      // diagnostic ground solve tolerance
  long ground_steps = 400;       // block-step cap for the diagnostic solve
  bool skip_plain_ground = false;
  // A Rayleigh quotient bounds the sector minimum from above, so once it
  // falls below reference/3 the factor-of-3 comparison is already decided;
  // this stops the probe there and reports the bound instead of converging.
  bool gap_early_stop = false;
};

// Zero-bias run.  The operator's null space holds one exactly constructed
// history mode per input pattern (plus frozen failed-measurement
// configurations); p and the conditional output are read from the
// all-zero-input mode, so they carry no solver error.  The gap is the lowest
// level left after projecting the null modes and the frozen sites out.  The
// biased operator's true ground state is reported separately: the bias drags
// failed-measurement configurations below the history modes instead of
// selecting among them, so it is generally not the computing state.
struct TeleportReport {
  int n_gates = 0;
  double lambda = 0.0;
  double epsilon = 1.0;
  double delta_mag = 0.0;
  double p_min = 0.0;           // ((l^2/2)/(6+l^2/2))^(2N-2) * l^2/(6+l^2)
  double p = 0.0;               // success weight of the history mode
  double conditional_fidelity = 0.0;  // vs U_N...U_1|0>
  double comp_energy = 0.0;     // Rayleigh quotient of the history mode
  double kernel_residual = 0.0;  // worst ||H k|| over the constructed modes
  double ground_energy = 0.0;   // biased unconstrained ground
  double ground_success = 0.0;
  bool ground_is_computational = false;
  double gap = 0.0;             // first level above the null space
  double gap_residual = 0.0;    // eigen-residual of the gap mode
  double gap_estimate = 0.0;    // eps / (6 (6 + lambda^2))
  bool gap_is_upper_bound = false;  // early stop: gap <= reported value
  int kernel_levels_seen = 0;   // constructed null modes (2^(2N-1))
  bool converged = false;
  long matvecs = 0;
};

TeleportReport teleport_run(const std::vector<Matrix2>& gates, double lambda,
                            const TeleportOptions& opt = {});

// Gap-vs-estimate sweep over lambda at fixed gate count (zero-bias gap
// measurement only; no diagnostic ground solve).
GapScan teleport_gap_scan(const std::vector<Matrix2>& gates,
                          const std::vector<double>& lambdas,
                          const TeleportOptions& opt = {});

// Least-squares slope of log(y) vs log(x); pairs with non-finite logs are
// rejected with an error.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gsqc
