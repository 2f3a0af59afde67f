#pragma once

#include <array>
#include <random>
#include <utility>
#include <vector>

#include "gsqc/circuit.hpp"
#include "gsqc/sparse.hpp"
#include "gsqc/types.hpp"

namespace gsqc {

// Conventional state-vector simulation: states[k] is the register state
// after k steps (dim 2^qubits, qubit 0 in the most significant position).
// Projection gates apply |0><0| without renormalizing; Boost applies the
// identity.  Norm therefore tracks the surviving branch weight.
struct EvolutionTrace {
  std::vector<Vector> states;
  int qubits = 1;
};

EvolutionTrace evolve(const Circuit& c);
// Same, starting from an explicit basis input instead of the declared one.
EvolutionTrace evolve(const Circuit& c, const std::vector<int>& input);

// History vector over a single-qubit register ladder: block i holds
// weight[i] * states[i] / sqrt(N+1).  weights empty means all-ones.
Vector mimic_state(const EvolutionTrace& trace,
                   const std::vector<double>& weights = {});
Vector mimic_state(const Circuit& c, const std::vector<double>& weights = {});

// Closed-form spectrum of one decoupled (N+1)-site ladder sector:
// 2 eps (1 - cos(m pi / (N+1))), m = 0..N.
std::vector<double> chain_sector_spectrum(int n_steps, double epsilon = 1.0);
// Full single-qubit spectrum at zero bias: every sector value twice, sorted.
std::vector<double> chain_spectrum(int n_steps, double epsilon = 1.0);

// Pair states (sigma_i x I) (|00> + |11>)/sqrt 2 with sigma acting on the
// first (more significant) qubit of the pair.  This sign convention is the
// one under which the telescoped expansion below holds with all + signs.
struct BellBasis {
  static Vector state(int i);            // dim 4
  static Matrix2 sigma(int i);           // I, X, Y, Z
};

// Applies (W x I) . CNOT(first -> second) to each pair state and checks the
// images are |00>, |01>, |11>, |10> up to a global phase per state.
struct BellRotationCheck {
  bool ok = false;
  std::array<Complex, 4> phases{};  // expected (1, 1, -i, 1)
  double max_deviation = 0.0;
};
BellRotationCheck bell_rotation_check();

// Dense verification of the parallel-gate identity on 2N-1 qubits:
//   U1|0> x prod_k (|0> Uk|0> + |1> Uk|1>)/sqrt 2
//     = 2^{-(N-1)} sum_i  Phi_{i1} ... Phi_{i_{N-1}} x residual(i),
//   residual(i) = U_N sigma_{i_{N-1}} ... U_2 sigma_{i_1} U_1 |0>.
struct TeleportExpansion {
  int n = 2;                       // gate count; register has 2n-1 qubits
  std::vector<Matrix2> gates;      // U_1..U_n
  Vector lhs;                      // dim 2^(2n-1)

  Vector residual(const std::vector<int>& outcomes) const;
  double coefficient() const;      // 2^{-(n-1)}
  Vector outcome_term(const std::vector<int>& outcomes) const;
  // max-norm of lhs minus the summed expansion
  double reconstruction_error() const;
  // sum over outcomes of |coeff|^2 ||residual||^2 (should be 1)
  double completeness() const;
};

TeleportExpansion teleport_expansion(const std::vector<Matrix2>& gates);

// Sparse state column: (flat index, amplitude) pairs sorted by index.
using SparseColumn = std::vector<std::pair<Index, Complex>>;

// Exact zero modes of the zero-bias parallel-gate machine, one per input bit
// pattern, found without an eigensolver.  A cell fixes every register's row;
// the register contents at a cell follow by propagating the input across row
// crossings (gate action on the way up, inverse action on the way back down;
// measurement-row crossings scale the surviving branch by lambda and only
// run forward).  CNOT rows admit a crossing only while the partner register
// sits on the matching row, which carves out the reachable cell set.
struct TeleportKernelBasis {
  std::vector<SparseColumn> columns;  // 2^(2N-1) unit-norm columns
  Index cells = 0;                    // cells carrying weight in column 0
  double max_mismatch = 0.0;          // content disagreement across paths
};

TeleportKernelBasis teleport_kernel_basis(const std::vector<Matrix2>& gates,
                                          double lambda,
                                          const BasisLayout& layout);

// One column as a dense unit vector; bit x of input_bits (counted from the
// most significant end) seeds register x.
Vector teleport_kernel_state(const std::vector<Matrix2>& gates, double lambda,
                             const BasisLayout& layout, int input_bits = 0);

// Product U_n ... U_1 |0>.
Vector2 serial_product_state(const std::vector<Matrix2>& gates);

// Haar-style random 2x2 unitary with a platform-independent bit stream
// (raw engine words, hand-rolled Box-Muller and Gram-Schmidt).
Matrix2 random_unitary(std::mt19937_64& rng);

}  // namespace gsqc
