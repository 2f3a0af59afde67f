#pragma once

#include <functional>
#include <vector>

#include "gsqc/builders.hpp"
#include "gsqc/circuit.hpp"
#include "gsqc/sparse.hpp"
#include "gsqc/types.hpp"

namespace gsqc {

// Where the parallel-gate machine keeps its pieces: 2N-1 registers of 7 rows
// each; the last register carries the teleported product state, the rest are
// measured out on the final row.
struct TeleportLayout {
  int n_gates = 2;
  int qubits = 3;
  int rows = 7;
  int output_qubit = 2;
  std::vector<int> measured;  // 0 .. 2N-3
  double lambda = 1.0;
};

struct TeleportBuild {
  SparseHermitian op;
  BasisLayout layout;
  TeleportLayout tele;
};

// Assembles the six-step machine for gates U_1..U_N:
//   1: W on odd registers          2: pair-creating CNOTs (odd -> odd+1)
//   3: U_{k+1} on register 2k      4: pair-reading CNOTs (odd -> odd-1)
//   5: W on odd registers          6: P(lambda) on measured, B(lambda) on out
// Registers start from all-0 inputs; delta supplies the per-register bias.
TeleportBuild build_teleport(const std::vector<Matrix2>& gates, double lambda,
                             const std::vector<double>& delta,
                             double epsilon = kDefaultEpsilon,
                             Index max_dim = 537824);
TeleportBuild build_teleport(const std::vector<Matrix2>& gates, double lambda,
                             double delta_all = -kDefaultDelta,
                             double epsilon = kDefaultEpsilon,
                             Index max_dim = 537824);

// The equivalent step program (exposed so the machine can be cross-checked
// against the generic builder and serialized).
Circuit teleport_circuit(const std::vector<Matrix2>& gates, double lambda);

// Success sector: every measured register on (final row, logical 0), output
// register on the final row.  Returns the two output-bit amplitudes.
Vector2 success_amplitudes(const Vector& state, const BasisLayout& layout,
                           const TeleportLayout& tele);
double success_probability(const Vector& state, const BasisLayout& layout,
                           const TeleportLayout& tele);
// Normalized success-sector output state; zero vector if the sector is empty.
Vector2 conditional_output(const Vector& state, const BasisLayout& layout,
                           const TeleportLayout& tele);

// The (final row, logical 1) site of each measured register is touched by no
// Hamiltonian term, so occupation of any such site spans an exactly invariant
// subspace.  This projector zeroes those components; feeding it to the
// eigensolver keeps the solve inside the complementary invariant subspace.
std::function<void(Vector&)> parked_site_projector(const BasisLayout& layout,
                                                   const TeleportLayout& tele);

}  // namespace gsqc
