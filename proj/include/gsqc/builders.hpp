#pragma once

#include <vector>

#include "gsqc/circuit.hpp"
#include "gsqc/sparse.hpp"
#include "gsqc/types.hpp"

namespace gsqc {

struct BuiltOperator {
  SparseHermitian op;
  BasisLayout layout;
};

// Per-qubit bias values derived from the declared input bits: bit 1 maps to
// +magnitude, bit 0 to -magnitude, so the favored row-0 logical state is the
// declared input.
std::vector<double> input_deltas(const Circuit& c,
                                 double magnitude = kDefaultDelta);

// Ladder Hamiltonian for one register: block tridiagonal with diagonal
// blocks eps(1 + delta sz), 2 eps, ..., 2 eps, eps and hops -eps U_k.
// delta is the signed row-0 bias coefficient, |delta| < 1.
BuiltOperator build_single_qubit(const Circuit& c, double delta,
                                 double epsilon = kDefaultEpsilon);

// General register set: one ladder per qubit (bias delta[q] on its row 0),
// gate terms coupling rows k and k+1; CNOT steps couple two ladders through
// occupancy-conditioned advance terms (control crosses first, target
// follows conditioned on the control's logical value).
BuiltOperator build_multi_qubit(const Circuit& c,
                                const std::vector<double>& delta,
                                double epsilon = kDefaultEpsilon);
BuiltOperator build_multi_qubit(const Circuit& c, double delta_all,
                                double epsilon = kDefaultEpsilon);

// Row-weight profile for amplitude tailoring.  lambda holds the desired
// row amplitudes (renormalized so sum lambda^2 = N+1), v scales the
// diagonal blocks, t the hops (all hops share the maximal feasible scale).
struct ChainProfile {
  std::vector<double> lambda;
  std::vector<double> v;
  std::vector<double> t;
  double scale = 1.0;  // the common hop value

  int n_steps() const { return static_cast<int>(t.size()); }
};

// Solves the zero-mode recurrence
//   v0 l0 = t1 l1,   t_i l_{i-1} + t_{i+1} l_{i+1} = 2 v_i l_i,
//   t_N l_{N-1} = v_N l_N
// for equal hops t = s with s as large as possible subject to |v| <= 1 and
// s <= 1.  Throws on non-positive amplitudes or a vanishing scale.
ChainProfile profile_from_lambda(const std::vector<double>& lambda);

// Single register ladder with tailored weights: diagonal blocks
// eps v0 (1 + delta sz), 2 eps v1, ..., eps vN and hops -eps t_k U_k.
// The circuit supplies the N unitaries.
BuiltOperator build_nonunitary_chain(const Circuit& c,
                                     const ChainProfile& profile,
                                     double delta,
                                     double epsilon = kDefaultEpsilon);

// --- local ladder operators, exposed for tests ---------------------------

// Occupancy of one row (both logical states) as a local dense matrix.
Matrix ladder_occupancy(int rows, int row);
Matrix ladder_occupancy_bit(int rows, int row, int bit);
// eps [ occ(row-1) + occ(row) - (hop_U + hop_U^dagger) ]
Matrix ladder_advance(int rows, int row, const Matrix2& u, double epsilon);
// eps [ occ0(row-1) + occ0(row)/l^2 - (hop0 + hop0^dagger)/l ], logical 0 only
Matrix ladder_projection(int rows, int row, double lambda, double epsilon);
// same weights applied to both logical states
Matrix ladder_boost(int rows, int row, double lambda, double epsilon);
Matrix ladder_bias(int rows, double delta, double epsilon);  // eps delta sz on row 0

// Embeds a Hermitian operator acting on the listed qubits (ascending order,
// kron with the first listed qubit slowest) into the full register space.
void embed_term(SparseHermitian& h, const BasisLayout& layout,
                const std::vector<int>& qubits, const Matrix& local);

}  // namespace gsqc
