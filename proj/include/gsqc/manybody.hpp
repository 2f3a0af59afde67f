#pragma once

#include <vector>

#include "gsqc/circuit.hpp"
#include "gsqc/sparse.hpp"
#include "gsqc/types.hpp"

namespace gsqc {

// One electron per row, each in {idle, logical 0, logical 1}; flat index is
// the base-3 number with row 0 as the least significant digit.
struct OccupationBasis {
  int rows = 1;

  Index dim() const {
    Index d = 1;
    for (int i = 0; i < rows; ++i) d *= 3;
    return d;
  }
  // digit: 0 idle, 1 logical 0, 2 logical 1
  int digit(Index state, int row) const {
    for (int i = 0; i < row; ++i) state /= 3;
    return static_cast<int>(state % 3);
  }
  Index with_digit(Index state, int row, int value) const {
    Index p = 1;
    for (int i = 0; i < row; ++i) p *= 3;
    return state + (value - digit(state, row)) * p;
  }
  // exactly one row non-idle
  bool meaningful(Index state) const {
    int busy = 0;
    for (int i = 0; i < rows; ++i)
      if (digit(state, i) != 0) ++busy;
    return busy == 1;
  }
  // flat index of (row i carrying logical bit b, everyone else idle)
  Index meaningful_index(int row, int bit) const {
    Index p = 1;
    for (int i = 0; i < row; ++i) p *= 3;
    return (bit + 1) * p;
  }
};

struct ManybodyOperator {
  SparseHermitian op;
  OccupationBasis basis;
};

// Occupation-space Hamiltonian for a one-qubit circuit: per step i, a
// diagonal count of non-idle electrons on rows i-1 and i, minus hops that
// retire the row i-1 electron to idle while promoting the row i electron to
// a logical state rotated by U_i.  The bias puts eps*delta*sz on the row-0
// logical states.  Rows capped at 11 (dim 3^11).
ManybodyOperator build_manybody_single_qubit(const Circuit& c, double delta,
                                             double epsilon = kDefaultEpsilon);

struct MeaningfulProjection {
  Matrix reduced;      // 2(N+1) square, ordered like the standard ladder
  double leakage = 0;  // max |entry| crossing the meaningful boundary
};

// Restriction of the occupation operator to the one-electron-active sector
// under |b at row i> <-> 2i + b.
MeaningfulProjection meaningful_projection(const SparseHermitian& h,
                                           const OccupationBasis& basis);

// Lift a standard-ladder vector (dim 2 rows) into the occupation space.
Vector embed_meaningful(const Vector& ladder, const OccupationBasis& basis);

struct IdleDominance {
  std::vector<double> idle;      // per row: probability the electron idles
  std::vector<double> nonidle;   // per row: probability it is logical
  double total_nonidle = 0.0;    // sum over rows (1 in the active sector)
  double min_ratio = 0.0;        // min over rows of idle/nonidle
};

// Requires a normalized state (throws otherwise).
IdleDominance idle_dominance(const Vector& state, const OccupationBasis& basis);

}  // namespace gsqc
