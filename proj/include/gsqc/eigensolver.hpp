#pragma once

#include <cstdint>
#include <functional>

#include "gsqc/sparse.hpp"
#include "gsqc/types.hpp"

namespace gsqc {

// Options for the low-end eigensolver. Dimensions below dense_threshold get
// a full dense decomposition; larger operators use thick-restart block
// Lanczos with full reorthogonalization. `constrain` projects vectors onto
// an invariant subspace of the operator; it is applied to every start and
// Krylov vector, so the solve stays inside that subspace. Setting it forces
// the iterative path.
struct SolverOptions {
  int k = 1;
  double tol = 1e-10;
  std::uint64_t seed = 12345;
  int block = 0;              // 0: auto
  Index dense_threshold = 2048;
  long max_block_steps = 0;   // 0: auto
  int basis_cap = 0;          // 0: auto
  bool force_dense = false;
  bool force_iterative = false;
  std::function<void(Vector&)> constrain;
};

struct SpectrumResult {
  RealVector eigenvalues;   // ascending, size k
  Matrix eigenvectors;      // dim x k, orthonormal, phase-fixed
  RealVector residuals;     // exact ||H x - theta x|| per pair
  long matvecs = 0;
  int restarts = 0;
  bool converged = false;
  bool used_dense = false;
};

SpectrumResult lowest_eigenpairs(const SparseHermitian& h,
                                 const SolverOptions& opt = {});

// Three lowest levels and the derived level differences. `splitting` is
// e1 - e0 (the near-degenerate ground pair of a biased ladder), `gap` is
// e2 - e0 (distance to the first excited ladder mode).
struct GapReport {
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double splitting = 0.0;
  double gap = 0.0;
  bool converged = false;
};

GapReport gap_report(const SparseHermitian& h, SolverOptions opt = {});

// Splitting read off `h`, gap read off `zero_twin` (the same machine built
// without bias, where the mimic pair is exactly degenerate).
GapReport gap_report(const SparseHermitian& h, const SparseHermitian& zero_twin,
                     SolverOptions opt = {});

}  // namespace gsqc
