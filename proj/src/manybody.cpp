#include "gsqc/manybody.hpp"

#include <cmath>
#include <limits>

namespace gsqc {

ManybodyOperator build_manybody_single_qubit(const Circuit& c, double delta,
                                             double epsilon) {
  if (c.qubits != 1)
    throw Error("occupation encoding needs a one-qubit circuit");
  require_valid(c);
  if (!(std::abs(delta) < 1.0)) throw Error("bias magnitude must be below 1");
  const int n = c.n_steps();
  if (n + 1 > 11)
    throw ResourceError("occupation space over budget (rows > 11)");
  for (int k = 0; k < n; ++k)
    if (c.steps[k][0].gate.kind != GateKind::Unitary)
      throw Error("occupation encoding accepts unitary steps only");

  OccupationBasis basis{n + 1};
  const Index dim = basis.dim();
  SparseHermitian h(dim);

  for (Index s = 0; s < dim; ++s) {
    // Diagonal: each step counts its two rows' non-idle electrons; the bias
    // reads the row-0 logical value.
    double diag = 0.0;
    Index rest = s;
    int prev = static_cast<int>(rest % 3);
    if (prev == 1) diag += epsilon * delta;
    if (prev == 2) diag -= epsilon * delta;
    for (int i = 1; i <= n; ++i) {
      rest /= 3;
      const int here = static_cast<int>(rest % 3);
      if (prev != 0) diag += epsilon;
      if (here != 0) diag += epsilon;
      prev = here;
    }
    if (diag != 0.0) h.add(s, s, diag);

    // Hops: retire row i-1 (logical b -> idle), promote row i (idle ->
    // logical a), amplitude -eps U_i(a, b).
    for (int i = 1; i <= n; ++i) {
      const int below = basis.digit(s, i - 1);
      if (below == 0 || basis.digit(s, i) != 0) continue;
      const int b = below - 1;
      const Matrix2& u = c.steps[i - 1][0].gate.u;
      const Index cleared = basis.with_digit(s, i - 1, 0);
      for (int a = 0; a < 2; ++a) {
        const Complex amp = -epsilon * u(a, b);
        if (amp == Complex(0.0, 0.0)) continue;
        h.add(basis.with_digit(cleared, i, a + 1), s, amp);
      }
    }
  }
  h.compress();
  return {std::move(h), basis};
}

MeaningfulProjection meaningful_projection(const SparseHermitian& h,
                                           const OccupationBasis& basis) {
  if (h.dim != basis.dim())
    throw Error("operator and basis dimensions disagree");
  // Dense lookup: flat index -> ladder index, or -1 outside the sector.
  std::vector<Index> ladder_of(h.dim, -1);
  for (int i = 0; i < basis.rows; ++i)
    for (int b = 0; b < 2; ++b)
      ladder_of[basis.meaningful_index(i, b)] = 2 * i + b;

  MeaningfulProjection out;
  out.reduced = Matrix::Zero(2 * basis.rows, 2 * basis.rows);
  for (const auto& e : h.entries) {
    const Index li = ladder_of[e.i], lj = ladder_of[e.j];
    const bool ini = li >= 0, inj = lj >= 0;
    if (ini && inj) {
      out.reduced(li, lj) += e.v;
      if (e.i != e.j) out.reduced(lj, li) += std::conj(e.v);
    } else if (ini != inj) {
      out.leakage = std::max(out.leakage, std::abs(e.v));
    }
  }
  return out;
}

Vector embed_meaningful(const Vector& ladder, const OccupationBasis& basis) {
  if (ladder.size() != 2 * basis.rows)
    throw Error("ladder vector length does not match the basis");
  Vector out = Vector::Zero(basis.dim());
  for (int i = 0; i < basis.rows; ++i)
    for (int b = 0; b < 2; ++b)
      out[basis.meaningful_index(i, b)] = ladder[2 * i + b];
  return out;
}

IdleDominance idle_dominance(const Vector& state,
                             const OccupationBasis& basis) {
  if (state.size() != basis.dim())
    throw Error("state length does not match the basis");
  if (std::abs(state.norm() - 1.0) > 1e-9)
    throw Error("idle_dominance needs a normalized state");

  IdleDominance d;
  d.idle.assign(basis.rows, 0.0);
  d.nonidle.assign(basis.rows, 0.0);
  for (Index s = 0; s < state.size(); ++s) {
    const double w = std::norm(state[s]);
    if (w == 0.0) continue;
    Index rest = s;
    for (int i = 0; i < basis.rows; ++i) {
      if (rest % 3 == 0)
        d.idle[i] += w;
      else
        d.nonidle[i] += w;
      rest /= 3;
    }
  }
  d.min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < basis.rows; ++i) {
    d.total_nonidle += d.nonidle[i];
    const double r = d.nonidle[i] > 0.0
                         ? d.idle[i] / d.nonidle[i]
                         : std::numeric_limits<double>::infinity();
    d.min_ratio = std::min(d.min_ratio, r);
  }
  return d;
}

}  // namespace gsqc
