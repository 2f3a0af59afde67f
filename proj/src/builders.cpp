#include "gsqc/builders.hpp"

#include <algorithm>
#include <cmath>

namespace gsqc {

Matrix ladder_occupancy(int rows, int row) {
  Matrix m = Matrix::Zero(2 * rows, 2 * rows);
  m(2 * row, 2 * row) = 1.0;
  m(2 * row + 1, 2 * row + 1) = 1.0;
  return m;
}

Matrix ladder_occupancy_bit(int rows, int row, int bit) {
  Matrix m = Matrix::Zero(2 * rows, 2 * rows);
  m(2 * row + bit, 2 * row + bit) = 1.0;
  return m;
}

Matrix ladder_advance(int rows, int row, const Matrix2& u, double epsilon) {
  Matrix m = ladder_occupancy(rows, row - 1) + ladder_occupancy(rows, row);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      m(2 * row + a, 2 * (row - 1) + b) -= u(a, b);
      m(2 * (row - 1) + b, 2 * row + a) -= std::conj(u(a, b));
    }
  return epsilon * m;
}

Matrix ladder_projection(int rows, int row, double lambda, double epsilon) {
  Matrix m = Matrix::Zero(2 * rows, 2 * rows);
  m(2 * (row - 1), 2 * (row - 1)) = 1.0;
  m(2 * row, 2 * row) = 1.0 / (lambda * lambda);
  m(2 * row, 2 * (row - 1)) = -1.0 / lambda;
  m(2 * (row - 1), 2 * row) = -1.0 / lambda;
  return epsilon * m;
}

Matrix ladder_boost(int rows, int row, double lambda, double epsilon) {
  Matrix m = Matrix::Zero(2 * rows, 2 * rows);
  for (int b = 0; b < 2; ++b) {
    m(2 * (row - 1) + b, 2 * (row - 1) + b) = 1.0;
    m(2 * row + b, 2 * row + b) = 1.0 / (lambda * lambda);
    m(2 * row + b, 2 * (row - 1) + b) = -1.0 / lambda;
    m(2 * (row - 1) + b, 2 * row + b) = -1.0 / lambda;
  }
  return epsilon * m;
}

Matrix ladder_bias(int rows, double delta, double epsilon) {
  Matrix m = Matrix::Zero(2 * rows, 2 * rows);
  m(0, 0) = epsilon * delta;
  m(1, 1) = -epsilon * delta;
  return m;
}

void embed_term(SparseHermitian& h, const BasisLayout& layout,
                const std::vector<int>& qubits, const Matrix& local) {
  for (size_t k = 1; k < qubits.size(); ++k)
    if (qubits[k - 1] >= qubits[k])
      throw Error("embed_term: qubit list must be strictly ascending");
  const Index ld = layout.local_dim();
  Index joint_dim = 1;
  for (size_t k = 0; k < qubits.size(); ++k) joint_dim *= ld;
  if (local.rows() != joint_dim || local.cols() != joint_dim)
    throw Error("embed_term: operator size does not match qubit list");

  // Strides of each register in the flat index, and the enumeration of the
  // untouched registers.
  std::vector<Index> stride(layout.qubits, 1);
  for (int q = layout.qubits - 2; q >= 0; --q)
    stride[q] = stride[q + 1] * ld;

  std::vector<int> rest;
  for (int q = 0; q < layout.qubits; ++q)
    if (std::find(qubits.begin(), qubits.end(), q) == qubits.end())
      rest.push_back(q);
  Index rest_count = 1;
  for (size_t k = 0; k < rest.size(); ++k) rest_count *= ld;

  auto offset_of = [&](Index joint_index) {
    Index off = 0;
    for (int k = static_cast<int>(qubits.size()) - 1; k >= 0; --k) {
      off += (joint_index % ld) * stride[qubits[k]];
      joint_index /= ld;
    }
    return off;
  };

  for (Index r = 0; r < joint_dim; ++r) {
    for (Index c = r; c < joint_dim; ++c) {
      const Complex v = local(r, c);
      if (v == Complex(0.0, 0.0)) continue;
      const Index ro = offset_of(r), co = offset_of(c);
      for (Index e = 0; e < rest_count; ++e) {
        Index base = 0, code = e;
        for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
          base += (code % ld) * stride[rest[k]];
          code /= ld;
        }
        h.add(base + ro, base + co, v);
      }
    }
  }
}

namespace {

// Joint two-register term for a controlled NOT at computation row `row`:
// the control must cross before the target may, and the target's advance
// applies the identity or NOT according to the control's logical value.
Matrix cnot_joint(int rows, int row, bool control_first, double epsilon) {
  const Index ld = 2 * rows;
  auto kron2 = [&](const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(ld * ld, ld * ld);
    for (Index i = 0; i < ld; ++i)
      for (Index j = 0; j < ld; ++j) {
        if (a(i, j) == Complex(0.0, 0.0)) continue;
        out.block(i * ld, j * ld, ld, ld) += a(i, j) * b;
      }
    return out;
  };
  const Matrix id2 = Matrix::Identity(ld, ld);
  const Matrix occ_ctl_prev = ladder_occupancy(rows, row - 1);
  const Matrix occ_tgt_here = ladder_occupancy(rows, row);
  const Matrix occ_tgt_prev = ladder_occupancy(rows, row - 1);
  const Matrix adv_ctl = ladder_advance(rows, row, GateLibrary::identity(), epsilon);
  const Matrix adv_tgt_id = ladder_advance(rows, row, GateLibrary::identity(), epsilon);
  const Matrix adv_tgt_not = ladder_advance(rows, row, GateLibrary::not_gate(), epsilon);
  const Matrix ctl_here_0 = ladder_occupancy_bit(rows, row, 0);
  const Matrix ctl_here_1 = ladder_occupancy_bit(rows, row, 1);

  auto pair = [&](const Matrix& on_control, const Matrix& on_target) {
    return control_first ? kron2(on_control, on_target)
                         : kron2(on_target, on_control);
  };

  Matrix term = epsilon * pair(occ_ctl_prev, occ_tgt_here);
  term += pair(adv_ctl, occ_tgt_prev);
  term += pair(ctl_here_0, adv_tgt_id);
  term += pair(ctl_here_1, adv_tgt_not);
  return term;
}

// Direct entry assembly for one register; avoids dense local scratch so
// long ladders stay cheap.
void add_ladder_term(SparseHermitian& h, int row, const Gate& g,
                     double epsilon) {
  const Index p = 2 * (row - 1), r = 2 * row;
  switch (g.kind) {
    case GateKind::Unitary:
      for (int b = 0; b < 2; ++b) {
        h.add(p + b, p + b, epsilon);
        h.add(r + b, r + b, epsilon);
      }
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) h.add(r + a, p + b, -epsilon * g.u(a, b));
      break;
    case GateKind::Projection:
      h.add(p, p, epsilon);
      h.add(r, r, epsilon / (g.lambda * g.lambda));
      h.add(r, p, -epsilon / g.lambda);
      break;
    case GateKind::Boost:
      for (int b = 0; b < 2; ++b) {
        h.add(p + b, p + b, epsilon);
        h.add(r + b, r + b, epsilon / (g.lambda * g.lambda));
        h.add(r + b, p + b, -epsilon / g.lambda);
      }
      break;
    case GateKind::Cnot:
      throw Error("controlled gate on a single register");
  }
}

BuiltOperator build_register_hamiltonian(const Circuit& c,
                                         const std::vector<double>& delta,
                                         double epsilon) {
  require_valid(c);
  const int n = c.n_steps();
  if (n < 1) throw Error("circuit must have at least one step");
  if (static_cast<int>(delta.size()) != c.qubits)
    throw Error("bias list length does not match qubit count");
  for (double d : delta)
    if (!(std::abs(d) < 1.0)) throw Error("bias magnitude must be below 1");
  BasisLayout layout{c.qubits, n + 1};
  SparseHermitian h(layout.dim());

  if (c.qubits == 1) {
    h.add(0, 0, epsilon * delta[0]);
    h.add(1, 1, -epsilon * delta[0]);
    for (int k = 0; k < n; ++k)
      add_ladder_term(h, k + 1, c.steps[k][0].gate, epsilon);
    h.compress();
    return {std::move(h), layout};
  }

  for (int q = 0; q < c.qubits; ++q)
    embed_term(h, layout, {q}, ladder_bias(layout.rows, delta[q], epsilon));

  for (int k = 0; k < n; ++k) {
    const int row = k + 1;
    for (const PlacedGate& pg : c.steps[k]) {
      const Gate& g = pg.gate;
      switch (g.kind) {
        case GateKind::Unitary:
          embed_term(h, layout, {pg.qubits[0]},
                     ladder_advance(layout.rows, row, g.u, epsilon));
          break;
        case GateKind::Projection:
          embed_term(h, layout, {pg.qubits[0]},
                     ladder_projection(layout.rows, row, g.lambda, epsilon));
          break;
        case GateKind::Boost:
          embed_term(h, layout, {pg.qubits[0]},
                     ladder_boost(layout.rows, row, g.lambda, epsilon));
          break;
        case GateKind::Cnot: {
          const bool control_first = g.control < g.target;
          const Matrix joint =
              cnot_joint(layout.rows, row, control_first, epsilon);
          embed_term(h, layout,
                     {std::min(g.control, g.target),
                      std::max(g.control, g.target)},
                     joint);
          break;
        }
      }
    }
  }
  h.compress();
  return {std::move(h), layout};
}

}  // namespace

std::vector<double> input_deltas(const Circuit& c, double magnitude) {
  std::vector<double> d(c.input.size());
  for (size_t q = 0; q < c.input.size(); ++q)
    d[q] = c.input[q] ? magnitude : -magnitude;
  return d;
}

BuiltOperator build_single_qubit(const Circuit& c, double delta,
                                 double epsilon) {
  if (c.qubits != 1) throw Error("build_single_qubit needs a one-qubit circuit");
  return build_register_hamiltonian(c, {delta}, epsilon);
}

BuiltOperator build_multi_qubit(const Circuit& c,
                                const std::vector<double>& delta,
                                double epsilon) {
  return build_register_hamiltonian(c, delta, epsilon);
}

BuiltOperator build_multi_qubit(const Circuit& c, double delta_all,
                                double epsilon) {
  return build_register_hamiltonian(
      c, std::vector<double>(c.qubits, delta_all), epsilon);
}

ChainProfile profile_from_lambda(const std::vector<double>& lambda_in) {
  const int rows = static_cast<int>(lambda_in.size());
  if (rows < 2) throw Error("profile needs at least two row amplitudes");
  for (double l : lambda_in)
    if (!(l > 0.0)) throw Error("row amplitudes must be positive");

  ChainProfile p;
  p.lambda = lambda_in;
  double sq = 0.0;
  for (double l : p.lambda) sq += l * l;
  const double norm = std::sqrt(static_cast<double>(rows) / sq);
  for (double& l : p.lambda) l *= norm;

  const int n = rows - 1;
  std::vector<double> w(rows);
  w[0] = p.lambda[1] / p.lambda[0];
  for (int i = 1; i < n; ++i)
    w[i] = (p.lambda[i - 1] + p.lambda[i + 1]) / (2.0 * p.lambda[i]);
  w[n] = p.lambda[n - 1] / p.lambda[n];

  const double wmax = *std::max_element(w.begin(), w.end());
  const double s = std::min(1.0, 1.0 / wmax);
  if (s < 1e-6) throw Error("profile scale underflow: amplitudes too steep");
  p.scale = s;
  p.v.resize(rows);
  for (int i = 0; i < rows; ++i) p.v[i] = s * w[i];
  p.t.assign(n, s);
  return p;
}

BuiltOperator build_nonunitary_chain(const Circuit& c,
                                     const ChainProfile& profile,
                                     double delta, double epsilon) {
  if (c.qubits != 1)
    throw Error("build_nonunitary_chain needs a one-qubit circuit");
  require_valid(c);
  if (!(std::abs(delta) < 1.0)) throw Error("bias magnitude must be below 1");
  const int n = c.n_steps();
  if (static_cast<int>(profile.lambda.size()) != n + 1)
    throw Error("profile length does not match step count");
  for (int k = 0; k < n; ++k)
    if (c.steps[k][0].gate.kind != GateKind::Unitary)
      throw Error("tailored chains accept unitary steps only");

  BasisLayout layout{1, n + 1};
  SparseHermitian h(layout.dim());

  for (int i = 0; i <= n; ++i) {
    const double coeff = (i == 0 || i == n) ? 1.0 : 2.0;
    for (int b = 0; b < 2; ++b)
      h.add(2 * i + b, 2 * i + b, epsilon * coeff * profile.v[i]);
  }
  h.add(0, 0, epsilon * profile.v[0] * delta);
  h.add(1, 1, -epsilon * profile.v[0] * delta);

  for (int k = 0; k < n; ++k) {
    const Matrix2& u = c.steps[k][0].gate.u;
    const int row = k + 1;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        h.add(2 * row + a, 2 * (row - 1) + b,
              -epsilon * profile.t[k] * u(a, b));
  }
  h.compress();
  return {std::move(h), layout};
}

}  // namespace gsqc
