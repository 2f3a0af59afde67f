#include "gsqc/oracle.hpp"

#include <cmath>

namespace gsqc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Applies a one-qubit operator at bit position `q` (qubit 0 most significant).
void apply_local(Vector& psi, const Matrix2& m, int q, int qubits) {
  const Index dim = psi.size();
  const Index stride = Index(1) << (qubits - 1 - q);
  for (Index base = 0; base < dim; ++base) {
    if (base & stride) continue;  // visit each pair once via its 0-branch
    const Index i0 = base, i1 = base | stride;
    const Complex a = psi[i0], b = psi[i1];
    psi[i0] = m(0, 0) * a + m(0, 1) * b;
    psi[i1] = m(1, 0) * a + m(1, 1) * b;
  }
}

void apply_cnot(Vector& psi, int control, int target, int qubits) {
  const Index dim = psi.size();
  const Index cbit = Index(1) << (qubits - 1 - control);
  const Index tbit = Index(1) << (qubits - 1 - target);
  for (Index i = 0; i < dim; ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(psi[i], psi[i | tbit]);
  }
}

}  // namespace

EvolutionTrace evolve(const Circuit& c) { return evolve(c, c.input); }

EvolutionTrace evolve(const Circuit& c, const std::vector<int>& input) {
  EvolutionTrace tr;
  tr.qubits = c.qubits;
  const Index dim = Index(1) << c.qubits;
  Vector psi = Vector::Zero(dim);
  Index start = 0;
  for (int q = 0; q < c.qubits; ++q)
    if (q < static_cast<int>(input.size()) && input[q])
      start |= Index(1) << (c.qubits - 1 - q);
  psi[start] = 1.0;
  tr.states.push_back(psi);

  Matrix2 project0 = Matrix2::Zero();
  project0(0, 0) = 1.0;

  for (int k = 0; k < c.n_steps(); ++k) {
    for (const PlacedGate& pg : c.steps[k]) {
      const Gate& g = pg.gate;
      switch (g.kind) {
        case GateKind::Unitary:
          apply_local(psi, g.u, pg.qubits[0], c.qubits);
          break;
        case GateKind::Cnot:
          apply_cnot(psi, g.control, g.target, c.qubits);
          break;
        case GateKind::Projection:
          apply_local(psi, project0, pg.qubits[0], c.qubits);
          break;
        case GateKind::Boost:
          break;  // identity on the logical state
      }
    }
    tr.states.push_back(psi);
  }
  return tr;
}

Vector mimic_state(const EvolutionTrace& trace,
                   const std::vector<double>& weights) {
  if (trace.qubits != 1)
    throw Error("mimic_state is defined for one-qubit traces");
  const int rows = static_cast<int>(trace.states.size());
  if (!weights.empty() && static_cast<int>(weights.size()) != rows)
    throw Error("weight count must match row count");
  Vector psi = Vector::Zero(2 * rows);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  for (int i = 0; i < rows; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    psi[2 * i + 0] = w * scale * trace.states[i][0];
    psi[2 * i + 1] = w * scale * trace.states[i][1];
  }
  return psi;
}

Vector mimic_state(const Circuit& c, const std::vector<double>& weights) {
  return mimic_state(evolve(c), weights);
}

std::vector<double> chain_sector_spectrum(int n_steps, double epsilon) {
  std::vector<double> e;
  for (int m = 0; m <= n_steps; ++m)
    e.push_back(2.0 * epsilon * (1.0 - std::cos(m * kPi / (n_steps + 1))));
  return e;
}

std::vector<double> chain_spectrum(int n_steps, double epsilon) {
  std::vector<double> e;
  for (double v : chain_sector_spectrum(n_steps, epsilon)) {
    e.push_back(v);
    e.push_back(v);
  }
  std::sort(e.begin(), e.end());
  return e;
}

Matrix2 BellBasis::sigma(int i) {
  Matrix2 m;
  switch (i) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw Error("pair-state index must be 0..3");
  }
  return m;
}

Vector BellBasis::state(int i) {
  const Matrix2 s = sigma(i);
  Vector phi = Vector::Zero(4);
  const double c = 1.0 / std::sqrt(2.0);
  // (sigma|a>) x |a>, amplitude at index 2*first + second
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) phi[2 * b + a] += c * s(b, a);
  return phi;
}

BellRotationCheck bell_rotation_check() {
  BellRotationCheck out;
  Eigen::Matrix4cd cnot = Eigen::Matrix4cd::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1.0;  // first controls
  Eigen::Matrix4cd wfirst = Eigen::Matrix4cd::Zero();
  const Matrix2 w = GateLibrary::walsh();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int t = 0; t < 2; ++t) wfirst(2 * a + t, 2 * b + t) = w(a, b);
  const Eigen::Matrix4cd rot = wfirst * cnot;

  const int expected_index[4] = {0, 1, 3, 2};  // |00>, |01>, |11>, |10>
  out.ok = true;
  for (int i = 0; i < 4; ++i) {
    Vector img = rot * BellBasis::state(i);
    const Complex phase = img[expected_index[i]];
    out.phases[i] = phase;
    if (std::abs(std::abs(phase) - 1.0) > 1e-12) out.ok = false;
    Vector ideal = Vector::Zero(4);
    ideal[expected_index[i]] = phase;
    out.max_deviation =
        std::max(out.max_deviation, (img - ideal).cwiseAbs().maxCoeff());
  }
  if (out.max_deviation > 1e-12) out.ok = false;
  return out;
}

namespace {

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

}  // namespace

TeleportExpansion teleport_expansion(const std::vector<Matrix2>& gates) {
  if (gates.size() < 2)
    throw Error("parallel-gate expansion needs at least two gates");
  TeleportExpansion ex;
  ex.n = static_cast<int>(gates.size());
  ex.gates = gates;

  Vector zero2 = Vector::Zero(2);
  zero2[0] = 1.0;
  Vector lhs(2);
  lhs[0] = gates[0](0, 0);
  lhs[1] = gates[0](1, 0);  // U1 |0>
  const double c = 1.0 / std::sqrt(2.0);
  for (int k = 1; k < ex.n; ++k) {
    Vector pair = Vector::Zero(4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) pair[2 * a + b] = c * gates[k](b, a);
    lhs = kron(lhs, pair);
  }
  ex.lhs = lhs;
  return ex;
}

double TeleportExpansion::coefficient() const {
  return std::pow(0.5, n - 1);
}

Vector TeleportExpansion::residual(const std::vector<int>& outcomes) const {
  if (static_cast<int>(outcomes.size()) != n - 1)
    throw Error("outcome list must have one entry per pair");
  Vector2 v;
  v << 1, 0;
  v = gates[0] * v;
  for (int k = 1; k < n; ++k)
    v = gates[k] * (BellBasis::sigma(outcomes[k - 1]) * v);
  Vector out(2);
  out[0] = v[0];
  out[1] = v[1];
  return out;
}

Vector TeleportExpansion::outcome_term(const std::vector<int>& outcomes) const {
  Vector term(1);
  term[0] = 1.0;
  for (int k = 0; k < n - 1; ++k)
    term = kron(term, BellBasis::state(outcomes[k]));
  return coefficient() * kron(term, residual(outcomes));
}

double TeleportExpansion::reconstruction_error() const {
  Vector sum = Vector::Zero(lhs.size());
  std::vector<int> outcomes(n - 1, 0);
  const int total = 1 << (2 * (n - 1));
  for (int code = 0; code < total; ++code) {
    int rest = code;
    for (int k = 0; k < n - 1; ++k) {
      outcomes[k] = rest & 3;
      rest >>= 2;
    }
    sum += outcome_term(outcomes);
  }
  return (lhs - sum).cwiseAbs().maxCoeff();
}

double TeleportExpansion::completeness() const {
  std::vector<int> outcomes(n - 1, 0);
  const int total = 1 << (2 * (n - 1));
  double acc = 0.0;
  const double c2 = coefficient() * coefficient();
  for (int code = 0; code < total; ++code) {
    int rest = code;
    for (int k = 0; k < n - 1; ++k) {
      outcomes[k] = rest & 3;
      rest >>= 2;
    }
    acc += c2 * residual(outcomes).squaredNorm();
  }
  return acc;
}

namespace {

// Amplitude propagation over the machine's cell lattice.  A cell is one row
// assignment per register; its content is the joint logical state there.
// Contents are forced along every admissible row crossing, so each input
// pattern yields exactly one zero mode once the start cell is seeded.
struct CellPropagator {
  int q, rows, nbits;
  double lambda;
  const std::vector<Matrix2>& gates;
  std::vector<long> cell_stride;

  CellPropagator(const std::vector<Matrix2>& g, double lam, int row_count)
      : q(2 * static_cast<int>(g.size()) - 1),
        rows(row_count),
        nbits(1 << q),
        lambda(lam),
        gates(g) {
    cell_stride.assign(q + 1, 1);
    for (int i = 1; i <= q; ++i) cell_stride[i] = cell_stride[i - 1] * rows;
  }

  long ncells() const { return cell_stride[q]; }
  int row_of(long cell, int x) const {
    return static_cast<int>(cell / cell_stride[q - 1 - x]) % rows;
  }
  long with_row(long cell, int x, int r) const {
    return cell + (static_cast<long>(r) - row_of(cell, x)) *
                      cell_stride[q - 1 - x];
  }
  int bit_of(int bits, int x) const { return (bits >> (q - 1 - x)) & 1; }

  // Content map for register x crossing into row j (or back out with
  // `inverse`).  Measurement crossings only run forward.
  void cross(int x, int j, const Vector& in, Vector& out, bool inverse) const {
    out.setZero(nbits);
    const int mask = 1 << (q - 1 - x);
    auto one_qubit = [&](const Matrix2& u) {
      const Matrix2 m = inverse ? Matrix2(u.adjoint()) : u;
      for (int b = 0; b < nbits; ++b) {
        if (b & mask) continue;
        out[b] = m(0, 0) * in[b] + m(0, 1) * in[b | mask];
        out[b | mask] = m(1, 0) * in[b] + m(1, 1) * in[b | mask];
      }
    };
    switch (j) {
      case 1:
      case 5:
        one_qubit(x % 2 == 1 ? GateLibrary::walsh() : Matrix2::Identity());
        return;
      case 3:
        one_qubit(x % 2 == 0 ? gates[x / 2] : Matrix2::Identity());
        return;
      case 2:  // pair-creating CNOT: target x, control x-1 (self-inverse)
        if (x % 2 == 0 && x >= 2) {
          for (int b = 0; b < nbits; ++b)
            out[bit_of(b, x - 1) ? (b ^ mask) : b] = in[b];
        } else {
          out = in;
        }
        return;
      case 4:  // pair-reading CNOT: target x, control x+1
        if (x % 2 == 0 && x + 1 < q) {
          for (int b = 0; b < nbits; ++b)
            out[bit_of(b, x + 1) ? (b ^ mask) : b] = in[b];
        } else {
          out = in;
        }
        return;
      case 6:
        if (x == q - 1) {  // boost keeps both branches
          out = inverse ? Vector(in / lambda) : Vector(lambda * in);
        } else {  // measurement keeps the logical-0 branch
          for (int b = 0; b < nbits; ++b)
            if (!(b & mask)) out[b] = lambda * in[b];
        }
        return;
      default:
        out = in;
    }
  }

  bool invertible(int x, int j) const { return !(j == 6 && x != q - 1); }

  // A CNOT-row crossing needs the partner register on the matching row.
  bool edge_open(long cell, int x, int j) const {
    if (j == 2) {
      if (x % 2 == 1 && x + 1 < q) return row_of(cell, x + 1) == 1;
      if (x % 2 == 0 && x >= 2) return row_of(cell, x - 1) == 2;
      return true;
    }
    if (j == 4) {
      if (x % 2 == 1) return row_of(cell, x - 1) == 3;
      if (x % 2 == 0 && x + 1 < q) return row_of(cell, x + 1) == 4;
      return true;
    }
    return true;
  }

  // Unnormalized zero mode for one input pattern; `cells` and `mismatch`
  // report coverage and cross-path consistency.
  SparseColumn propagate(int input_bits, const BasisLayout& layout,
                         Index* cells, double* mismatch) const {
    std::vector<Vector> content(ncells());
    std::vector<char> has(ncells(), 0);
    content[0] = Vector::Zero(nbits);
    content[0][input_bits] = 1.0;
    has[0] = 1;
    std::vector<long> work{0};
    double worst = 0.0;
    Vector tmp;
    auto visit = [&](long from, int x, int j, long to, bool inverse) {
      cross(x, j, content[from], tmp, inverse);
      if (!has[to]) {
        content[to] = tmp;
        has[to] = 1;
        work.push_back(to);
      } else {
        worst = std::max(worst, (content[to] - tmp).cwiseAbs().maxCoeff());
      }
    };
    while (!work.empty()) {
      const long cell = work.back();
      work.pop_back();
      for (int x = 0; x < q; ++x) {
        const int r = row_of(cell, x);
        if (r + 1 < rows && edge_open(cell, x, r + 1))
          visit(cell, x, r + 1, with_row(cell, x, r + 1), false);
        if (r >= 1 && invertible(x, r) && edge_open(cell, x, r))
          visit(cell, x, r, with_row(cell, x, r - 1), true);
      }
    }

    SparseColumn col;
    Index filled = 0;
    std::vector<Index> locals(q);
    for (long cell = 0; cell < ncells(); ++cell) {
      if (!has[cell]) continue;
      bool any = false;
      for (int b = 0; b < nbits; ++b) {
        if (content[cell][b] == Complex(0.0, 0.0)) continue;
        any = true;
        for (int x = 0; x < q; ++x)
          locals[x] = layout.local_index(row_of(cell, x), bit_of(b, x));
        col.push_back({layout.flat(locals), content[cell][b]});
      }
      if (any) ++filled;
    }
    std::sort(col.begin(), col.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (cells) *cells = filled;
    if (mismatch) *mismatch = std::max(*mismatch, worst);
    return col;
  }
};

}  // namespace

TeleportKernelBasis teleport_kernel_basis(const std::vector<Matrix2>& gates,
                                          double lambda,
                                          const BasisLayout& layout) {
  const int n = static_cast<int>(gates.size());
  if (n < 2) throw Error("parallel-gate machine needs at least two gates");
  if (!(lambda >= 1.0)) throw Error("strength lambda must be at least 1");
  if (layout.qubits != 2 * n - 1 || layout.rows != 7)
    throw Error("layout does not match the machine shape");

  CellPropagator prop(gates, lambda, layout.rows);
  TeleportKernelBasis basis;
  basis.columns.reserve(std::size_t(1) << prop.q);
  for (int s = 0; s < prop.nbits; ++s) {
    Index cells = 0;
    SparseColumn col =
        prop.propagate(s, layout, &cells, &basis.max_mismatch);
    double nrm2 = 0.0;
    for (const auto& e : col) nrm2 += std::norm(e.second);
    const double nrm = std::sqrt(nrm2);
    if (!(nrm > 0.0)) throw Error("zero-mode propagation found no support");
    for (auto& e : col) e.second /= nrm;
    if (s == 0) basis.cells = cells;
    basis.columns.push_back(std::move(col));
  }
  return basis;
}

Vector teleport_kernel_state(const std::vector<Matrix2>& gates, double lambda,
                             const BasisLayout& layout, int input_bits) {
  const int n = static_cast<int>(gates.size());
  if (n < 2) throw Error("parallel-gate machine needs at least two gates");
  if (!(lambda >= 1.0)) throw Error("strength lambda must be at least 1");
  if (layout.qubits != 2 * n - 1 || layout.rows != 7)
    throw Error("layout does not match the machine shape");
  if (input_bits < 0 || input_bits >= (1 << layout.qubits))
    throw Error("input pattern outside the register range");

  CellPropagator prop(gates, lambda, layout.rows);
  double mismatch = 0.0;
  SparseColumn col = prop.propagate(input_bits, layout, nullptr, &mismatch);
  Vector v = Vector::Zero(layout.dim());
  for (const auto& e : col) v[e.first] = e.second;
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw Error("zero-mode propagation found no support");
  return v / nrm;
}

Vector2 serial_product_state(const std::vector<Matrix2>& gates) {
  Vector2 v;
  v << 1, 0;
  for (const Matrix2& g : gates) v = g * v;
  return v;
}

Matrix2 random_unitary(std::mt19937_64& rng) {
  auto unit = [&rng]() {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;  // (0, 1]
  };
  auto gauss = [&]() {
    const double u = unit(), v = unit();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
  };
  Matrix2 z;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) z(i, j) = Complex(gauss(), gauss());

  // Gram-Schmidt of a Gaussian matrix.
  Vector2 a = z.col(0);
  a /= a.norm();
  Vector2 b = z.col(1) - a * (a.dot(z.col(1)));
  b /= b.norm();
  Matrix2 u;
  u.col(0) = a;
  u.col(1) = b;
  return u;
}

}  // namespace gsqc
