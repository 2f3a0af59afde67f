#include "gsqc/teleport.hpp"

#include <cmath>
#include <memory>

namespace gsqc {

Circuit teleport_circuit(const std::vector<Matrix2>& gates, double lambda) {
  const int n = static_cast<int>(gates.size());
  if (n < 2) throw Error("parallel gate machine needs at least two gates");
  if (!(lambda >= 1.0)) throw Error("strength lambda must be at least 1");

  Circuit c;
  c.qubits = 2 * n - 1;
  c.input.assign(c.qubits, 0);

  auto odd_w_step = [&]() {
    Step s;
    for (int q = 0; q < c.qubits; ++q)
      s.push_back({q % 2 == 1 ? make_unitary(GateLibrary::walsh(), "W")
                              : make_unitary(GateLibrary::identity(), "I"),
                   {q}});
    return s;
  };

  c.steps.push_back(odd_w_step());

  Step pair_up;
  pair_up.push_back({make_unitary(GateLibrary::identity(), "I"), {0}});
  for (int k = 1; k < n; ++k)
    pair_up.push_back({make_cnot(2 * k - 1, 2 * k), {2 * k - 1, 2 * k}});
  c.steps.push_back(std::move(pair_up));

  Step apply_gates;
  for (int q = 0; q < c.qubits; ++q) {
    if (q % 2 == 0)
      apply_gates.push_back({make_unitary(gates[q / 2]), {q}});
    else
      apply_gates.push_back({make_unitary(GateLibrary::identity(), "I"), {q}});
  }
  c.steps.push_back(std::move(apply_gates));

  Step pair_read;
  for (int k = 1; k < n; ++k)
    pair_read.push_back({make_cnot(2 * k - 1, 2 * k - 2), {2 * k - 1, 2 * k - 2}});
  pair_read.push_back(
      {make_unitary(GateLibrary::identity(), "I"), {c.qubits - 1}});
  c.steps.push_back(std::move(pair_read));

  c.steps.push_back(odd_w_step());

  Step measure;
  for (int q = 0; q < c.qubits - 1; ++q)
    measure.push_back({make_projection(lambda), {q}});
  measure.push_back({make_boost(lambda), {c.qubits - 1}});
  c.steps.push_back(std::move(measure));

  return c;
}

TeleportBuild build_teleport(const std::vector<Matrix2>& gates, double lambda,
                             const std::vector<double>& delta, double epsilon,
                             Index max_dim) {
  const int n = static_cast<int>(gates.size());
  Circuit c = teleport_circuit(gates, lambda);
  BasisLayout probe{c.qubits, 7};
  if (probe.dim() > max_dim)
    throw ResourceError("machine dimension exceeds the configured budget");

  BuiltOperator built = build_multi_qubit(c, delta, epsilon);
  TeleportLayout tele;
  tele.n_gates = n;
  tele.qubits = c.qubits;
  tele.rows = 7;
  tele.output_qubit = c.qubits - 1;
  for (int q = 0; q < c.qubits - 1; ++q) tele.measured.push_back(q);
  tele.lambda = lambda;
  return {std::move(built.op), built.layout, std::move(tele)};
}

TeleportBuild build_teleport(const std::vector<Matrix2>& gates, double lambda,
                             double delta_all, double epsilon, Index max_dim) {
  if (gates.size() < 2)
    throw Error("parallel gate machine needs at least two gates");
  return build_teleport(
      gates, lambda, std::vector<double>(2 * gates.size() - 1, delta_all),
      epsilon, max_dim);
}

Vector2 success_amplitudes(const Vector& state, const BasisLayout& layout,
                           const TeleportLayout& tele) {
  const int last = tele.rows - 1;
  std::vector<Index> locals(layout.qubits, layout.local_index(last, 0));
  Vector2 amps;
  for (int bit = 0; bit < 2; ++bit) {
    locals[tele.output_qubit] = layout.local_index(last, bit);
    amps[bit] = state[layout.flat(locals)];
  }
  return amps;
}

double success_probability(const Vector& state, const BasisLayout& layout,
                           const TeleportLayout& tele) {
  return success_amplitudes(state, layout, tele).squaredNorm();
}

Vector2 conditional_output(const Vector& state, const BasisLayout& layout,
                           const TeleportLayout& tele) {
  Vector2 amps = success_amplitudes(state, layout, tele);
  const double nrm = amps.norm();
  if (nrm > 0.0) amps /= nrm;
  return amps;
}

std::function<void(Vector&)> parked_site_projector(
    const BasisLayout& layout, const TeleportLayout& tele) {
  const Index dim = layout.dim();
  auto mask = std::make_shared<std::vector<char>>(dim, 0);
  const Index parked = layout.local_index(tele.rows - 1, 1);
  for (Index f = 0; f < dim; ++f) {
    for (int q : tele.measured) {
      if (layout.local_of(f, q) == parked) {
        (*mask)[f] = 1;
        break;
      }
    }
  }
  return [mask](Vector& v) {
    for (Index i = 0; i < v.size(); ++i)
      if ((*mask)[i]) v[i] = Complex(0.0, 0.0);
  };
}

}  // namespace gsqc
