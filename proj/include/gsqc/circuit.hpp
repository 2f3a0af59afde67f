#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsqc/types.hpp"

namespace gsqc {

// Named 2x2 gate constants usable in program text.
struct GateLibrary {
  static Matrix2 identity();
  static Matrix2 not_gate();
  static Matrix2 walsh();    // (1/sqrt 2) [[1,1],[1,-1]]
  static Matrix2 pauli_z();
  static Matrix2 phase(double theta);  // diag(1, e^{i theta})
  // Resolves a bare token ("I", "NOT", "W", "Z", "phase(0.25)").
  static std::optional<Matrix2> resolve(const std::string& token);
};

enum class GateKind { Unitary, Cnot, Projection, Boost };

struct Gate {
  GateKind kind = GateKind::Unitary;
  Matrix2 u = Matrix2::Identity();  // Unitary only
  std::string name;                 // set when the token was a named constant
  int control = -1;                 // Cnot only
  int target = -1;
  double lambda = 0.0;              // Projection/Boost strength
};

Gate make_unitary(const Matrix2& u, const std::string& name = "");
Gate make_cnot(int control, int target);
Gate make_projection(double lambda);
Gate make_boost(double lambda);

// One gate placed in a step; covers one qubit, or two for Cnot.
struct PlacedGate {
  Gate gate;
  std::vector<int> qubits;
};

using Step = std::vector<PlacedGate>;

struct Circuit {
  int qubits = 1;
  std::vector<int> input;  // classical bit per qubit; selects the bias sign
  std::vector<Step> steps;

  int n_steps() const { return static_cast<int>(steps.size()); }
  // Gate acting on `qubit` during step `k`; null if the step leaves a hole.
  const PlacedGate* gate_on(int k, int qubit) const;
};

// Text format: "qubits <q>", "input <b...>", one "step" line per step.
// Throws Error with a line number on malformed input.
Circuit parse_circuit(const std::string& text);
Circuit parse_circuit_file(const std::string& path);

// Semantic checks: unitarity to 1e-12, index ranges, coverage, strength >= 1.
std::vector<std::string> validate(const Circuit& c);
void require_valid(const Circuit& c);  // throws Error listing all violations

// Emits text that reparses to the same circuit (values at 15 sig. digits).
std::string serialize(const Circuit& c);

// Complex scalar literal: "0.5-0.5i", "2/3", "s2" (= 1/sqrt 2), "1i".
Complex parse_complex_literal(const std::string& token);
std::string format_complex_literal(Complex z);

}  // namespace gsqc
