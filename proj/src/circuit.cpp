#include "gsqc/circuit.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gsqc {

Matrix2 GateLibrary::identity() { return Matrix2::Identity(); }

Matrix2 GateLibrary::not_gate() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2 GateLibrary::walsh() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix2 m;
  m << s, s, s, -s;
  return m;
}

Matrix2 GateLibrary::pauli_z() {
  Matrix2 m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix2 GateLibrary::phase(double theta) {
  Matrix2 m = Matrix2::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = std::polar(1.0, theta);
  return m;
}

std::optional<Matrix2> GateLibrary::resolve(const std::string& token) {
  if (token == "I") return identity();
  if (token == "NOT") return not_gate();
  if (token == "W") return walsh();
  if (token == "Z") return pauli_z();
  if (token.rfind("phase(", 0) == 0 && token.back() == ')') {
    const std::string arg = token.substr(6, token.size() - 7);
    try {
      return phase(std::stod(arg));
    } catch (...) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Gate make_unitary(const Matrix2& u, const std::string& name) {
  Gate g;
  g.kind = GateKind::Unitary;
  g.u = u;
  g.name = name;
  return g;
}

Gate make_cnot(int control, int target) {
  Gate g;
  g.kind = GateKind::Cnot;
  g.control = control;
  g.target = target;
  return g;
}

Gate make_projection(double lambda) {
  Gate g;
  g.kind = GateKind::Projection;
  g.lambda = lambda;
  return g;
}

Gate make_boost(double lambda) {
  Gate g;
  g.kind = GateKind::Boost;
  g.lambda = lambda;
  return g;
}

const PlacedGate* Circuit::gate_on(int k, int qubit) const {
  for (const PlacedGate& pg : steps.at(k))
    for (int q : pg.qubits)
      if (q == qubit) return &pg;
  return nullptr;
}

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error("line " + std::to_string(line) + ": " + msg);
}

double parse_real_part(const std::string& s, bool& ok) {
  ok = true;
  std::string t = s;
  double sign = 1.0;
  if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
    if (t[0] == '-') sign = -1.0;
    t = t.substr(1);
  }
  if (t == "s2") return sign / std::sqrt(2.0);
  auto slash = t.find('/');
  if (slash != std::string::npos) {
    try {
      double num = std::stod(t.substr(0, slash));
      double den = std::stod(t.substr(slash + 1));
      if (den == 0.0) { ok = false; return 0.0; }
      return sign * num / den;
    } catch (...) {
      ok = false;
      return 0.0;
    }
  }
  try {
    size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) { ok = false; return 0.0; }
    return sign * v;
  } catch (...) {
    ok = false;
    return 0.0;
  }
}

}  // namespace

Complex parse_complex_literal(const std::string& token) {
  if (token.empty()) throw Error("empty matrix entry");
  std::string t = token;
  bool has_imag = t.back() == 'i';

  // Split at the last +/- that is not leading and not an exponent sign.
  size_t split = std::string::npos;
  for (size_t p = t.size(); p-- > 1;) {
    if ((t[p] == '+' || t[p] == '-') && t[p - 1] != 'e' && t[p - 1] != 'E') {
      split = p;
      break;
    }
  }

  bool ok = true;
  if (has_imag) {
    std::string imag_str = t.substr(0, t.size() - 1);
    if (split != std::string::npos) {
      std::string real_str = t.substr(0, split);
      imag_str = t.substr(split, t.size() - 1 - split);
      if (imag_str == "+" || imag_str == "-") imag_str += "1";
      bool ok2 = true;
      double re = parse_real_part(real_str, ok);
      double im = parse_real_part(imag_str, ok2);
      if (ok && ok2) return Complex(re, im);
      throw Error("bad complex literal \"" + token + "\"");
    }
    if (imag_str.empty() || imag_str == "+" || imag_str == "-") imag_str += "1";
    double im = parse_real_part(imag_str, ok);
    if (ok) return Complex(0.0, im);
    throw Error("bad complex literal \"" + token + "\"");
  }
  double re = parse_real_part(t, ok);
  if (ok) return Complex(re, 0.0);
  throw Error("bad complex literal \"" + token + "\"");
}

std::string format_complex_literal(Complex z) {
  char buf[96];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.15g", z.real());
    return buf;
  }
  if (z.real() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.15gi", z.imag());
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.15g%+.15gi", z.real(), z.imag());
  return buf;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    if (tok[0] == '#') break;  // comment until end of line
    out.push_back(tok);
  }
  return out;
}

int parse_int(const std::string& s, int line, const std::string& what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(line, "expected integer for " + what + ", got \"" + s + "\"");
  return v;
}

double parse_double(const std::string& s, int line, const std::string& what) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw Error("trailing");
    return v;
  } catch (...) {
    fail(line, "expected number for " + what + ", got \"" + s + "\"");
  }
}

// Reads "[a b; c d]" starting at tokens[pos]; entries are complex literals.
Matrix2 parse_inline_matrix(const std::vector<std::string>& tokens, size_t& pos,
                            int line) {
  std::string joined;
  bool closed = false;
  for (; pos < tokens.size(); ++pos) {
    joined += tokens[pos];
    joined += ' ';
    if (tokens[pos].find(']') != std::string::npos) {
      closed = true;
      ++pos;
      break;
    }
  }
  if (!closed) fail(line, "inline matrix is missing closing \"]\"");
  std::string body;
  for (char ch : joined) {
    if (ch == '[' || ch == ']') continue;
    if (ch == ';') {
      body += ' ';
      continue;
    }
    body += ch;
  }
  std::istringstream is(body);
  std::vector<std::string> entries;
  std::string e;
  while (is >> e) entries.push_back(e);
  if (entries.size() != 4)
    fail(line, "inline matrix needs 4 entries, got " +
                   std::to_string(entries.size()));
  Matrix2 m;
  try {
    m(0, 0) = parse_complex_literal(entries[0]);
    m(0, 1) = parse_complex_literal(entries[1]);
    m(1, 0) = parse_complex_literal(entries[2]);
    m(1, 1) = parse_complex_literal(entries[3]);
  } catch (const Error& err) {
    fail(line, err.what());
  }
  return m;
}

}  // namespace

Circuit parse_circuit(const std::string& text) {
  Circuit c;
  bool saw_qubits = false, saw_input = false;
  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    auto tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const std::string& head = tokens[0];

    if (head == "qubits") {
      if (saw_qubits) fail(line, "duplicate qubits declaration");
      if (tokens.size() != 2) fail(line, "usage: qubits <count>");
      c.qubits = parse_int(tokens[1], line, "qubit count");
      if (c.qubits < 1) fail(line, "qubit count must be positive");
      saw_qubits = true;
      continue;
    }

    if (head == "input") {
      if (!saw_qubits) fail(line, "input before qubits declaration");
      if (saw_input) fail(line, "duplicate input declaration");
      if (static_cast<int>(tokens.size()) != c.qubits + 1)
        fail(line, "input needs exactly " + std::to_string(c.qubits) +
                       " bits");
      for (int q = 0; q < c.qubits; ++q) {
        int b = parse_int(tokens[q + 1], line, "input bit");
        if (b != 0 && b != 1) fail(line, "input bits must be 0 or 1");
        c.input.push_back(b);
      }
      saw_input = true;
      continue;
    }

    if (head == "step") {
      if (!saw_qubits) fail(line, "step before qubits declaration");
      Step step;
      std::vector<bool> covered(c.qubits, false);
      auto next_free = [&]() {
        for (int q = 0; q < c.qubits; ++q)
          if (!covered[q]) return q;
        return -1;
      };
      size_t pos = 1;
      while (pos < tokens.size()) {
        const std::string tok = tokens[pos];
        if (tok == "CNOT") {
          if (pos + 2 >= tokens.size())
            fail(line, "CNOT needs control and target indices");
          int ctl = parse_int(tokens[pos + 1], line, "CNOT control");
          int tgt = parse_int(tokens[pos + 2], line, "CNOT target");
          pos += 3;
          if (ctl < 0 || ctl >= c.qubits || tgt < 0 || tgt >= c.qubits)
            fail(line, "CNOT index out of range");
          if (ctl == tgt) fail(line, "CNOT control equals target");
          if (covered[ctl] || covered[tgt])
            fail(line, "qubit assigned twice in one step");
          covered[ctl] = covered[tgt] = true;
          step.push_back({make_cnot(ctl, tgt), {ctl, tgt}});
          continue;
        }
        int q = next_free();
        if (q < 0) fail(line, "more gate tokens than qubits");
        covered[q] = true;
        if (tok == "P" || tok == "B") {
          if (pos + 1 >= tokens.size())
            fail(line, tok + " needs a strength value");
          double lam = parse_double(tokens[pos + 1], line, "strength");
          pos += 2;
          step.push_back(
              {tok == "P" ? make_projection(lam) : make_boost(lam), {q}});
          continue;
        }
        if (tok[0] == '[') {
          Matrix2 m = parse_inline_matrix(tokens, pos, line);
          step.push_back({make_unitary(m), {q}});
          continue;
        }
        auto lib = GateLibrary::resolve(tok);
        if (!lib) {
          std::string msg = "unknown gate \"" + tok + "\"";
          if (tok == "H" || tok == "h")
            msg += " (the Walsh-Hadamard gate is spelled \"W\")";
          fail(line, msg);
        }
        ++pos;
        step.push_back({make_unitary(*lib, tok), {q}});
      }
      for (int q = 0; q < c.qubits; ++q)
        if (!covered[q])
          fail(line, "step leaves qubit " + std::to_string(q) + " unassigned");
      c.steps.push_back(std::move(step));
      continue;
    }

    fail(line, "unrecognized directive \"" + head + "\"");
  }
  if (!saw_qubits) throw Error("program has no qubits declaration");
  if (!saw_input) c.input.assign(c.qubits, 0);
  return c;
}

Circuit parse_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open circuit file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_circuit(buf.str());
}

std::vector<std::string> validate(const Circuit& c) {
  std::vector<std::string> bad;
  auto note = [&](int k, const std::string& msg) {
    bad.push_back("step " + std::to_string(k) + ": " + msg);
  };
  if (c.qubits < 1) bad.push_back("qubit count must be positive");
  if (static_cast<int>(c.input.size()) != c.qubits)
    bad.push_back("input length does not match qubit count");
  for (int b : c.input)
    if (b != 0 && b != 1) bad.push_back("input bits must be 0 or 1");

  for (int k = 0; k < c.n_steps(); ++k) {
    std::vector<int> count(c.qubits, 0);
    for (const PlacedGate& pg : c.steps[k]) {
      for (int q : pg.qubits) {
        if (q < 0 || q >= c.qubits) {
          note(k, "qubit index out of range");
          continue;
        }
        ++count[q];
      }
      const Gate& g = pg.gate;
      switch (g.kind) {
        case GateKind::Unitary: {
          double dev = (g.u.adjoint() * g.u - Matrix2::Identity())
                           .cwiseAbs()
                           .maxCoeff();
          if (dev > 1e-12)
            note(k, "matrix is not unitary (deviation " +
                        std::to_string(dev) + ")");
          break;
        }
        case GateKind::Cnot:
          if (g.control == g.target) note(k, "CNOT control equals target");
          if (g.control < 0 || g.control >= c.qubits || g.target < 0 ||
              g.target >= c.qubits)
            note(k, "CNOT index out of range");
          break;
        case GateKind::Projection:
        case GateKind::Boost:
          // Strength 1 is the degenerate no-amplification edge; below that
          // the link inverts and the intended terminal state is not reached.
          if (!(g.lambda >= 1.0))
            note(k, "strength lambda must be at least 1 (got " +
                        std::to_string(g.lambda) + ")");
          break;
      }
    }
    for (int q = 0; q < c.qubits; ++q) {
      if (count[q] == 0) note(k, "qubit " + std::to_string(q) + " unassigned");
      if (count[q] > 1)
        note(k, "qubit " + std::to_string(q) + " assigned more than once");
    }
  }
  return bad;
}

void require_valid(const Circuit& c) {
  auto bad = validate(c);
  if (bad.empty()) return;
  std::string msg = "invalid circuit:";
  for (const auto& b : bad) msg += "\n  " + b;
  throw Error(msg);
}

namespace {

std::string format_gate_matrix(const Matrix2& m) {
  std::string s = "[";
  s += format_complex_literal(m(0, 0));
  s += ' ';
  s += format_complex_literal(m(0, 1));
  s += "; ";
  s += format_complex_literal(m(1, 0));
  s += ' ';
  s += format_complex_literal(m(1, 1));
  s += ']';
  return s;
}

std::string format_strength(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

std::string serialize(const Circuit& c) {
  std::string out = "qubits " + std::to_string(c.qubits) + "\n";
  out += "input";
  for (int b : c.input) out += b ? " 1" : " 0";
  out += "\n";
  for (const Step& step : c.steps) {
    out += "step";
    // Stable order: by lowest covered qubit.
    std::vector<const PlacedGate*> order;
    for (const PlacedGate& pg : step) order.push_back(&pg);
    std::sort(order.begin(), order.end(),
              [](const PlacedGate* a, const PlacedGate* b) {
                return *std::min_element(a->qubits.begin(), a->qubits.end()) <
                       *std::min_element(b->qubits.begin(), b->qubits.end());
              });
    for (const PlacedGate* pg : order) {
      const Gate& g = pg->gate;
      switch (g.kind) {
        case GateKind::Unitary:
          out += ' ';
          out += g.name.empty() ? format_gate_matrix(g.u) : g.name;
          break;
        case GateKind::Cnot:
          out += " CNOT " + std::to_string(g.control) + ' ' +
                 std::to_string(g.target);
          break;
        case GateKind::Projection:
          out += " P " + format_strength(g.lambda);
          break;
        case GateKind::Boost:
          out += " B " + format_strength(g.lambda);
          break;
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace gsqc
