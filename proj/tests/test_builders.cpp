#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "gsqc/builders.hpp"
#include "gsqc/oracle.hpp"

using namespace gsqc;

namespace {

Circuit one_qubit(const std::vector<Gate>& gates, int input_bit = 0) {
  Circuit c;
  c.qubits = 1;
  c.input = {input_bit};
  for (const Gate& g : gates) c.steps.push_back({{g, {0}}});
  return c;
}

Circuit identity_ladder(int n, int input_bit = 0) {
  return one_qubit(
      std::vector<Gate>(n, make_unitary(GateLibrary::identity(), "I")),
      input_bit);
}

RealVector dense_spectrum(const SparseHermitian& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.dense());
  return es.eigenvalues();
}

// History vector for any register count: all electrons share row i, logical
// content from the trace, amplitude 1/sqrt(N+1).
Vector aligned_history(const Circuit& c, const BasisLayout& layout) {
  const EvolutionTrace tr = evolve(c);
  Vector psi = Vector::Zero(layout.dim());
  const double scale = 1.0 / std::sqrt(double(tr.states.size()));
  for (size_t i = 0; i < tr.states.size(); ++i) {
    const Vector& s = tr.states[i];
    for (Index pattern = 0; pattern < s.size(); ++pattern) {
      if (s[pattern] == Complex(0, 0)) continue;
      std::vector<Index> locals(c.qubits);
      for (int q = 0; q < c.qubits; ++q) {
        const int bit = (pattern >> (c.qubits - 1 - q)) & 1;
        locals[q] = layout.local_index(int(i), bit);
      }
      psi[layout.flat(locals)] += scale * s[pattern];
    }
  }
  return psi;
}

}  // namespace

TEST_CASE("single-step ladder matrix is frozen") {
  BuiltOperator b = build_single_qubit(identity_ladder(1), 0.0);
  REQUIRE(b.op.dim == 4);
  Matrix h = b.op.dense();
  Matrix expect(4, 4);
  expect << 1, 0, -1, 0,
            0, 1, 0, -1,
            -1, 0, 1, 0,
            0, -1, 0, 1;
  CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-15);

  // Signed bias lands on the row-0 diagonal: +delta on logical 0.
  Matrix hb = build_single_qubit(identity_ladder(1), 0.2).op.dense();
  CHECK(std::abs(hb(0, 0) - 1.2) < 1e-15);
  CHECK(std::abs(hb(1, 1) - 0.8) < 1e-15);
  CHECK(std::abs(hb(2, 2) - 1.0) < 1e-15);

  // Epsilon scales everything.
  Matrix h2 = build_single_qubit(identity_ladder(1), 0.0, 2.0).op.dense();
  CHECK((h2 - 2.0 * expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("input bits choose the bias signs") {
  Circuit c;
  c.qubits = 3;
  c.input = {1, 0, 1};
  auto d = input_deltas(c, 1e-3);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == 1e-3);
  CHECK(d[1] == -1e-3);
  CHECK(d[2] == 1e-3);
}

TEST_CASE("spectrum ignores the gate content") {
  std::mt19937_64 rng(5);
  const int n = 6;
  RealVector ref = dense_spectrum(build_single_qubit(identity_ladder(n), 0.0).op);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Gate> gates;
    for (int i = 0; i < n; ++i) gates.push_back(make_unitary(random_unitary(rng)));
    RealVector got = dense_spectrum(build_single_qubit(one_qubit(gates), 0.0).op);
    CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
  // And matches the closed form, two copies per sector level.
  auto closed = chain_spectrum(n);
  for (int i = 0; i < ref.size(); ++i)
    CHECK(ref[i] == doctest::Approx(closed[i]).epsilon(1e-12));
}

TEST_CASE("history states span the unbiased kernel") {
  std::mt19937_64 rng(17);
  std::vector<Gate> gates;
  for (int i = 0; i < 5; ++i) gates.push_back(make_unitary(random_unitary(rng)));

  Circuit c = one_qubit(gates);
  BuiltOperator b = build_single_qubit(c, 0.0);
  for (int bit : {0, 1}) {
    Vector m = mimic_state(evolve(c, {bit}));
    CHECK(b.op.apply(m).norm() < 1e-12);
  }
  RealVector ev = dense_spectrum(b.op);
  CHECK(std::abs(ev[0]) < 1e-12);
  CHECK(std::abs(ev[1]) < 1e-12);
  CHECK(ev[2] > 0.1);

  // With bias only the row-0 term survives: |H m| = |delta| eps / sqrt(N+1).
  const double delta = 0.2;
  BuiltOperator bb = build_single_qubit(c, delta);
  Vector m0 = mimic_state(evolve(c, {0}));
  CHECK(bb.op.apply(m0).norm() ==
        doctest::Approx(delta / std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("bias magnitude must stay below one") {
  CHECK_THROWS_AS(build_single_qubit(identity_ladder(2), 1.0), Error);
  CHECK_THROWS_AS(build_single_qubit(identity_ladder(2), -1.5), Error);
  Circuit c;
  c.qubits = 2;
  c.input = {0, 0};
  c.steps.push_back({{make_unitary(GateLibrary::identity(), "I"), {0}},
                     {make_unitary(GateLibrary::identity(), "I"), {1}}});
  CHECK_THROWS_AS(build_multi_qubit(c, std::vector<double>{0.0, 1.0}), Error);
  CHECK_THROWS_AS(build_multi_qubit(c, std::vector<double>{0.0}), Error);
}

TEST_CASE("local ladder pieces have the frozen entries") {
  // Projection with lambda 2 on a 2-row ladder, acting on row 1.
  Matrix p = ladder_projection(2, 1, 2.0, 1.0);
  REQUIRE(p.rows() == 4);
  CHECK(std::abs(p(0, 0) - 1.0) < 1e-15);   // occ0 on row 0
  CHECK(std::abs(p(2, 2) - 0.25) < 1e-15);  // occ0 / lambda^2 on row 1
  CHECK(std::abs(p(0, 2) + 0.5) < 1e-15);   // -hop / lambda
  CHECK(std::abs(p(1, 1)) < 1e-15);         // logical 1 untouched
  CHECK(std::abs(p(3, 3)) < 1e-15);
  CHECK(std::abs(p(1, 3)) < 1e-15);

  Matrix bst = ladder_boost(2, 1, 2.0, 1.0);
  CHECK(std::abs(bst(1, 1) - 1.0) < 1e-15);
  CHECK(std::abs(bst(3, 3) - 0.25) < 1e-15);
  CHECK(std::abs(bst(1, 3) + 0.5) < 1e-15);
  CHECK((bst - bst.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

  Matrix adv = ladder_advance(2, 1, GateLibrary::not_gate(), 1.0);
  CHECK(std::abs(adv(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(adv(3, 3) - 1.0) < 1e-15);
  CHECK(std::abs(adv(0, 3) + 1.0) < 1e-15);  // -U connects |0,0> to |1,NOT 0>
  CHECK(std::abs(adv(0, 2)) < 1e-15);

  Matrix bias = ladder_bias(3, 0.25, 2.0);
  CHECK(std::abs(bias(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(bias(1, 1) + 0.5) < 1e-15);
  CHECK(bias.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("projection and boost terms annihilate their target history") {
  // W then P(2): surviving branch (1/sqrt 2)|0> gets amplified by lambda = 2
  // on the final row, so the target weights are 1, 1, sqrt(2).
  Circuit c = one_qubit({make_unitary(GateLibrary::walsh(), "W"),
                         make_projection(2.0)});
  BuiltOperator b = build_single_qubit(c, 0.0);
  const EvolutionTrace tr = evolve(c);
  Vector target = mimic_state(tr, {1.0, 1.0, 2.0});
  CHECK(b.op.apply(target).norm() < 1e-12);
  RealVector ev = dense_spectrum(b.op);
  CHECK(std::abs(ev[0]) < 1e-13);
  CHECK(ev[1] > -1e-13);
}

TEST_CASE("two independent registers add their spectra") {
  Circuit c;
  c.qubits = 2;
  c.input = {0, 0};
  c.steps.push_back({{make_unitary(GateLibrary::identity(), "I"), {0}},
                     {make_unitary(GateLibrary::identity(), "I"), {1}}});
  BuiltOperator b = build_multi_qubit(c, 0.0);
  REQUIRE(b.op.dim == 16);
  RealVector ev = dense_spectrum(b.op);
  // {0,0,2,2} + {0,0,2,2}: 0 x4, 2 x8, 4 x4.
  for (int i = 0; i < 4; ++i) CHECK(std::abs(ev[i]) < 5e-13);
  for (int i = 4; i < 12; ++i) CHECK(ev[i] == doctest::Approx(2.0).epsilon(1e-12));
  for (int i = 12; i < 16; ++i) CHECK(ev[i] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("independent registers: products of per-register histories span the kernel") {
  // Registers advance on their own clocks, so the zero modes are products
  // of single-register history states, one factor per input choice.
  std::mt19937_64 rng(23);
  std::vector<Matrix2> g0, g1;
  Circuit c;
  c.qubits = 2;
  c.input = {0, 0};
  for (int s = 0; s < 3; ++s) {
    g0.push_back(random_unitary(rng));
    g1.push_back(random_unitary(rng));
    c.steps.push_back({{make_unitary(g0.back()), {0}},
                       {make_unitary(g1.back()), {1}}});
  }
  BuiltOperator b = build_multi_qubit(c, 0.0);
  REQUIRE(b.op.dim == 8 * 8);

  auto register_history = [](const std::vector<Matrix2>& gates, int input) {
    Circuit one;
    one.qubits = 1;
    one.input = {input};
    for (const auto& g : gates) one.steps.push_back({{make_unitary(g), {0}}});
    return aligned_history(one, build_single_qubit(one, 0.0).layout);
  };

  for (int i0 = 0; i0 < 2; ++i0) {
    for (int i1 = 0; i1 < 2; ++i1) {
      const Vector h0 = register_history(g0, i0);
      const Vector h1 = register_history(g1, i1);
      Vector prod = Vector::Zero(b.op.dim);
      for (Index a = 0; a < 8; ++a)
        for (Index d = 0; d < 8; ++d) prod[b.layout.flat({a, d})] = h0[a] * h1[d];
      CHECK(std::abs(prod.norm() - 1.0) < 1e-12);
      CHECK(b.op.apply(prod).norm() < 1e-12);
    }
  }
}

TEST_CASE("interacting steps stay junk free and mimic under bias") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 4; ++trial) {
    Circuit c;
    c.qubits = 2;
    c.input = {trial & 1, (trial >> 1) & 1};
    c.steps.push_back({{make_unitary(random_unitary(rng)), {0}},
                       {make_unitary(random_unitary(rng)), {1}}});
    c.steps.push_back({{make_cnot(0, 1), {0, 1}}});
    c.steps.push_back({{make_unitary(random_unitary(rng)), {0}},
                       {make_unitary(random_unitary(rng)), {1}}});
    BuiltOperator b = build_multi_qubit(c, 0.0);
    REQUIRE(b.op.dim == 8 * 8);  // two registers, 2(N+1) = 8 sites each

    // Junk-free: kernel dimension is exactly 2^q = 4 at zero bias.
    RealVector ev = dense_spectrum(b.op);
    CHECK(std::abs(ev[3]) < 1e-12);
    CHECK(ev[4] > 1e-3);

    // Bias toward the declared inputs and read the rows where both
    // registers sit at the same step: those blocks follow the evolution.
    const double mag = 1e-3;
    BuiltOperator biased = build_multi_qubit(c, input_deltas(c, mag));
    Eigen::SelfAdjointEigenSolver<Matrix> es(biased.op.dense());
    const Vector g = es.eigenvectors().col(0);
    const EvolutionTrace tr = evolve(c);
    for (int row = 0; row <= 3; ++row) {
      Vector block(4);
      for (Index pat = 0; pat < 4; ++pat) {
        std::vector<Index> locals(2);
        for (int q = 0; q < 2; ++q)
          locals[q] =
              biased.layout.local_index(row, int((pat >> (1 - q)) & 1));
        block[pat] = g[biased.layout.flat(locals)];
      }
      const double w = block.norm();
      REQUIRE(w > 0.1);
      CHECK(std::abs(tr.states[size_t(row)].dot(block)) / w >=
            1.0 - 10.0 * mag);
    }
  }
}

TEST_CASE("reversed CNOT orientation changes the operator, not the spectrum") {
  Circuit a;
  a.qubits = 2;
  a.input = {0, 0};
  a.steps.push_back({{make_cnot(0, 1), {0, 1}}});
  Circuit b;
  b.qubits = 2;
  b.input = {0, 0};
  b.steps.push_back({{make_cnot(1, 0), {0, 1}}});
  Matrix ha = build_multi_qubit(a, 0.0).op.dense();
  Matrix hb = build_multi_qubit(b, 0.0).op.dense();
  CHECK((ha - hb).cwiseAbs().maxCoeff() > 0.5);
  RealVector ea = dense_spectrum(build_multi_qubit(a, 0.0).op);
  RealVector eb = dense_spectrum(build_multi_qubit(b, 0.0).op);
  CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("amplitude profile solves the zero-mode recurrence") {
  ChainProfile p = profile_from_lambda({1.0, 2.0, 4.0});
  REQUIRE(p.v.size() == 3);
  REQUIRE(p.t.size() == 2);
  CHECK(p.v[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.v[1] == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(p.v[2] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(p.t[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.t[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.scale == doctest::Approx(0.5).epsilon(1e-14));
  // Amplitudes renormalized to sum lambda^2 = N+1 = 3.
  double s2 = 0.0;
  for (double l : p.lambda) s2 += l * l;
  CHECK(s2 == doctest::Approx(3.0).epsilon(1e-14));

  CHECK_THROWS_AS(profile_from_lambda({1.0, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(profile_from_lambda({1.0}), Error);
}

TEST_CASE("uniform profile reproduces the plain ladder") {
  Circuit c = one_qubit({make_unitary(GateLibrary::walsh(), "W"),
                         make_unitary(GateLibrary::not_gate(), "NOT")});
  ChainProfile p = profile_from_lambda({1.0, 1.0, 1.0});
  Matrix tailored = build_nonunitary_chain(c, p, 0.1).op.dense();
  Matrix plain = build_single_qubit(c, 0.1).op.dense();
  CHECK((tailored - plain).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tailored chain annihilates the weighted history") {
  std::mt19937_64 rng(31);
  std::vector<double> lambda = {1.0, 2.0, 4.0, 2.0, 1.0};
  ChainProfile p = profile_from_lambda(lambda);
  std::vector<Gate> gates;
  for (int i = 0; i < 4; ++i) gates.push_back(make_unitary(random_unitary(rng)));
  Circuit c = one_qubit(gates);
  BuiltOperator b = build_nonunitary_chain(c, p, 0.0);
  Vector target = mimic_state(evolve(c), p.lambda);
  CHECK(std::abs(target.norm() - 1.0) < 1e-13);
  CHECK(b.op.apply(target).norm() < 1e-12);
  RealVector ev = dense_spectrum(b.op);
  CHECK(ev[0] > -1e-13);

  // Projection or boost steps are outside the tailored form.
  Circuit bad = one_qubit({make_unitary(GateLibrary::walsh(), "W"),
                           make_projection(2.0)});
  CHECK_THROWS_AS(
      build_nonunitary_chain(bad, profile_from_lambda({1., 1., 1.}), 0.0),
      Error);
}

TEST_CASE("stored operators are Hermitian and round-trip as text") {
  std::mt19937_64 rng(41);
  std::vector<Gate> gates;
  for (int i = 0; i < 3; ++i) gates.push_back(make_unitary(random_unitary(rng)));
  BuiltOperator b = build_single_qubit(one_qubit(gates), 0.1);
  CHECK(hermiticity_deviation(b.op, 25, 9) < 1e-13);

  SparseHermitian back = SparseHermitian::parse_dump(b.op.dump());
  REQUIRE(back.dim == b.op.dim);
  Vector x = Vector::Random(b.op.dim);
  CHECK((back.apply(x) - b.op.apply(x)).norm() < 1e-12 * x.norm());
}

TEST_CASE("embed_term places local operators with the right strides") {
  BasisLayout layout{2, 2};  // two registers, 2 rows each
  SparseHermitian h(layout.dim());
  Matrix local = Matrix::Zero(4, 4);
  local(1, 2) = Complex(0, 1);  // |row0 bit1> <row1 bit0| on register 1
  local(2, 1) = Complex(0, -1);
  embed_term(h, layout, {1}, local);
  Matrix d = h.dense();
  for (Index r = 0; r < 4; ++r) {
    // Register 0 untouched: block diagonal, each block the local matrix.
    CHECK(std::abs(d(4 * r + 1, 4 * r + 2) - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(d(4 * r + 2, 4 * r + 1) - Complex(0, -1)) < 1e-15);
  }
  CHECK(d.cwiseAbs().sum() == doctest::Approx(8.0));
}
