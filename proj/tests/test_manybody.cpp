#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "gsqc/builders.hpp"
#include "gsqc/manybody.hpp"
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

Circuit random_ladder(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Gate> gates;
  for (int i = 0; i < n; ++i) gates.push_back(make_unitary(random_unitary(rng)));
  return one_qubit(gates);
}

}  // namespace

TEST_CASE("occupation basis indexing") {
  OccupationBasis b{3};
  CHECK(b.dim() == 27);
  // State (row0 idle, row1 logical 0, row2 logical 1) = 0 + 1*3 + 2*9.
  Index s = 0 + 1 * 3 + 2 * 9;
  CHECK(b.digit(s, 0) == 0);
  CHECK(b.digit(s, 1) == 1);
  CHECK(b.digit(s, 2) == 2);
  CHECK(b.with_digit(s, 0, 2) == s + 2);
  CHECK(b.with_digit(s, 2, 0) == s - 18);
  CHECK(!b.meaningful(s));
  CHECK(b.meaningful(b.meaningful_index(1, 0)));
  CHECK(b.meaningful_index(0, 0) == 1);
  CHECK(b.meaningful_index(0, 1) == 2);
  CHECK(b.meaningful_index(2, 1) == 18);
}

TEST_CASE("one-step occupation operator decomposes into known sectors") {
  ManybodyOperator mb = build_manybody_single_qubit(identity_ladder(1), 0.0);
  REQUIRE(mb.op.dim == 9);
  Matrix h = mb.op.dense();

  // All-idle state costs nothing and couples to nothing.
  CHECK(h.row(0).cwiseAbs().sum() == doctest::Approx(0.0));

  // Both-busy states are diagonal at 2 (both of the step's counts hit them).
  for (int a = 1; a <= 2; ++a)
    for (int bb = 1; bb <= 2; ++bb) {
      const Index s = a + 3 * bb;
      CHECK(std::abs(h(s, s) - 2.0) < 1e-15);
      double off = h.row(s).cwiseAbs().sum() - std::abs(h(s, s));
      CHECK(std::abs(off) < 1e-15);
    }

  // The single-active sector reproduces the 4x4 ladder matrix.
  MeaningfulProjection proj = meaningful_projection(mb.op, mb.basis);
  Matrix expect = build_single_qubit(identity_ladder(1), 0.0).op.dense();
  CHECK((proj.reduced - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(proj.leakage == 0.0);

  // Zero modes: two history states plus the all-idle state.
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  CHECK(std::abs(es.eigenvalues()(2)) < 1e-14);
  CHECK(es.eigenvalues()(3) > 0.5);
}

TEST_CASE("occupation form restricts to the ladder for random programs") {
  for (int n : {2, 3, 4}) {
    Circuit c = random_ladder(n, 100 + n);
    for (double delta : {0.0, -1e-3, 0.3}) {
      ManybodyOperator mb = build_manybody_single_qubit(c, delta);
      MeaningfulProjection proj = meaningful_projection(mb.op, mb.basis);
      Matrix expect = build_single_qubit(c, delta).op.dense();
      CHECK((proj.reduced - expect).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(proj.leakage < 1e-12);
    }
  }
}

TEST_CASE("meaningful-sector spectrum is contained in the full spectrum") {
  Circuit c = random_ladder(2, 55);
  ManybodyOperator mb = build_manybody_single_qubit(c, -1e-3);
  Eigen::SelfAdjointEigenSolver<Matrix> full(mb.op.dense());
  Eigen::SelfAdjointEigenSolver<Matrix> red(
      meaningful_projection(mb.op, mb.basis).reduced);
  for (Index i = 0; i < red.eigenvalues().size(); ++i) {
    double best = 1e9;
    for (Index j = 0; j < full.eigenvalues().size(); ++j)
      best = std::min(best,
                      std::abs(red.eigenvalues()(i) - full.eigenvalues()(j)));
    CHECK(best < 1e-12);
  }
}

TEST_CASE("embedded history state is an exact zero mode") {
  Circuit c = random_ladder(3, 77);
  ManybodyOperator mb = build_manybody_single_qubit(c, 0.0);
  Vector lifted = embed_meaningful(mimic_state(evolve(c)), mb.basis);
  CHECK(std::abs(lifted.norm() - 1.0) < 1e-13);
  CHECK(mb.op.apply(lifted).norm() < 1e-12);
}

TEST_CASE("negative bias grounds the declared input's history") {
  Circuit c = random_ladder(2, 91);
  const double delta = -1e-3;
  ManybodyOperator mb = build_manybody_single_qubit(c, delta);
  Eigen::SelfAdjointEigenSolver<Matrix> es(mb.op.dense());
  CHECK(es.eigenvalues()(0) < -1e-5);   // strictly below the junk floor at 0
  CHECK(es.eigenvalues()(0) > -1e-3);
  Vector ground = es.eigenvectors().col(0);
  Vector lifted = embed_meaningful(mimic_state(evolve(c)), mb.basis);
  CHECK(fidelity(ground, lifted) > 1.0 - 1e-4);
}

TEST_CASE("idle dominance of uniform histories grows with the step count") {
  for (int n : {4, 9}) {
    ManybodyOperator mb =
        build_manybody_single_qubit(identity_ladder(n), -1e-3);
    Vector lifted =
        embed_meaningful(mimic_state(evolve(identity_ladder(n))), mb.basis);
    IdleDominance dom = idle_dominance(lifted, mb.basis);
    REQUIRE(dom.idle.size() == size_t(n + 1));
    CHECK(dom.total_nonidle == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i <= n; ++i) {
      CHECK(dom.nonidle[i] == doctest::Approx(1.0 / (n + 1)).epsilon(1e-12));
      CHECK(dom.idle[i] == doctest::Approx(double(n) / (n + 1)).epsilon(1e-12));
    }
    CHECK(dom.min_ratio == doctest::Approx(double(n)).epsilon(1e-9));
  }

  Vector not_normalized = Vector::Zero(27);
  not_normalized[1] = 0.5;
  CHECK_THROWS_AS(idle_dominance(not_normalized, OccupationBasis{3}), Error);
}

TEST_CASE("row budget is enforced") {
  CHECK_THROWS_AS(build_manybody_single_qubit(identity_ladder(11), 0.0),
                  ResourceError);
  // Ten steps (11 rows) is the edge and must still build.
  ManybodyOperator mb = build_manybody_single_qubit(identity_ladder(10), 0.0);
  CHECK(mb.op.dim == 177147);
}
