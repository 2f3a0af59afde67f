#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "gsqc/builders.hpp"
#include "gsqc/eigensolver.hpp"
#include "gsqc/oracle.hpp"

using namespace gsqc;

namespace {

Circuit identity_ladder(int n, int input_bit = 0) {
  Circuit c;
  c.qubits = 1;
  c.input = {input_bit};
  for (int i = 0; i < n; ++i)
    c.steps.push_back({{make_unitary(GateLibrary::identity(), "I"), {0}}});
  return c;
}

Circuit random_ladder(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Circuit c;
  c.qubits = 1;
  c.input = {0};
  for (int i = 0; i < n; ++i)
    c.steps.push_back({{make_unitary(random_unitary(rng)), {0}}});
  return c;
}

}  // namespace

TEST_CASE("one-dimensional operator") {
  SparseHermitian h(1);
  h.add(0, 0, 2.0);
  auto r = lowest_eigenpairs(h);
  REQUIRE(r.eigenvalues.size() == 1);
  CHECK(r.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(std::abs(r.eigenvectors(0, 0)) - 1.0) < 1e-15);
  CHECK(r.used_dense);
  CHECK(r.converged);
}

TEST_CASE("option validation") {
  SparseHermitian h(8);
  for (Index i = 0; i < 8; ++i) h.add(i, i, double(i));
  SolverOptions bad;
  bad.k = 0;
  CHECK_THROWS_AS(lowest_eigenpairs(h, bad), Error);
  bad.k = 9;
  CHECK_THROWS_AS(lowest_eigenpairs(h, bad), Error);
  bad.k = 1;
  bad.tol = 1e-14;
  CHECK_THROWS_AS(lowest_eigenpairs(h, bad), Error);
  bad.tol = 1e-10;
  bad.force_dense = true;
  bad.force_iterative = true;
  CHECK_THROWS_AS(lowest_eigenpairs(h, bad), Error);
  SolverOptions cd;
  cd.force_dense = true;
  cd.constrain = [](Vector& v) { v[0] = 0.0; };
  CHECK_THROWS_AS(lowest_eigenpairs(h, cd), Error);
}

TEST_CASE("dense and iterative paths agree on ladder spectra") {
  // Levels come in exactly degenerate pairs, the hard case for Lanczos.
  BuiltOperator b = build_single_qubit(random_ladder(40, 3), 0.0);
  REQUIRE(b.op.dim == 82);

  SolverOptions dense;
  dense.k = 6;
  dense.force_dense = true;
  auto rd = lowest_eigenpairs(b.op, dense);
  CHECK(rd.used_dense);

  SolverOptions iter;
  iter.k = 6;
  iter.force_iterative = true;
  auto ri = lowest_eigenpairs(b.op, iter);
  CHECK(!ri.used_dense);
  CHECK(ri.converged);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(rd.eigenvalues[i] - ri.eigenvalues[i]) < 1e-10);
    CHECK(ri.residuals[i] < 1e-9);
  }

  // The two degenerate ground vectors span the same plane.
  Matrix overlap =
      rd.eigenvectors.leftCols(2).adjoint() * ri.eigenvectors.leftCols(2);
  Eigen::JacobiSVD<Matrix> svd(overlap);
  CHECK(svd.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(svd.singularValues()(1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("iterative path matches the closed form on a long chain") {
  BuiltOperator b = build_single_qubit(identity_ladder(300), 0.0);
  REQUIRE(b.op.dim == 602);
  SolverOptions opt;
  opt.k = 6;
  opt.force_iterative = true;
  auto r = lowest_eigenpairs(b.op, opt);
  CHECK(r.converged);
  auto closed = chain_spectrum(300);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(r.eigenvalues[i] - closed[i]) < 1e-9);
}

TEST_CASE("same seed reproduces the same solve") {
  BuiltOperator b = build_single_qubit(random_ladder(60, 8), 1e-3);
  SolverOptions opt;
  opt.k = 4;
  opt.force_iterative = true;
  opt.seed = 777;
  auto r1 = lowest_eigenpairs(b.op, opt);
  auto r2 = lowest_eigenpairs(b.op, opt);
  CHECK(r1.converged);
  CHECK((r1.eigenvalues - r2.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r1.eigenvectors - r2.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r1.matvecs == r2.matvecs);
}

TEST_CASE("constraint hook keeps the solve in an invariant sector") {
  // Identity gates never mix the logical sectors, so zeroing the logical-1
  // components is an invariant-subspace projection.  A positive bias favors
  // logical 1, so the constrained solve must come back with the higher
  // logical-0 sector floor instead of the true ground.
  const int n = 30;
  const double delta = 0.05;
  BuiltOperator b = build_single_qubit(identity_ladder(n), delta);

  SolverOptions plain;
  plain.k = 1;
  plain.force_iterative = true;
  auto rp = lowest_eigenpairs(b.op, plain);

  SolverOptions con;
  con.k = 1;
  con.constrain = [&b](Vector& v) {
    for (Index i = 1; i < v.size(); i += 2) v[i] = 0.0;
  };
  auto rc = lowest_eigenpairs(b.op, con);
  CHECK(!rc.used_dense);
  CHECK(rc.converged);
  CHECK(rc.eigenvalues[0] > rp.eigenvalues[0]);

  // Cross-check both sector floors against dense decompositions of the
  // 31-site sector blocks.
  Matrix full = b.op.dense();
  const Index sites = b.op.dim / 2;
  Matrix s0(sites, sites), s1(sites, sites);
  for (Index i = 0; i < sites; ++i)
    for (Index j = 0; j < sites; ++j) {
      s0(i, j) = full(2 * i, 2 * j);
      s1(i, j) = full(2 * i + 1, 2 * j + 1);
    }
  Eigen::SelfAdjointEigenSolver<Matrix> es0(s0), es1(s1);
  CHECK(std::abs(rc.eigenvalues[0] - es0.eigenvalues()(0)) < 1e-9);
  CHECK(std::abs(rp.eigenvalues[0] - es1.eigenvalues()(0)) < 1e-9);

  // The constrained vector carries no logical-1 weight.
  double w1 = 0.0;
  for (Index i = 1; i < b.op.dim; i += 2) w1 += std::norm(rc.eigenvectors(i, 0));
  CHECK(w1 < 1e-16);
}

TEST_CASE("gap report separates splitting and gap") {
  const int n = 12;
  const double delta = 1e-3;
  BuiltOperator biased = build_single_qubit(identity_ladder(n), delta);
  BuiltOperator neutral = build_single_qubit(identity_ladder(n), 0.0);

  GapReport g = gap_report(biased.op, neutral.op);
  CHECK(g.converged);
  // First-order splitting 2 eps delta/(N+1); closed-form gap at zero bias.
  CHECK(g.splitting ==
        doctest::Approx(2.0 * delta / (n + 1)).epsilon(0.01));
  const double gap_ref = 2.0 * (1.0 - std::cos(M_PI / (n + 1)));
  CHECK(g.gap == doctest::Approx(gap_ref).epsilon(1e-10));
  CHECK(g.e0 < g.e1);
  CHECK(g.e1 < g.e2);

  GapReport one = gap_report(neutral.op);
  CHECK(one.converged);
  CHECK(std::abs(one.splitting) < 1e-11);
  CHECK(one.gap == doctest::Approx(gap_ref).epsilon(1e-9));
}

TEST_CASE("dense cross-check across machine families") {
  std::mt19937_64 rng(19);
  std::vector<SparseHermitian> ops;

  ops.push_back(build_single_qubit(random_ladder(25, 4), 1e-3).op);
  {
    Circuit c;
    c.qubits = 2;
    c.input = {1, 0};
    c.steps.push_back({{make_unitary(random_unitary(rng)), {0}},
                       {make_unitary(random_unitary(rng)), {1}}});
    c.steps.push_back({{make_cnot(1, 0), {0, 1}}});
    c.steps.push_back({{make_unitary(GateLibrary::walsh(), "W"), {0}},
                       {make_projection(2.0), {1}}});
    ops.push_back(build_multi_qubit(c, input_deltas(c, 1e-3)).op);
  }
  {
    Circuit c = random_ladder(20, 6);
    std::vector<double> lam(21);
    for (int i = 0; i <= 20; ++i) lam[i] = 1.0 + 0.1 * i;
    ops.push_back(build_nonunitary_chain(c, profile_from_lambda(lam), 0.0).op);
  }

  for (const SparseHermitian& h : ops) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.dense());
    SolverOptions opt;
    opt.k = 5;
    opt.force_iterative = true;
    auto r = lowest_eigenpairs(h, opt);
    CHECK(r.converged);
    for (int i = 0; i < 5; ++i)
      CHECK(std::abs(r.eigenvalues[i] - es.eigenvalues()(i)) < 1e-10);
  }
}
