#include "gsqc/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace gsqc {

namespace {

// Deterministic across platforms: raw engine bits mapped to [0, 1).
double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

Vector random_vector(Index dim, std::mt19937_64& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) {
    const double re = 2.0 * unit_real(rng) - 1.0;
    const double im = 2.0 * unit_real(rng) - 1.0;
    v[i] = Complex(re, im);
  }
  return v;
}

void fix_phase(Eigen::Ref<Matrix> x) {
  for (Index c = 0; c < x.cols(); ++c) {
    Index imax = 0;
    double best = 0.0;
    for (Index i = 0; i < x.rows(); ++i) {
      const double a = std::abs(x(i, c));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (best > 0.0) x.col(c) *= std::conj(x(imax, c)) / best;
  }
}

// Exact residuals; also tightens eigenvalues to Rayleigh quotients and
// re-sorts (cluster members can swap after the refinement).
void finish(const SparseHermitian& h, double tol, SpectrumResult& r) {
  const int k = static_cast<int>(r.eigenvalues.size());
  std::vector<int> order(k);
  RealVector theta(k), res(k);
  for (int i = 0; i < k; ++i) {
    Vector hx = h.apply(r.eigenvectors.col(i));
    theta[i] = std::real(r.eigenvectors.col(i).dot(hx));
    res[i] = (hx - theta[i] * r.eigenvectors.col(i)).norm();
    order[i] = i;
  }
  r.matvecs += k;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return theta[a] < theta[b]; });
  Matrix x(r.eigenvectors.rows(), k);
  r.eigenvalues.resize(k);
  r.residuals.resize(k);
  bool ok = true;
  for (int i = 0; i < k; ++i) {
    r.eigenvalues[i] = theta[order[i]];
    r.residuals[i] = res[order[i]];
    x.col(i) = r.eigenvectors.col(order[i]);
    ok = ok && res[order[i]] <= tol * std::max(1.0, std::abs(theta[order[i]]));
  }
  r.eigenvectors = std::move(x);
  fix_phase(r.eigenvectors);
  r.converged = ok;
}

SpectrumResult solve_dense(const SparseHermitian& h, const SolverOptions& opt) {
  SpectrumResult r;
  r.used_dense = true;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.dense());
  if (es.info() != Eigen::Success)
    throw Error("dense eigensolver failed to converge");
  r.eigenvalues = es.eigenvalues().head(opt.k);
  r.eigenvectors = es.eigenvectors().leftCols(opt.k);
  finish(h, opt.tol, r);
  return r;
}

SpectrumResult solve_lanczos(const SparseHermitian& h,
                             const SolverOptions& opt) {
  const Index dim = h.dim;
  const int k = opt.k;
  const int b = opt.block > 0 ? opt.block : std::max(2, std::min(k, 8));
  int cap = opt.basis_cap > 0
                ? opt.basis_cap
                : std::max({6 * b, 3 * k + 2 * b, 48});
  // Clustered low ends (long chains) need room before the first restart;
  // only worth the memory when the basis itself is cheap.
  if (opt.basis_cap <= 0 && dim <= 65536)
    cap = std::max(cap, static_cast<int>(std::min<Index>(dim, 192)));
  cap = static_cast<int>(std::min<Index>(cap, dim));
  if (cap < k + 2 * b) cap = static_cast<int>(std::min<Index>(k + 2 * b, dim));
  if (cap < k + b)
    throw Error("basis cap too small for requested eigenpair count");
  const long max_steps =
      opt.max_block_steps > 0
          ? opt.max_block_steps
          : std::max<long>(
                200, std::min<long>(
                         static_cast<long>(10.0 * std::sqrt(double(dim))),
                         5000));

  std::mt19937_64 rng(opt.seed);
  Matrix V(dim, cap);
  Matrix T = Matrix::Zero(cap, cap);
  SpectrumResult r;

  auto constrain = [&](Vector& v) {
    if (opt.constrain) opt.constrain(v);
  };

  // Orthonormalize column c of W against V[:, 0:m) and W[:, 0:c); returns
  // the surviving norm.
  auto purify = [&](Matrix& W, int c, int m) {
    for (int pass = 0; pass < 2; ++pass) {
      if (m > 0)
        W.col(c) -= V.leftCols(m) * (V.leftCols(m).adjoint() * W.col(c));
      if (c > 0)
        W.col(c) -= W.leftCols(c) * (W.leftCols(c).adjoint() * W.col(c));
    }
    return W.col(c).norm();
  };

  auto fresh_column = [&](Matrix& W, int c, int m) {
    for (int attempt = 0; attempt < 5; ++attempt) {
      Vector v = random_vector(dim, rng);
      constrain(v);
      W.col(c) = v;
      const double nrm = purify(W, c, m);
      if (nrm > 1e-8) {
        W.col(c) /= nrm;
        return true;
      }
    }
    return false;
  };

  // Random refills stopped finding new directions: the basis already spans
  // the whole reachable space, so the projected problem there is exact.
  auto exhausted_solve = [&](const Matrix& B) -> SpectrumResult {
    const int mm = static_cast<int>(B.cols());
    if (mm < k)
      throw Error("constraint leaves fewer directions than eigenpairs asked");
    Matrix HB(dim, mm);
    for (int j = 0; j < mm; ++j) {
      Vector w = h.apply(B.col(j));
      constrain(w);
      HB.col(j) = w;
    }
    r.matvecs += mm;
    const Matrix M = B.adjoint() * HB;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.adjoint()));
    if (es.info() != Eigen::Success)
      throw Error("projected eigensolve failed");
    r.eigenvalues = es.eigenvalues().head(k);
    r.eigenvectors = B * es.eigenvectors().leftCols(k);
    finish(h, opt.tol, r);
    return r;
  };

  // Start block.
  {
    Matrix W(dim, b);
    for (int c = 0; c < b; ++c)
      if (!fresh_column(W, c, 0)) return exhausted_solve(W.leftCols(c));
    V.leftCols(b) = W;
  }

  int m = b;
  long steps = 0;
  Matrix Qn(dim, b), Rn;
  Eigen::SelfAdjointEigenSolver<Matrix> small;

  while (true) {
    // Expand from the trailing block: W = H q, reorthogonalize, factor.
    Matrix W(dim, b);
    for (int c = 0; c < b; ++c) {
      Vector w = h.apply(V.col(m - b + c));
      constrain(w);
      W.col(c) = w;
    }
    r.matvecs += b;

    Matrix tcol = Matrix::Zero(m, b);
    for (int pass = 0; pass < 2; ++pass) {
      Matrix c = V.leftCols(m).adjoint() * W;
      W -= V.leftCols(m) * c;
      tcol += c;
    }
    T.block(0, m - b, m, b) = tcol;
    T.block(m - b, 0, b, m) = tcol.adjoint();

    Rn = Matrix::Zero(b, b);
    for (int c = 0; c < b; ++c) {
      // Gram-Schmidt within the block, tracking coefficients for R.
      for (int j = 0; j < c; ++j) {
        const Complex pc = Qn.col(j).dot(W.col(c));
        Rn(j, c) += pc;
        W.col(c) -= pc * Qn.col(j);
      }
      double nrm = W.col(c).norm();
      if (nrm > 1e-10) {
        // One refinement pass against the full current basis.
        W.col(c) -= V.leftCols(m) * (V.leftCols(m).adjoint() * W.col(c));
        for (int j = 0; j < c; ++j) {
          const Complex pc = Qn.col(j).dot(W.col(c));
          Rn(j, c) += pc;
          W.col(c) -= pc * Qn.col(j);
        }
        nrm = W.col(c).norm();
      }
      if (nrm > 1e-10) {
        Rn(c, c) = nrm;
        Qn.col(c) = W.col(c) / nrm;
      } else {
        // Invariant subspace hit: refill the direction with a fresh random
        // vector; the zero R row keeps the residual estimate truthful.
        Matrix scratch(dim, c + 1);
        scratch.leftCols(c) = Qn.leftCols(c);
        if (!fresh_column(scratch, c, m)) {
          Matrix B(dim, m + c);
          B.leftCols(m) = V.leftCols(m);
          B.rightCols(c) = Qn.leftCols(c);
          return exhausted_solve(B);
        }
        Qn.col(c) = scratch.col(c);
      }
    }
    ++steps;

    if (m + b <= cap && steps < max_steps) {
      V.middleCols(m, b) = Qn;
      m += b;
      continue;
    }

    // Projected solve on the current basis.
    Matrix Tm = 0.5 * (T.topLeftCorner(m, m) +
                       T.topLeftCorner(m, m).adjoint());
    small.compute(Tm);
    if (small.info() != Eigen::Success)
      throw Error("projected eigensolve failed");
    const RealVector theta = small.eigenvalues();
    const Matrix& S = small.eigenvectors();

    bool all_ok = m >= k;
    for (int i = 0; i < k && all_ok; ++i) {
      const double est = (Rn * S.block(m - b, i, b, 1)).norm();
      all_ok = est <= opt.tol * std::max(1.0, std::abs(theta[i]));
    }

    if (all_ok || steps >= max_steps) {
      r.eigenvalues = theta.head(k);
      r.eigenvectors.resize(dim, k);
      // Blocked product keeps peak memory at one row chunk.
      const Index chunk = std::max<Index>(Index(1) << 14, 1);
      for (Index row = 0; row < dim; row += chunk) {
        const Index len = std::min(chunk, dim - row);
        r.eigenvectors.middleRows(row, len) =
            V.middleRows(row, len).leftCols(m) * S.leftCols(k);
      }
      finish(h, opt.tol, r);
      if (steps >= max_steps && !all_ok) r.converged = false;
      return r;
    }

    // Thick restart: keep the low Ritz vectors, relink through Qn.
    int keep = std::max(k + b, m / 2);
    keep = std::min(keep, cap - b);
    {
      const Index chunk = std::max<Index>(Index(1) << 14, 1);
      Matrix buf;
      for (Index row = 0; row < dim; row += chunk) {
        const Index len = std::min(chunk, dim - row);
        buf.noalias() = V.middleRows(row, len).leftCols(m) * S.leftCols(keep);
        V.middleRows(row, len).leftCols(keep) = buf;
      }
    }
    const Matrix C = Rn * S.block(m - b, 0, b, keep);
    V.middleCols(keep, b) = Qn;
    T.setZero();
    for (int i = 0; i < keep; ++i) T(i, i) = theta[i];
    T.block(keep, 0, b, keep) = C;
    T.block(0, keep, keep, b) = C.adjoint();
    m = keep + b;
    ++r.restarts;
  }
}

}  // namespace

SpectrumResult lowest_eigenpairs(const SparseHermitian& h,
                                 const SolverOptions& opt) {
  if (opt.k < 1) throw Error("eigenpair count must be positive");
  if (opt.k > h.dim)
    throw Error("requested more eigenpairs than the dimension");
  if (opt.tol < 1e-13) throw Error("tolerance below the 1e-13 solver floor");
  if (opt.force_dense && opt.force_iterative)
    throw Error("force_dense and force_iterative are mutually exclusive");
  if (opt.constrain && opt.force_dense)
    throw Error("subspace constraints require the iterative solver");

  const bool dense = opt.force_dense ||
                     (!opt.force_iterative && !opt.constrain &&
                      h.dim < opt.dense_threshold);
  if (dense) return solve_dense(h, opt);
  if (h.dim <= 2 * opt.k)
    throw Error("iterative solver needs dim well above the eigenpair count");
  return solve_lanczos(h, opt);
}

GapReport gap_report(const SparseHermitian& h, SolverOptions opt) {
  opt.k = 3;
  if (opt.block == 0) opt.block = 2;
  const SpectrumResult r = lowest_eigenpairs(h, opt);
  GapReport g;
  g.e0 = r.eigenvalues[0];
  g.e1 = r.eigenvalues[1];
  g.e2 = r.eigenvalues[2];
  g.splitting = g.e1 - g.e0;
  g.gap = g.e2 - g.e0;
  g.converged = r.converged;
  return g;
}

GapReport gap_report(const SparseHermitian& h, const SparseHermitian& zero_twin,
                     SolverOptions opt) {
  GapReport g = gap_report(h, opt);
  const GapReport t = gap_report(zero_twin, opt);
  g.gap = t.gap;
  g.converged = g.converged && t.converged;
  return g;
}

}  // namespace gsqc
