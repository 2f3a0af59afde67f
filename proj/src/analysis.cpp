#include "gsqc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace gsqc {

namespace {

Vector to_vector(const Vector2& v) {
  Vector out(2);
  out << v(0), v(1);
  return out;
}

}  // namespace

MimicExtract extract_mimic(const Vector& state, const BasisLayout& layout,
                           const EvolutionTrace& trace) {
  if (state.size() != layout.dim())
    throw Error("state length does not match the layout");
  if (trace.qubits != layout.qubits)
    throw Error("trace and layout disagree on the register count");
  if (static_cast<int>(trace.states.size()) != layout.rows)
    throw Error("trace and layout disagree on the row count");

  MimicExtract out;
  out.output_row = layout.rows - 1;
  const Index block_dim = Index(1) << layout.qubits;
  std::vector<Index> locals(layout.qubits);

  for (int row = 0; row < layout.rows; ++row) {
    Vector block(block_dim);
    for (Index bits = 0; bits < block_dim; ++bits) {
      for (int q = 0; q < layout.qubits; ++q) {
        const int b = static_cast<int>((bits >> (layout.qubits - 1 - q)) & 1);
        locals[q] = layout.local_index(row, b);
      }
      block[bits] = state[layout.flat(locals)];
    }
    const double w = block.squaredNorm();
    out.weights.push_back(w);
    out.aligned_weight += w;
    double fid = std::numeric_limits<double>::quiet_NaN();
    if (w > 0.0)
      fid = std::abs(trace.states[row].dot(block)) / std::sqrt(w);
    out.fidelities.push_back(fid);
    out.blocks.push_back(std::move(block));
  }
  out.final_row_weight = out.weights.back();
  return out;
}

double loglog_slope(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("slope fit needs at least two matched points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw Error("slope fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error("slope fit is degenerate");
  return (n * sxy - sx * sy) / denom;
}

GapScan standard_gap_scan(const std::vector<int>& ns, double delta,
                          double epsilon, const SolverOptions& solver) {
  GapScan scan;
  scan.kind = "standard";
  for (int n : ns) {
    if (n < 1) throw Error("ladder length must be positive");
    Circuit c;
    c.qubits = 1;
    c.input = {0};
    for (int k = 0; k < n; ++k)
      c.steps.push_back({{make_unitary(GateLibrary::identity(), "I"), {0}}});

    BuiltOperator built = build_single_qubit(c, delta, epsilon);
    const GapReport g = gap_report(built.op, solver);
    GapScanRow row;
    row.parameter = n;
    row.e0 = g.e0;
    row.e1 = g.e1;
    row.e2 = g.e2;
    row.splitting = g.splitting;
    row.gap = g.gap;
    row.reference = delta == 0.0
                        ? 2.0 * epsilon * (1.0 - std::cos(M_PI / (n + 1)))
                        : 2.0 * epsilon * std::abs(delta) / (n + 1);
    row.converged = g.converged;
    scan.rows.push_back(row);
  }

  if (delta == 0.0 && scan.rows.size() >= 2) {
    std::vector<double> xs, ys;
    for (const GapScanRow& r : scan.rows)
      if (r.converged) {
        xs.push_back(r.parameter + 1.0);
        ys.push_back(r.gap);
      }
    if (xs.size() >= 2) {
      scan.slope = loglog_slope(xs, ys);
      scan.has_slope = true;
    }
  }
  return scan;
}

NonunitaryReport nonunitary_report(const Circuit& c,
                                   const ChainProfile& profile,
                                   double epsilon,
                                   const SolverOptions& solver) {
  NonunitaryReport rep;
  rep.profile = profile;
  BuiltOperator built = build_nonunitary_chain(c, profile, 0.0, epsilon);

  SolverOptions opt = solver;
  opt.k = 3;
  if (opt.block == 0) opt.block = 2;
  const SpectrumResult sr = lowest_eigenpairs(built.op, opt);
  rep.e0 = sr.eigenvalues[0];
  rep.e1 = sr.eigenvalues[1];
  rep.e2 = sr.eigenvalues[2];
  rep.gap = rep.e2 - rep.e0;
  rep.converged = sr.converged;

  const Vector target = mimic_state(evolve(c), profile.lambda);
  rep.kernel_residual = built.op.apply(target).norm();

  const EvolutionTrace trace = evolve(c);
  const MimicExtract ex = extract_mimic(sr.eigenvectors.col(0), built.layout,
                                        trace);
  rep.weights = ex.weights;
  const int rows = built.layout.rows;
  for (int i = 0; i < rows; ++i) {
    const double t = profile.lambda[i] * profile.lambda[i] / rows;
    rep.weight_targets.push_back(t);
    rep.max_weight_error =
        std::max(rep.max_weight_error, std::abs(ex.weights[i] - t));
  }
  return rep;
}

std::vector<double> geometric_lambda(int rows, double ratio) {
  if (rows < 2) throw Error("profile needs at least two rows");
  if (!(ratio > 0.0)) throw Error("ratio must be positive");
  std::vector<double> l(rows);
  double v = 1.0;
  for (int i = 0; i < rows; ++i) {
    l[i] = v;
    v *= ratio;
  }
  return l;
}

std::vector<double> centered_lambda(int rows, double boost) {
  if (rows < 2) throw Error("profile needs at least two rows");
  if (!(boost >= 1.0)) throw Error("boost must be at least 1");
  std::vector<double> l(rows);
  for (int i = 0; i < rows; ++i)
    l[i] = 1.0 + (boost - 1.0) * std::sin(M_PI * i / (rows - 1));
  return l;
}

namespace {

// Projector onto the orthogonal complement of the parked sites and the span
// of the null-mode columns.  The columns are not mutually orthogonal (the
// measurement rows make the content maps non-unitary), so the projection
// goes through the pseudo-inverse of their Gram matrix.
// Null-space columns merged into one flat-index-sorted stream so a
// projection makes two sequential passes instead of one scatter per column.
struct KernelDeflator {
  std::vector<Index> flat;
  std::vector<int> col;
  std::vector<Complex> val;
  int nk = 0;
  Matrix ginv;
  std::function<void(Vector&)> parked;

  void project(Vector& v) const {
    if (parked) parked(v);
    Vector c = Vector::Zero(nk);
    const std::size_t m = flat.size();
    for (std::size_t t = 0; t < m; ++t)
      c[col[t]] += std::conj(val[t]) * v[flat[t]];
    c = (ginv * c).eval();
    for (std::size_t t = 0; t < m; ++t) v[flat[t]] -= c[col[t]] * val[t];
  }
};

Complex column_overlap(const SparseColumn& a, const SparseColumn& b) {
  Complex s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      s += std::conj(a[i].second) * b[j].second;
      ++i;
      ++j;
    }
  }
  return s;
}

KernelDeflator make_deflator(const TeleportKernelBasis& basis,
                             std::function<void(Vector&)> parked) {
  const int nk = static_cast<int>(basis.columns.size());
  Matrix g(nk, nk);
  for (int a = 0; a < nk; ++a)
    for (int b = a; b < nk; ++b) {
      const Complex ov = column_overlap(basis.columns[a], basis.columns[b]);
      g(a, b) = ov;
      g(b, a) = std::conj(ov);
    }
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  if (es.info() != Eigen::Success)
    throw Error("null-space Gram matrix eigensolve failed");
  const double top = es.eigenvalues()[nk - 1];
  Matrix ginv = Matrix::Zero(nk, nk);
  for (int i = 0; i < nk; ++i)
    if (es.eigenvalues()[i] > 1e-10 * top)
      ginv += es.eigenvectors().col(i) * (1.0 / es.eigenvalues()[i]) *
              es.eigenvectors().col(i).adjoint();

  KernelDeflator out;
  out.nk = nk;
  out.ginv = std::move(ginv);
  out.parked = std::move(parked);
  std::size_t total = 0;
  for (const auto& c : basis.columns) total += c.size();
  std::vector<std::pair<Index, int>> order;
  order.reserve(total);
  for (int s = 0; s < nk; ++s)
    for (const auto& e : basis.columns[s]) order.emplace_back(e.first, s);
  std::sort(order.begin(), order.end());
  out.flat.reserve(total);
  out.col.reserve(total);
  out.val.reserve(total);
  std::vector<std::size_t> cursor(nk, 0);
  for (const auto& [f, s] : order) {
    out.flat.push_back(f);
    out.col.push_back(s);
    out.val.push_back(basis.columns[s][cursor[s]++].second);
  }
  return out;
}

// Smallest eigenvalue in the deflated sector by inverse iteration; each
// sweep solves op x = v with Jacobi-preconditioned conjugate gradients.
// The deflated operator is positive definite there, so plain CG applies.
// The sweep's Rayleigh quotient never falls below the sector minimum, so
// a caller-supplied stop_below threshold can certify "gap < threshold"
// before the iteration settles (bound_only marks that exit).
struct GapProbe {
  double value = 0.0;
  double residual = 0.0;
  long matvecs = 0;
  bool converged = false;
  bool bound_only = false;
};

GapProbe lowest_deflated_level(const SparseHermitian& op,
                               const KernelDeflator& defl,
                               const TeleportOptions& opt, double stop_below,
                               const Vector* start, Vector* keep) {
  const Index dim = op.dim;
  RealVector diag = RealVector::Zero(dim);
  for (const auto& e : op.entries)
    if (e.i == e.j) diag[e.i] += e.v.real();
  const double dtop = diag.maxCoeff();
  if (!(dtop > 0.0)) throw Error("operator diagonal is not positive");
  Vector inv_diag(dim);
  for (Index i = 0; i < dim; ++i)
    inv_diag[i] = 1.0 / std::max(diag[i], 1e-12 * dtop);

  Vector v;
  if (start && start->size() == dim) {
    v = *start;
    defl.project(v);
  }
  if (v.size() != dim || v.norm() <= 1e-8) {
    std::mt19937_64 rng(opt.seed);
    auto unit_real = [&rng]() {
      return static_cast<double>(rng() >> 11) * 0x1p-53;
    };
    v.resize(dim);
    for (Index i = 0; i < dim; ++i) {
      const double re = 2.0 * unit_real() - 1.0;
      const double im = 2.0 * unit_real() - 1.0;
      v[i] = Complex(re, im);
    }
    defl.project(v);
  }
  const double vn = v.norm();
  if (!(vn > 0.0)) throw Error("deflation left no directions to probe");
  v /= vn;

  GapProbe out;
  Vector hv = op.apply(v);
  ++out.matvecs;
  double theta = std::real(v.dot(hv));
  double last_resid = std::numeric_limits<double>::infinity();
  double last_rel = 1.0;

  for (int outer = 0; outer < opt.max_outer && out.matvecs < opt.matvec_budget;
       ++outer) {
    // Once v is closer to an eigenvector than a cold start (residual below
    // theta), x = v/theta starts the solve with residual (Hv - theta v)/theta
    // already in hand.  Inner accuracy follows the sweep's progress: during
    // the descent a loose solve peels levels just as fast.
    Vector x, r;
    if (outer == 0 || !(theta > 0.0) || last_resid >= theta) {
      x = Vector::Zero(dim);
      r = v;  // right-hand side is unit norm
    } else {
      x = v / theta;
      r = v - hv / theta;
      defl.project(r);
    }
    const double tol =
        std::min(3e-3, std::max(opt.cg_tol, 0.1 * last_rel));
    if (r.norm() > tol) {
      Vector z = r.cwiseProduct(inv_diag);
      defl.project(z);
      Vector p = z;
      double rz = std::real(r.dot(z));
      while (out.matvecs < opt.matvec_budget) {
        Vector ap = op.apply(p);
        ++out.matvecs;
        defl.project(ap);
        const double pap = std::real(p.dot(ap));
        if (!(pap > 0.0) || !(rz > 0.0)) break;
        const double alpha = rz / pap;
        x += alpha * p;
        r -= alpha * ap;
        if (r.norm() <= tol) break;
        z = r.cwiseProduct(inv_diag);
        defl.project(z);
        const double rz_next = std::real(r.dot(z));
        p = z + (rz_next / rz) * p;
        rz = rz_next;
      }
    }
    defl.project(x);
    const double xn = x.norm();
    if (!(xn > 0.0)) break;
    v = x / xn;
    hv = op.apply(v);
    ++out.matvecs;
    const double theta_next = std::real(v.dot(hv));
    Vector resid = hv - theta_next * v;
    defl.project(resid);
    out.residual = resid.norm();
    last_resid = out.residual;
    const double rel = std::abs(theta_next - theta) /
                       std::max(std::abs(theta_next), 1e-300);
    last_rel = rel;
    theta = theta_next;
    if (stop_below > 0.0 && theta < stop_below) {
      out.converged = true;
      out.bound_only = true;
      break;
    }
    if (outer >= 1 && rel <= opt.rq_tol) {
      out.converged = true;
      break;
    }
  }
  out.value = theta;
  if (keep) *keep = v;
  return out;
}

// Shared zero-bias measurement: exact null modes, readout from the
// all-zero-input mode, deflated gap.
struct TeleportPoint {
  double p = 0.0;
  double fid = 0.0;
  double comp_energy = 0.0;
  double kernel_residual = 0.0;
  double gap = 0.0;
  double gap_residual = 0.0;
  bool gap_is_upper_bound = false;
  int null_modes = 0;
  long matvecs = 0;
  bool converged = false;
};

TeleportPoint measure_teleport_point(const std::vector<Matrix2>& gates,
                                     double lambda,
                                     const TeleportOptions& opt,
                                     Vector* keep_mode0,
                                     const Vector* gap_start = nullptr,
                                     Vector* keep_gap_vec = nullptr) {
  TeleportBuild mb =
      build_teleport(gates, lambda, 0.0, opt.epsilon, opt.max_dim);
  const TeleportKernelBasis basis =
      teleport_kernel_basis(gates, lambda, mb.layout);

  TeleportPoint pt;
  pt.null_modes = static_cast<int>(basis.columns.size());

  Vector dense = Vector::Zero(mb.layout.dim());
  for (int s = 0; s < pt.null_modes; ++s) {
    dense.setZero();
    for (const auto& e : basis.columns[s]) dense[e.first] = e.second;
    const Vector hd = mb.op.apply(dense);
    ++pt.matvecs;
    pt.kernel_residual = std::max(pt.kernel_residual, hd.norm());
    if (s == 0) {
      pt.comp_energy = std::real(dense.dot(hd));
      pt.p = success_probability(dense, mb.layout, mb.tele);
      const Vector2 cond = conditional_output(dense, mb.layout, mb.tele);
      pt.fid = fidelity(to_vector(cond),
                        to_vector(serial_product_state(gates)));
      if (keep_mode0) *keep_mode0 = dense;
    }
  }

  const KernelDeflator defl =
      make_deflator(basis, parked_site_projector(mb.layout, mb.tele));
  const double reference =
      opt.epsilon / (6.0 * (6.0 + lambda * lambda));
  const double stop_below = opt.gap_early_stop ? reference / 3.0 : 0.0;
  const GapProbe probe =
      lowest_deflated_level(mb.op, defl, opt, stop_below, gap_start,
                            keep_gap_vec);
  pt.gap = probe.value;
  pt.gap_residual = probe.residual;
  pt.gap_is_upper_bound = probe.bound_only;
  pt.matvecs += probe.matvecs;

  const double scale = std::max(1.0, opt.epsilon);
  pt.converged = probe.converged && basis.max_mismatch <= 1e-8 * scale &&
                 pt.kernel_residual <= 1e-8 * scale;
  return pt;
}

}  // namespace

TeleportReport teleport_run(const std::vector<Matrix2>& gates, double lambda,
                            const TeleportOptions& opt) {
  const int n = static_cast<int>(gates.size());
  TeleportReport rep;
  rep.n_gates = n;
  rep.lambda = lambda;
  rep.epsilon = opt.epsilon;
  rep.delta_mag = opt.delta_mag;
  const double l2 = lambda * lambda;
  rep.p_min = std::pow((l2 / 2.0) / (6.0 + l2 / 2.0), 2 * n - 2) * l2 /
              (6.0 + l2);
  rep.gap_estimate = opt.epsilon / (6.0 * (6.0 + l2));

  Vector mode0;
  const TeleportPoint pt = measure_teleport_point(gates, lambda, opt, &mode0);
  rep.p = pt.p;
  rep.conditional_fidelity = pt.fid;
  rep.comp_energy = pt.comp_energy;
  rep.kernel_residual = pt.kernel_residual;
  rep.gap = pt.gap;
  rep.gap_residual = pt.gap_residual;
  rep.kernel_levels_seen = pt.null_modes;
  rep.matvecs = pt.matvecs;
  rep.converged = pt.converged;

  if (!opt.skip_plain_ground) {
    // Diagnostic only: where does the biased operator's real ground sit, and
    // does it coincide with the computing mode?  Best effort within the step
    // cap; never flips the report's converged flag.
    TeleportBuild biased = build_teleport(gates, lambda, -opt.delta_mag,
                                          opt.epsilon, opt.max_dim);
    SolverOptions gs;
    gs.k = 1;
    gs.tol = opt.ground_tol;
    gs.seed = opt.seed;
    gs.block = 2;
    gs.max_block_steps = opt.ground_steps;
    const SpectrumResult plain = lowest_eigenpairs(biased.op, gs);
    rep.matvecs += plain.matvecs;
    rep.ground_energy = plain.eigenvalues[0];
    rep.ground_success = success_probability(plain.eigenvectors.col(0),
                                             biased.layout, biased.tele);
    const Complex ov = mode0.dot(plain.eigenvectors.col(0));
    rep.ground_is_computational = std::norm(ov) > 0.5;
  }
  return rep;
}

GapScan teleport_gap_scan(const std::vector<Matrix2>& gates,
                          const std::vector<double>& lambdas,
                          const TeleportOptions& opt) {
  GapScan scan;
  scan.kind = "teleport";
  for (double lambda : lambdas) {
    const TeleportPoint pt = measure_teleport_point(gates, lambda, opt,
                                                    nullptr);
    GapScanRow row;
    row.parameter = lambda;
    row.e0 = pt.comp_energy;  // null space pins E0 = E1 = 0
    row.e1 = pt.comp_energy;
    row.e2 = pt.gap;
    row.splitting = 0.0;
    row.gap = pt.gap;
    row.reference = opt.epsilon / (6.0 * (6.0 + lambda * lambda));
    row.converged = pt.converged;
    scan.rows.push_back(row);
  }
  return scan;
}

}  // namespace gsqc
