#include "gsqc/sparse.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

namespace gsqc {

void SparseHermitian::compress() {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });
  std::size_t out = 0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (out > 0 && entries[out - 1].i == entries[k].i &&
        entries[out - 1].j == entries[k].j) {
      entries[out - 1].v += entries[k].v;
    } else {
      entries[out++] = entries[k];
    }
  }
  entries.resize(out);
}

Vector SparseHermitian::apply(const Vector& x) const {
  if (x.size() != dim) throw Error("apply: vector length does not match dim");
  Vector y = Vector::Zero(dim);
  for (const Entry& e : entries) {
    y[e.i] += e.v * x[e.j];
    if (e.i != e.j) y[e.j] += std::conj(e.v) * x[e.i];
  }
  return y;
}

Matrix SparseHermitian::dense() const {
  Matrix m = Matrix::Zero(dim, dim);
  for (const Entry& e : entries) {
    m(e.i, e.j) += e.v;
    if (e.i != e.j) m(e.j, e.i) += std::conj(e.v);
  }
  return m;
}

std::string SparseHermitian::dump() const {
  SparseHermitian copy = *this;
  copy.compress();
  std::string out = "dim " + std::to_string(dim) + "\n";
  char buf[96];
  for (const Entry& e : copy.entries) {
    std::snprintf(buf, sizeof buf, "%lld %lld %.15g %.15g\n",
                  static_cast<long long>(e.i), static_cast<long long>(e.j),
                  e.v.real(), e.v.imag());
    out += buf;
  }
  return out;
}

SparseHermitian SparseHermitian::parse_dump(const std::string& text) {
  std::istringstream in(text);
  std::string head;
  SparseHermitian h;
  if (!(in >> head) || head != "dim" || !(in >> h.dim) || h.dim <= 0)
    throw Error("operator dump must start with \"dim <d>\"");
  long long i, j;
  double re, im;
  while (in >> i >> j >> re >> im) {
    if (i < 0 || j < i || j >= h.dim) throw Error("operator dump index out of range");
    h.entries.push_back({i, j, Complex(re, im)});
  }
  if (!in.eof()) throw Error("trailing junk in operator dump");
  return h;
}

double hermiticity_deviation(const SparseHermitian& h, int trials,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vec = [&]() {
    Vector v(h.dim);
    for (Index i = 0; i < h.dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    v /= v.norm();
    return v;
  };
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector v = random_vec(), w = random_vec();
    Complex a = w.dot(h.apply(v));             // <w, Hv>
    Complex b = std::conj(v.dot(h.apply(w)));  // <Hw, v>
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace gsqc
