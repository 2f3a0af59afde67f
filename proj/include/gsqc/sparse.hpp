#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsqc/types.hpp"

namespace gsqc {

// Flat indexing for q register ladders of `rows` rows each: local index on one
// ladder is 2*row + bit, ladder 0 varies slowest.
struct BasisLayout {
  int qubits = 1;
  int rows = 2;

  Index local_dim() const { return 2 * static_cast<Index>(rows); }
  Index dim() const {
    Index d = 1;
    for (int q = 0; q < qubits; ++q) d *= local_dim();
    return d;
  }
  Index local_index(int row, int bit) const { return 2 * row + bit; }
  Index flat(const std::vector<Index>& locals) const {
    Index f = 0;
    for (int q = 0; q < qubits; ++q) f = f * local_dim() + locals[q];
    return f;
  }
  Index local_of(Index flat_index, int qubit) const {
    Index d = local_dim();
    for (int q = qubits - 1; q > qubit; --q) flat_index /= d;
    return flat_index % d;
  }
  int row_of(Index flat_index, int qubit) const {
    return static_cast<int>(local_of(flat_index, qubit) / 2);
  }
  int bit_of(Index flat_index, int qubit) const {
    return static_cast<int>(local_of(flat_index, qubit) % 2);
  }
};

// Hermitian operator in coordinate form; each unordered index pair is stored
// once with i <= j, the mirror element is implied by conjugation.
struct SparseHermitian {
  struct Entry {
    Index i, j;
    Complex v;
  };

  Index dim = 0;
  std::vector<Entry> entries;

  SparseHermitian() = default;
  explicit SparseHermitian(Index d) : dim(d) {}

  // Accumulates one element of a Hermitian pair (either orientation).
  void add(Index i, Index j, Complex v) {
    if (v == Complex(0.0, 0.0)) return;
    if (i > j) {
      std::swap(i, j);
      v = std::conj(v);
    }
    entries.push_back({i, j, v});
  }

  // Sorts row-major and merges duplicate coordinates.
  void compress();

  Vector apply(const Vector& x) const;
  Matrix dense() const;
  std::size_t stored_entries() const { return entries.size(); }

  // Text form: "dim <d>" header then "i j re im" per stored entry.
  std::string dump() const;
  static SparseHermitian parse_dump(const std::string& text);
};

// max over random pairs of |<w,Hv> - conj(<v,Hw>)|; zero for Hermitian apply.
double hermiticity_deviation(const SparseHermitian& h, int trials,
                             std::uint64_t seed);

}  // namespace gsqc
