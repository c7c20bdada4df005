#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "thicknerve/nerve.hpp"

namespace thicknerve {

using BigInt = boost::multiprecision::cpp_int;

/// Integer matrix in compressed-column form.
struct SparseIntMatrix {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<std::uint64_t> start{0};
  std::vector<std::uint32_t> row;
  std::vector<std::int32_t> value;

  std::size_t nonzeros() const { return row.size(); }
};

/// Free chain complex C_0 <- C_1 <- ... with boundary[k] : C_k -> C_{k-1}
/// (boundary[0] is the zero map to nothing).
struct ChainComplexRep {
  std::vector<std::size_t> cells;
  std::vector<SparseIntMatrix> boundary;

  int top() const { return static_cast<int>(cells.size()) - 1; }
  /// Exact check of boundary[k-1] * boundary[k] = 0 for every k.
  bool boundary_squared_zero() const;

  /// Simplicial chain complex with the alternating face signs.
  static ChainComplexRep of(const NerveComplex& k);
};

struct EulerCharacteristic {
  std::int64_t value{0};
  /// False when the dimension cap truncated the complex.
  bool reliable{true};
};

EulerCharacteristic euler_characteristic(const NerveComplex& k);

struct HomologyResult {
  std::vector<std::int64_t> betti;
  /// Invariant factors > 1 of each H_k, as decimal strings.
  std::vector<std::vector<std::string>> torsion;
  bool arbitrary_precision{false};
  /// Cells per dimension left after the reduction phase.
  std::vector<std::size_t> reduced_cells;
};

/// Homology over the integers. When `vertex_components` is set the complex is
/// treated as simplicial: one vertex per connected component is removed first
/// (relative homology), which lets coreductions start.
HomologyResult homology_ranks(const ChainComplexRep& c, bool vertex_components);
HomologyResult homology_ranks(const NerveComplex& k);

/// Smith normal form diagonal (nonzero entries, in divisibility order) of a
/// dense matrix. Works in 64-bit integers and repeats with arbitrary precision
/// when an intermediate value overflows; `used_bigint` reports which ran.
std::vector<BigInt> smith_diagonal(const std::vector<std::vector<std::int64_t>>& dense, bool* used_bigint = nullptr);

struct EliminationResult {
  std::size_t rank{0};
  std::vector<BigInt> invariant_factors;  // those > 1
  bool arbitrary_precision{false};
};

/// Rank and invariant factors of a sparse matrix: elimination on unit pivots,
/// then dense Smith form on what remains.
EliminationResult eliminate(const SparseIntMatrix& m);

}  // namespace thicknerve
