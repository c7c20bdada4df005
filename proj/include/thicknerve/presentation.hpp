#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "thicknerve/homology.hpp"

namespace thicknerve {

/// Finite group presentation. Letters are +(g+1) for generator g and -(g+1)
/// for its inverse; relators are stored freely reduced.
struct GroupPresentation {
  std::size_t generators{0};
  std::vector<std::int32_t> letters;
  std::vector<std::uint64_t> offsets{0};
  /// Edge of the complex behind each generator.
  std::vector<std::uint32_t> generator_edge;
  /// Triangles whose boundary reduced to the empty word.
  std::size_t trivial_relators{0};

  std::size_t relator_count() const { return offsets.size() - 1; }
  std::span<const std::int32_t> relator(std::size_t i) const {
    return {letters.data() + offsets[i], letters.data() + offsets[i + 1]};
  }
  void add_relator(std::span<const std::int32_t> word);
};

/// Edge-path presentation of the fundamental group of a connected complex:
/// generators are the edges outside a breadth-first spanning tree, relators
/// the triangle boundaries. Throws DomainError naming the component count
/// when the complex is disconnected.
GroupPresentation pi1_presentation(const NerveComplex& k);

struct Abelianization {
  std::int64_t rank{0};
  std::vector<std::string> torsion;
  bool arbitrary_precision{false};
};

/// Z^rank + torsion from the relation matrix of exponent sums.
Abelianization abelianization(const GroupPresentation& g);

/// Human-readable: "generators n" then one relator per line as letters.
void write_presentation(std::ostream& os, const GroupPresentation& g);

}  // namespace thicknerve
