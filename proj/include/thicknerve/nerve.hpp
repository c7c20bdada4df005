#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "thicknerve/net.hpp"

namespace thicknerve {

/// Simplicial complex with vertices 0..n-1 and simplices stored per
/// dimension as flat arrays of sorted vertex tuples, lexicographically ordered.
class NerveComplex {
 public:
  NerveComplex() = default;
  explicit NerveComplex(std::size_t vertices);

  std::size_t vertex_count() const { return count(0); }
  /// Highest dimension holding a simplex, -1 when empty.
  int dimension() const;
  std::size_t count(int k) const;
  std::span<const std::uint32_t> simplex(int k, std::size_t i) const;
  /// Index of the simplex with these sorted vertices, or -1.
  std::int64_t find(std::span<const std::uint32_t> vertices) const;

  /// Appends a simplex (sorted vertices). Call canonicalize() afterwards if
  /// simplices were not appended in lexicographic order.
  void add(std::span<const std::uint32_t> vertices);
  void canonicalize();

  /// Every face of every simplex is present.
  bool face_closed() const;
  /// Number of k-simplices each vertex belongs to, for k = 1.
  std::vector<std::uint32_t> degrees() const;

  /// True when simplices at the dimension cap admitted an accepted extension.
  bool cap_reached{false};
  int dimension_cap{-1};

  static NerveComplex from_simplices(std::size_t vertices, const std::vector<std::vector<std::uint32_t>>& top,
                                     int dimension_cap = 16);

 private:
  std::vector<std::vector<std::uint32_t>> flat_;
};

struct NerveParams {
  double radius{0};
  /// Witnesses must satisfy delta_dist >= witness_level.
  double witness_level{0};
  int dimension_cap{8};
  double tie_tolerance{1e-9};
};

struct NerveStats {
  std::uint64_t candidates{0};
  std::uint64_t chebyshev_witnesses{0};
  /// Simplices accepted through the fallback search along the retract direction.
  std::uint64_t searched_witnesses{0};
  /// Tuples whose balls meet but with no witness in the cover region.
  std::uint64_t rejected{0};
  std::uint64_t multiple_lifts{0};
  double max_witness_radius{0};
  double min_witness_delta{kNoActive};
  int max_neighbourhood{0};
};

struct NerveBuild {
  NerveComplex complex;
  /// Witness of simplex i of dimension k >= 1 at witnesses[k][i].
  std::vector<std::vector<QuotientPoint>> witnesses;
  NerveStats stats;
};

/// Nerve of the balls of radius params.radius around the net centers
/// intersected with {delta_dist >= witness_level}. A tuple is a simplex when
/// the minimum enclosing ball of its lifted centers has radius <= radius and
/// its centre (the Chebyshev centre) lies in the region; otherwise a short
/// search along the retract direction looks for another witness.
NerveBuild build_nerve(const QuotientSpace& space, const ThinConfig& cfg, const NetCover& net, const ChartIndex& index,
                       const NerveParams& params);

struct WitnessReplay {
  std::uint64_t checked{0};
  std::uint64_t failures{0};
  double max_radius{0};
  double min_delta{kNoActive};
};

/// Re-verifies every stored witness independently: within radius of each
/// vertex (found by a fresh index query) and inside the cover region.
WitnessReplay replay_witnesses(const ThinConfig& cfg, const ChartIndex& index, const NerveBuild& build,
                               const NerveParams& params);

/// 1-skeleton statistics of the nerve of the radius-r balls: an edge joins
/// centers at quotient distance < 2r.
struct CoverGraphStats {
  double radius{0};
  std::size_t vertices{0};
  std::uint64_t edges{0};
  std::uint32_t max_degree{0};
  double mean_degree{0};
  std::size_t components{0};
};

CoverGraphStats cover_graph_stats(const ChartIndex& index, double radius);

/// One simplex per line: dimension, then sorted vertex indices.
void write_simplices(std::ostream& os, const NerveComplex& k);
void write_adjacency_csv(std::ostream& os, const NerveComplex& k);

}  // namespace thicknerve
