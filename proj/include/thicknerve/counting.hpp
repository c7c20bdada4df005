#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "thicknerve/homology.hpp"

namespace thicknerve {

/// Labeled simple graph on vertices 0..n-1, edges as sorted pairs in
/// lexicographic order.
struct BoundedDegreeGraph {
  int n{0};
  std::vector<std::array<int, 2>> edges;

  int max_degree() const;
  static BoundedDegreeGraph complete(int n);
  static BoundedDegreeGraph path(int n);
};

/// What the enumerator hands to its visitor: adjacency bitmasks plus the
/// triangle and length-2 path counts, maintained incrementally.
struct GraphView {
  int n{0};
  const std::uint16_t* adjacency{nullptr};
  int edge_count{0};
  std::uint64_t triangles{0};
  std::uint64_t paths2{0};

  BoundedDegreeGraph materialize() const;
};

inline constexpr int kDefaultGraphCap = 9;

/// Every labeled graph on n vertices with max degree <= d_max, edges decided
/// in lexicographic pair order with degree pruning. Returns the count.
std::uint64_t enumerate_graphs(int n, int d_max, const std::function<void(const GraphView&)>& visit = {},
                               int cap = kDefaultGraphCap);

struct TriangleStats {
  std::uint64_t triangles{0};
  std::uint64_t paths2{0};
};

/// Exact triangle and length-2 path counts; raises FalsificationError unless
/// triangles <= paths2 <= n d_max^2.
TriangleStats triangle_bound_check(const BoundedDegreeGraph& g, int d_max);
TriangleStats triangle_bound_check(const BoundedDegreeGraph& g);

/// Number of 2-complexes with 1-skeleton g: 2^(triangles).
BigInt skeleton_count(const BoundedDegreeGraph& g);
/// Same count by testing every subset of vertex triples (n <= 6).
BigInt skeleton_count_brute(const BoundedDegreeGraph& g);

/// Neighbourhood-choice bound on labeled graphs with max degree <= d: each
/// vertex picks at most d neighbours among the others, so the count is at
/// most S^n with S = sum_{j <= d} C(n-1, j).
BigInt graph_count_envelope(int n, int d);
/// S <= n^d, hence the envelope is at most n^(c n) with exponent c = d.
double graph_envelope_exponent(int d);

/// Census envelope for volume V: c1 = 1/A(delta/2) bounds the vertex count,
/// graphs contribute V^(c2 V), triangle subsets 2^(c1 V d^2), and
/// V^(C V) with C = c2 + c1 d^2 ln 2 dominates their product for V >= e.
/// All log values are natural logarithms.
struct CensusEnvelope {
  double volume{0};
  double c1{0};
  double d{0};
  double c2{0};
  double big_c{0};
  /// floor(c1 V).
  double vertices{0};
  /// floor(c1 V) * ln sum_{j <= d} C(floor(c1 V), j).
  double log_graphs{0};
  /// c1 V d^2 ln 2.
  double log_triangles{0};
  /// C V ln V.
  double log_envelope{0};
  /// V from which V^(C V) is proven to dominate.
  double valid_from{0};
};

CensusEnvelope census_envelope(double volume, double c1, double d);

struct CountRow {
  int n{0};
  int d_max{0};
  std::uint64_t labeled{0};
  /// Isomorphism classes, -1 when not computed.
  std::int64_t classes{-1};
  std::uint64_t max_triangles{0};
  std::uint64_t max_paths2{0};
  std::uint64_t triangle_bound{0};
  BigInt skeletons{0};
  BigInt envelope{0};
  bool within_envelope{true};
  /// n <= brute_limit: every skeleton count matched the subset brute force.
  bool skeletons_brute_checked{false};
};

struct CountOptions {
  int cap{kDefaultGraphCap};
  int isomorphism_limit{6};
  int brute_limit{6};
};

/// Rows for 1 <= n <= n_max and 0 <= d <= min(d_max, n-1). Raises
/// FalsificationError when a count exceeds its envelope or a triangle bound
/// fails.
std::vector<CountRow> count_table(int n_max, int d_max, const CountOptions& opt = {});

void write_count_csv(std::ostream& os, const std::vector<CountRow>& rows);
/// Plot series: V, V ln V and the log terms of the census envelope.
void write_envelope_csv(std::ostream& os, const std::vector<CensusEnvelope>& curve);

}  // namespace thicknerve
