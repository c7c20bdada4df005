#include <doctest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "thicknerve/counting.hpp"
#include "thicknerve/errors.hpp"

using namespace thicknerve;

namespace {

// Labeled graphs with max degree <= d by testing every edge subset.
std::uint64_t brute_count(int n, int d) {
  std::vector<std::array<int, 2>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  std::uint64_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
    std::vector<int> deg(n, 0);
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (mask >> e & 1u) {
        ++deg[pairs[e][0]];
        ++deg[pairs[e][1]];
      }
    bool ok = true;
    for (const int x : deg) ok = ok && x <= d;
    count += ok;
  }
  return count;
}

}  // namespace

TEST_CASE("small graph counts") {
  CHECK(enumerate_graphs(3, 1) == 4);
  CHECK(enumerate_graphs(3, 2) == 8);
  CHECK(enumerate_graphs(2, 0) == 1);
  CHECK_THROWS_AS(enumerate_graphs(10, 3), ConfigError);
  CHECK_THROWS_AS(enumerate_graphs(3, 3), ConfigError);
  for (int n = 1; n <= 7; ++n)
    for (int d = 0; d <= std::min(3, n - 1); ++d) CHECK(enumerate_graphs(n, d) == brute_count(n, d));
}

TEST_CASE("enumerated graphs respect the degree cap and carry correct counts") {
  std::uint64_t seen = 0;
  enumerate_graphs(6, 3, [&](const GraphView& g) {
    ++seen;
    const BoundedDegreeGraph full = g.materialize();
    CHECK(full.max_degree() <= 3);
    CHECK(static_cast<int>(full.edges.size()) == g.edge_count);
    const TriangleStats t = triangle_bound_check(full, 3);
    CHECK(t.triangles == g.triangles);
    CHECK(t.paths2 == g.paths2);
  });
  CHECK(seen == enumerate_graphs(6, 3));
}

TEST_CASE("triangles and length-2 paths") {
  const TriangleStats k3 = triangle_bound_check(BoundedDegreeGraph::complete(3));
  CHECK(k3.triangles == 1);
  CHECK(k3.paths2 == 3);
  const TriangleStats p3 = triangle_bound_check(BoundedDegreeGraph::path(3));
  CHECK(p3.triangles == 0);
  CHECK(p3.paths2 == 1);
  const TriangleStats k4 = triangle_bound_check(BoundedDegreeGraph::complete(4));
  CHECK(k4.triangles == 4);
  CHECK(k4.paths2 == 12);
  // A false degree cap of 1 gives n d^2 = 4 < 12 paths.
  CHECK_THROWS_AS(triangle_bound_check(BoundedDegreeGraph::complete(4), 1), FalsificationError);
}

TEST_CASE("skeleton counts") {
  CHECK(skeleton_count(BoundedDegreeGraph::path(5)) == 1);
  CHECK(skeleton_count(BoundedDegreeGraph::complete(3)) == 2);
  CHECK(skeleton_count(BoundedDegreeGraph::complete(4)) == 16);
  CHECK(skeleton_count(BoundedDegreeGraph::complete(6)) == (BigInt(1) << 20));
  for (int n = 1; n <= 6; ++n)
    enumerate_graphs(n, std::min(3, n - 1), [&](const GraphView& g) {
      const BoundedDegreeGraph full = g.materialize();
      CHECK(skeleton_count_brute(full) == skeleton_count(full));
    });
  CHECK(skeleton_count_brute(BoundedDegreeGraph::complete(5)) == 1024);
}

TEST_CASE("graph envelope") {
  // Neighbourhood choices: S = sum_{j<=d} C(n-1, j).
  CHECK(graph_count_envelope(3, 1) == 27);
  CHECK(graph_count_envelope(4, 3) == 4096);
  for (int n = 1; n <= 9; ++n)
    for (int d = 0; d <= std::min(3, n - 1); ++d) {
      const BigInt env = graph_count_envelope(n, d);
      CHECK(BigInt(enumerate_graphs(n, d)) <= env);
      // n^(c n) with the documented exponent c = d.
      BigInt power = 1;
      for (int k = 0; k < static_cast<int>(graph_envelope_exponent(d)) * n; ++k) power *= n;
      CHECK(env <= power);
    }
}

TEST_CASE("census envelope") {
  const double c1 = 50, d = 30;
  const CensusEnvelope tiny = census_envelope(1e-14, c1, d);
  CHECK(tiny.vertices == 0);
  CHECK(tiny.log_graphs == 0);
  CHECK(std::abs(tiny.log_envelope) < 1e-4);
  CHECK(tiny.c2 == doctest::Approx(c1 * d * (1 + std::log(1 + c1))));
  CHECK(tiny.big_c == doctest::Approx(tiny.c2 + c1 * d * d * std::log(2.0)));

  for (const double v : {0.5, 1.0, 2.7, 4.0, 12.566, 50.0}) {
    const CensusEnvelope a = census_envelope(v, c1, d), b = census_envelope(2 * v, c1, d);
    CHECK(b.log_envelope >= 2 * a.log_envelope);
    CHECK(b.log_graphs >= 2 * a.log_graphs);
    if (v >= a.valid_from) CHECK(a.log_graphs + a.log_triangles <= a.log_envelope);
  }
  CHECK_THROWS_AS(census_envelope(0.0, c1, d), ConfigError);
}

TEST_CASE("count table") {
  const auto rows = count_table(3, 2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[3].n == 3);
  CHECK(rows[4].d_max == 1);
  CHECK(rows[4].labeled == 4);
  CHECK(rows[5].labeled == 8);
  CHECK(rows[5].classes == 4);
  CHECK(rows[5].skeletons == 9);
  CHECK(count_table(0, 3).empty());
  CHECK_THROWS_AS(count_table(10, 3), ConfigError);

  std::ostringstream os;
  write_count_csv(os, count_table(3, 1));
  std::string header;
  std::getline(std::istringstream(os.str()) >> std::ws, header);
  CHECK(header.rfind("n,d_max,labeled", 0) == 0);
  CHECK(os.str().find("\n3,1,4,") != std::string::npos);
}
