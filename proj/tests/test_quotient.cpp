#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "thicknerve/quotient.hpp"

using namespace thicknerve;

namespace {

IntMatrix mat(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  IntMatrix m;
  m << a, b, c, d;
  return m;
}

// All of SL2(Z) with entries bounded by `bound`, one matrix per sign class.
std::vector<IntMatrix> small_modular_elements(std::int64_t bound) {
  std::vector<IntMatrix> out;
  for (std::int64_t a = -bound; a <= bound; ++a)
    for (std::int64_t c = -bound; c <= bound; ++c)
      for (std::int64_t d = -bound; d <= bound; ++d) {
        if (c == 0) {
          if (a * d != 1) continue;
          for (std::int64_t b = -bound; b <= bound; ++b) out.push_back(mat(a, b, c, d));
        } else if ((a * d - 1) % c == 0) {
          const std::int64_t b = (a * d - 1) / c;
          if (std::abs(b) <= bound) out.push_back(mat(a, b, c, d));
        }
      }
  return out;
}

// Slow quotient distance: minimum over every small modular element with the
// right image in PSL2(Z/N).
double brute_distance(const QuotientSpace& q, const std::vector<IntMatrix>& hs, const QuotientPoint& a,
                      const QuotientPoint& b) {
  const auto& g = q.lattice().group();
  const int want = g.multiply(g.inverse(a.label), b.label);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : hs)
    if (g.id_of(h) == want) best = std::min(best, distance(a.chart, apply(h, b.chart)));
  return best;
}

QuotientPoint random_point(std::mt19937_64& rng, const QuotientSpace& q) {
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uly(std::log(std::sqrt(3.0) / 2), std::log(q.y_cap()));
  std::uniform_int_distribution<int> ul(0, q.label_count() - 1);
  for (;;) {
    const HPointd z{ux(rng), std::exp(uly(rng))};
    if (in_fundamental_domain(z, q.y_cap())) return {ul(rng), z};
  }
}

}  // namespace

TEST_CASE("projection and lift are inverse up to the lattice") {
  const CongruenceLattice lat(4);
  const QuotientSpace q(lat, 8.0);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ux(-3, 3), uly(-3, 1);
  const std::vector<IntMatrix> gammas{mat(1, 4, 0, 1), mat(1, 0, 4, 1), mat(5, 4, -4, -3), mat(-3, 8, -8, 21)};
  for (int k = 0; k < 500; ++k) {
    const HPointd z{ux(rng), std::exp(uly(rng))};
    const QuotientPoint p = q.project(z);
    CHECK(in_fundamental_domain(p.chart, 1e300, 1e-9));
    // The lift is a Gamma(4)-translate of z: the relating matrix lies in the lattice.
    const Reduction r = reduce_to_fundamental(z);
    const IntMatrix rel = lat.group().lift(p.label) * r.g;
    CHECK(lat.contains(canonical_sign(rel)));
    CHECK(distance(q.lift(p), apply(rel, z)) < 1e-8);
    // Lattice translates project to the same point.
    const QuotientPoint p2 = q.project(apply(gammas[k % gammas.size()], z));
    if (in_fundamental_domain(p.chart, 1e300, -1e-6)) {
      CHECK(p2.label == p.label);
      CHECK(distance(p2.chart, p.chart) < 1e-7);
    }
  }
}

TEST_CASE("tile sets contain every nearby translate") {
  const CongruenceLattice lat(3);
  const QuotientSpace q(lat, 4.0);
  const double radius = 0.4;
  std::set<std::array<std::int64_t, 4>> tiles;
  for (const auto& t : q.tiles(radius)) {
    tiles.insert({t.h(0, 0), t.h(0, 1), t.h(1, 0), t.h(1, 1)});
    CHECK(t.label == lat.group().id_of(t.h));
    CHECK((t.h * t.h_inverse).isIdentity());
  }
  // Oracle: sample F at random and keep every element h whose image of a
  // sample comes within the radius of another sample.
  std::mt19937_64 rng(67);
  std::vector<HPointd> pts;
  while (pts.size() < 3000) {
    const QuotientPoint p = random_point(rng, q);
    pts.push_back(p.chart);
  }
  for (int i = 0; i < 60; ++i) pts.push_back({-0.5 + i / 59.0, q.y_cap()});
  for (int i = 0; i < 60; ++i) pts.push_back({std::cos(M_PI / 3 + i * M_PI / 177), std::sin(M_PI / 3 + i * M_PI / 177)});
  const auto hs = small_modular_elements(9);
  int needed = 0;
  // Every sample is within 0.94 of (0, 1.6) when y_cap = 4.
  const HPointd centre{0, 1.6};
  for (const auto& h : hs) {
    if (distance(centre, apply(h, centre)) > 1.9 + radius) continue;
    bool near = false;
    for (std::size_t i = 0; i < pts.size() && !near; i += 3)
      for (std::size_t j = 0; j < pts.size() && !near; j += 3) near = distance(pts[i], apply(h, pts[j])) < radius;
    if (!near) continue;
    ++needed;
    const IntMatrix c = canonical_sign(h);
    CHECK(tiles.count({c(0, 0), c(0, 1), c(1, 0), c(1, 1)}) == 1);
  }
  CHECK(needed > 5);
  CHECK(q.tiles(radius).size() < 200);
}

TEST_CASE("quotient distance against the brute-force minimum") {
  for (int n : {3, 5}) {
    const CongruenceLattice lat(n);
    const QuotientSpace q(lat, 3.0);
    const auto hs = small_modular_elements(12);
    std::mt19937_64 rng(71 + n);
    const double radius = 0.6;
    int close = 0;
    for (int k = 0; k < 400; ++k) {
      const QuotientPoint a = random_point(rng, q);
      QuotientPoint b = random_point(rng, q);
      if (k % 2) {
        // Nearby point in the quotient: push a lift of a a little and reproject.
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        const HPointd la = q.lift(a);
        b = q.project({la.x + u(rng) * la.y, la.y * std::exp(u(rng))});
      }
      const double fast = q.distance_below(a, b, radius);
      const double slow = brute_distance(q, hs, a, b);
      if (slow < radius - 1e-9) {
        ++close;
        CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
      } else if (slow > radius + 1e-9) {
        CHECK(std::isinf(fast));
      }
    }
    CHECK(close > 100);
  }
}

TEST_CASE("quotient distance is a metric on samples") {
  const CongruenceLattice lat(3);
  const QuotientSpace q(lat, 3.0);
  std::mt19937_64 rng(73);
  const double radius = 1.5;
  for (int k = 0; k < 300; ++k) {
    const QuotientPoint a = random_point(rng, q);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    const HPointd la = q.lift(a);
    const QuotientPoint b = q.project({la.x + u(rng) * la.y, la.y * std::exp(u(rng))});
    const HPointd lb = q.lift(b);
    const QuotientPoint c = q.project({lb.x + u(rng) * lb.y, lb.y * std::exp(u(rng))});
    const double ab = q.distance_below(a, b, radius), ba = q.distance_below(b, a, radius);
    const double bc = q.distance_below(b, c, radius), ac = q.distance_below(a, c, radius);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(q.distance_below(a, a, radius) < 1e-12);
    CHECK(ac <= ab + bc + 1e-12);
  }
}

TEST_CASE("chart index neighbour queries match a linear scan") {
  const CongruenceLattice lat(3);
  const QuotientSpace q(lat, 5.0);
  ChartIndex index(q, 0.05);
  std::mt19937_64 rng(79);
  std::vector<QuotientPoint> pts;
  for (int k = 0; k < 3000; ++k) {
    pts.push_back(random_point(rng, q));
    CHECK(index.insert(pts.back()) == static_cast<std::uint32_t>(k));
  }
  const double radius = 0.3;
  for (int k = 0; k < 200; ++k) {
    const QuotientPoint p = random_point(rng, q);
    std::map<std::uint32_t, double> got;
    index.for_each_within(p, radius, [&](std::uint32_t j, const HPointd& lifted, double d) {
      CHECK(distance(p.chart, lifted) == doctest::Approx(d).epsilon(1e-9));
      auto [it, fresh] = got.emplace(j, d);
      if (!fresh) it->second = std::min(it->second, d);
    });
    std::map<std::uint32_t, double> want;
    for (std::uint32_t j = 0; j < pts.size(); ++j) {
      const double d = q.distance_below(p, pts[j], radius);
      if (d < radius) want.emplace(j, d);
    }
    REQUIRE(got.size() == want.size());
    for (const auto& [j, d] : want) CHECK(got.at(j) == doctest::Approx(d).epsilon(1e-9));
    CHECK(index.any_within(p, radius) == !want.empty());
  }
}
