#include "thicknerve/presentation.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <ostream>

#include "thicknerve/errors.hpp"

namespace thicknerve {

void GroupPresentation::add_relator(std::span<const std::int32_t> word) {
  const std::size_t base = letters.size();
  for (const auto a : word) {
    if (letters.size() > base && letters.back() == -a) letters.pop_back();
    else letters.push_back(a);
  }
  if (letters.size() == base) ++trivial_relators;
  else offsets.push_back(letters.size());
}

GroupPresentation pi1_presentation(const NerveComplex& k) {
  const std::size_t n = k.vertex_count();
  const std::size_t m = k.dimension() >= 1 ? k.count(1) : 0;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj(n);
  for (std::size_t e = 0; e < m; ++e) {
    const auto s = k.simplex(1, e);
    adj[s[0]].emplace_back(s[1], static_cast<std::uint32_t>(e));
    adj[s[1]].emplace_back(s[0], static_cast<std::uint32_t>(e));
  }
  // Breadth-first spanning forest; a second root means a second component.
  std::vector<char> seen(n, 0), tree(m, 0);
  std::size_t components = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    ++components;
    seen[root] = 1;
    std::deque<std::uint32_t> queue{root};
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (const auto& [w, e] : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          tree[e] = 1;
          queue.push_back(w);
        }
    }
  }
  if (components != 1)
    throw DomainError("pi1_presentation: complex has " + std::to_string(components) +
                      " connected components; a presentation needs exactly one");

  GroupPresentation g;
  std::vector<std::int32_t> letter_of(m, 0);
  for (std::size_t e = 0; e < m; ++e)
    if (!tree[e]) {
      letter_of[e] = static_cast<std::int32_t>(++g.generators);
      g.generator_edge.push_back(static_cast<std::uint32_t>(e));
    }
  if (k.dimension() < 2) return g;
  std::vector<std::int32_t> word;
  std::uint32_t edge[2];
  for (std::size_t t = 0; t < k.count(2); ++t) {
    const auto s = k.simplex(2, t);
    // Loop a -> b -> c -> a: edges ab and bc forwards, ac backwards.
    word.clear();
    edge[0] = s[0];
    edge[1] = s[1];
    const auto ab = k.find(edge);
    edge[0] = s[1];
    edge[1] = s[2];
    const auto bc = k.find(edge);
    edge[0] = s[0];
    const auto ac = k.find(edge);
    if (ab < 0 || bc < 0 || ac < 0) throw DomainError("pi1_presentation: triangle with a missing edge");
    if (letter_of[ab]) word.push_back(letter_of[ab]);
    if (letter_of[bc]) word.push_back(letter_of[bc]);
    if (letter_of[ac]) word.push_back(-letter_of[ac]);
    g.add_relator(word);
  }
  return g;
}

Abelianization abelianization(const GroupPresentation& g) {
  // Two-term complex: relators -> generators, zero map below.
  ChainComplexRep c;
  c.cells = {0, g.generators, g.relator_count()};
  c.boundary.resize(3);
  c.boundary[0].start = {0};
  c.boundary[1].cols = g.generators;
  c.boundary[1].start.assign(g.generators + 1, 0);
  auto& b = c.boundary[2];
  b.rows = g.generators;
  b.cols = g.relator_count();
  std::map<std::uint32_t, std::int32_t> sum;
  for (std::size_t r = 0; r < g.relator_count(); ++r) {
    sum.clear();
    for (const auto a : g.relator(r)) sum[static_cast<std::uint32_t>(std::abs(a) - 1)] += a > 0 ? 1 : -1;
    for (const auto& [gen, v] : sum)
      if (v != 0) {
        b.row.push_back(gen);
        b.value.push_back(v);
      }
    b.start.push_back(b.row.size());
  }
  const auto h = homology_ranks(c, false);
  Abelianization out;
  out.rank = h.betti[1];
  out.torsion = h.torsion[1];
  out.arbitrary_precision = h.arbitrary_precision;
  return out;
}

void write_presentation(std::ostream& os, const GroupPresentation& g) {
  os << "generators " << g.generators << "\nrelators " << g.relator_count() << '\n';
  for (std::size_t r = 0; r < g.relator_count(); ++r) {
    bool first = true;
    for (const auto a : g.relator(r)) {
      os << (first ? "" : " ") << a;
      first = false;
    }
    os << '\n';
  }
}

}  // namespace thicknerve
