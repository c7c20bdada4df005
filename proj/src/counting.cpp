#include "thicknerve/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "thicknerve/errors.hpp"

namespace thicknerve {

int BoundedDegreeGraph::max_degree() const {
  std::vector<int> deg(n, 0);
  for (const auto& e : edges) {
    ++deg[e[0]];
    ++deg[e[1]];
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

BoundedDegreeGraph BoundedDegreeGraph::complete(int n) {
  BoundedDegreeGraph g{n, {}};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j});
  return g;
}

BoundedDegreeGraph BoundedDegreeGraph::path(int n) {
  BoundedDegreeGraph g{n, {}};
  for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
  return g;
}

BoundedDegreeGraph GraphView::materialize() const {
  BoundedDegreeGraph g{n, {}};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adjacency[i] >> j & 1u) g.edges.push_back({i, j});
  return g;
}

namespace {

class Enumerator {
 public:
  Enumerator(int n, int d, const std::function<void(const GraphView&)>& visit) : n_(n), d_(d), visit_(visit) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs_.push_back({i, j});
    view_.n = n;
    view_.adjacency = adj_.data();
  }

  std::uint64_t run() {
    step(0);
    return count_;
  }

 private:
  void step(std::size_t k) {
    if (k == pairs_.size()) {
      ++count_;
      if (visit_) visit_(view_);
      return;
    }
    step(k + 1);
    const auto [i, j] = pairs_[k];
    if (deg_[i] >= d_ || deg_[j] >= d_) return;
    const auto added_triangles = static_cast<std::uint64_t>(std::popcount(static_cast<unsigned>(adj_[i] & adj_[j])));
    const auto added_paths = static_cast<std::uint64_t>(deg_[i] + deg_[j]);
    adj_[i] |= static_cast<std::uint16_t>(1u << j);
    adj_[j] |= static_cast<std::uint16_t>(1u << i);
    ++deg_[i];
    ++deg_[j];
    ++view_.edge_count;
    view_.triangles += added_triangles;
    view_.paths2 += added_paths;
    step(k + 1);
    view_.paths2 -= added_paths;
    view_.triangles -= added_triangles;
    --view_.edge_count;
    --deg_[j];
    --deg_[i];
    adj_[i] &= static_cast<std::uint16_t>(~(1u << j));
    adj_[j] &= static_cast<std::uint16_t>(~(1u << i));
  }

  int n_, d_;
  const std::function<void(const GraphView&)>& visit_;
  std::vector<std::array<int, 2>> pairs_;
  std::array<std::uint16_t, 16> adj_{};
  std::array<int, 16> deg_{};
  GraphView view_;
  std::uint64_t count_{0};
};

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

BigInt pow_big(BigInt base, int e) {
  BigInt r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Canonical form: smallest edge bitmask over all vertex relabelings.
std::uint64_t canonical_form(const GraphView& g, const std::vector<std::vector<int>>& perms) {
  std::uint64_t best = ~0ull;
  for (const auto& p : perms) {
    std::uint64_t code = 0;
    int bit = 0;
    for (int i = 0; i < g.n; ++i)
      for (int j = i + 1; j < g.n; ++j, ++bit)
        if (g.adjacency[p[i]] >> p[j] & 1u) code |= 1ull << bit;
    best = std::min(best, code);
  }
  return best;
}

double log_binomial(double n, int k) { return std::lgamma(n + 1) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1); }

}  // namespace

std::uint64_t enumerate_graphs(int n, int d_max, const std::function<void(const GraphView&)>& visit, int cap) {
  if (n < 0 || n > cap || cap > 16)
    throw ConfigError("enumerate_graphs: n = " + std::to_string(n) + " outside [0, " + std::to_string(cap) + "]");
  if (d_max < 0 || (n > 0 && d_max > n - 1))
    throw ConfigError("enumerate_graphs: d_max = " + std::to_string(d_max) + " must lie in [0, n-1]");
  return Enumerator(n, d_max, visit).run();
}

TriangleStats triangle_bound_check(const BoundedDegreeGraph& g) { return triangle_bound_check(g, g.max_degree()); }

TriangleStats triangle_bound_check(const BoundedDegreeGraph& g, int d_max) {
  std::vector<std::uint32_t> adj(g.n, 0);
  for (const auto& e : g.edges) {
    adj[e[0]] |= 1u << e[1];
    adj[e[1]] |= 1u << e[0];
  }
  TriangleStats s;
  for (int v = 0; v < g.n; ++v) {
    const auto deg = static_cast<std::uint64_t>(std::popcount(adj[v]));
    s.paths2 += deg * (deg - (deg > 0)) / 2;
  }
  for (const auto& e : g.edges) {
    // Third vertices above the larger endpoint count each triangle once.
    const std::uint32_t common = adj[e[0]] & adj[e[1]];
    s.triangles += static_cast<std::uint64_t>(std::popcount(common >> e[1]));
  }
  const auto cap = static_cast<std::uint64_t>(g.n) * static_cast<std::uint64_t>(d_max) * static_cast<std::uint64_t>(d_max);
  if (s.triangles > s.paths2 || s.paths2 > cap)
    throw FalsificationError("triangle_bound_check: triangles " + std::to_string(s.triangles) + ", paths " +
                             std::to_string(s.paths2) + ", n d^2 = " + std::to_string(cap));
  return s;
}

BigInt skeleton_count(const BoundedDegreeGraph& g) {
  BigInt r = 1;
  r <<= static_cast<unsigned>(triangle_bound_check(g).triangles);
  return r;
}

BigInt skeleton_count_brute(const BoundedDegreeGraph& g) {
  if (g.n > 6) throw ConfigError("skeleton_count_brute: n <= 6 required");
  std::vector<std::uint32_t> adj(g.n, 0);
  for (const auto& e : g.edges) {
    adj[e[0]] |= 1u << e[1];
    adj[e[1]] |= 1u << e[0];
  }
  std::vector<std::array<int, 3>> triples;
  for (int a = 0; a < g.n; ++a)
    for (int b = a + 1; b < g.n; ++b)
      for (int c = b + 1; c < g.n; ++c) triples.push_back({a, b, c});
  // Walk every subset of triples, keeping those whose triples all have their edges.
  std::uint64_t n = 0;
  const std::function<void(std::size_t)> walk = [&](std::size_t t) {
    if (t == triples.size()) {
      ++n;
      return;
    }
    walk(t + 1);
    const auto [a, b, c] = triples[t];
    if ((adj[a] >> b & 1u) && (adj[b] >> c & 1u) && (adj[a] >> c & 1u)) walk(t + 1);
  };
  walk(0);
  return n;
}

BigInt graph_count_envelope(int n, int d) {
  if (n <= 0) return 1;
  BigInt s = 0;
  for (int j = 0; j <= d; ++j) s += binomial(n - 1, j);
  return pow_big(s, n);
}

double graph_envelope_exponent(int d) { return d; }

CensusEnvelope census_envelope(double volume, double c1, double d) {
  if (!(volume > 0.0)) throw ConfigError("census_envelope: volume must be positive");
  CensusEnvelope e;
  e.volume = volume;
  e.c1 = c1;
  e.d = d;
  // (c1 V + 1)^(d c1 V) <= V^(c2 V) once ln(c1 V + 1) <= (1 + ln(1 + c1)) ln V, i.e. for V >= e.
  e.c2 = c1 * d * (1.0 + std::log1p(c1));
  e.big_c = e.c2 + c1 * d * d * std::log(2.0);
  e.valid_from = std::exp(1.0);
  e.vertices = std::floor(c1 * volume);
  const int dk = static_cast<int>(std::floor(d));
  if (e.vertices > 0) {
    // ln sum_j C(n, j) via a running log-sum-exp.
    double acc = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= dk && j <= e.vertices; ++j) {
      const double t = log_binomial(e.vertices, j);
      const double hi = std::max(acc, t);
      acc = hi + std::log(std::exp(acc - hi) + std::exp(t - hi));
    }
    e.log_graphs = e.vertices * acc;
  }
  e.log_triangles = c1 * volume * d * d * std::log(2.0);
  e.log_envelope = e.big_c * volume * std::log(volume);
  return e;
}

std::vector<CountRow> count_table(int n_max, int d_max, const CountOptions& opt) {
  if (n_max > opt.cap)
    throw ConfigError("count: n_max = " + std::to_string(n_max) + " exceeds the cap " + std::to_string(opt.cap));
  if (d_max < 0) throw ConfigError("count: d_max must be nonnegative");
  std::vector<CountRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    std::vector<std::vector<int>> perms;
    if (n <= opt.isomorphism_limit) {
      std::vector<int> p(n);
      std::iota(p.begin(), p.end(), 0);
      do perms.push_back(p);
      while (std::next_permutation(p.begin(), p.end()));
    }
    for (int d = 0; d <= std::min(d_max, n - 1); ++d) {
      CountRow row;
      row.n = n;
      row.d_max = d;
      row.triangle_bound = static_cast<std::uint64_t>(n) * d * d;
      row.skeletons_brute_checked = n <= opt.brute_limit;
      std::unordered_set<std::uint64_t> classes;
      std::uint64_t brute_mismatch = 0, bound_violations = 0;
      row.labeled = enumerate_graphs(
          n, d,
          [&](const GraphView& g) {
            row.max_triangles = std::max(row.max_triangles, g.triangles);
            row.max_paths2 = std::max(row.max_paths2, g.paths2);
            if (g.triangles > g.paths2 || g.paths2 > row.triangle_bound) ++bound_violations;
            BigInt sk = 1;
            sk <<= static_cast<unsigned>(g.triangles);
            row.skeletons += sk;
            if (row.skeletons_brute_checked && skeleton_count_brute(g.materialize()) != sk) ++brute_mismatch;
            if (!perms.empty()) classes.insert(canonical_form(g, perms));
          },
          opt.cap);
      if (!perms.empty()) row.classes = static_cast<std::int64_t>(classes.size());
      row.envelope = graph_count_envelope(n, d);
      row.within_envelope = BigInt(row.labeled) <= row.envelope;
      if (bound_violations)
        throw FalsificationError("count: " + std::to_string(bound_violations) + " graphs with n = " +
                                 std::to_string(n) + ", d = " + std::to_string(d) + " break the triangle bounds");
      if (brute_mismatch)
        throw FalsificationError("count: skeleton count differs from brute force on " +
                                 std::to_string(brute_mismatch) + " graphs");
      if (!row.within_envelope)
        throw FalsificationError("count: " + std::to_string(row.labeled) + " labeled graphs exceed the envelope " +
                                 row.envelope.str());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_count_csv(std::ostream& os, const std::vector<CountRow>& rows) {
  os << "n,d_max,labeled,classes,max_triangles,max_paths2,triangle_bound,skeletons,envelope,log_envelope\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.d_max << ',' << r.labeled << ',' << r.classes << ',' << r.max_triangles << ','
       << r.max_paths2 << ',' << r.triangle_bound << ',' << r.skeletons << ',' << r.envelope << ','
       << std::log(r.envelope.convert_to<double>()) << '\n';
}

void write_envelope_csv(std::ostream& os, const std::vector<CensusEnvelope>& curve) {
  os << "volume,v_log_v,vertices,log_graphs,log_triangles,log_envelope\n";
  for (const auto& e : curve)
    os << e.volume << ',' << e.volume * std::log(e.volume) << ',' << e.vertices << ',' << e.log_graphs << ','
       << e.log_triangles << ',' << e.log_envelope << '\n';
}

}  // namespace thicknerve
