#include "thicknerve/nerve.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <ostream>

#include "thicknerve/chebyshev.hpp"

namespace thicknerve {

NerveComplex::NerveComplex(std::size_t vertices) : flat_(1) {
  flat_[0].resize(vertices);
  std::iota(flat_[0].begin(), flat_[0].end(), 0u);
}

int NerveComplex::dimension() const {
  for (int k = static_cast<int>(flat_.size()) - 1; k >= 0; --k)
    if (!flat_[k].empty()) return k;
  return -1;
}

std::size_t NerveComplex::count(int k) const {
  if (k < 0 || k >= static_cast<int>(flat_.size())) return 0;
  return flat_[k].size() / static_cast<std::size_t>(k + 1);
}

std::span<const std::uint32_t> NerveComplex::simplex(int k, std::size_t i) const {
  const auto w = static_cast<std::size_t>(k + 1);
  return {flat_[k].data() + i * w, w};
}

std::int64_t NerveComplex::find(std::span<const std::uint32_t> vertices) const {
  const int k = static_cast<int>(vertices.size()) - 1;
  std::size_t lo = 0, hi = count(k);
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto s = simplex(k, mid);
    if (std::lexicographical_compare(s.begin(), s.end(), vertices.begin(), vertices.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < count(k) && std::ranges::equal(simplex(k, lo), vertices)) return static_cast<std::int64_t>(lo);
  return -1;
}

void NerveComplex::add(std::span<const std::uint32_t> vertices) {
  const auto k = vertices.size() - 1;
  if (flat_.size() <= k) flat_.resize(k + 1);
  flat_[k].insert(flat_[k].end(), vertices.begin(), vertices.end());
}

void NerveComplex::canonicalize() {
  for (int k = 0; k < static_cast<int>(flat_.size()); ++k) {
    const std::size_t n = count(k);
    auto less = [&](std::size_t a, std::size_t b) {
      const auto sa = simplex(k, a), sb = simplex(k, b);
      return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
    };
    bool sorted = true;
    for (std::size_t i = 1; i < n && sorted; ++i) sorted = less(i - 1, i);
    if (sorted) continue;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), less);
    std::vector<std::uint32_t> out;
    out.reserve(flat_[k].size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && !less(order[i - 1], order[i])) continue;
      const auto s = simplex(k, order[i]);
      out.insert(out.end(), s.begin(), s.end());
    }
    flat_[k] = std::move(out);
  }
}

bool NerveComplex::face_closed() const {
  std::vector<std::uint32_t> face;
  for (int k = 1; k <= dimension(); ++k)
    for (std::size_t i = 0; i < count(k); ++i) {
      const auto s = simplex(k, i);
      for (int drop = 0; drop <= k; ++drop) {
        face.clear();
        for (int v = 0; v <= k; ++v)
          if (v != drop) face.push_back(s[v]);
        if (find(face) < 0) return false;
      }
    }
  return true;
}

std::vector<std::uint32_t> NerveComplex::degrees() const {
  std::vector<std::uint32_t> deg(vertex_count(), 0);
  for (std::size_t i = 0; i < count(1); ++i) {
    const auto e = simplex(1, i);
    ++deg[e[0]];
    ++deg[e[1]];
  }
  return deg;
}

NerveComplex NerveComplex::from_simplices(std::size_t vertices, const std::vector<std::vector<std::uint32_t>>& top,
                                          int dimension_cap) {
  NerveComplex k(vertices);
  k.dimension_cap = dimension_cap;
  for (auto s : top) {
    std::sort(s.begin(), s.end());
    const auto n = static_cast<std::uint32_t>(s.size());
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      if (std::popcount(mask) < 2) continue;
      std::vector<std::uint32_t> face;
      for (std::uint32_t b = 0; b < n; ++b)
        if (mask >> b & 1u) face.push_back(s[b]);
      k.add(face);
    }
  }
  k.canonicalize();
  return k;
}

namespace {

struct Neighbour {
  std::uint32_t id;
  HPointd lift;
  double dist;
};

class NerveBuilder {
 public:
  NerveBuilder(const QuotientSpace& space, const ThinConfig& cfg, const NetCover& net, const ChartIndex& index,
               const NerveParams& params, NerveBuild& out)
      : space_(space), cfg_(cfg), net_(net), index_(index), params_(params), out_(out) {}

  void run() {
    const std::size_t n = net_.centers.size();
    out_.complex = NerveComplex(n);
    out_.complex.dimension_cap = params_.dimension_cap;
    out_.witnesses.assign(static_cast<std::size_t>(params_.dimension_cap) + 1, {});
    const double reach = 2.0 * params_.radius + params_.tie_tolerance;
    for (std::uint32_t i = 0; i < n; ++i) {
      nbrs_.clear();
      index_.for_each_within(net_.centers[i], reach, [&](std::uint32_t j, const HPointd& lift, double d) {
        if (j <= i) return;
        for (auto& e : nbrs_)
          if (e.id == j) {
            ++out_.stats.multiple_lifts;
            if (d < e.dist) e = {j, lift, d};
            return;
          }
        nbrs_.push_back({j, lift, d});
      });
      std::sort(nbrs_.begin(), nbrs_.end(), [](const Neighbour& a, const Neighbour& b) { return a.id < b.id; });
      const std::size_t m = nbrs_.size();
      out_.stats.max_neighbourhood = std::max(out_.stats.max_neighbourhood, static_cast<int>(m));
      if (m > 64)
        throw NumericalError("build_nerve: " + std::to_string(m) + " neighbours of vertex " + std::to_string(i) +
                             " exceed the 64-neighbour limit; the ball radius is too large for the net spacing");
      adj_.assign(m, 0);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
          if (distance(nbrs_[a].lift, nbrs_[b].lift) < reach) {
            adj_[a] |= std::uint64_t{1} << b;
            adj_[b] |= std::uint64_t{1} << a;
          }
      anchor_ = i;
      verts_.assign(1, i);
      pts_.assign(1, net_.centers[i].chart);
      deltas_.assign(1, net_.center_delta[i]);
      const std::uint64_t all = m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
      extend(all);
    }
  }

 private:
  void extend(std::uint64_t candidates) {
    while (candidates) {
      const int c = std::countr_zero(candidates);
      candidates &= candidates - 1;
      verts_.push_back(nbrs_[c].id);
      pts_.push_back(nbrs_[c].lift);
      deltas_.push_back(net_.center_delta[nbrs_[c].id]);
      const int k = static_cast<int>(verts_.size()) - 1;
      if (auto w = witness()) {
        out_.complex.add(verts_);
        const HPointd lifted = apply(space_.lattice().group().lift(net_.centers[anchor_].label), *w);
        out_.witnesses[k].push_back(space_.project(lifted));
        // Remaining candidates all come after c in vertex order.
        const std::uint64_t later = candidates & adj_[c];
        if (k < params_.dimension_cap)
          extend(later);
        else if (later)
          probe_cap(later);
      }
      verts_.pop_back();
      pts_.pop_back();
      deltas_.pop_back();
    }
  }

  void probe_cap(std::uint64_t candidates) {
    while (candidates && !out_.complex.cap_reached) {
      const int c = std::countr_zero(candidates);
      candidates &= candidates - 1;
      pts_.push_back(nbrs_[c].lift);
      deltas_.push_back(net_.center_delta[nbrs_[c].id]);
      if (witness(false)) out_.complex.cap_reached = true;
      pts_.pop_back();
      deltas_.pop_back();
    }
  }

  std::optional<HPointd> witness(bool record = true) {
    if (record) ++out_.stats.candidates;
    const ChebyshevResult<double> meb = chebyshev_center(pts_);
    const double limit = params_.radius + params_.tie_tolerance;
    if (meb.radius > limit) return std::nullopt;
    // delta_dist is 1-Lipschitz: the centre is at least min delta - radius.
    const double bound = *std::min_element(deltas_.begin(), deltas_.end()) - meb.radius;
    double dw = bound;
    if (bound < params_.witness_level) dw = delta_min(cfg_, meb.center, Family::dist_to_sublevel);
    if (dw >= params_.witness_level) {
      if (record) {
        ++out_.stats.chebyshev_witnesses;
        out_.stats.max_witness_radius = std::max(out_.stats.max_witness_radius, meb.radius);
        out_.stats.min_witness_delta = std::min(out_.stats.min_witness_delta, dw);
      }
      return meb.center;
    }
    if (auto w = search(meb.center, dw, limit)) {
      if (record) ++out_.stats.searched_witnesses;
      return w;
    }
    if (record) ++out_.stats.rejected;
    return std::nullopt;
  }

  /// Walks from x along the steering direction of the functions below the
  /// witness level while staying inside every ball.
  std::optional<HPointd> search(HPointd x, double dx, double limit) {
    for (int iter = 0; iter < 32; ++iter) {
      if (dx >= params_.witness_level) {
        out_.stats.min_witness_delta = std::min(out_.stats.min_witness_delta, dx);
        return x;
      }
      const ActiveSet a = active_set(cfg_, x, Family::dist_to_sublevel, params_.witness_level);
      if (a.functions.empty()) return std::nullopt;
      std::vector<FrameVectord> grads;
      for (const auto& f : a.functions) grads.push_back(function_gradient(cfg_, f, x, Family::dist_to_sublevel));
      Steering s;
      try {
        s = steering_direction(grads);
      } catch (const NoImprovingDirection&) {
        return std::nullopt;
      }
      const HPointd y = exp_map(x, s.direction, (params_.witness_level - dx) / s.value + 1e-12);
      for (const auto& p : pts_)
        if (distance(p, y) > limit) return std::nullopt;
      x = y;
      dx = delta_min(cfg_, x, Family::dist_to_sublevel);
    }
    return std::nullopt;
  }

  const QuotientSpace& space_;
  const ThinConfig& cfg_;
  const NetCover& net_;
  const ChartIndex& index_;
  const NerveParams& params_;
  NerveBuild& out_;
  std::uint32_t anchor_{0};
  std::vector<Neighbour> nbrs_;
  std::vector<std::uint64_t> adj_;
  std::vector<std::uint32_t> verts_;
  std::vector<HPointd> pts_;
  std::vector<double> deltas_;
};

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t root(std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = root(a);
    b = root(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::vector<std::uint32_t> parent;
};

}  // namespace

NerveBuild build_nerve(const QuotientSpace& space, const ThinConfig& cfg, const NetCover& net, const ChartIndex& index,
                       const NerveParams& params) {
  if (!(params.radius > 0.0)) throw ConfigError("build_nerve: radius must be positive");
  if (params.dimension_cap < 1) throw ConfigError("build_nerve: dimension cap must be at least 1");
  if (index.size() != net.centers.size()) throw DomainError("build_nerve: index does not match the net");
  NerveBuild out;
  NerveBuilder(space, cfg, net, index, params, out).run();
  return out;
}

WitnessReplay replay_witnesses(const ThinConfig& cfg, const ChartIndex& index, const NerveBuild& build,
                               const NerveParams& params) {
  WitnessReplay r;
  const double limit = params.radius + params.tie_tolerance;
  std::vector<std::pair<std::uint32_t, double>> near;
  for (int k = 1; k <= build.complex.dimension(); ++k)
    for (std::size_t i = 0; i < build.complex.count(k); ++i) {
      ++r.checked;
      const QuotientPoint& w = build.witnesses[k][i];
      near.clear();
      index.for_each_within(w, limit, [&](std::uint32_t j, const HPointd&, double d) { near.emplace_back(j, d); });
      bool ok = true;
      for (const std::uint32_t v : build.complex.simplex(k, i)) {
        double best = kNoActive;
        for (const auto& [j, d] : near)
          if (j == v) best = std::min(best, d);
        if (best > limit) ok = false;
        else r.max_radius = std::max(r.max_radius, best);
      }
      const double dw = delta_min(cfg, w.chart, Family::dist_to_sublevel);
      r.min_delta = std::min(r.min_delta, dw);
      if (dw < params.witness_level) ok = false;
      r.failures += !ok;
    }
  return r;
}

CoverGraphStats cover_graph_stats(const ChartIndex& index, double radius) {
  CoverGraphStats s;
  s.radius = radius;
  s.vertices = index.size();
  const auto n = static_cast<std::uint32_t>(index.size());
  std::vector<std::uint32_t> stamp(n, n);
  DisjointSets sets(n);
  std::uint64_t degree_sum = 0;
  std::size_t components = n;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t deg = 0;
    index.for_each_id_within(index.point(i), 2.0 * radius, [&](std::uint32_t j) {
      if (j == i || stamp[j] == i) return;
      stamp[j] = i;
      ++deg;
      if (j > i) {
        ++s.edges;
        if (sets.unite(i, j)) --components;
      }
    });
    degree_sum += deg;
    s.max_degree = std::max(s.max_degree, deg);
  }
  s.mean_degree = n ? static_cast<double>(degree_sum) / n : 0.0;
  s.components = components;
  return s;
}

void write_simplices(std::ostream& os, const NerveComplex& k) {
  for (int d = 0; d <= k.dimension(); ++d)
    for (std::size_t i = 0; i < k.count(d); ++i) {
      os << d;
      for (const auto v : k.simplex(d, i)) os << ' ' << v;
      os << '\n';
    }
}

void write_adjacency_csv(std::ostream& os, const NerveComplex& k) {
  os << "source,target\n";
  for (std::size_t i = 0; i < k.count(1); ++i) {
    const auto e = k.simplex(1, i);
    os << e[0] << ',' << e[1] << '\n';
  }
}

}  // namespace thicknerve
