#include "thicknerve/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace thicknerve {

namespace {

constexpr double kTileMargin = 0.05;
constexpr double kTileSpacing = 0.01;

/// Lower bound for d(u, F) from the three geodesic half-planes bounding F.
double distance_to_domain_lower(const HPointd& u) {
  double d = 0.0;
  if (u.x < -0.5) d = std::max(d, std::asinh((-0.5 - u.x) / u.y));
  if (u.x > 0.5) d = std::max(d, std::asinh((u.x - 0.5) / u.y));
  const double r2 = u.x * u.x + u.y * u.y;
  if (r2 < 1.0) d = std::max(d, std::asinh((1.0 - r2) / (2.0 * u.y)));
  return d;
}

std::array<std::int64_t, 4> entries(const IntMatrix& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

/// Dense samples of the boundary of F ∩ {y <= y_cap}.
std::vector<HPointd> domain_boundary(double y_cap) {
  std::vector<HPointd> pts;
  const double y0 = std::sqrt(3.0) / 2.0;
  const int nv = 4000;
  for (int i = 0; i <= nv; ++i) {
    const double y = y0 * std::pow(y_cap / y0, static_cast<double>(i) / nv);
    pts.push_back({-0.5, y});
    pts.push_back({0.5, y});
  }
  const int na = 2000;
  for (int i = 0; i <= na; ++i) {
    const double a = std::numbers::pi / 3.0 + (std::numbers::pi / 3.0) * i / na;
    pts.push_back({std::cos(a), std::sin(a)});
  }
  for (int i = 0; i <= 200; ++i) pts.push_back({-0.5 + static_cast<double>(i) / 200, y_cap});
  return pts;
}

}  // namespace

bool in_fundamental_domain(const HPointd& z, double y_cap, double slack) {
  return std::abs(z.x) <= 0.5 + slack && z.x * z.x + z.y * z.y >= 1.0 - slack && z.y <= y_cap + slack;
}

QuotientSpace::QuotientSpace(const CongruenceLattice& lattice, double y_cap) : lattice_(&lattice), y_cap_(y_cap) {
  if (!(y_cap > 1.0)) throw ConfigError("QuotientSpace: y_cap must exceed 1");
}

HPointd QuotientSpace::lift(const QuotientPoint& p) const { return apply(lattice_->group().lift(p.label), p.chart); }

QuotientPoint QuotientSpace::project(const HPointd& z) const {
  const Reduction r = reduce_to_fundamental(z);
  return {lattice_->group().id_of(inverse_sl2(r.g)), r.point};
}

const std::vector<Tile>& QuotientSpace::tiles(double radius) const {
  auto it = tile_cache_.find(radius);
  if (it == tile_cache_.end()) it = tile_cache_.emplace(radius, compute_tiles(radius)).first;
  return it->second;
}

std::vector<Tile> QuotientSpace::compute_tiles(double radius) const {
  // Grid-sample a box containing the (R + margin)-neighbourhood of the
  // truncated domain; every tile hF holding a sample whose lower-bounded
  // distance to F is below R + margin is kept. The margin exceeds the grid
  // spacing, so tiles meeting the R-neighbourhood are never missed.
  const double reach = radius + kTileMargin;
  const double y_lo = std::sqrt(3.0) / 2.0 * std::exp(-reach);
  const double y_hi = y_cap_ * std::exp(reach);
  const double half_width = 0.5 + y_cap_ * std::sinh(reach);
  std::set<std::array<std::int64_t, 4>> seen;
  std::vector<IntMatrix> found;
  for (double ly = std::log(y_lo); ly <= std::log(y_hi) + kTileSpacing; ly += kTileSpacing) {
    const double y = std::exp(ly);
    const double dx = kTileSpacing * y;
    for (double x = -half_width; x <= half_width + dx; x += dx) {
      const HPointd u{x, y};
      if (distance_to_domain_lower(u) >= reach) continue;
      const IntMatrix h = canonical_sign(inverse_sl2(reduce_to_fundamental(u).g));
      if (seen.insert(entries(h)).second) found.push_back(h);
    }
  }
  std::sort(found.begin(), found.end(), [](const IntMatrix& a, const IntMatrix& b) { return entries(a) < entries(b); });

  const std::vector<HPointd> boundary = domain_boundary(y_cap_);
  std::vector<Tile> out;
  out.reserve(found.size());
  for (const auto& h : found) {
    Tile t;
    t.h = h;
    t.h_inverse = inverse_sl2(h);
    t.label = lattice_->group().id_of(h);
    t.x_lo = t.y_lo = std::numeric_limits<double>::infinity();
    t.x_hi = t.y_hi = -std::numeric_limits<double>::infinity();
    for (const auto& b : boundary) {
      const HPointd q = apply(h, b);
      t.x_lo = std::min(t.x_lo, q.x);
      t.x_hi = std::max(t.x_hi, q.x);
      t.y_lo = std::min(t.y_lo, q.y);
      t.y_hi = std::max(t.y_hi, q.y);
    }
    const double pad = 0.01 * (t.x_hi - t.x_lo + t.y_hi - t.y_lo);
    t.x_lo -= pad;
    t.x_hi += pad;
    t.y_lo -= pad;
    t.y_hi += pad;
    out.push_back(t);
  }
  return out;
}

double QuotientSpace::distance_below(const QuotientPoint& p, const QuotientPoint& q, double radius) const {
  const auto& group = lattice_->group();
  const int want = group.multiply(group.inverse(p.label), q.label);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : tiles(radius)) {
    if (t.label != want) continue;
    const double d = distance(p.chart, apply(t.h, q.chart));
    if (d < radius) best = std::min(best, d);
  }
  return best;
}

double QuotientSpace::displacement_below(const QuotientPoint& p, double radius) const {
  const int identity = lattice_->group().multiply(lattice_->group().inverse(p.label), p.label);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : tiles(radius)) {
    if (t.label != identity || (t.h(0, 1) == 0 && t.h(1, 0) == 0 && std::abs(t.h(0, 0)) == 1)) continue;
    const double d = distance(p.chart, apply(t.h, p.chart));
    if (d < radius) best = std::min(best, d);
  }
  return best;
}

ChartIndex::ChartIndex(const QuotientSpace& space, double cell) : space_(&space), cell_(cell) {
  if (!(cell > 0.0)) throw DomainError("ChartIndex: cell size must be positive");
}

std::int64_t ChartIndex::band_of(double y) const { return static_cast<std::int64_t>(std::floor(std::log(y) / cell_)); }

double ChartIndex::band_width(std::int64_t band) const { return cell_ * std::exp(static_cast<double>(band) * cell_); }

std::uint64_t ChartIndex::key(int label, std::int64_t band, std::int64_t xcell) const {
  return (static_cast<std::uint64_t>(label) << 48) | ((static_cast<std::uint64_t>(band + 32768) & 0xffffu) << 32) |
         static_cast<std::uint32_t>(static_cast<std::int32_t>(xcell));
}

std::uint32_t ChartIndex::insert(const QuotientPoint& p) {
  const auto id = static_cast<std::uint32_t>(points_.size());
  points_.push_back(p);
  const std::int64_t band = band_of(p.chart.y);
  const auto xcell = static_cast<std::int64_t>(std::floor(p.chart.x / band_width(band)));
  buckets_[key(p.label, band, xcell)].push_back(id);
  return id;
}

template <typename F>
bool ChartIndex::scan(const QuotientPoint& p, double radius, F&& f) const {
  const auto& group = space_->lattice().group();
  const HPointd z = p.chart;
  const double ball_r = z.y * std::sinh(radius), ball_cy = z.y * std::cosh(radius);
  // cosh d - 1 < cosh R - 1 is the exact test.
  const double limit = std::cosh(radius) - 1.0;
  for (const auto& t : space_->tiles(radius)) {
    if (t.x_hi < z.x - ball_r || t.x_lo > z.x + ball_r || t.y_hi < ball_cy - ball_r || t.y_lo > ball_cy + ball_r)
      continue;
    const HPointd u = apply(t.h_inverse, z);
    const int label = group.multiply(p.label, t.label);
    const double reach = u.y * std::sinh(radius);
    const std::int64_t b_lo = band_of(u.y * std::exp(-radius)), b_hi = band_of(u.y * std::exp(radius));
    for (std::int64_t band = b_lo; band <= b_hi; ++band) {
      const double w = band_width(band);
      const auto c_lo = static_cast<std::int64_t>(std::floor((u.x - reach) / w));
      const auto c_hi = static_cast<std::int64_t>(std::floor((u.x + reach) / w));
      for (std::int64_t c = c_lo; c <= c_hi; ++c) {
        const auto it = buckets_.find(key(label, band, c));
        if (it == buckets_.end()) continue;
        for (const std::uint32_t j : it->second) {
          const HPointd& w_pt = points_[j].chart;
          if (cosh_distance_minus_one(u, w_pt) >= limit) continue;
          if (f(j, t, w_pt, u)) return true;
        }
      }
    }
  }
  return false;
}

void ChartIndex::for_each_within(const QuotientPoint& p, double radius,
                                 const std::function<void(std::uint32_t, const HPointd&, double)>& visit) const {
  scan(p, radius, [&](std::uint32_t j, const Tile& t, const HPointd& w, const HPointd& u) {
    visit(j, apply(t.h, w), distance(u, w));
    return false;
  });
}

void ChartIndex::for_each_id_within(const QuotientPoint& p, double radius,
                                    const std::function<void(std::uint32_t)>& visit) const {
  scan(p, radius, [&](std::uint32_t j, const Tile&, const HPointd&, const HPointd&) {
    visit(j);
    return false;
  });
}

bool ChartIndex::any_within(const QuotientPoint& p, double radius) const {
  return scan(p, radius, [](std::uint32_t, const Tile&, const HPointd&, const HPointd&) { return true; });
}

}  // namespace thicknerve
