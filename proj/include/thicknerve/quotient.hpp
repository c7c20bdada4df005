#pragma once

// Points of M = Gamma(N)\H^2 are stored as (label, chart point): the chart
// point lies in the modular fundamental domain F and the label is an element
// of PSL2(Z/N) = Gamma(N)\PSL2(Z); the point is the orbit of lift(label).chart.
// Two points (l, z), (l', w) are at distance min d(z, h w) over h in PSL2(Z)
// with [h] = l^-1 l'. Only finitely many tiles hF come within R of the
// truncated domain F ∩ {y <= y_cap}; they are precomputed per radius.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "thicknerve/hyperbolic.hpp"
#include "thicknerve/lattice.hpp"

namespace thicknerve {

struct QuotientPoint {
  int label{0};
  HPointd chart;
};

struct Tile {
  IntMatrix h;
  IntMatrix h_inverse;
  int label{0};
  /// Euclidean bounding box of h(F ∩ {y <= y_cap}).
  double x_lo{0}, x_hi{0}, y_lo{0}, y_hi{0};
};

class QuotientSpace {
 public:
  QuotientSpace(const CongruenceLattice& lattice, double y_cap);

  const CongruenceLattice& lattice() const { return *lattice_; }
  double y_cap() const { return y_cap_; }
  int label_count() const { return lattice_->group().order(); }

  HPointd lift(const QuotientPoint& p) const;
  QuotientPoint project(const HPointd& z) const;

  /// Tiles hF meeting the R-neighbourhood of the truncated domain. Cached.
  const std::vector<Tile>& tiles(double radius) const;

  /// Quotient distance when below `radius`, otherwise +infinity.
  double distance_below(const QuotientPoint& p, const QuotientPoint& q, double radius) const;
  /// Smallest displacement d(z, g z) over nontrivial g in Gamma(N) at a lift
  /// z of p when below `radius`, otherwise +infinity.
  double displacement_below(const QuotientPoint& p, double radius) const;

 private:
  std::vector<Tile> compute_tiles(double radius) const;

  const CongruenceLattice* lattice_;
  double y_cap_;
  mutable std::map<double, std::vector<Tile>> tile_cache_;
};

/// Membership of a chart point in the closed truncated fundamental domain.
bool in_fundamental_domain(const HPointd& z, double y_cap, double slack = 1e-12);

/// Spatial hash over quotient points, bucketed per label by (log y, x/y) cells.
class ChartIndex {
 public:
  ChartIndex(const QuotientSpace& space, double cell);

  std::uint32_t insert(const QuotientPoint& p);
  std::size_t size() const { return points_.size(); }
  const QuotientPoint& point(std::uint32_t i) const { return points_[i]; }
  const std::vector<QuotientPoint>& points() const { return points_; }

  /// Visits every lift h.w of an indexed point with d(p.chart, h.w) < radius.
  /// The lift is expressed in the chart of p. A point may be visited more
  /// than once when several of its lifts are close.
  void for_each_within(const QuotientPoint& p, double radius,
                       const std::function<void(std::uint32_t, const HPointd&, double)>& visit) const;

  /// Like for_each_within but only reports the index of each close lift.
  void for_each_id_within(const QuotientPoint& p, double radius,
                          const std::function<void(std::uint32_t)>& visit) const;

  /// True when some indexed point lies at quotient distance < radius.
  bool any_within(const QuotientPoint& p, double radius) const;

 private:
  std::uint64_t key(int label, std::int64_t band, std::int64_t xcell) const;
  std::int64_t band_of(double y) const;
  double band_width(std::int64_t band) const;

  template <typename F>
  bool scan(const QuotientPoint& p, double radius, F&& f) const;

  const QuotientSpace* space_;
  double cell_;
  std::vector<QuotientPoint> points_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

}  // namespace thicknerve
