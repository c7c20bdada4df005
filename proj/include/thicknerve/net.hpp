#pragma once

#include <cstdint>
#include <vector>

#include "thicknerve/quotient.hpp"
#include "thicknerve/thickthin.hpp"

namespace thicknerve {

/// Height of the horoball {d_{T^N} <= eps} at the cusp of the modular domain.
/// Everything of F above it is thin.
double cusp_height(const CongruenceLattice& lattice, double eps);

/// Hyperbolic area of one cusp neighbourhood (M_{<=eps^u})_t of width N,
/// i.e. of {y >= h e^{-t}} / <T^N>.
double cusp_collar_area(const CongruenceLattice& lattice, double eps, double t);

struct ChartSample {
  HPointd chart;
  /// Distance-family minimum delta_dist (kNoActive when far from all cusps).
  double delta{kNoActive};
  /// Hyperbolic area of the grid cell.
  double weight{0};
};

/// Grid samples of the truncated modular domain, rows in log y and columns
/// of width resolution * y. Every chart sample stands for one point per
/// label: thick/thin status does not depend on the label because Gamma(N) is
/// normal in SL2(Z).
struct SampleSet {
  double resolution{0};
  double epsilon{0};
  int label_count{0};
  std::vector<ChartSample> charts;

  std::size_t size() const { return charts.size() * static_cast<std::size_t>(label_count); }
  bool thick(std::size_t i) const { return charts[i].delta >= epsilon; }
  std::size_t thick_count() const;
  /// Sum of cell areas over thick samples, all labels.
  double thick_area() const;
};

/// Rejects resolution > net_spacing / 2: a coarser grid cannot resolve the net.
SampleSet sample_thick_region(const QuotientSpace& space, const ThinConfig& cfg, double resolution,
                              double net_spacing);

struct NetCover {
  double delta{0};
  /// Ball radius (b + 1) delta of the cover.
  double radius{0};
  /// Candidates are samples with delta_dist >= level = eps + delta, i.e. the
  /// complement of (M_{<=^u})_delta.
  double level{0};
  std::vector<QuotientPoint> centers;
  std::vector<double> center_delta;
};

/// Greedy maximal delta-discrete subset of the candidate samples, visited in
/// chart order (y, x) then label.
NetCover greedy_maximal_net(const QuotientSpace& space, const SampleSet& samples, double delta, double b);

/// Index over the centers with cells sized for queries at radius ~cell.
ChartIndex index_centers(const QuotientSpace& space, const NetCover& net, double cell);

/// delta default 0.9 eps / (m (b + 1)).
double default_net_spacing(double eps, int m);

}  // namespace thicknerve
