#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thicknerve/nerve.hpp"

namespace thicknerve {

/// Constants of the cover: b = coth(eps/2), ball radius r = (b+1) delta,
/// alpha = 1/A(delta/2), d = A(2(b+1.25) delta)/A(delta/2) and
/// l = ceil(A((b+1.5) delta)/A(delta/2)) with A the hyperbolic disc area.
struct CoverConstants {
  double epsilon{0};
  int m{1};
  double b{0};
  double beta{0};
  double delta{0};
  double radius{0};
  double alpha{0};
  double d{0};
  double l{0};
};

/// Rejects delta outside (0, eps/(m(b+1))).
CoverConstants cover_constants(double eps, int m, double delta);

struct BoundCheck {
  double observed{0};
  double bound{0};
  bool passed{true};
};

struct BoundsInput {
  const QuotientSpace* space{nullptr};
  const SampleSet* samples{nullptr};
  const NetCover* net{nullptr};
  /// Index over the centers with cell ~ the ball radius.
  const ChartIndex* cover_index{nullptr};
  /// Index over the centers used by the fine nerve, with its radius and level.
  const ChartIndex* fine_index{nullptr};
  double fine_radius{0};
  double fine_level{0};
  /// Every stride-th sample is used as a packing probe.
  std::size_t packing_stride{97};
};

struct BoundsReport {
  CoverConstants constants;
  double covolume{0};
  CoverGraphStats graph;
  /// vertices <= alpha * covolume.
  BoundCheck vertex_count;
  /// max degree of the cover nerve <= d.
  BoundCheck max_degree;
  /// Most center lifts inside one radius-r ball <= l.
  BoundCheck packing;
  std::uint64_t packing_probes{0};
  /// Thick samples farther than r from every center (bound 0).
  BoundCheck coverage;
  /// Center pairs closer than delta (bound 0).
  BoundCheck separation;
  /// Net candidates farther than delta from every center (bound 0).
  BoundCheck maximality;
  /// Samples of the fine cover region farther than the fine radius from every center (bound 0).
  BoundCheck fine_coverage;
  /// Smallest displacement of a nontrivial element at a center, against 2r.
  BoundCheck injectivity;

  bool bounds_hold() const { return vertex_count.passed && max_degree.passed && packing.passed; }
  bool cover_valid() const {
    return coverage.passed && separation.passed && maximality.passed && fine_coverage.passed;
  }
};

BoundsReport verify_theorem1_bounds(const BoundsInput& in, const CoverConstants& constants);

/// Raises FalsificationError naming every violated bound among the vertex
/// count, degree, packing and cover checks. Injectivity is diagnostic only.
void require_bounds(const BoundsReport& r);

}  // namespace thicknerve
