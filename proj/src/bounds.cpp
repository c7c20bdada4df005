#include "thicknerve/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thicknerve/errors.hpp"

namespace thicknerve {

CoverConstants cover_constants(double eps, int m, double delta) {
  CoverConstants c;
  c.epsilon = eps;
  c.m = m;
  c.b = b_constant(eps);
  c.beta = beta(eps);
  const double limit = eps / (m * (c.b + 1.0));
  if (!(delta > 0.0 && delta < limit))
    throw ConfigError("delta = " + std::to_string(delta) + " must lie in (0, eps/(m(b+1))) = (0, " +
                      std::to_string(limit) + ")");
  c.delta = delta;
  c.radius = (c.b + 1.0) * delta;
  const double unit = ball_area(delta / 2.0);
  c.alpha = 1.0 / unit;
  c.d = ball_area(2.0 * (c.b + 1.25) * delta) / unit;
  c.l = std::ceil(ball_area((c.b + 1.5) * delta) / unit);
  return c;
}

namespace {

std::uint64_t lifts_within(const ChartIndex& index, const QuotientPoint& p, double r) {
  std::uint64_t n = 0;
  index.for_each_within(p, r, [&](std::uint32_t, const HPointd&, double) { ++n; });
  return n;
}

}  // namespace

BoundsReport verify_theorem1_bounds(const BoundsInput& in, const CoverConstants& c) {
  if (!in.space || !in.samples || !in.net || !in.cover_index || !in.fine_index)
    throw ConfigError("verify_theorem1_bounds: missing input");
  const auto& net = *in.net;
  const auto& samples = *in.samples;
  const auto& index = *in.cover_index;
  BoundsReport r;
  r.constants = c;
  r.covolume = in.space->lattice().covolume();

  r.vertex_count = {static_cast<double>(net.centers.size()), c.alpha * r.covolume, false};
  r.vertex_count.passed = r.vertex_count.observed <= r.vertex_count.bound;

  r.graph = cover_graph_stats(index, c.radius);
  r.max_degree = {static_cast<double>(r.graph.max_degree), c.d, false};
  r.max_degree.passed = r.max_degree.observed <= r.max_degree.bound;

  // Packing: lifts of centers in a radius-r ball around every center and a
  // strided subset of all samples.
  std::uint64_t most = 0;
  for (const auto& p : net.centers) {
    most = std::max(most, lifts_within(index, p, c.radius));
    ++r.packing_probes;
  }
  const std::size_t total = samples.size();
  const auto labels = static_cast<std::size_t>(samples.label_count);
  for (std::size_t i = 0; i < total; i += std::max<std::size_t>(1, in.packing_stride)) {
    const QuotientPoint p{static_cast<int>(i % labels), samples.charts[i / labels].chart};
    most = std::max(most, lifts_within(index, p, c.radius));
    ++r.packing_probes;
  }
  r.packing = {static_cast<double>(most), c.l, static_cast<double>(most) <= c.l};

  // Cover checks over every sample.
  std::uint64_t uncovered = 0, unmaximal = 0, fine_uncovered = 0;
  for (const auto& s : samples.charts) {
    const bool thick = s.delta >= samples.epsilon;
    const bool candidate = s.delta >= net.level;
    const bool fine = s.delta >= in.fine_level;
    if (!thick && !fine) continue;
    for (int label = 0; label < samples.label_count; ++label) {
      const QuotientPoint p{label, s.chart};
      if (candidate && !index.any_within(p, net.delta)) ++unmaximal;
      else if (thick && !candidate && !index.any_within(p, c.radius)) ++uncovered;
      if (fine && !in.fine_index->any_within(p, in.fine_radius)) ++fine_uncovered;
    }
  }
  r.coverage = {static_cast<double>(uncovered), 0.0, uncovered == 0};
  r.maximality = {static_cast<double>(unmaximal), 0.0, unmaximal == 0};
  r.fine_coverage = {static_cast<double>(fine_uncovered), 0.0, fine_uncovered == 0};

  std::uint64_t close_pairs = 0;
  double min_disp = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < net.centers.size(); ++i) {
    index.for_each_within(net.centers[i], net.delta, [&](std::uint32_t j, const HPointd&, double d) {
      if (j != i && d < net.delta) ++close_pairs;
    });
    min_disp = std::min(min_disp, in.space->displacement_below(net.centers[i], 4.0 * c.radius));
  }
  r.separation = {static_cast<double>(close_pairs / 2), 0.0, close_pairs == 0};
  r.injectivity = {min_disp, 2.0 * c.radius, min_disp >= 2.0 * c.radius};
  return r;
}

void require_bounds(const BoundsReport& r) {
  std::string bad;
  auto note = [&](bool ok, const char* name, const BoundCheck& b) {
    if (!ok) bad += std::string(bad.empty() ? "" : "; ") + name + " observed " + std::to_string(b.observed) +
                    " bound " + std::to_string(b.bound);
  };
  note(r.vertex_count.passed, "vertex count", r.vertex_count);
  note(r.max_degree.passed, "max degree", r.max_degree);
  note(r.packing.passed, "packing", r.packing);
  note(r.coverage.passed, "uncovered thick samples", r.coverage);
  note(r.separation.passed, "center pairs closer than delta", r.separation);
  note(r.maximality.passed, "net candidates farther than delta", r.maximality);
  note(r.fine_coverage.passed, "uncovered fine-region samples", r.fine_coverage);
  if (!bad.empty()) throw FalsificationError("cover bounds violated: " + bad);
}

}  // namespace thicknerve
