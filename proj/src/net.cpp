#include "thicknerve/net.hpp"

#include <cmath>

namespace thicknerve {

double cusp_height(const CongruenceLattice& lattice, double eps) {
  return lattice.level() / (2.0 * std::sinh(eps / 2.0));
}

double cusp_collar_area(const CongruenceLattice& lattice, double eps, double t) {
  // Area of {y >= Y} over a strip of width N is N / Y.
  return lattice.level() / (cusp_height(lattice, eps) * std::exp(-t));
}

double default_net_spacing(double eps, int m) { return 0.9 * eps / (m * (b_constant(eps) + 1.0)); }

std::size_t SampleSet::thick_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < charts.size(); ++i) n += thick(i);
  return n * static_cast<std::size_t>(label_count);
}

double SampleSet::thick_area() const {
  double a = 0;
  for (std::size_t i = 0; i < charts.size(); ++i)
    if (thick(i)) a += charts[i].weight;
  return a * label_count;
}

SampleSet sample_thick_region(const QuotientSpace& space, const ThinConfig& cfg, double resolution,
                              double net_spacing) {
  if (!(resolution > 0.0)) throw ConfigError("sample_thick_region: resolution must be positive");
  if (resolution > net_spacing / 2.0)
    throw ConfigError("sample_thick_region: resolution " + std::to_string(resolution) +
                      " is too coarse for net spacing " + std::to_string(net_spacing));
  SampleSet out;
  out.resolution = resolution;
  out.epsilon = cfg.epsilon;
  out.label_count = space.label_count();
  const double lo = std::log(std::sqrt(3.0) / 2.0), hi = std::log(space.y_cap());
  const auto rows = static_cast<std::int64_t>(std::ceil((hi - lo) / resolution));
  for (std::int64_t r = 0; r < rows; ++r) {
    const double y = std::exp(lo + (static_cast<double>(r) + 0.5) * resolution);
    const auto cols = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(1.0 / (resolution * y))));
    const double weight = resolution / (static_cast<double>(cols) * y);
    for (std::int64_t c = 0; c < cols; ++c) {
      const HPointd z{-0.5 + (static_cast<double>(c) + 0.5) / static_cast<double>(cols), y};
      if (z.x * z.x + z.y * z.y < 1.0) continue;
      out.charts.push_back({z, delta_min(cfg, z, Family::dist_to_sublevel), weight});
    }
  }
  return out;
}

ChartIndex index_centers(const QuotientSpace& space, const NetCover& net, double cell) {
  ChartIndex index(space, cell);
  for (const auto& c : net.centers) index.insert(c);
  return index;
}

NetCover greedy_maximal_net(const QuotientSpace& space, const SampleSet& samples, double delta, double b) {
  if (!(delta > 0.0)) throw ConfigError("greedy_maximal_net: delta must be positive");
  NetCover net;
  net.delta = delta;
  net.radius = (b + 1.0) * delta;
  net.level = samples.epsilon + delta;
  ChartIndex index(space, delta);
  for (const auto& s : samples.charts) {
    if (s.delta < net.level) continue;
    for (int label = 0; label < samples.label_count; ++label) {
      const QuotientPoint p{label, s.chart};
      if (index.any_within(p, delta)) continue;
      index.insert(p);
      net.centers.push_back(p);
      net.center_delta.push_back(s.delta);
    }
  }
  return net;
}

}  // namespace thicknerve
