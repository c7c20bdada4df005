#include "thicknerve/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace thicknerve {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// JSON has no infinity; unreached bounds are reported as null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json check_json(const BoundCheck& b) { return {{"observed", num(b.observed)}, {"bound", num(b.bound)}, {"passed", b.passed}}; }

std::string csv_delta(double d) {
  if (!std::isfinite(d)) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << d;
  return os.str();
}

}  // namespace

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
  config_.validate(1);
  const auto t0 = Clock::now();
  lattice_ = std::make_unique<CongruenceLattice>(config_.level);
  margulis_ = margulis_data(*lattice_, config_.epsilon, config_.seed, config_.margulis_samples);
  config_.validate(margulis_.m);
  thin_ = ThinConfig{lattice_.get(), margulis_.epsilon, margulis_.m};
  constants_ = cover_constants(margulis_.epsilon, margulis_.m, config_.delta_for(margulis_.m));
  resolution_ = config_.resolution_for(margulis_.m);
  // Fine nerve: radius delta + 3 res, cover region delta_dist >= eps + delta - res.
  fine_radius_ = constants_.delta + 3.0 * resolution_;
  fine_level_ = constants_.epsilon + constants_.delta - resolution_;
  space_ = std::make_unique<QuotientSpace>(*lattice_, cusp_height(*lattice_, margulis_.epsilon));
  time("margulis", seconds_since(t0));
}

void Pipeline::falsify(bool ok, const std::string& what) {
  if (!ok) falsifications_.push_back(what);
}

Json Pipeline::header() const {
  Json cfg = Json::object();
  for (const auto& [k, v] : config_.entries()) cfg[k] = v;
  const auto& c = constants_;
  return {{"config", cfg},
          {"lattice",
           {{"level", lattice_->level()},
            {"projective_index", lattice_->index()},
            {"linear_order", lattice_->group().linear_order()},
            {"covolume", lattice_->covolume()},
            {"cusps", lattice_->cusp_count()},
            {"genus", lattice_->genus()},
            {"euler_characteristic", lattice_->euler_characteristic()}}},
          {"margulis",
           {{"epsilon", margulis_.epsilon},
            {"m", margulis_.m},
            {"base_points", margulis_.base_points},
            {"elements_checked", margulis_.elements_checked}}},
          {"constants",
           {{"b", c.b},
            {"beta", c.beta},
            {"delta", c.delta},
            {"ball_radius", c.radius},
            {"alpha", c.alpha},
            {"d", c.d},
            {"l", c.l},
            {"resolution", resolution_},
            {"fine_radius", fine_radius_},
            {"fine_level", fine_level_},
            {"cusp_height", space_->y_cap()}}}};
}

void Pipeline::ensure_samples() {
  if (samples_) return;
  const auto t0 = Clock::now();
  samples_ = sample_thick_region(*space_, thin_, resolution_, constants_.delta);
  time("sampling", seconds_since(t0));
}

Json Pipeline::decompose(std::ostream* csv) {
  ensure_samples();
  const auto& s = *samples_;
  const double expected =
      lattice_->covolume() - static_cast<double>(lattice_->cusp_count()) * cusp_collar_area(*lattice_, thin_.epsilon, thin_.epsilon);
  const double area = s.thick_area();
  if (csv) {
    *csv << "x,y,label,delta\n";
    csv->precision(12);
    for (const auto& c : s.charts)
      *csv << c.chart.x << ',' << c.chart.y << ',' << (c.delta >= s.epsilon ? "thick" : "thin") << ','
           << csv_delta(c.delta) << '\n';
  }
  return {{"resolution", s.resolution},
          {"chart_samples", s.charts.size()},
          {"samples", s.size()},
          {"thick_samples", s.thick_count()},
          {"thick_area", area},
          {"expected_thick_area", expected},
          {"relative_area_error", std::abs(area - expected) / expected}};
}

Json Pipeline::flow(std::ostream* csv) {
  const auto t0 = Clock::now();
  const double eps = thin_.epsilon;
  std::mt19937_64 rng(config_.seed);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), ul(0.0, eps);
  std::uniform_int_distribution<int> ulabel(0, lattice_->group().order() - 1);
  FlowConfig solver;
  solver.tolerance = config_.flow_tolerance;
  int arrived = 0, within = 0, monotone = 0;
  double worst = 0;
  if (csv) *csv << "start,x,y,delta0,arrival_time,time_bound,steps,monotone,within_bound\n";
  for (int k = 0; k < config_.flow_starts; ++k) {
    const double x = ux(rng), level = ul(rng);
    const int label = ulabel(rng);
    const HPointd p = apply(lattice_->group().lift(label), level_point_above(thin_, x, level));
    const FlowTrace t = flow_to_thick(thin_, p, Family::dist_to_sublevel, solver);
    ++arrived;
    within += t.within_bound;
    monotone += t.monotone;
    if (t.time_bound > 0) worst = std::max(worst, t.arrival_time / t.time_bound);
    if (csv) {
      csv->precision(12);
      *csv << k << ',' << p.x << ',' << p.y << ',' << level << ',' << t.arrival_time << ',' << t.time_bound << ','
           << t.steps << ',' << t.monotone << ',' << t.within_bound << '\n';
    }
  }
  falsify(within == config_.flow_starts, "flow arrival time above sqrt(2(eps - delta0)) (1.05 slack)");
  falsify(monotone == config_.flow_starts, "flow with non-monotone delta");
  time("flow", seconds_since(t0));

  const auto t1 = Clock::now();
  std::vector<HPointd> boundary;
  for (int k = 0; k < config_.hausdorff_samples; ++k)
    boundary.push_back(level_point_above(thin_, -0.5 + (k + 0.5) / config_.hausdorff_samples, eps));
  Json haus = Json::array();
  for (const double frac : {0.25, 0.5, 0.75}) {
    const HausdorffStats h = hausdorff_check(thin_, boundary, frac * eps);
    haus.push_back({{"t", frac * eps}, {"samples", h.samples}, {"violations", h.violations}, {"max_ratio", h.max_ratio}});
    falsify(h.violations == 0, "Hausdorff bound b t violated at t = " + std::to_string(frac * eps));
  }
  time("hausdorff", seconds_since(t1));
  return {{"starts", config_.flow_starts},
          {"arrived", arrived},
          {"within_bound", within},
          {"monotone", monotone},
          {"max_time_ratio", worst},
          {"hausdorff", haus}};
}

void Pipeline::ensure_net() {
  if (net_) return;
  ensure_samples();
  const auto t0 = Clock::now();
  net_ = greedy_maximal_net(*space_, *samples_, constants_.delta, constants_.b);
  fine_index_ = std::make_unique<ChartIndex>(index_centers(*space_, *net_, 2.0 * fine_radius_));
  time("net", seconds_since(t0));
}

Json Pipeline::net(std::ostream* csv) {
  ensure_net();
  if (csv) {
    *csv << "index,label,x,y,delta\n";
    csv->precision(12);
    for (std::size_t i = 0; i < net_->centers.size(); ++i)
      *csv << i << ',' << net_->centers[i].label << ',' << net_->centers[i].chart.x << ',' << net_->centers[i].chart.y
           << ',' << csv_delta(net_->center_delta[i]) << '\n';
  }
  return {{"delta", net_->delta}, {"candidate_level", net_->level}, {"centers", net_->centers.size()}};
}

void Pipeline::ensure_nerve() {
  if (nerve_) return;
  ensure_net();
  const auto t0 = Clock::now();
  NerveParams p;
  p.radius = fine_radius_;
  p.witness_level = fine_level_;
  p.dimension_cap = config_.dimension_cap;
  p.tie_tolerance = config_.tie_tolerance;
  nerve_ = build_nerve(*space_, thin_, *net_, *fine_index_, p);
  time("nerve", seconds_since(t0));
}

Json Pipeline::nerve(std::ostream* simplices, std::ostream* adjacency) {
  ensure_nerve();
  const auto t0 = Clock::now();
  NerveParams p;
  p.radius = fine_radius_;
  p.witness_level = fine_level_;
  p.dimension_cap = config_.dimension_cap;
  p.tie_tolerance = config_.tie_tolerance;
  const WitnessReplay replay = replay_witnesses(thin_, *fine_index_, *nerve_, p);
  // Witnesses are only needed for the replay.
  nerve_->witnesses.clear();
  nerve_->witnesses.shrink_to_fit();
  time("witness_replay", seconds_since(t0));
  falsify(replay.failures == 0, "nerve witness failed independent replay");
  falsify(nerve_->stats.rejected == 0, "ball tuple meeting in the cover region without a witness");
  const auto& k = nerve_->complex;
  Json counts = Json::array();
  for (int d = 0; d <= k.dimension(); ++d) counts.push_back(k.count(d));
  const auto& st = nerve_->stats;
  if (simplices) write_simplices(*simplices, k);
  if (adjacency) write_adjacency_csv(*adjacency, k);
  return {{"radius", fine_radius_},
          {"witness_level", fine_level_},
          {"dimension_cap", config_.dimension_cap},
          {"cap_reached", k.cap_reached},
          {"simplex_counts", counts},
          {"candidates", st.candidates},
          {"chebyshev_witnesses", st.chebyshev_witnesses},
          {"searched_witnesses", st.searched_witnesses},
          {"rejected", st.rejected},
          {"max_witness_radius", st.max_witness_radius},
          {"min_witness_delta", num(st.min_witness_delta)},
          {"max_neighbourhood", st.max_neighbourhood},
          {"replay", {{"checked", replay.checked}, {"failures", replay.failures}, {"max_radius", replay.max_radius},
                      {"min_delta", num(replay.min_delta)}}}};
}

Json Pipeline::invariants(std::ostream* presentation) {
  ensure_nerve();
  const auto& k = nerve_->complex;
  const auto t0 = Clock::now();
  const EulerCharacteristic chi = euler_characteristic(k);
  HomologyResult h;
  bool d2 = false;
  {
    const ChainComplexRep c = ChainComplexRep::of(k);
    d2 = c.boundary_squared_zero();
    h = homology_ranks(c, true);
  }
  time("homology", seconds_since(t0));
  const auto t1 = Clock::now();
  const GroupPresentation g = pi1_presentation(k);
  const Abelianization ab = abelianization(g);
  if (presentation) write_presentation(*presentation, g);
  time("presentation", seconds_since(t1));

  const std::int64_t chi_oracle = lattice_->euler_characteristic();
  const std::int64_t b1_oracle = 1 - chi_oracle;
  // Genus 0 surface with c cusps: free fundamental group of rank 2g + c - 1.
  const std::int64_t b1_cusps = 2 * lattice_->genus() + lattice_->cusp_count() - 1;
  std::vector<std::int64_t> betti = h.betti;
  betti.resize(std::max<std::size_t>(betti.size(), 3), 0);
  bool torsion_free = true;
  for (const auto& t : h.torsion) torsion_free = torsion_free && t.empty();
  const bool higher_zero = std::all_of(betti.begin() + 2, betti.end(), [](std::int64_t b) { return b == 0; });

  falsify(d2, "boundary of boundary is nonzero");
  falsify(chi.reliable, "dimension cap reached: Euler characteristic unreliable");
  falsify(chi.value == chi_oracle, "Euler characteristic " + std::to_string(chi.value) + " differs from -index/6 = " +
                                       std::to_string(chi_oracle));
  falsify(betti[0] == 1, "thick part nerve is disconnected (betti_0 = " + std::to_string(betti[0]) + ")");
  falsify(betti[1] == b1_oracle && b1_oracle == b1_cusps,
          "betti_1 = " + std::to_string(betti[1]) + " differs from 1 - chi = " + std::to_string(b1_oracle));
  falsify(higher_zero, "nonzero higher Betti number");
  falsify(torsion_free, "torsion in nerve homology");
  falsify(ab.rank == betti[1] && ab.torsion == h.torsion[1], "abelianized fundamental group differs from H_1");

  Json torsion = Json::array();
  for (const auto& t : h.torsion) torsion.push_back(t);
  return {{"euler_characteristic", chi.value},
          {"euler_reliable", chi.reliable},
          {"boundary_squared_zero", d2},
          {"betti", betti},
          {"torsion", torsion},
          {"arbitrary_precision", h.arbitrary_precision},
          {"reduced_cells", h.reduced_cells},
          {"pi1", {{"generators", g.generators},
                   {"relators", g.relator_count()},
                   {"trivial_relators", g.trivial_relators},
                   {"abelianization_rank", ab.rank},
                   {"abelianization_torsion", ab.torsion}}},
          {"expected", {{"euler_characteristic", chi_oracle}, {"betti", {1, b1_oracle, 0}}, {"betti_1_from_cusps", b1_cusps}}}};
}

Json Pipeline::bounds() {
  ensure_nerve();
  const auto t0 = Clock::now();
  const ChartIndex cover = index_centers(*space_, *net_, constants_.radius);
  BoundsInput in;
  in.space = space_.get();
  in.samples = &*samples_;
  in.net = &*net_;
  in.cover_index = &cover;
  in.fine_index = fine_index_.get();
  in.fine_radius = fine_radius_;
  in.fine_level = fine_level_;
  const BoundsReport r = verify_theorem1_bounds(in, constants_);
  time("bounds", seconds_since(t0));
  falsify(r.vertex_count.passed, "vertex count above alpha * covolume");
  falsify(r.max_degree.passed, "cover nerve degree above d");
  falsify(r.packing.passed, "more than l centers in one ball");
  falsify(r.coverage.passed, "thick samples outside every cover ball");
  falsify(r.separation.passed, "net centers closer than delta");
  falsify(r.maximality.passed, "net is not maximal over its candidates");
  falsify(r.fine_coverage.passed, "fine cover region samples outside every fine ball");
  falsify(r.graph.components == 1, "cover nerve 1-skeleton is disconnected");
  return {{"vertex_count", check_json(r.vertex_count)},
          {"max_degree", check_json(r.max_degree)},
          {"packing", check_json(r.packing)},
          {"packing_probes", r.packing_probes},
          {"coverage_uncovered", check_json(r.coverage)},
          {"separation_pairs", check_json(r.separation)},
          {"maximality_uncovered", check_json(r.maximality)},
          {"fine_coverage_uncovered", check_json(r.fine_coverage)},
          {"injectivity_diagnostic", check_json(r.injectivity)},
          {"cover_graph",
           {{"radius", r.graph.radius},
            {"edges", r.graph.edges},
            {"max_degree", r.graph.max_degree},
            {"mean_degree", r.graph.mean_degree},
            {"components", r.graph.components}}}};
}

Json Pipeline::envelope(std::ostream* csv) {
  const double v = lattice_->covolume();
  const CensusEnvelope e = census_envelope(v, constants_.alpha, constants_.d);
  if (csv) {
    std::vector<CensusEnvelope> curve;
    for (int k = 1; k <= 40; ++k) curve.push_back(census_envelope(v * k / 10.0, constants_.alpha, constants_.d));
    csv->precision(12);
    write_envelope_csv(*csv, curve);
  }
  return {{"volume", v},
          {"c1", e.c1},
          {"c2", e.c2},
          {"C", e.big_c},
          {"vertices", e.vertices},
          {"log_graphs", e.log_graphs},
          {"log_triangles", e.log_triangles},
          {"log_envelope", e.log_envelope},
          {"valid_from", e.valid_from},
          {"note", "c1, c2, C are instantiated by this construction, not constants stated in closed form"}};
}

std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

PipelineOutcome run_pipeline(const RunConfig& config, const std::string& output_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(output_dir) / name);
    if (!f) throw ConfigError("cannot write " + (fs::path(output_dir) / name).string());
    return f;
  };
  Pipeline p(config);
  PipelineOutcome out;
  out.report = p.header();
  {
    auto f = open("samples.csv");
    out.report["decompose"] = p.decompose(&f);
  }
  {
    auto f = open("flow.csv");
    out.report["flow"] = p.flow(&f);
  }
  {
    auto f = open("centers.csv");
    out.report["net"] = p.net(&f);
  }
  {
    auto f = open("nerve_edges.csv");
    out.report["nerve"] = p.nerve(nullptr, &f);
  }
  out.report["invariants"] = p.invariants();
  out.report["bounds"] = p.bounds();
  {
    auto f = open("envelope.csv");
    out.report["census_envelope"] = p.envelope(&f);
  }
  {
    auto f = open("simplex_counts.csv");
    f << "dimension,count\n";
    const auto& counts = out.report["nerve"]["simplex_counts"];
    for (std::size_t d = 0; d < counts.size(); ++d) f << d << ',' << counts[d].get<std::uint64_t>() << '\n';
  }
  out.falsifications = p.falsifications();
  out.report["falsifications"] = out.falsifications;
  out.report["status"] = out.falsifications.empty() ? "ok" : "falsified";
  out.exit_code = out.falsifications.empty() ? ExitCode::ok : ExitCode::falsification;
  open("report.json") << dump_report(out.report);

  Json timings = Json::object();
  for (const auto& [stage, s] : p.timings()) timings[stage] = s;
  open("timings.json") << dump_report(timings);

  const auto& r = out.report;
  auto s = open("summary.txt");
  s << "Gamma(" << config.level << ")  eps = " << r["margulis"]["epsilon"] << "  m = " << r["margulis"]["m"] << '\n'
    << "b = " << r["constants"]["b"] << "  delta = " << r["constants"]["delta"] << "  r = " << r["constants"]["ball_radius"]
    << '\n'
    << "alpha = " << r["constants"]["alpha"] << "  d = " << r["constants"]["d"] << "  l = " << r["constants"]["l"] << '\n'
    << "centers " << r["net"]["centers"] << "  simplices " << r["nerve"]["simplex_counts"].dump() << '\n'
    << "chi " << r["invariants"]["euler_characteristic"] << " (expected " << r["invariants"]["expected"]["euler_characteristic"]
    << ")  betti " << r["invariants"]["betti"].dump() << '\n'
    << "vertex count " << r["bounds"]["vertex_count"]["observed"] << " <= " << r["bounds"]["vertex_count"]["bound"]
    << "  max degree " << r["bounds"]["max_degree"]["observed"] << " <= " << r["bounds"]["max_degree"]["bound"] << '\n'
    << "status " << r["status"].get<std::string>() << '\n';
  for (const auto& f : out.falsifications) s << "  falsified: " << f << '\n';
  return out;
}

}  // namespace thicknerve
