// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thicknerve/pipeline.hpp"

using namespace thicknerve;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass{false};
  std::string detail;
};

int failures = 0;

void report(int number, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  failures += !o.pass;
  char buf[64];
  std::snprintf(buf, sizeof buf, " [%.1f s]", s);
  std::cout << "criterion " << number << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << name << ": " << o.detail << buf
            << std::endl;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// |PSL2(Z/N)| by counting residue matrices of determinant 1.
std::int64_t projective_index(int n) {
  std::int64_t count = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) count += ((a * d - b * c) % n + n) % n == 1;
  return count / 2;
}

Mobius<double> random_sl2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double a = 0;
  while (std::abs(a) < 0.3) a = u(rng);
  const double b = u(rng), c = u(rng);
  Mobius<double> g;
  g << a, b, c, (1.0 + b * c) / a;
  return g;
}

HPointd random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uly(-1.5, 1.5);
  return {ux(rng), std::exp(uly(rng))};
}

template <typename F>
FrameVectord central_difference(const F& f, const HPointd& p, double h) {
  const double fx = (f(HPointd{p.x + h, p.y}) - f(HPointd{p.x - h, p.y})) / (2 * h);
  const double fy = (f(HPointd{p.x, p.y + h}) - f(HPointd{p.x, p.y - h})) / (2 * h);
  return {p.y * fx, p.y * fy};
}

HPointd collar_point(const ThinConfig& cfg, double x, double level, int label) {
  return apply(cfg.lattice->group().lift(label), level_point_above(cfg, x, level));
}

struct LevelRun {
  int level{0};
  Json report;
  std::vector<std::string> falsifications;
  double seconds{0};
  fs::path dir;
};

LevelRun run_level(int level, const fs::path& dir) {
  RunConfig c;
  c.level = level;
  c.output_dir = dir.string();
  const auto t0 = Clock::now();
  PipelineOutcome out = run_pipeline(c, dir.string());
  return {level, std::move(out.report), std::move(out.falsifications),
          std::chrono::duration<double>(Clock::now() - t0).count(), dir};
}

}  // namespace

int main() {
  const double eps = 0.1;
  const fs::path root = fs::temp_directory_path() / "thicknerve_acceptance";
  fs::remove_all(root);

  report(1, "short elements are unipotent", [&] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(-2, 2), uly(std::log(0.02), std::log(50.0));
    std::int64_t checked = 0, exceptions = 0;
    for (int n : {3, 4, 5}) {
      const CongruenceLattice lat(n);
      const MargulisData m = margulis_data(lat, eps, 1, 50);
      if (m.m != 1 || m.base_points != 50) ++exceptions;
      for (int k = 0; k < 50; ++k) {
        const HPointd p{ux(rng), std::exp(uly(rng))};
        for (const auto& g : enumerate_short_elements(lat, p, 10 * eps)) {
          ++checked;
          exceptions += std::abs(g(0, 0) + g(1, 1)) != 2;
        }
      }
    }
    return Outcome{exceptions == 0 && checked > 0,
                   "Gamma(3,4,5), 10 eps = 1, " + std::to_string(checked) + " short elements, " +
                       std::to_string(exceptions) + " with trace != +-2"};
  });

  report(2, "gradients match central differences", [&] {
    std::mt19937_64 rng(7);
    const double h = 1e-5;
    double worst = 0, max_norm = 0;
    int tested = 0;
    std::vector<CongruenceLattice> lattices;
    for (int n : {3, 4, 5}) lattices.emplace_back(n);
    while (tested < 1000) {
      const HPointd p = random_point(rng);
      FrameVectord grad, fd;
      if (tested % 2 == 0) {
        const auto g = random_sl2(rng);
        if (displacement(g, p) <= 0.01) continue;
        grad = displacement_gradient(g, p);
        fd = central_difference([&](const HPointd& q) { return displacement(g, q); }, p, h);
        max_norm = std::max(max_norm, grad.norm());
      } else {
        // Unipotent of Gamma(N): a conjugate of T^N by a random element of SL2(Z).
        const CongruenceLattice& lat = lattices[rng() % 3];
        const IntMatrix& s = lat.group().lift(static_cast<int>(rng() % lat.group().order()));
        IntMatrix t;
        t << 1, lat.level() * static_cast<std::int64_t>(1 + rng() % 2), 0, 1;
        const IntMatrix u = s * t * inverse_sl2(s);
        if (horoball_level(unipotent_sublevel<double>(u, eps), p) <= 0.01) continue;
        grad = dist_to_sublevel_gradient(u, eps, p);
        fd = central_difference([&](const HPointd& q) { return dist_to_sublevel(u, eps, q); }, p, h);
      }
      worst = std::max(worst, (grad - fd).norm() / fd.norm());
      ++tested;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "1000 instances, max relative error %.2e, max |grad d_gamma| %.12f", worst, max_norm);
    return Outcome{worst <= 1e-6 && max_norm <= 2 + 1e-9, buf};
  });

  report(3, "beta and b", [&] {
    IntMatrix t;
    t << 1, 1, 0, 1;
    double worst = 0;
    for (int i = 0; i <= 189; ++i) {
      const double tau = 0.01 + i * 0.01;
      // Along the vertical geodesic away from infinity, at the height where d_T = tau.
      const double y = 1.0 / (2 * std::sinh(tau / 2));
      const double hh = 1e-5;
      const double fd = (displacement(t, HPointd{0, y * std::exp(-hh)}) - displacement(t, HPointd{0, y * std::exp(hh)})) / (2 * hh);
      worst = std::max(worst, std::abs(fd - beta(tau)));
      worst = std::max(worst, std::abs(beta(tau) - 2 * std::tanh(tau / 2)));
    }
    const double b_err = std::max(std::abs(b_constant(eps) - 1 / std::tanh(eps / 2)), std::abs(b_constant(eps) - 2 / beta(eps)));
    char buf[160];
    std::snprintf(buf, sizeof buf, "tau in [0.01, 1.9], max error %.2e; b(0.1) = %.9f, error %.2e", worst, b_constant(eps), b_err);
    return Outcome{worst <= 1e-6 && b_err <= 1e-9, buf};
  });

  const CongruenceLattice gamma3(3);
  const ThinConfig cfg3{&gamma3, eps, 1, 12};

  report(4, "flow arrival bound", [&] {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(-0.5, 0.5), ul(0.0, eps);
    int good = 0;
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      const HPointd p = collar_point(cfg3, ux(rng), ul(rng), static_cast<int>(rng() % gamma3.group().order()));
      const FlowTrace tr = flow_to_thick(cfg3, p, Family::dist_to_sublevel);
      bool monotone = true;
      for (std::size_t i = 1; i < tr.samples.size(); ++i) monotone = monotone && tr.samples[i].delta >= tr.samples[i - 1].delta - 1e-8;
      const double bound = std::sqrt(2 * (eps - tr.samples.front().delta));
      const bool ok = tr.status == FlowStatus::arrived && std::abs(tr.samples.back().delta - eps) <= 1e-6 && monotone &&
                      tr.arrival_time <= bound * 1.05;
      good += ok;
      if (bound > 0) worst = std::max(worst, tr.arrival_time / bound);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "Gamma(3), %d/100 starts reach eps monotonically in time, max t/sqrt(2(eps-delta0)) = %.4f",
                  good, worst);
    return Outcome{good == 100, buf};
  });

  report(5, "Hausdorff bound", [&] {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(-0.5, 0.5);
    std::vector<HPointd> boundary;
    for (int k = 0; k < 500; ++k)
      boundary.push_back(collar_point(cfg3, ux(rng), eps, static_cast<int>(rng() % gamma3.group().order())));
    int samples = 0, violations = 0;
    double ratio = 0;
    for (const double t : {eps / 4, eps / 2, 3 * eps / 4}) {
      const HausdorffStats st = hausdorff_check(cfg3, boundary, t);
      samples += st.samples;
      violations += st.violations;
      ratio = std::max(ratio, st.max_ratio);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "t in {eps/4, eps/2, 3eps/4}, %d samples, %d violations, max ratio to b t %.4f", samples,
                  violations, ratio);
    return Outcome{violations == 0 && samples >= 1500, buf};
  });

  std::vector<LevelRun> runs;
  std::string run_error;
  for (int n : {3, 4, 5}) {
    try {
      runs.push_back(run_level(n, root / ("gamma" + std::to_string(n))));
    } catch (const std::exception& e) {
      run_error += "Gamma(" + std::to_string(n) + "): " + e.what() + "; ";
    }
  }

  report(6, "vertex count and degree bounds", [&] {
    std::ostringstream os;
    bool ok = run_error.empty();
    for (const auto& r : runs) {
      const Json& b = r.report["bounds"];
      ok = ok && b["vertex_count"]["passed"].get<bool>() && b["max_degree"]["passed"].get<bool>();
      os << "Gamma(" << r.level << ") V " << b["vertex_count"]["observed"].get<double>() << " <= "
         << b["vertex_count"]["bound"].get<double>() << ", deg " << b["max_degree"]["observed"].get<double>()
         << " <= " << b["max_degree"]["bound"].get<double>() << " (" << static_cast<int>(r.seconds) << " s); ";
    }
    os << "eps = 0.19" << (run_error.empty() ? "" : "; " + run_error);
    return Outcome{ok && runs.size() == 3, os.str()};
  });

  report(7, "nerve homotopy type", [&] {
    std::ostringstream os;
    bool ok = run_error.empty();
    const std::vector<std::vector<std::int64_t>> stated{{1, 3, 0}, {1, 5, 0}, {1, 11, 0}};
    for (const auto& r : runs) {
      const std::int64_t index = projective_index(r.level);
      const std::int64_t chi = -index / 6;
      // Genus 0 for N <= 5; every cusp of Gamma(N) has width N.
      const std::int64_t b1_cusps = index / r.level - 1;
      const Json& inv = r.report["invariants"];
      std::vector<std::int64_t> betti = inv["betti"].get<std::vector<std::int64_t>>();
      betti.resize(3);
      const std::vector<std::int64_t> expected{1, 1 - chi, 0};
      ok = ok && betti == expected && betti == stated[r.level - 3] && b1_cusps == 1 - chi &&
           inv["euler_characteristic"].get<std::int64_t>() == chi && inv["euler_reliable"].get<bool>();
      os << "Gamma(" << r.level << ") betti (" << betti[0] << ',' << betti[1] << ',' << betti[2] << ") chi "
         << inv["euler_characteristic"].get<std::int64_t>() << " vs " << chi << "; ";
    }
    return Outcome{ok && runs.size() == 3, os.str()};
  });

  report(8, "every nerve simplex has a thick witness", [&] {
    std::uint64_t rejected = 0, failures_replay = 0, checked = 0;
    bool capped = false;
    for (const auto& r : runs) {
      const Json& nv = r.report["nerve"];
      rejected += nv["rejected"].get<std::uint64_t>();
      failures_replay += nv["replay"]["failures"].get<std::uint64_t>();
      checked += nv["replay"]["checked"].get<std::uint64_t>();
      capped = capped || nv["cap_reached"].get<bool>();
    }
    return Outcome{run_error.empty() && runs.size() == 3 && rejected == 0 && failures_replay == 0 && checked > 0 && !capped,
                   std::to_string(checked) + " witnesses replayed, " + std::to_string(failures_replay) +
                       " replay failures, " + std::to_string(rejected) + " rejections"};
  });

  report(9, "counting lab", [&] {
    const auto rows = count_table(9, 3);
    bool ok = rows.size() == 1 + 2 + 3 + 4 * 6;
    std::uint64_t graphs = 0;
    for (const auto& r : rows) {
      graphs += r.labeled;
      ok = ok && r.within_envelope && r.max_triangles <= r.max_paths2 && r.max_paths2 <= r.triangle_bound &&
           r.skeletons_brute_checked == (r.n <= 6);
    }
    // Census envelope at the pipeline constants, from V = e on.
    for (const auto& run : runs) {
      const Json& c = run.report["constants"];
      for (double v = std::exp(1.0); v < 200; v *= 1.5) {
        const CensusEnvelope e = census_envelope(v, c["alpha"].get<double>(), c["d"].get<double>());
        ok = ok && e.log_graphs + e.log_triangles <= e.log_envelope;
      }
    }
    return Outcome{ok, std::to_string(graphs) + " labeled graphs with n <= 9, d <= 3 within the envelope; "
                       "triangle bounds hold; skeletons brute-checked for n <= 6"};
  });

  report(10, "determinism", [&] {
    if (runs.empty()) return Outcome{false, "no pipeline run to compare"};
    const LevelRun again = run_level(3, root / "gamma3_again");
    std::vector<std::string> differ;
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(runs.front().dir)) {
      const auto name = entry.path().filename().string();
      if (name == "timings.json") continue;
      ++compared;
      if (slurp(entry.path()) != slurp(again.dir / name)) differ.push_back(name);
    }
    std::string detail = "Gamma(3) twice, " + std::to_string(compared) + " output files compared, " +
                         std::to_string(differ.size()) + " differ";
    for (const auto& d : differ) detail += " " + d;
    return Outcome{differ.empty() && compared > 0 && slurp(runs.front().dir / "report.json") == slurp(again.dir / "report.json"),
                   detail};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
