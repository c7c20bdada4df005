#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "thicknerve/thickthin.hpp"

using namespace thicknerve;

namespace {

IntMatrix mat(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  IntMatrix m;
  m << a, b, c, d;
  return m;
}

struct Fixture {
  CongruenceLattice lattice{3};
  ThinConfig cfg{&lattice, 0.1, 1, 12};
};

/// Point in the cusp collar with distance-family value `level`, moved to a
/// cusp chosen by `label` so that several cusps are exercised.
HPointd collar_point(const ThinConfig& cfg, double x, double level, int label) {
  const HPointd p = level_point_above(cfg, x, level);
  return apply(cfg.lattice->group().lift(label), p);
}

}  // namespace

TEST_CASE("thin membership examples") {
  Fixture f;
  const ThinResult deep = thin_membership(f.cfg, HPointd{0, 100}, Family::displacement);
  CHECK(deep.thin);
  CHECK(displacement(mat(1, 3, 0, 1), HPointd{0, 100}) == doctest::Approx(2 * std::asinh(3.0 / 200)).epsilon(1e-12));
  CHECK(deep.active.functions.front().value == doctest::Approx(2 * std::asinh(3.0 / 200)).epsilon(1e-12));
  CHECK_FALSE(thin_membership(f.cfg, HPointd{0, 1}, Family::displacement).thin);
  CHECK(displacement(mat(1, 3, 0, 1), HPointd{0, 1}) == doctest::Approx(std::acosh(5.5)).epsilon(1e-12));
  CHECK_FALSE(thin_membership(f.cfg, HPointd{0, 1}, Family::dist_to_sublevel).thin);
  CHECK(active_set(f.cfg, HPointd{0, 1}, Family::displacement, 0.0).functions.empty());
  CHECK(thin_membership(f.cfg, HPointd{0.3, 40}, Family::dist_to_sublevel).thin);
}

TEST_CASE("delta_min sentinel, boundary and Lipschitz bounds") {
  Fixture f;
  CHECK(std::isinf(delta_min(f.cfg, HPointd{0, 1}, Family::displacement)));
  CHECK(std::isinf(delta_min(f.cfg, HPointd{0, 1}, Family::dist_to_sublevel)));
  const double y_edge = 3.0 / (2 * std::sinh(0.05));
  CHECK(delta_min(f.cfg, HPointd{0.2, y_edge}, Family::displacement) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(delta_min(f.cfg, HPointd{0.2, y_edge}, Family::dist_to_sublevel) == doctest::Approx(0.0).epsilon(1e-9));

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uly(std::log(10.0), std::log(60.0)), step(-0.02, 0.02);
  int pairs = 0;
  for (int k = 0; k < 3000; ++k) {
    const HPointd p = apply(f.lattice.group().lift(k % 12), HPointd{ux(rng), std::exp(uly(rng))});
    const HPointd q = exp_map(p, FrameVectord(step(rng), step(rng)), std::abs(step(rng)));
    for (auto fam : {Family::displacement, Family::dist_to_sublevel}) {
      const double a = delta_min(f.cfg, p, fam), b = delta_min(f.cfg, q, fam);
      if (std::isinf(a) || std::isinf(b)) continue;
      const double lip = fam == Family::displacement ? 2.0 : 1.0;
      CHECK(std::abs(a - b) <= lip * distance(p, q) + 1e-9);
      ++pairs;
    }
  }
  CHECK(pairs > 1000);
}

TEST_CASE("steering direction") {
  std::vector<FrameVectord> one{FrameVectord(0.3, -0.4)};
  const Steering s1 = steering_direction(one);
  CHECK(s1.direction(0) == doctest::Approx(0.6));
  CHECK(s1.direction(1) == doctest::Approx(-0.8));
  CHECK(s1.value == doctest::Approx(0.5));

  for (double theta : {0.1, 0.5, 1.0, 1.4}) {
    const double base = 0.7;
    std::vector<FrameVectord> two{FrameVectord(std::cos(base - theta), std::sin(base - theta)),
                                  FrameVectord(std::cos(base + theta), std::sin(base + theta))};
    const Steering s = steering_direction(two);
    CHECK(s.value == doctest::Approx(std::cos(theta)).epsilon(1e-12));
    // Grid-search oracle over 10^4 directions.
    double grid = -1;
    for (int i = 0; i < 10000; ++i) {
      const double a = 2 * std::numbers::pi * i / 10000;
      const FrameVectord fdir(std::cos(a), std::sin(a));
      grid = std::max(grid, std::min(fdir.dot(two[0]), fdir.dot(two[1])));
    }
    CHECK(s.value >= grid - 1e-12);
    CHECK(s.value - grid <= 2 * std::numbers::pi / 10000);
    CHECK(s.direction(0) == doctest::Approx(std::cos(base)).epsilon(1e-9));
  }
  std::vector<FrameVectord> opposite{FrameVectord(1, 0), FrameVectord(-1, 0)};
  CHECK_THROWS_AS(steering_direction(opposite), NoImprovingDirection);
  CHECK_THROWS_AS(steering_direction(std::vector<FrameVectord>{}), DomainError);
}

TEST_CASE("beta and b") {
  CHECK(beta(0.5) == doctest::Approx(0.4898373).epsilon(1e-6));
  CHECK_THROWS_AS(beta(0.0), DomainError);
  // Finite differences of d_T along the vertical geodesic descending from the
  // fixed point at infinity, at the height where d_T equals tau.
  IntMatrix t = mat(1, 1, 0, 1);
  double worst = 0, prev = 0;
  for (int i = 0; i <= 189; ++i) {
    const double tau = 0.01 + i * 0.01;
    const double y = 1.0 / (2 * std::sinh(tau / 2));
    const double h = 1e-5;
    const double fd = (displacement(t, HPointd{0, y * std::exp(-h)}) - displacement(t, HPointd{0, y * std::exp(h)})) / (2 * h);
    worst = std::max(worst, std::abs(fd - beta(tau)));
    CHECK(beta(tau) > prev);
    CHECK(beta(tau) < 2.0);
    prev = beta(tau);
  }
  CHECK(worst <= 1e-6);
  CHECK(b_constant(0.1) == doctest::Approx(20.01666).epsilon(1e-6));
  CHECK(std::abs(b_constant(0.1) - 1.0 / std::tanh(0.05)) <= 1e-9);
}

TEST_CASE("retract field magnitude and lower bound") {
  Fixture f;
  const double eps = f.cfg.epsilon;
  CHECK(retract_field(f.cfg, HPointd{0, 1}, Family::dist_to_sublevel).norm() == 0.0);
  CHECK(retract_field(f.cfg, HPointd{0, 1}, Family::displacement).norm() == 0.0);

  // One active function with value eps/2 (distance family).
  const HPointd p = level_point_above(f.cfg, 0.17, eps / 2);
  const ActiveSet act = active_set(f.cfg, p, Family::dist_to_sublevel, 3 * eps);
  REQUIRE(act.functions.size() == 1);
  const FrameVectord v = retract_field(f.cfg, p, Family::dist_to_sublevel);
  const double expected = std::sqrt(2 * eps / 2) * (3 * eps - eps / 2) / eps * 1.0 / (beta(eps) / 2);
  CHECK(v.norm() == doctest::Approx(expected).epsilon(1e-9));
  const FrameVectord g = function_gradient(f.cfg, act.functions[0], p, Family::dist_to_sublevel);
  CHECK(g.dot(v) >= std::sqrt(2 * (eps - eps / 2)));

  // Lower bound for the minimising function at random thin points, both families.
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), ul(0.0, 0.1), uy(31, 110);
  for (int k = 0; k < 300; ++k) {
    const int label = k % 12;
    const HPointd q = collar_point(f.cfg, ux(rng), ul(rng), label);
    const FrameVectord vq = retract_field(f.cfg, q, Family::dist_to_sublevel);
    const ActiveSet aq = active_set(f.cfg, q, Family::dist_to_sublevel, 3 * eps);
    const double dq = aq.functions.front().value;
    CHECK(function_gradient(f.cfg, aq.functions.front(), q, Family::dist_to_sublevel).dot(vq) >=
          std::sqrt(2 * (eps - dq)) - 1e-12);

    const HPointd r = apply(f.lattice.group().lift(label), HPointd{ux(rng), uy(rng)});
    const ActiveSet ar = active_set(f.cfg, r, Family::displacement, 3 * eps);
    const double dr = ar.functions.front().value;
    if (dr >= eps) continue;
    const FrameVectord vr = retract_field(f.cfg, r, Family::displacement);
    for (const auto& fn : ar.functions)
      if (fn.value <= eps)
        CHECK(function_gradient(f.cfg, fn, r, Family::displacement).dot(vr) >= std::sqrt(2 * (eps - dr)) - 1e-12);
  }
}

TEST_CASE("retract field continuity across active-set transitions") {
  Fixture f;
  // A vertical path through the cusp crosses the thresholds eps and 3 eps of
  // several powers of the parabolic generator. The field is only Hoelder
  // continuous where delta reaches eps (square-root factor), so the check is
  // that the largest jump between neighbouring samples shrinks with the step.
  for (auto fam : {Family::displacement, Family::dist_to_sublevel}) {
    const double y_top = fam == Family::displacement ? 110.0 : 28.0;
    const double y_bot = fam == Family::displacement ? 25.0 : 21.0;
    auto max_jump = [&](int n) {
      double worst = 0, largest = 0;
      FrameVectord vprev = retract_field(f.cfg, HPointd{0.13, y_bot}, fam);
      for (int i = 1; i <= n; ++i) {
        const HPointd cur{0.13, y_bot * std::pow(y_top / y_bot, static_cast<double>(i) / n)};
        const FrameVectord vcur = retract_field(f.cfg, cur, fam);
        worst = std::max(worst, (vcur - vprev).norm());
        largest = std::max(largest, vcur.norm());
        vprev = vcur;
      }
      return worst / largest;
    };
    const double coarse = max_jump(5000), fine = max_jump(80000);
    CHECK(coarse < 0.1);
    CHECK(fine < coarse / 3.0);
  }
}

TEST_CASE("retract field equivariance") {
  Fixture f;
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), ul(0.0, 0.1);
  const std::vector<IntMatrix> hs{mat(1, 3, 0, 1), mat(1, 0, 3, 1), mat(-2, 3, -3, 4), mat(4, 3, 9, 7)};
  for (int k = 0; k < 200; ++k) {
    const HPointd p = collar_point(f.cfg, ux(rng), ul(rng), k % 12);
    const IntMatrix& h = hs[k % hs.size()];
    const FrameVectord vp = retract_field(f.cfg, p, Family::dist_to_sublevel);
    const FrameVectord vhp = retract_field(f.cfg, apply(h, p), Family::dist_to_sublevel);
    CHECK((vhp - push_forward(h, p, vp)).norm() <= 1e-8 * std::max(1.0, vp.norm()));
  }
}

TEST_CASE("steering bound at thick collar points") {
  Fixture f;
  const double eps = f.cfg.epsilon;
  const double inv_b = 1.0 / b_constant(eps);
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), ul(eps, 2 * eps);
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const HPointd p = collar_point(f.cfg, ux(rng), ul(rng), k % 12);
    const ActiveSet act = active_set(f.cfg, p, Family::dist_to_sublevel, 2 * eps);
    std::vector<FrameVectord> grads;
    for (const auto& fn : act.functions) grads.push_back(horoball_gradient(fn.sublevel, p));
    const Steering s = steering_direction(grads);
    for (const auto& g : grads) CHECK(s.direction.dot(g) >= inv_b);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("flow to the thick part") {
  Fixture f;
  const double eps = f.cfg.epsilon;
  const FlowTrace trivial = flow_to_thick(f.cfg, level_point_above(f.cfg, 0.1, eps), Family::dist_to_sublevel);
  CHECK(trivial.arrival_time == 0.0);

  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), ul(0.0, eps);
  for (int k = 0; k < 20; ++k) {
    const HPointd p = collar_point(f.cfg, ux(rng), ul(rng), k % 12);
    const FlowTrace tr = flow_to_thick(f.cfg, p, Family::dist_to_sublevel);
    CHECK(tr.status == FlowStatus::arrived);
    CHECK(tr.monotone);
    CHECK(tr.within_bound);
    CHECK(tr.arrival_time <= tr.time_bound * 1.05);
    CHECK(tr.samples.back().delta == doctest::Approx(eps).epsilon(1e-6));
    for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].delta >= tr.samples[i - 1].delta - 1e-8);
  }
  // Displacement family from inside the thin part.
  const FlowTrace disp = flow_to_thick(f.cfg, HPointd{0.2, 60.0}, Family::displacement);
  CHECK(disp.monotone);
  CHECK(disp.within_bound);

  std::ostringstream os;
  write_trace_csv(os, disp);
  CHECK(os.str().rfind("t,x,y,delta\n", 0) == 0);
}

TEST_CASE("Hausdorff bound") {
  Fixture f;
  const double eps = f.cfg.epsilon;
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> ux(-0.5, 0.5);
  std::vector<HPointd> boundary;
  for (int k = 0; k < 120; ++k) boundary.push_back(collar_point(f.cfg, ux(rng), eps, k % 12));
  for (double t : {eps / 4, eps / 2, 3 * eps / 4}) {
    const HausdorffStats st = hausdorff_check(f.cfg, boundary, t);
    CHECK(st.samples == 120);
    CHECK(st.violations == 0);
    CHECK(st.max_ratio < 1.0);
  }
}

TEST_CASE("tangent ball property") {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> ux(-2, 2);
  for (const IntMatrix& g : {mat(1, 3, 0, 1), mat(1, 0, 3, 1), mat(-2, 3, -3, 4)}) {
    const double eps = 0.1;
    const Horoball<double> h = unipotent_sublevel<double>(g, eps);
    std::vector<HPointd> pts;
    for (int k = 0; k < 50; ++k) {
      // Points at distance exactly eps from the horoball: move from a boundary
      // point along the outward normal.
      HPointd base;
      if (h.at_infinity) {
        base = {ux(rng), h.size};
      } else {
        const double a = 0.2 + 2.7 * (k + 0.5) / 50;
        base = {h.center + 0.5 * h.size * std::sin(a), 0.5 * h.size * (1 - std::cos(a))};
      }
      const FrameVectord n = horoball_gradient(h, base);
      pts.push_back(exp_map(base, n, eps));
    }
    for (const auto& p : pts) CHECK(horoball_distance(h, p) == doctest::Approx(eps).epsilon(1e-9));
    const TangentBallStats st = tangent_ball_check(g, eps, pts, 200, 97);
    CHECK(st.probes == 50 * 200);
    CHECK(st.violations == 0);
  }
}
