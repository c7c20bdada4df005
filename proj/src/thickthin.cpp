#include "thicknerve/thickthin.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace thicknerve {

namespace {

bool tuple_less(const IntMatrix& a, const IntMatrix& b) {
  for (int i = 0; i < 4; ++i) {
    const auto x = a(i / 2, i % 2), y = b(i / 2, i % 2);
    if (x != y) return x < y;
  }
  return false;
}

/// Enumeration radius guaranteeing every gamma with dist-family value <= tau
/// is found: d_gamma <= eps + 2 D_gamma.
double enumeration_radius(const ThinConfig& cfg, Family family, double tau) {
  return family == Family::displacement ? tau : cfg.epsilon + 2.0 * tau;
}

double evaluate(const ThinConfig& cfg, const IntMatrix& g, const Horoball<double>& h, const HPointd& p,
                Family family) {
  (void)cfg;
  return family == Family::displacement ? displacement(g, p) : horoball_distance(h, p);
}

void check_config(const ThinConfig& cfg) {
  if (cfg.lattice == nullptr) throw ConfigError("ThinConfig: missing lattice");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("ThinConfig: epsilon must be positive");
}

}  // namespace

double beta(double tau) {
  if (!(tau > 0.0)) throw DomainError("beta: tau must be positive");
  return 2.0 * std::tanh(tau / 2.0);
}

double b_constant(double eps) { return 2.0 / beta(eps); }

double family_beta(const ThinConfig& cfg, Family family, double delta) {
  if (family == Family::dist_to_sublevel) return beta(cfg.epsilon) / 2.0;
  return beta(delta);
}

ActiveSet active_set(const ThinConfig& cfg, const HPointd& p, Family family, double tau) {
  check_config(cfg);
  ActiveSet out;
  out.threshold = tau;
  if (tau < 0.0) return out;
  for_each_short_element(*cfg.lattice, p, enumeration_radius(cfg, family, tau), [&](const IntMatrix& g, double) {
    if (!is_unipotent(g)) return;
    if (tuple_less(inverse_sl2(g), g)) return;
    ActiveFunction f;
    f.element = g;
    f.sublevel = unipotent_sublevel<double>(g, cfg.epsilon);
    f.value = evaluate(cfg, g, f.sublevel, p, family);
    if (f.value <= tau) out.functions.push_back(f);
  });
  std::sort(out.functions.begin(), out.functions.end(), [](const ActiveFunction& a, const ActiveFunction& b) {
    if (a.value != b.value) return a.value < b.value;
    return tuple_less(a.element, b.element);
  });
  return out;
}

ThinResult thin_membership(const ThinConfig& cfg, const HPointd& p, Family family) {
  ThinResult r;
  r.active = active_set(cfg, p, family, 3.0 * cfg.epsilon);
  const double delta = r.active.functions.empty() ? kNoActive : r.active.functions.front().value;
  // The thin part is closed for the displacement family; for the distance
  // family it is the open eps-neighbourhood {D < eps}.
  r.thin = family == Family::displacement ? delta <= cfg.epsilon : delta < cfg.epsilon;
  return r;
}

double delta_min(const ThinConfig& cfg, const HPointd& p, Family family) {
  // The family is invariant under SL2(Z) (Gamma(N) is normal), so evaluate at
  // the reduced point where enumeration is cheapest.
  const HPointd q = reduce_to_fundamental(p).point;
  const ActiveSet a = active_set(cfg, q, family, 3.0 * cfg.epsilon);
  return a.functions.empty() ? kNoActive : a.functions.front().value;
}

FrameVectord function_gradient(const ThinConfig& cfg, const ActiveFunction& f, const HPointd& p, Family family) {
  if (family == Family::displacement) return displacement_gradient(f.element, p);
  if (horoball_level(f.sublevel, p) < -1e-12)
    throw DomainError("function_gradient: point inside a sub-level set");
  (void)cfg;
  return horoball_gradient(f.sublevel, p);
}

Steering steering_direction(std::span<const FrameVectord> gradients) {
  if (gradients.empty()) throw DomainError("steering_direction: empty gradient list");
  for (const auto& g : gradients)
    if (g.norm() == 0.0) throw DomainError("steering_direction: zero gradient");
  auto score = [&](const FrameVectord& f) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& g : gradients) v = std::min(v, f.dot(g));
    return v;
  };
  Steering best{gradients[0].normalized(), -std::numeric_limits<double>::infinity()};
  auto consider = [&](const FrameVectord& f) {
    const double v = score(f);
    if (v > best.value + 1e-15) best = {f, v};
  };
  for (const auto& g : gradients) consider(g.normalized());
  for (std::size_t i = 0; i < gradients.size(); ++i)
    for (std::size_t j = i + 1; j < gradients.size(); ++j) {
      const FrameVectord d = gradients[i] - gradients[j];
      const double n = d.norm();
      if (n < 1e-14) continue;
      const FrameVectord perp(-d(1) / n, d(0) / n);
      consider(perp);
      consider(-perp);
    }
  if (!(best.value > 0.0)) {
    std::ostringstream msg;
    msg << "steering_direction: no improving direction (best value " << best.value << ")";
    throw NoImprovingDirection(msg.str());
  }
  return best;
}

FrameVectord retract_field(const ThinConfig& cfg, const HPointd& p, Family family) {
  const double eps = cfg.epsilon;
  const ActiveSet act = active_set(cfg, p, family, 3.0 * eps);
  if (act.functions.empty()) return FrameVectord::Zero();
  const double delta = act.functions.front().value;
  if (delta >= eps) return FrameVectord::Zero();
  if (family == Family::dist_to_sublevel)
    for (const auto& f : act.functions)
      if (horoball_level(f.sublevel, p) < -1e-12)
        throw DomainError("retract_field: point inside the open thin part");

  const auto& fs = act.functions;
  const int total = static_cast<int>(fs.size());
  if (total > cfg.max_active) {
    std::ostringstream msg;
    msg << "retract_field: active set of size " << total << " exceeds cap " << cfg.max_active << " at (" << p.x
        << "," << p.y << ")";
    throw NumericalError(msg.str());
  }
  // Subsets with nonzero weight contain every phi <= eps (sorted first) and
  // some of the phi in (eps, 3 eps].
  int mandatory = 0;
  while (mandatory < total && fs[mandatory].value <= eps) ++mandatory;
  const int optional = total - mandatory;

  std::vector<FrameVectord> grads;
  grads.reserve(fs.size());
  for (const auto& f : fs) grads.push_back(function_gradient(cfg, f, p, family));

  FrameVectord sum = FrameVectord::Zero();
  std::vector<FrameVectord> chosen;
  for (std::uint32_t mask = 0; mask < (1u << optional); ++mask) {
    if (mandatory == 0 && mask == 0) continue;
    chosen.assign(grads.begin(), grads.begin() + mandatory);
    double max_in = mandatory > 0 ? fs[mandatory - 1].value : 0.0;
    double min_out = kNoActive;
    for (int k = 0; k < optional; ++k) {
      const auto& f = fs[mandatory + k];
      if (mask & (1u << k)) {
        chosen.push_back(grads[mandatory + k]);
        max_in = std::max(max_in, f.value);
      } else {
        min_out = std::min(min_out, f.value);
      }
    }
    const double w_in = std::max(0.0, 3.0 * eps - max_in) / eps;
    const double w_out = std::isinf(min_out) ? 1.0 : std::min(1.0, std::max(0.0, min_out - eps) / eps);
    if (w_in * w_out == 0.0) continue;
    sum += w_in * w_out * steering_direction(chosen).direction;
  }
  return std::sqrt(2.0 * (eps - delta)) / family_beta(cfg, family, delta) * sum;
}

namespace {

HPointd rk4_step(const ThinConfig& cfg, const HPointd& p, Family family, double h) {
  auto vel = [&](const HPointd& q) -> Eigen::Vector2d {
    if (!(q.y > 0.0) || !std::isfinite(q.x) || !std::isfinite(q.y)) throw NumericalError("flow left the half-plane");
    return to_coordinates(q, retract_field(cfg, q, family));
  };
  auto shift = [](const HPointd& q, const Eigen::Vector2d& v, double s) { return HPointd{q.x + s * v(0), q.y + s * v(1)}; };
  const Eigen::Vector2d k1 = vel(p);
  const Eigen::Vector2d k2 = vel(shift(p, k1, h / 2));
  const Eigen::Vector2d k3 = vel(shift(p, k2, h / 2));
  const Eigen::Vector2d k4 = vel(shift(p, k3, h));
  return shift(p, k1 + 2.0 * k2 + 2.0 * k3 + k4, h / 6.0);
}

}  // namespace

FlowTrace flow_to_thick(const ThinConfig& cfg, const HPointd& p0, Family family, const FlowConfig& solver) {
  const double eps = cfg.epsilon;
  const double max_dist = solver.max_step > 0 ? solver.max_step : eps / 10.0;
  const double max_time = solver.max_time > 0 ? solver.max_time : 10.0 * std::sqrt(2.0 * eps);
  auto delta_at = [&](const HPointd& q) { return delta_min(cfg, q, family); };

  FlowTrace tr;
  double delta = delta_at(p0);
  tr.samples.push_back({0.0, p0, delta});
  if (delta >= eps - solver.arrival_tolerance) {
    tr.status = FlowStatus::already_thick;
    return tr;
  }
  tr.time_bound = std::sqrt(2.0 * (eps - delta));
  double t = 0.0;
  HPointd p = p0;
  double h = -1.0;
  while (true) {
    const double speed = retract_field(cfg, p, family).norm();
    const double h_cap = speed > 0 ? max_dist / speed : max_time;
    if (h < 0 || h > h_cap) h = h_cap;
    if (t > max_time) throw FlowError("flow_to_thick: time budget exhausted", tr);
    if (h < solver.min_step) throw FlowError("flow_to_thick: step size underflow", tr);

    const HPointd full = rk4_step(cfg, p, family, h);
    const HPointd half = rk4_step(cfg, rk4_step(cfg, p, family, h / 2), family, h / 2);
    if (distance(full, half) > solver.tolerance) {
      h /= 2;
      ++tr.rejected_steps;
      continue;
    }
    ++tr.steps;
    const double d_new = delta_at(half);
    if (d_new >= eps) {
      // Locate the crossing of delta = eps inside the step by bisection.
      double lo = 0.0, hi = h;
      HPointd at = half;
      for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const HPointd q = rk4_step(cfg, p, family, mid);
        if (delta_at(q) >= eps) {
          hi = mid;
          at = q;
        } else {
          lo = mid;
        }
      }
      t += hi;
      tr.samples.push_back({t, at, delta_at(at)});
      break;
    }
    t += h;
    p = half;
    if (d_new < delta - 1e-8) tr.monotone = false;
    delta = d_new;
    tr.samples.push_back({t, p, delta});
    h *= 2.0;
  }
  tr.arrival_time = t;
  tr.within_bound = t <= tr.time_bound * (1.0 + solver.bound_tolerance);
  return tr;
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace, bool header) {
  if (header) os << "t,x,y,delta\n";
  os << std::setprecision(12);
  for (const auto& s : trace.samples) os << s.t << ',' << s.point.x << ',' << s.point.y << ',' << s.delta << '\n';
}

HPointd level_point_above(const ThinConfig& cfg, double x, double level) {
  // Along a vertical line in the fundamental domain the distance-family
  // minimum decreases once the cusp at infinity dominates.
  double lo = std::sqrt(std::max(0.0, 1.0 - x * x));
  lo = std::max(lo, 1e-3);
  double hi = lo;
  while (delta_min(cfg, {x, hi}, Family::dist_to_sublevel) > level) hi *= 2.0;
  if (delta_min(cfg, {x, lo}, Family::dist_to_sublevel) < level)
    throw DomainError("level_point_above: level not crossed above the fundamental domain floor");
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (delta_min(cfg, {x, mid}, Family::dist_to_sublevel) > level)
      lo = mid;
    else
      hi = mid;
  }
  return {x, 0.5 * (lo + hi)};
}

HausdorffStats hausdorff_check(const ThinConfig& cfg, std::span<const HPointd> boundary_points, double t) {
  const double eps = cfg.epsilon;
  const double b = b_constant(eps);
  HausdorffStats st;
  for (const auto& x : boundary_points) {
    ++st.samples;
    const ActiveSet act = active_set(cfg, x, Family::dist_to_sublevel, 2.0 * eps);
    std::vector<FrameVectord> grads;
    for (const auto& f : act.functions) grads.push_back(horoball_gradient(f.sublevel, x));
    const FrameVectord dir = steering_direction(grads).direction;
    auto reached = [&](double s) { return delta_min(cfg, exp_map(x, dir, s), Family::dist_to_sublevel) >= eps + t; };
    // March then bisect for the first exit from the t-neighbourhood.
    const double limit = b * t;
    const double step = t / 16.0;
    double s = 0.0;
    bool found = false;
    while (s < 2.0 * limit) {
      if (reached(s + step)) {
        double lo = s, hi = s + step;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (reached(mid) ? hi : lo) = mid;
        }
        s = hi;
        found = true;
        break;
      }
      s += step;
    }
    const double ratio = found ? s / limit : 2.0;
    st.max_ratio = std::max(st.max_ratio, ratio);
    if (!(ratio < 1.0)) ++st.violations;
  }
  return st;
}

TangentBallStats tangent_ball_check(const IntMatrix& gamma, double eps, std::span<const HPointd> boundary_points,
                                    int probes_per_point, std::uint64_t seed) {
  const Horoball<double> h = unipotent_sublevel<double>(gamma, eps);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TangentBallStats st;
  for (const auto& x : boundary_points) {
    ++st.boundary_points;
    // The nearest point of the horoball lies on the geodesic along -grad.
    const FrameVectord g = horoball_gradient(h, x);
    const double dist = horoball_distance(h, x);
    const HPointd proj = exp_map(x, FrameVectord(-g), dist);
    for (int k = 0; k < probes_per_point; ++k) {
      const double a = angle(rng);
      const double r = eps * std::sqrt(unit(rng));
      const HPointd q = exp_map(proj, FrameVectord(std::cos(a), std::sin(a)), r);
      ++st.probes;
      if (horoball_distance(h, q) > eps + 1e-9) ++st.violations;
    }
  }
  return st;
}

}  // namespace thicknerve
