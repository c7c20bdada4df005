#pragma once

// Minimum enclosing ball in the hyperbolic plane, computed exactly in the
// hyperboloid model with the move-to-front variant of Welzl's algorithm.
// A ball with two boundary points is centred at their midpoint; with three,
// at the point Lorentz-orthogonal to both chords.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "thicknerve/hyperbolic.hpp"

namespace thicknerve {

template <typename Scalar>
struct ChebyshevResult {
  HPoint<Scalar> center;
  Scalar radius{0};
  /// Norm of the shortest vector in the convex hull of unit directions from
  /// the centre to the farthest points; zero at the true minimiser.
  Scalar residual{0};
};

namespace detail {

template <typename Scalar>
struct LorentzBall {
  LorentzVector<Scalar> c;
  Scalar cosh_r{1};
};

template <typename Scalar>
bool ball_contains(const LorentzBall<Scalar>& b, const LorentzVector<Scalar>& p) {
  return -minkowski_dot(b.c, p) <= b.cosh_r * (Scalar(1) + Scalar(1e-13)) + Scalar(1e-13);
}

template <typename Scalar>
LorentzBall<Scalar> ball_two(const LorentzVector<Scalar>& p, const LorentzVector<Scalar>& q) {
  using std::sqrt;
  const LorentzVector<Scalar> s = p + q;
  LorentzBall<Scalar> b;
  b.c = s / sqrt(-minkowski_dot(s, s));
  b.cosh_r = -minkowski_dot(b.c, p);
  return b;
}

template <typename Scalar>
LorentzBall<Scalar> ball_three(const LorentzVector<Scalar>& p, const LorentzVector<Scalar>& q,
                               const LorentzVector<Scalar>& r) {
  using std::sqrt;
  const LorentzVector<Scalar> w = (p - q).cross(p - r);
  LorentzVector<Scalar> c(-w(0), w(1), w(2));
  const Scalar n = -minkowski_dot(c, c);
  if (n > Scalar(0) && std::isfinite(n)) {
    c /= sqrt(n);
    if (c(0) < Scalar(0)) c = -c;
    LorentzBall<Scalar> b{c, -minkowski_dot(c, p)};
    if (b.cosh_r >= Scalar(1)) return b;
  }
  // Degenerate (nearly collinear) triple: the largest pair ball encloses all.
  LorentzBall<Scalar> best = ball_two(p, q);
  for (const auto& cand : {ball_two(p, r), ball_two(q, r)})
    if (cand.cosh_r > best.cosh_r) best = cand;
  return best;
}

template <typename Scalar>
LorentzBall<Scalar> ball_from(const std::vector<LorentzVector<Scalar>>& boundary) {
  switch (boundary.size()) {
    case 0:
      return {LorentzVector<Scalar>(1, 0, 0), Scalar(-1)};
    case 1:
      return {boundary[0], Scalar(1)};
    case 2:
      return ball_two(boundary[0], boundary[1]);
    default:
      return ball_three(boundary[0], boundary[1], boundary[2]);
  }
}

template <typename Scalar>
LorentzBall<Scalar> mtf_ball(std::vector<LorentzVector<Scalar>>& pts, std::size_t n,
                             std::vector<LorentzVector<Scalar>>& boundary) {
  LorentzBall<Scalar> b = ball_from(boundary);
  if (boundary.size() == 3) return b;
  for (std::size_t i = 0; i < n; ++i) {
    if (b.cosh_r >= Scalar(1) && ball_contains(b, pts[i])) continue;
    boundary.push_back(pts[i]);
    b = mtf_ball(pts, i, boundary);
    boundary.pop_back();
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i), pts.begin() + static_cast<std::ptrdiff_t>(i + 1));
  }
  return b;
}

/// Largest empty angular gap among unit vectors; the convex hull of the
/// vectors holds the origin iff the gap is at most pi.
template <typename Scalar>
Scalar hull_residual(std::vector<Scalar> angles) {
  using std::cos;
  if (angles.empty()) return Scalar(0);
  std::sort(angles.begin(), angles.end());
  Scalar gap = angles.front() + Scalar(2) * std::numbers::pi_v<Scalar> - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return std::max(Scalar(0), -cos(gap / Scalar(2)));
}

}  // namespace detail

/// Chebyshev centre of a finite point set: the unique minimiser of the
/// maximal distance. Raises DomainError on an empty list.
template <typename Scalar>
ChebyshevResult<Scalar> chebyshev_center(std::span<const HPoint<Scalar>> points) {
  using std::acosh;
  using std::atan2;
  if (points.empty()) throw DomainError("chebyshev_center: empty point list");
  std::vector<LorentzVector<Scalar>> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back(to_hyperboloid(p));
  std::vector<LorentzVector<Scalar>> boundary;
  const detail::LorentzBall<Scalar> b = detail::mtf_ball(pts, pts.size(), boundary);

  ChebyshevResult<Scalar> res;
  res.center = from_hyperboloid(b.c);
  Scalar far = Scalar(0);
  for (const auto& p : points) far = std::max(far, distance(res.center, p));
  res.radius = far;
  if (far > Scalar(1e-12)) {
    std::vector<Scalar> angles;
    for (const auto& p : points) {
      if (distance(res.center, p) < far - Scalar(1e-9) * std::max(Scalar(1), far)) continue;
      const FrameVector<Scalar> u = log_direction(res.center, p);
      angles.push_back(atan2(u(1), u(0)));
    }
    res.residual = detail::hull_residual(std::move(angles));
  }
  return res;
}

template <typename Scalar>
ChebyshevResult<Scalar> chebyshev_center(const std::vector<HPoint<Scalar>>& points) {
  return chebyshev_center(std::span<const HPoint<Scalar>>(points.data(), points.size()));
}

}  // namespace thicknerve
