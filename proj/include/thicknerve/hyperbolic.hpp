#pragma once

// Upper half-plane geometry. Points are HPoint<Scalar>; isometries are 2x2
// matrices of any scalar (integer lattice elements included) acting by
// z -> (az+b)/(cz+d). Tangent vectors are carried in the orthonormal frame
// (y d/dx, y d/dy) unless stated otherwise, so Euclidean operations on them
// are hyperbolic ones.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "thicknerve/errors.hpp"

namespace thicknerve {

template <typename Scalar>
struct HPoint {
  Scalar x{0};
  Scalar y{1};
};

template <typename Scalar>
using FrameVector = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using LorentzVector = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Mobius = Eigen::Matrix<Scalar, 2, 2>;

using IntMatrix = Eigen::Matrix<std::int64_t, 2, 2>;
using HPointd = HPoint<double>;
using FrameVectord = FrameVector<double>;

/// Unit tangent vector in coordinate components: Euclidean norm equals base.y.
template <typename Scalar>
struct UnitTangent {
  HPoint<Scalar> base;
  Eigen::Matrix<Scalar, 2, 1> direction;
};

/// Horoball {d_gamma <= eps} of a parabolic gamma. At infinity it is {y >= size};
/// otherwise it is the Euclidean disk of diameter `size` tangent to the real
/// axis at `center`.
template <typename Scalar>
struct Horoball {
  bool at_infinity{true};
  Scalar center{0};
  Scalar size{1};
};

template <typename Scalar>
bool is_valid(const HPoint<Scalar>& p) {
  using std::isfinite;
  return isfinite(p.x) && isfinite(p.y) && p.y > Scalar(0);
}

template <typename Scalar>
Scalar distance(const HPoint<Scalar>& p, const HPoint<Scalar>& q) {
  using std::asinh;
  using std::sqrt;
  // sinh(d/2) = |p - q| / (2 sqrt(y_p y_q)), equivalent to the arccosh form
  // but accurate for nearby points.
  const Scalar dx = p.x - q.x, dy = p.y - q.y;
  return Scalar(2) * asinh(sqrt(dx * dx + dy * dy) / (Scalar(2) * sqrt(p.y * q.y)));
}

/// cosh(d(p,q)) - 1, cheap monotone proxy for distance comparisons.
template <typename Scalar>
Scalar cosh_distance_minus_one(const HPoint<Scalar>& p, const HPoint<Scalar>& q) {
  const Scalar dx = p.x - q.x, dy = p.y - q.y;
  return (dx * dx + dy * dy) / (Scalar(2) * p.y * q.y);
}

template <typename Scalar, typename Derived>
HPoint<Scalar> apply(const Eigen::MatrixBase<Derived>& g, const HPoint<Scalar>& p) {
  const Scalar a = Scalar(g(0, 0)), b = Scalar(g(0, 1)), c = Scalar(g(1, 0)), d = Scalar(g(1, 1));
  const Scalar re = c * p.x + d, im = c * p.y;
  const Scalar den = re * re + im * im;
  const Scalar det = a * d - b * c;
  return {((a * p.x + b) * re + a * c * p.y * p.y) / den, det * p.y / den};
}

template <typename Derived>
IntMatrix inverse_sl2(const Eigen::MatrixBase<Derived>& g) {
  IntMatrix r;
  r << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
  return r;
}

/// Push a frame vector at p forward by g; the frame representation of the
/// derivative is multiplication by conj(cz+d)/(cz+d), a rotation.
template <typename Scalar, typename Derived>
FrameVector<Scalar> push_forward(const Eigen::MatrixBase<Derived>& g, const HPoint<Scalar>& p,
                                 const FrameVector<Scalar>& v) {
  const std::complex<Scalar> j(Scalar(g(1, 0)) * p.x + Scalar(g(1, 1)), Scalar(g(1, 0)) * p.y);
  const std::complex<Scalar> rot = std::conj(j) / j;
  const std::complex<Scalar> w = rot * std::complex<Scalar>(v(0), v(1));
  return {w.real(), w.imag()};
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> to_coordinates(const HPoint<Scalar>& p, const FrameVector<Scalar>& v) {
  return p.y * v;
}

template <typename Scalar>
UnitTangent<Scalar> unit_tangent(const HPoint<Scalar>& p, const FrameVector<Scalar>& v) {
  return {p, p.y * v.normalized()};
}

namespace detail {
template <typename Scalar, typename Derived>
std::complex<Scalar> fixed_point_polynomial(const Eigen::MatrixBase<Derived>& g, const std::complex<Scalar>& z) {
  const Scalar a = Scalar(g(0, 0)), b = Scalar(g(0, 1)), c = Scalar(g(1, 0)), d = Scalar(g(1, 1));
  return c * z * z + (d - a) * z - b;
}
}  // namespace detail

/// d_gamma(p) = d(p, gamma p). With Q(z) = cz^2 + (d-a)z - b one has
/// sinh(d_gamma/2) = |Q(z)| / (2y) for det 1.
template <typename Scalar, typename Derived>
Scalar displacement(const Eigen::MatrixBase<Derived>& g, const HPoint<Scalar>& p) {
  using std::abs;
  using std::asinh;
  const std::complex<Scalar> z(p.x, p.y);
  return Scalar(2) * asinh(abs(detail::fixed_point_polynomial<Scalar>(g, z)) / (Scalar(2) * p.y));
}

/// Gradient of d_gamma in frame components. Raises DomainError where the
/// displacement vanishes (the function has a kink there).
template <typename Scalar, typename Derived>
FrameVector<Scalar> displacement_gradient(const Eigen::MatrixBase<Derived>& g, const HPoint<Scalar>& p,
                                          Scalar tol = Scalar(1e-12)) {
  using std::abs;
  using std::sqrt;
  const Scalar a = Scalar(g(0, 0)), c = Scalar(g(1, 0)), d = Scalar(g(1, 1));
  const std::complex<Scalar> z(p.x, p.y);
  const std::complex<Scalar> q = detail::fixed_point_polynomial<Scalar>(g, z);
  const std::complex<Scalar> dq = Scalar(2) * c * z + (d - a);
  const Scalar qn = abs(q);
  const Scalar u = qn / (Scalar(2) * p.y);
  if (u < tol) throw DomainError("displacement_gradient: displacement below tolerance, gradient undefined");
  // u = |Q|/(2y); d = 2 asinh(u); d|Q|/dx = Re(conj Q Q')/|Q|, d|Q|/dy = -Im(conj Q Q')/|Q|.
  const std::complex<Scalar> w = std::conj(q) * dq;
  const Scalar du_dx = w.real() / (qn * Scalar(2) * p.y);
  const Scalar du_dy = -w.imag() / (qn * Scalar(2) * p.y) - qn / (Scalar(2) * p.y * p.y);
  const Scalar k = Scalar(2) / sqrt(Scalar(1) + u * u);
  return {p.y * k * du_dx, p.y * k * du_dy};
}

template <typename Derived>
auto trace_of(const Eigen::MatrixBase<Derived>& g) {
  return g(0, 0) + g(1, 1);
}

template <typename Scalar, typename Derived>
bool is_parabolic(const Eigen::MatrixBase<Derived>& g, Scalar tol = Scalar(1e-9)) {
  using std::abs;
  const Scalar t = Scalar(g(0, 0)) + Scalar(g(1, 1));
  if (abs(abs(t) - Scalar(2)) > tol) return false;
  const bool plus_id = abs(Scalar(g(0, 1))) <= tol && abs(Scalar(g(1, 0))) <= tol;
  return !plus_id;
}

/// Sub-level set {d_gamma <= eps} for parabolic gamma, as a horoball.
template <typename Scalar, typename Derived>
Horoball<Scalar> unipotent_sublevel(const Eigen::MatrixBase<Derived>& g, Scalar eps) {
  using std::abs;
  using std::sinh;
  if (!(eps > Scalar(0))) throw DomainError("unipotent_sublevel: eps must be positive");
  if (!is_parabolic<Scalar>(g)) throw DomainError("unipotent_sublevel: element is not parabolic");
  Scalar a = Scalar(g(0, 0)), b = Scalar(g(0, 1)), c = Scalar(g(1, 0)), d = Scalar(g(1, 1));
  if (a + d < Scalar(0)) {
    a = -a;
    b = -b;
    c = -c;
    d = -d;
  }
  const Scalar two_sinh = Scalar(2) * sinh(eps / Scalar(2));
  Horoball<Scalar> h;
  if (abs(c) <= Scalar(1e-12) * (abs(a) + abs(b) + abs(d))) {
    // z -> z + b: {y >= |b| / (2 sinh(eps/2))}
    h.at_infinity = true;
    h.size = abs(b) / two_sinh;
  } else {
    // gamma = phi T^s phi^{-1} with phi(w) = xi - 1/w and |s| = |c|; the chart
    // horoball {Im w >= |c|/(2 sinh(eps/2))} maps to a disk of diameter 1/height.
    h.at_infinity = false;
    h.center = (a - d) / (Scalar(2) * c);
    h.size = two_sinh / abs(c);
  }
  return h;
}

template <typename Scalar>
bool contains(const Horoball<Scalar>& h, const HPoint<Scalar>& p) {
  if (h.at_infinity) return p.y >= h.size;
  const Scalar dx = p.x - h.center, dy = p.y - h.size / Scalar(2);
  return dx * dx + dy * dy <= h.size * h.size / Scalar(4);
}

/// Signed Busemann-type level: ln(h/y) in the normalizing chart. Negative
/// inside the horoball, its positive part is the distance to it.
template <typename Scalar>
Scalar horoball_level(const Horoball<Scalar>& h, const HPoint<Scalar>& p) {
  using std::log;
  if (h.at_infinity) return log(h.size / p.y);
  const Scalar dx = p.x - h.center;
  return log((dx * dx + p.y * p.y) / (h.size * p.y));
}

template <typename Scalar>
Scalar horoball_distance(const Horoball<Scalar>& h, const HPoint<Scalar>& p) {
  const Scalar v = horoball_level(h, p);
  return v > Scalar(0) ? v : Scalar(0);
}

/// Frame gradient of the level function; unit norm everywhere.
template <typename Scalar>
FrameVector<Scalar> horoball_gradient(const Horoball<Scalar>& h, const HPoint<Scalar>& p) {
  if (h.at_infinity) return {Scalar(0), Scalar(-1)};
  const Scalar dx = p.x - h.center;
  const Scalar r2 = dx * dx + p.y * p.y;
  return {Scalar(2) * dx * p.y / r2, Scalar(2) * p.y * p.y / r2 - Scalar(1)};
}

template <typename Scalar, typename Derived>
Scalar dist_to_sublevel(const Eigen::MatrixBase<Derived>& g, Scalar eps, const HPoint<Scalar>& p) {
  return horoball_distance(unipotent_sublevel<Scalar>(g, eps), p);
}

template <typename Scalar, typename Derived>
FrameVector<Scalar> dist_to_sublevel_gradient(const Eigen::MatrixBase<Derived>& g, Scalar eps,
                                              const HPoint<Scalar>& p) {
  const Horoball<Scalar> h = unipotent_sublevel<Scalar>(g, eps);
  if (horoball_level(h, p) < Scalar(0))
    throw DomainError("dist_to_sublevel_gradient: point inside the sub-level set");
  return horoball_gradient(h, p);
}

template <typename Scalar>
Scalar ball_area(Scalar r) {
  using std::sinh;
  if (r < Scalar(0)) throw DomainError("ball_area: negative radius");
  const Scalar s = sinh(r / Scalar(2));
  return Scalar(4) * std::numbers::pi_v<Scalar> * s * s;
}

// ---- hyperboloid model -----------------------------------------------------

template <typename Scalar>
Scalar minkowski_dot(const LorentzVector<Scalar>& u, const LorentzVector<Scalar>& v) {
  return -u(0) * v(0) + u(1) * v(1) + u(2) * v(2);
}

template <typename Scalar>
LorentzVector<Scalar> to_hyperboloid(const HPoint<Scalar>& p) {
  const Scalar r2 = p.x * p.x + p.y * p.y;
  return {(r2 + Scalar(1)) / (Scalar(2) * p.y), (r2 - Scalar(1)) / (Scalar(2) * p.y), p.x / p.y};
}

template <typename Scalar>
HPoint<Scalar> from_hyperboloid(const LorentzVector<Scalar>& v) {
  const Scalar s = v(0) - v(1);
  return {v(2) / s, Scalar(1) / s};
}

/// Orthonormal frame (y d/dx, y d/dy) at p as hyperboloid tangent vectors.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 2> frame_basis(const HPoint<Scalar>& p) {
  const Scalar x = p.x, y = p.y;
  Eigen::Matrix<Scalar, 3, 2> e;
  e(0, 0) = x;
  e(1, 0) = x;
  e(2, 0) = Scalar(1);
  e(0, 1) = (y * y - x * x - Scalar(1)) / (Scalar(2) * y);
  e(1, 1) = (y * y - x * x + Scalar(1)) / (Scalar(2) * y);
  e(2, 1) = -x / y;
  return e;
}

/// Point reached from p after distance t along the unit frame direction v.
template <typename Scalar>
HPoint<Scalar> exp_map(const HPoint<Scalar>& p, const FrameVector<Scalar>& v, Scalar t) {
  using std::cosh;
  using std::sinh;
  const LorentzVector<Scalar> P = to_hyperboloid(p);
  const LorentzVector<Scalar> U = frame_basis(p) * v.normalized();
  return from_hyperboloid<Scalar>(cosh(t) * P + sinh(t) * U);
}

/// Unit frame vector at p pointing toward q (zero if q == p).
template <typename Scalar>
FrameVector<Scalar> log_direction(const HPoint<Scalar>& p, const HPoint<Scalar>& q) {
  const LorentzVector<Scalar> P = to_hyperboloid(p), Q = to_hyperboloid(q);
  const LorentzVector<Scalar> w = Q + minkowski_dot(P, Q) * P;
  const Eigen::Matrix<Scalar, 3, 2> e = frame_basis(p);
  FrameVector<Scalar> v(minkowski_dot<Scalar>(w, e.col(0)), minkowski_dot<Scalar>(w, e.col(1)));
  const Scalar n = v.norm();
  if (n == Scalar(0)) return FrameVector<Scalar>::Zero();
  return v / n;
}

template <typename Scalar>
HPoint<Scalar> geodesic_midpoint(const HPoint<Scalar>& p, const HPoint<Scalar>& q) {
  using std::sqrt;
  const LorentzVector<Scalar> s = to_hyperboloid(p) + to_hyperboloid(q);
  return from_hyperboloid<Scalar>(s / sqrt(-minkowski_dot(s, s)));
}

}  // namespace thicknerve
