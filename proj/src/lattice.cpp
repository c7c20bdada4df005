#include "thicknerve/lattice.hpp"

#include <cmath>
#include <deque>
#include <sstream>

#include "thicknerve/errors.hpp"

namespace thicknerve {

namespace {

int mod(std::int64_t v, int n) {
  const std::int64_t r = v % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

/// Smallest integer >= lo congruent to r mod n.
std::int64_t first_congruent(double lo, std::int64_t r, std::int64_t n) {
  const std::int64_t k = static_cast<std::int64_t>(std::ceil((lo - static_cast<double>(r)) / static_cast<double>(n)));
  return k * n + r;
}

IntMatrix make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  IntMatrix m;
  m << a, b, c, d;
  return m;
}

}  // namespace

ProjectiveGroup::ProjectiveGroup(int level) : level_(level) {
  if (level < 3) throw ConfigError("level N must be >= 3: Gamma(N) is torsion-free only for N >= 3");
  if (level > 60) throw ConfigError("level N > 60 is outside the supported range");
  const int n = level;
  lookup_.assign(static_cast<std::size_t>(n) * n * n * n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          if (mod(static_cast<std::int64_t>(a) * d - static_cast<std::int64_t>(b) * c, n) != 1) continue;
          ++linear_order_;
          const std::array<int, 4> r{a, b, c, d};
          const std::array<int, 4> neg{mod(-a, n), mod(-b, n), mod(-c, n), mod(-d, n)};
          if (neg < r) continue;
          lookup_[code(r)] = static_cast<int>(elements_.size());
          lookup_[code(neg)] = static_cast<int>(elements_.size());
          elements_.push_back(r);
        }
  identity_ = id_of(IntMatrix::Identity());

  const std::size_t g = elements_.size();
  mult_.resize(g * g);
  inv_.resize(g);
  for (std::size_t i = 0; i < g; ++i) {
    const auto& x = elements_[i];
    for (std::size_t j = 0; j < g; ++j) {
      const auto& y = elements_[j];
      mult_[i * g + j] = lookup_[code({mod(x[0] * y[0] + x[1] * y[2], n), mod(x[0] * y[1] + x[1] * y[3], n),
                                       mod(x[2] * y[0] + x[3] * y[2], n), mod(x[2] * y[1] + x[3] * y[3], n)})];
    }
    inv_[i] = lookup_[code({x[3], mod(-x[1], n), mod(-x[2], n), x[0]})];
  }

  // Breadth-first lifts over the Cayley graph for generators S, T, T^-1.
  lifts_.assign(g, IntMatrix::Zero());
  std::vector<bool> seen(g, false);
  const std::array<IntMatrix, 3> gens{make(0, -1, 1, 0), make(1, 1, 0, 1), make(1, -1, 0, 1)};
  std::deque<int> queue{identity_};
  seen[identity_] = true;
  lifts_[identity_] = IntMatrix::Identity();
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    for (const auto& s : gens) {
      const IntMatrix next = lifts_[cur] * s;
      const int id = id_of(next);
      if (seen[id]) continue;
      seen[id] = true;
      lifts_[id] = next;
      queue.push_back(id);
    }
  }
}

int ProjectiveGroup::code(const std::array<int, 4>& r) const {
  return ((r[0] * level_ + r[1]) * level_ + r[2]) * level_ + r[3];
}

int ProjectiveGroup::id_of(const IntMatrix& m) const {
  const int n = level_;
  const int id = lookup_[code({mod(m(0, 0), n), mod(m(0, 1), n), mod(m(1, 0), n), mod(m(1, 1), n)})];
  if (id < 0) throw DomainError("ProjectiveGroup::id_of: matrix is not invertible mod N");
  return id;
}

CongruenceLattice::CongruenceLattice(int level) : group_(level) {
  // Orbits of right multiplication by T on the group; each orbit is a cusp.
  const int t = group_.id_of(make(1, 1, 0, 1));
  std::vector<bool> seen(static_cast<std::size_t>(group_.order()), false);
  for (int g = 0; g < group_.order(); ++g) {
    if (seen[g]) continue;
    ++cusps_;
    for (int h = g; !seen[h]; h = group_.multiply(h, t)) seen[h] = true;
  }
}

double CongruenceLattice::covolume() const { return static_cast<double>(index()) * std::numbers::pi / 3.0; }

bool CongruenceLattice::contains(const IntMatrix& m) const {
  if (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) != 1) return false;
  return group_.id_of(m) == group_.identity();
}

bool is_unipotent(const IntMatrix& g) {
  const std::int64_t t = g(0, 0) + g(1, 1);
  if (t != 2 && t != -2) return false;
  return !(g(0, 1) == 0 && g(1, 0) == 0);
}

IntMatrix canonical_sign(const IntMatrix& g) {
  if (g(1, 0) > 0 || (g(1, 0) == 0 && g(1, 1) > 0)) return g;
  return -g;
}

// Completeness of the enumeration. Let g_p = [[sqrt y, x/sqrt y], [0, 1/sqrt y]]
// so that g_p.i = p, and A = g_p^-1 gamma g_p. Then d_gamma(p) = d_A(i) and
// cosh d_A(i) = (A11^2 + A12^2 + A21^2 + A22^2)/2, so d_gamma(p) <= tau forces
// every entry of A to be at most S = sqrt(2 cosh tau) in absolute value. With
// gamma = [[a,b],[c,d]]:
//   A11 = a - c x,  A12 = (a x + b - c x^2 - d x)/y,  A21 = c y,  A22 = c x + d.
// Hence |c| <= S/y, a in [cx - S, cx + S], d in [-cx - S, -cx + S], and b is
// determined by ad - bc = 1 when c != 0. When c = 0, a = d = 1 (the only
// choice congruent to 1 mod N >= 3) and |b| <= S y. All candidates are then
// filtered by the exact displacement.
void for_each_short_element(const CongruenceLattice& lattice, const HPointd& p, double tau,
                            const std::function<void(const IntMatrix&, double)>& visit) {
  if (!(tau >= 0.0)) throw DomainError("enumerate_short_elements: tau must be non-negative");
  if (!is_valid(p)) throw DomainError("enumerate_short_elements: invalid point");
  const std::int64_t n = lattice.level();
  const double s = std::sqrt(2.0 * std::cosh(tau)) * (1.0 + 1e-12);
  const double c_max = s / p.y;
  const double b_max = s * p.y;
  const double work = (2.0 * c_max / n + 1.0) * (2.0 * s / n + 1.0) * (2.0 * s / n + 1.0) + 2.0 * b_max / n;
  if (!std::isfinite(work) || work > 1e9 || std::abs(c_max * p.x) > 1e15 || b_max > 1e15) {
    std::ostringstream msg;
    msg << "enumerate_short_elements: bound overflow (tau=" << tau << ", y=" << p.y << ")";
    throw NumericalError(msg.str());
  }
  for (std::int64_t b = first_congruent(-b_max, 0, n); static_cast<double>(b) <= b_max; b += n) {
    if (b == 0) continue;
    const IntMatrix g = make(1, b, 0, 1);
    const double dist = displacement(g, p);
    if (dist <= tau) visit(g, dist);
  }
  for (std::int64_t c = first_congruent(-c_max, 0, n); static_cast<double>(c) <= c_max; c += n) {
    if (c == 0) continue;
    const double cx = static_cast<double>(c) * p.x;
    for (std::int64_t a = first_congruent(cx - s, 1, n); static_cast<double>(a) <= cx + s; a += n) {
      for (std::int64_t d = first_congruent(-cx - s, 1, n); static_cast<double>(d) <= -cx + s; d += n) {
        const std::int64_t num = a * d - 1;
        if (num % c != 0) continue;
        const std::int64_t b = num / c;
        if (b % n != 0) continue;
        const IntMatrix g = make(a, b, c, d);
        const double dist = displacement(g, p);
        if (dist <= tau) visit(g, dist);
      }
    }
  }
}

std::vector<IntMatrix> enumerate_short_elements(const CongruenceLattice& lattice, const HPointd& p, double tau) {
  std::vector<IntMatrix> out;
  for_each_short_element(lattice, p, tau, [&](const IntMatrix& g, double) { out.push_back(g); });
  return out;
}

double hyperbolic_translation_floor() { return 2.0 * std::acosh(1.5); }

MargulisData margulis_data(const CongruenceLattice& lattice, double eps_request, std::uint64_t seed, int samples) {
  if (!(eps_request > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(10.0 * eps_request < hyperbolic_translation_floor())) {
    std::ostringstream msg;
    msg << "10*epsilon = " << 10.0 * eps_request << " must be below 2 arccosh(3/2) = " << hyperbolic_translation_floor();
    throw ConfigError(msg.str());
  }
  MargulisData out;
  out.epsilon = eps_request;
  out.m = 1;
  std::mt19937_64 rng(seed);
  const double half = 0.5 * lattice.level();
  std::uniform_real_distribution<double> ux(-half, half);
  std::uniform_real_distribution<double> uly(std::log(0.02), std::log(50.0));
  for (int i = 0; i < samples; ++i) {
    const HPointd p{ux(rng), std::exp(uly(rng))};
    for_each_short_element(lattice, p, 10.0 * eps_request, [&](const IntMatrix& g, double dist) {
      ++out.elements_checked;
      if (!is_unipotent(g)) {
        std::ostringstream msg;
        msg << "non-unipotent short element [[" << g(0, 0) << "," << g(0, 1) << "],[" << g(1, 0) << "," << g(1, 1)
            << "]] with displacement " << dist << " at (" << p.x << "," << p.y << ")";
        throw FalsificationError(msg.str());
      }
    });
    ++out.base_points;
  }
  return out;
}

Reduction reduce_to_fundamental(const HPointd& z) {
  if (!is_valid(z)) throw DomainError("reduce_to_fundamental: invalid point");
  IntMatrix g = IntMatrix::Identity();
  HPointd w = z;
  for (int iter = 0; iter < 10000; ++iter) {
    const double shift = std::floor(w.x + 0.5);
    if (shift != 0.0) {
      const auto k = static_cast<std::int64_t>(shift);
      g = make(1, -k, 0, 1) * g;
      w.x -= shift;
    }
    if (w.x * w.x + w.y * w.y < 1.0 - 1e-15) {
      g = make(0, -1, 1, 0) * g;
      const double r2 = w.x * w.x + w.y * w.y;
      w = {-w.x / r2, w.y / r2};
      continue;
    }
    return {g, w};
  }
  throw NumericalError("reduce_to_fundamental: no convergence");
}

}  // namespace thicknerve
