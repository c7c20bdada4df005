#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "thicknerve/hyperbolic.hpp"

namespace thicknerve {

/// PSL2(Z/N): elements stored as canonical residue quadruples (a,b,c,d),
/// the lexicographically smaller of M and -M. Element ids are dense.
class ProjectiveGroup {
 public:
  explicit ProjectiveGroup(int level);

  int level() const { return level_; }
  int order() const { return static_cast<int>(elements_.size()); }
  /// |SL2(Z/N)| found by direct enumeration of residue matrices.
  std::int64_t linear_order() const { return linear_order_; }
  int identity() const { return identity_; }

  int id_of(const IntMatrix& m) const;
  int multiply(int g, int h) const { return mult_[static_cast<std::size_t>(g) * elements_.size() + h]; }
  int inverse(int g) const { return inv_[g]; }
  const std::array<int, 4>& residues(int g) const { return elements_[g]; }
  /// Integer lift in SL2(Z) of element g, obtained as a word in S, T, T^-1.
  const IntMatrix& lift(int g) const { return lifts_[g]; }

 private:
  int code(const std::array<int, 4>& r) const;

  int level_;
  std::int64_t linear_order_{0};
  int identity_{0};
  std::vector<std::array<int, 4>> elements_;
  std::vector<int> lookup_;
  std::vector<int> mult_;
  std::vector<int> inv_;
  std::vector<IntMatrix> lifts_;
};

/// Principal congruence subgroup Gamma(N), N >= 3.
class CongruenceLattice {
 public:
  explicit CongruenceLattice(int level);

  int level() const { return group_.level(); }
  /// Projective index in PSL2(Z).
  std::int64_t index() const { return group_.order(); }
  double covolume() const;
  std::int64_t euler_characteristic() const { return -index() / 6; }
  /// Cusps counted as orbits of <T> acting on PSL2(Z/N) by right multiplication.
  std::int64_t cusp_count() const { return cusps_; }
  std::int64_t genus() const { return (2 - cusps_ - euler_characteristic()) / 2; }
  const ProjectiveGroup& group() const { return group_; }

  /// Membership up to the sign quotient: m = +-I mod N and det m = 1.
  bool contains(const IntMatrix& m) const;

 private:
  ProjectiveGroup group_;
  std::int64_t cusps_{0};
};

bool is_unipotent(const IntMatrix& g);

/// Representative of {g, -g} congruent to the identity mod N (as returned by
/// the enumerator) or, when that does not apply, with (c, d) > 0 lexicographically.
IntMatrix canonical_sign(const IntMatrix& g);

/// Calls `visit` for every non-identity gamma in the lattice (canonical
/// representative, congruent to I mod N) with d_gamma(p) <= tau. Each
/// isometry is visited once; gamma and gamma^-1 are both visited.
void for_each_short_element(const CongruenceLattice& lattice, const HPointd& p, double tau,
                            const std::function<void(const IntMatrix&, double)>& visit);

std::vector<IntMatrix> enumerate_short_elements(const CongruenceLattice& lattice, const HPointd& p, double tau);

struct MargulisData {
  double epsilon{0.1};
  int m{1};
  int base_points{0};
  std::int64_t elements_checked{0};
};

/// Largest admissible value of 10*eps: the shortest translation length of a
/// hyperbolic element of SL2(Z), 2 arccosh(3/2).
double hyperbolic_translation_floor();

/// Verifies at `samples` random base points that every short element at
/// threshold 10*eps is unipotent; raises FalsificationError on a counterexample.
MargulisData margulis_data(const CongruenceLattice& lattice, double eps_request, std::uint64_t seed = 1,
                           int samples = 50);

/// Reduction into the closed modular fundamental domain
/// F = {|x| <= 1/2, |z| >= 1}: returns g in SL2(Z) and g.z.
struct Reduction {
  IntMatrix g;
  HPointd point;
};
Reduction reduce_to_fundamental(const HPointd& z);

}  // namespace thicknerve
