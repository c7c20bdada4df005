#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "thicknerve/errors.hpp"
#include "thicknerve/hyperbolic.hpp"
#include "thicknerve/lattice.hpp"

namespace thicknerve {

/// Function family phi_gamma indexed by nontrivial unipotent gamma:
/// displacement d_gamma, or distance to the sub-level set {d_gamma <= eps}.
enum class Family { displacement, dist_to_sublevel };

struct ThinConfig {
  const CongruenceLattice* lattice{nullptr};
  double epsilon{0.1};
  int m{1};
  /// Largest active set the retract field will expand into subsets.
  int max_active{12};
};

struct ActiveFunction {
  IntMatrix element;
  Horoball<double> sublevel;
  double value{0};
};

struct ActiveSet {
  double threshold{0};
  std::vector<ActiveFunction> functions;
};

struct ThinResult {
  bool thin{false};
  ActiveSet active;
};

inline constexpr double kNoActive = std::numeric_limits<double>::infinity();

/// beta(tau) = 2 tanh(tau/2): the rate of change of d_gamma along the unit
/// speed geodesic leaving the fixed point of a parabolic, where d_gamma = tau.
double beta(double tau);
/// b = 2 / beta(eps) = coth(eps/2).
double b_constant(double eps);
/// The lower bound used by the retract field: beta(delta) for displacement,
/// the constant beta(eps)/2 for the distance family.
double family_beta(const ThinConfig& cfg, Family family, double delta);

/// Psi_{p,tau}: the family members with value <= tau at p, one per isometry
/// class {gamma, gamma^-1}, sorted by value then matrix entries.
ActiveSet active_set(const ThinConfig& cfg, const HPointd& p, Family family, double tau);

ThinResult thin_membership(const ThinConfig& cfg, const HPointd& p, Family family);

/// min over the family at p; kNoActive when nothing is below 3 eps.
double delta_min(const ThinConfig& cfg, const HPointd& p, Family family);

FrameVectord function_gradient(const ThinConfig& cfg, const ActiveFunction& f, const HPointd& p, Family family);

struct Steering {
  FrameVectord direction;
  double value{0};
};

/// Thrown when no unit vector has positive inner product with all gradients.
struct NoImprovingDirection : NumericalError {
  using NumericalError::NumericalError;
};

/// Unit vector maximising min_i <f, g_i>, found among the normalised g_i and
/// the directions equalising a pair of inner products.
Steering steering_direction(std::span<const FrameVectord> gradients);

/// The retract vector field at p in frame components.
FrameVectord retract_field(const ThinConfig& cfg, const HPointd& p, Family family);

struct FlowConfig {
  /// Largest hyperbolic distance covered by one step; 0 means eps/10.
  double max_step{0};
  /// Step-doubling error tolerance per step (hyperbolic distance).
  double tolerance{1e-9};
  /// Integration time budget; 0 means 10 sqrt(2 eps).
  double max_time{0};
  double min_step{1e-13};
  /// Starting points with delta within this of eps count as already thick.
  double arrival_tolerance{1e-12};
  /// Relative slack allowed on the arrival-time bound.
  double bound_tolerance{0.05};
};

struct FlowSample {
  double t{0};
  HPointd point;
  double delta{0};
};

enum class FlowStatus { arrived, already_thick };

struct FlowTrace {
  std::vector<FlowSample> samples;
  double arrival_time{0};
  /// sqrt(2 (eps - delta_0)).
  double time_bound{0};
  FlowStatus status{FlowStatus::arrived};
  bool within_bound{true};
  bool monotone{true};
  std::int64_t steps{0};
  std::int64_t rejected_steps{0};
};

struct FlowError : NumericalError {
  FlowError(const std::string& what, FlowTrace partial) : NumericalError(what), trace(std::move(partial)) {}
  FlowTrace trace;
};

FlowTrace flow_to_thick(const ThinConfig& cfg, const HPointd& p, Family family, const FlowConfig& solver = {});

void write_trace_csv(std::ostream& os, const FlowTrace& trace, bool header = true);

/// Point on the vertical line through x (in the modular fundamental domain)
/// where the distance-family minimum equals `level`.
HPointd level_point_above(const ThinConfig& cfg, double x, double level);

struct HausdorffStats {
  int samples{0};
  int violations{0};
  /// Largest observed (distance reached) / (b t).
  double max_ratio{0};
};

/// For each x on the boundary of the modified thin part {delta_dist = eps},
/// shoots the geodesic along the steering direction over Psi_{x,2eps} and
/// checks that it leaves the t-neighbourhood before length b t.
HausdorffStats hausdorff_check(const ThinConfig& cfg, std::span<const HPointd> boundary_points, double t);

struct TangentBallStats {
  int boundary_points{0};
  int probes{0};
  int violations{0};
};

/// For x on the boundary of ({d_gamma <= eps})_eps, probes the eps-ball
/// centred at the nearest point of {d_gamma <= eps}.
TangentBallStats tangent_ball_check(const IntMatrix& gamma, double eps, std::span<const HPointd> boundary_points,
                                    int probes_per_point, std::uint64_t seed);

}  // namespace thicknerve
