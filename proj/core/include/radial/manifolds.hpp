#pragma once

#include <string_view>
#include <vector>

#include "radial/shooting.hpp"

namespace radial {

enum class ManifoldKind { kUnstablePlus, kUnstableMinus, kStablePlus, kStableMinus };

std::string_view manifold_name(ManifoldKind kind);
ManifoldKind parse_manifold_kind(std::string_view name);
bool is_unstable(ManifoldKind kind);
/// Base angles of the polar representation at parameter 0+.
double manifold_base_angle(ManifoldKind kind);

struct CurvePoint {
  double param = 0.0;  // d (unstable) or L (stable), always positive
  PhaseState state;
  double theta = 0.0;       // unwrapped along the parameter
  double rho = 0.0;
  double theta_time = 0.0;  // unwrapped along the trajectory in t
};

struct ManifoldCurve {
  ManifoldKind kind = ManifoldKind::kUnstablePlus;
  double tau = 0.0;
  double seed_T = 0.0;            // stable slices only
  double seed_error = 0.0;        // stable: gap against seeding at seed_T + 10
  std::vector<CurvePoint> points;  // increasing param
};

struct ManifoldOptions {
  StopPolicy policy;
  double seed_offset = 30.0;
  double max_angle_gap = 0.25 * 3.141592653589793;
  int max_refinements = 12;
  bool estimate_seed_error = false;
  int jobs = 1;
};

/// Point of a slice for a single parameter value (with its time-unwrapped angle).
CurvePoint manifold_point(const Model& model, ManifoldKind kind, double tau, double param,
                          const ManifoldOptions& options);

/// Traces the slice at `tau` over `params` (positive, increasing) with adaptive refinement.
ManifoldCurve trace_manifold(const Model& model, ManifoldKind kind, double tau,
                             std::vector<double> params, const ManifoldOptions& options = {});

struct IntersectionRecord {
  int k = 0;
  PhaseState R_point;
  double d_at = 0.0;  // unstable parameter (magnitude)
  double L_at = 0.0;  // stable parameter (magnitude)
  ManifoldKind stable_kind = ManifoldKind::kStablePlus;
  int shift = 0;      // stable curve translated by -2 pi shift
  double residual = 0.0;
};

/// Stable branch and winding shift whose translate E_k meets an unstable slice for k zeros.
std::pair<ManifoldKind, int> stable_branch_for(ManifoldKind unstable, int k);

/// First crossings of the unstable slice with E_k for k = 0..k_max, refined by Newton on (d, L).
/// Throws NoCrossing(k) when no crossing exists on the traced curves.
std::vector<IntersectionRecord> intersect(const Model& model, const ManifoldCurve& unstable,
                                          const ManifoldCurve& stable_plus,
                                          const ManifoldCurve& stable_minus, int k_max,
                                          const ManifoldOptions& options = {});

struct InvarianceReport {
  std::size_t samples = 0;
  bool entered_q1 = false;       // reached {xi >= 0, y >= 0} above d+ (or the mirror below -d-)
  bool touched_q2 = false;
  std::size_t strip_samples = 0; // samples with -d- < u < d+
};

/// Checks forward invariance of Q1, backward invariance of Q2 and the strip consequence on the
/// samples of `traj`. Throws ViolationFound at the first offending sample.
InvarianceReport invariance_check(const Trajectory& traj, const Model& model);

}  // namespace radial
