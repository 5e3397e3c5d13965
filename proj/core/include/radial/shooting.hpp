#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "radial/integrator.hpp"

namespace radial {

enum class OutcomeClass { kFastDecay, kSlowDecay, kEscaped, kUndetermined };

std::string_view outcome_name(OutcomeClass cls);

struct ShotOutcome {
  double d = 0.0;
  OutcomeClass cls = OutcomeClass::kUndetermined;
  /// FastDecay: estimate of lim u r^{(n-p)/(p-1)} at capture.
  double L = 0.0;
  /// SlowDecay: +1 for P+, -1 for P-.
  int target = 0;
  int zeros = 0;
  /// Zeros implied by the unwrapped angle; equals `zeros` for classified shots.
  int angle_zeros = 0;
  double total_angle = 0.0;
  /// d is a zero of f: the constant solution, neither fast nor slow decay.
  bool non_generic = false;
  double t_terminal = 0.0;
  std::shared_ptr<const Trajectory> trajectory;
};

/// First-order expansion of the regular solution with u(0) = d, mapped to log-radius variables.
PhaseState init_regular(const Model& model, double d, double r0);

/// init_regular with r0 validated by halving: both seeds are integrated to t = 0 and must agree
/// to 1e-8. Throws BadSeed after three failed halvings.
PhaseState seed_regular(const Model& model, double d, double r0 = 1e-3,
                        const StopPolicy& policy = {});

/// Fast-decay asymptotics u ~ L r^{-(n-p)/(p-1)} at t = T.
PhaseState init_fast_decay(const Model& model, double L, double T);

/// Base angle of the unstable slice: 0 for d > 0, -pi for d < 0.
double unstable_base_angle(double d);

/// Angle at which fast-decay trajectories enter the origin, measured from the y-axis.
/// Zero for p < 2; for p = 2 the stable direction is y = -(n-2) x.
double stable_tangent_offset(const ExponentSet& exps);

ShotOutcome classify_and_count(const Trajectory& traj, const Model& model, double d);

ShotOutcome shoot(const Model& model, double d, const StopPolicy& policy = {});

struct SequenceOptions {
  int k_max = 2;
  double tol_d = 1e-12;  // relative to d+ (or d-)
  int scan_points = 200;
  int max_bisections = 60;
  int jobs = 1;
  bool mirror = true;
  StopPolicy policy;
};

struct TransitionBracket {
  int side = 1;  // +1 for A (d > 0), -1 for B (d < 0)
  double lo = 0.0;  // magnitudes |d|
  double hi = 0.0;
  int zeros_lo = 0;
  int zeros_hi = 0;
  OutcomeClass cls_lo = OutcomeClass::kUndetermined;
  OutcomeClass cls_hi = OutcomeClass::kUndetermined;
  double width() const { return hi - lo; }
};

struct SequenceSide {
  std::vector<double> values;      // A_k (or B_k as positive magnitudes)
  std::vector<double> stars;       // A*_k; stars[0] = 0
  std::vector<double> widths;      // bracket width at each A_k
  std::vector<ShotOutcome> witnesses;
  std::vector<TransitionBracket> brackets;
  std::vector<ShotOutcome> scan;
};

struct SequenceReport {
  int k_max = 0;
  SequenceSide A;
  SequenceSide B;
  std::size_t shots = 0;
};

/// Scans, brackets and bisects the zero-count transitions of regular shots.
/// Throws InvalidSpec outside the supercritical regime and UnresolvedBracket(k) when a
/// transition for k <= k_max is missing or cannot be narrowed.
SequenceReport find_sequences(const Model& model, const SequenceOptions& options);

}  // namespace radial
