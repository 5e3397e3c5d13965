#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "radial/fowler.hpp"

namespace radial {

enum class Direction { kForward, kBackward };

enum class EventKind {
  kXAxisCrossing,  // y = 0: extremum of u
  kYAxisCrossing,  // x = 0: zero of u
  kStripExit,      // |x e^{-alpha t}| beyond the truncation band
  kOriginCapture,
  kPCapture,
  kTimeout,
};

std::string_view event_name(EventKind kind);

struct Event {
  EventKind kind = EventKind::kTimeout;
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  /// PCapture: +1 for P+, -1 for P-. StripExit: side of the band.
  int side = 0;
};

struct Sample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // unwrapped polar angle
  double rho = 0.0;
  double H = 0.0;
};

/// Termination and accuracy controls for one integration.
struct StopPolicy {
  double forward_span = 200.0;
  double backward_span = 40.0;
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 1e-3;
  double h_min = 1e-13;
  double h_max = 0.5;
  std::size_t max_steps = 5'000'000;
  double event_tol = 1e-10;

  double eps_origin = 1e-6;
  int origin_decreasing_steps = 5;
  double eps_p = 1e-4;
  double p_dwell = 1.0;
  double strip_margin = 0.1;
  /// Escape radius used when the nonlinearity has no truncation band.
  double escape_radius = 1e10;

  bool origin_capture_terminal = true;
  bool p_capture_terminal = true;
  bool strip_exit_terminal = true;
  bool truncated = true;

  StopPolicy with_tolerance_scale(double factor) const {
    StopPolicy p = *this;
    p.rtol *= factor;
    p.atol *= factor;
    return p;
  }
};

struct Trajectory {
  Direction direction = Direction::kForward;
  std::vector<Sample> samples;
  std::vector<Event> events;
  std::optional<EventKind> terminal;
  double max_rho = 0.0;
  double min_rho = std::numeric_limits<double>::infinity();
  std::size_t rejected_steps = 0;

  const Sample& front() const { return samples.front(); }
  const Sample& back() const { return samples.back(); }
  std::vector<Event> events_of(EventKind kind) const;
};

/// Integrates from `start` for the policy's span in the given direction.
/// `theta_hint` selects the branch of the initial polar angle (nearest representative).
Trajectory integrate(const Model& model, const PhaseState& start, Direction direction,
                     const StopPolicy& policy,
                     double theta_hint = std::numeric_limits<double>::quiet_NaN());

/// Integrates from `start` to exactly `t_end` (either direction) unless a terminal event fires.
Trajectory integrate_to(const Model& model, const PhaseState& start, double t_end,
                        const StopPolicy& policy,
                        double theta_hint = std::numeric_limits<double>::quiet_NaN());

/// Angle of (x, y) unwrapped to the representative nearest `reference`.
double unwrap_near(double x, double y, double reference);

/// CSV columns: t,x,y,theta,rho,H,r,u,du
void write_csv(std::ostream& os, const Trajectory& traj, const Model& model);

}  // namespace radial
