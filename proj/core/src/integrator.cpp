#include "radial/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <ostream>

#include <boost/math/tools/toms748_solve.hpp>

namespace radial {

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::kXAxisCrossing: return "XAxisCrossing";
    case EventKind::kYAxisCrossing: return "YAxisCrossing";
    case EventKind::kStripExit: return "StripExit";
    case EventKind::kOriginCapture: return "OriginCapture";
    case EventKind::kPCapture: return "PCapture";
    case EventKind::kTimeout: return "Timeout";
  }
  return "?";
}

std::vector<Event> Trajectory::events_of(EventKind kind) const {
  std::vector<Event> out;
  for (const auto& e : events) {
    if (e.kind == kind) out.push_back(e);
  }
  return out;
}

double unwrap_near(double x, double y, double reference) {
  const double a = std::atan2(y, x);
  if (!std::isfinite(reference)) return a;
  return a + 2.0 * M_PI * std::round((reference - a) / (2.0 * M_PI));
}

namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const Model& model, bool truncated) : model_(model), truncated_(truncated) {}

  State rhs(double t, const State& s) const {
    const Field f = vector_field(model_, t, s[0], s[1], truncated_);
    return {f.dx, f.dy};
  }

  /// One DP5 step; returns the 5th-order state, its derivative (FSAL) and the error estimate.
  void step(double t, const State& s, const State& k1, double h, State& out, State& k7,
            State& err) const {
    State tmp;
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      for (int i = 0; i < 2; ++i) {
        double acc = s[i];
        for (const auto& [w, k] : terms) acc += h * w * (*k)[i];
        tmp[i] = acc;
      }
      return tmp;
    };
    const State k2 = rhs(t + c2 * h, comb({{a21, &k1}}));
    const State k3 = rhs(t + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs(t + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = rhs(t + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        rhs(t + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    out = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    k7 = rhs(t + h, out);
    for (int i = 0; i < 2; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
  }

  State advance(double t, const State& s, const State& k1, double h) const {
    State out, k7, err;
    step(t, s, k1, h, out, k7, err);
    return out;
  }

 private:
  const Model& model_;
  bool truncated_;
};

struct PendingEvent {
  Event event;
  State state;
};

class Integration {
 public:
  Integration(const Model& model, const StopPolicy& policy, double t_end, double theta_hint)
      : model_(model), policy_(policy), stepper_(model, policy.truncated), t_end_(t_end),
        theta_hint_(theta_hint) {}

  Trajectory run(const PhaseState& start) {
    traj_.direction = t_end_ >= start.t ? Direction::kForward : Direction::kBackward;
    const double dir = traj_.direction == Direction::kForward ? 1.0 : -1.0;
    double t = start.t;
    State s{start.x, start.y};
    check_finite(t, s);
    State k1 = stepper_.rhs(t, s);
    double theta = unwrap_near(s[0], s[1], theta_hint_);
    push_sample(t, s, theta);

    double h = dir * std::min(policy_.h_init, policy_.h_max);
    double err_prev = 1.0;
    std::size_t steps = 0;

    while (true) {
      if (dir * (t_end_ - t) <= 0.0) {
        traj_.events.push_back({EventKind::kTimeout, t, s[0], s[1], 0});
        traj_.terminal = EventKind::kTimeout;
        break;
      }
      if (++steps > policy_.max_steps) {
        throw StepFailure("step budget exhausted at t=" + std::to_string(t));
      }
      bool last = false;
      if (dir * (t + h - t_end_) >= 0.0) {
        h = t_end_ - t;
        last = true;
      }
      State next, k7, err;
      stepper_.step(t, s, k1, h, next, k7, err);
      const double en = error_norm(s, next, err);
      if (!std::isfinite(en) || en > 1.0) {
        ++traj_.rejected_steps;
        const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
        h *= fac;
        if (std::abs(h) < policy_.h_min) {
          throw StepFailure("step size underflow at t=" + std::to_string(t));
        }
        continue;
      }
      const double a0 = std::atan2(s[1], s[0]);
      const double a1 = std::atan2(next[1], next[0]);
      const double dtheta = std::remainder(a1 - a0, 2.0 * M_PI);
      if (std::abs(dtheta) > 0.5 * M_PI) {
        ++traj_.rejected_steps;
        h *= 0.5;
        if (std::abs(h) < policy_.h_min) {
          throw StepFailure("angle control underflow at t=" + std::to_string(t));
        }
        continue;
      }
      check_finite(t + h, next);

      const double t_next = last ? t_end_ : t + h;
      std::optional<PendingEvent> stop = detect_events(t, s, k1, t_next, next);
      if (stop) {
        const State& es = stop->state;
        const double et = stop->event.t;
        theta = theta + std::remainder(std::atan2(es[1], es[0]) - a0, 2.0 * M_PI);
        push_sample(et, es, theta);
        traj_.events.push_back(stop->event);
        traj_.terminal = stop->event.kind;
        break;
      }

      t = t_next;
      s = next;
      k1 = k7;
      theta += dtheta;
      push_sample(t, s, theta);

      if (auto ev = capture_check(t, s)) {
        traj_.events.push_back(*ev);
        if ((ev->kind == EventKind::kOriginCapture && policy_.origin_capture_terminal) ||
            (ev->kind == EventKind::kPCapture && policy_.p_capture_terminal)) {
          traj_.terminal = ev->kind;
          break;
        }
      }

      // PI step-size control.
      const double e = std::max(en, 1e-10);
      double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, 5.0);
      err_prev = e;
      h = dir * std::min(std::abs(h) * fac, policy_.h_max);
    }
    return std::move(traj_);
  }

 private:
  double error_norm(const State& s, const State& next, const State& err) const {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = policy_.atol + policy_.rtol * std::max(std::abs(s[i]), std::abs(next[i]));
      acc += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(acc / 2.0);
  }

  void check_finite(double t, const State& s) const {
    if (!std::isfinite(s[0]) || !std::isfinite(s[1])) {
      throw NonFiniteState("non-finite state at t=" + std::to_string(t));
    }
  }

  void push_sample(double t, const State& s, double theta) {
    Sample smp;
    smp.t = t;
    smp.x = s[0];
    smp.y = s[1];
    smp.theta = theta;
    smp.rho = std::hypot(s[0], s[1]);
    smp.H = energy(model_, PhaseState{t, s[0], s[1]}, policy_.truncated).H;
    traj_.max_rho = std::max(traj_.max_rho, smp.rho);
    traj_.min_rho = std::min(traj_.min_rho, smp.rho);
    traj_.samples.push_back(smp);
  }

  /// Root of `fn` on the single-step map between t0 and t1, localized to event_tol.
  template <typename Fn>
  double localize(double t0, const State& s0, const State& k1, double t1, Fn fn, double f0,
                  double f1) const {
    auto phi = [&](double tau) {
      if (tau == t0) return f0;
      const State st = stepper_.advance(t0, s0, k1, tau - t0);
      return fn(tau, st);
    };
    double a = std::min(t0, t1);
    double b = std::max(t0, t1);
    double fa = a == t0 ? f0 : f1;
    double fb = b == t0 ? f0 : f1;
    const double tol = policy_.event_tol;
    auto stop = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(phi, a, b, fa, fb, stop, iters);
    return 0.5 * (r.first + r.second);
  }

  std::optional<PendingEvent> detect_events(double t0, const State& s0, const State& k1,
                                            double t1, const State& s1) {
    struct Found {
      Event ev;
      State st;
      bool terminal;
    };
    std::vector<Found> found;

    auto crossing = [&](int comp, EventKind kind) {
      const double v0 = s0[comp];
      const double v1 = s1[comp];
      if (v0 == 0.0 || v1 == 0.0 || (v0 > 0.0) == (v1 > 0.0)) return;
      auto fn = [comp](double, const State& st) { return st[comp]; };
      const double te = localize(t0, s0, k1, t1, fn, v0, v1);
      State st = stepper_.advance(t0, s0, k1, te - t0);
      st[comp] = 0.0;
      found.push_back({Event{kind, te, st[0], st[1], 0}, st, false});
    };
    crossing(1, EventKind::kXAxisCrossing);
    crossing(0, EventKind::kYAxisCrossing);

    if (policy_.strip_exit_terminal) {
      const double alpha = model_.exps().alpha;
      const bool banded = policy_.truncated && model_.fbar().active();
      if (banded) {
        const double up = model_.d_plus() + 1.0 + policy_.strip_margin;
        const double down = model_.d_minus() + 1.0 + policy_.strip_margin;
        auto excess = [&](double t, const State& st) {
          const double u = st[0] * std::exp(-alpha * t);
          return std::max(u - up, -u - down);
        };
        const double f0 = excess(t0, s0);
        const double f1 = excess(t1, s1);
        if (f0 < 0.0 && f1 >= 0.0) {
          const double te = f1 == 0.0 ? t1 : localize(t0, s0, k1, t1, excess, f0, f1);
          const State st = stepper_.advance(t0, s0, k1, te - t0);
          const int side = st[0] > 0.0 ? 1 : -1;
          found.push_back({Event{EventKind::kStripExit, te, st[0], st[1], side}, st, true});
        }
      } else {
        const double r1 = std::hypot(s1[0], s1[1]);
        if (r1 > policy_.escape_radius) {
          const int side = s1[0] > 0.0 ? 1 : -1;
          found.push_back({Event{EventKind::kStripExit, t1, s1[0], s1[1], side}, s1, true});
        }
      }
    }

    const double dir = t1 >= t0 ? 1.0 : -1.0;
    std::sort(found.begin(), found.end(),
              [dir](const Found& a, const Found& b) { return dir * a.ev.t < dir * b.ev.t; });
    for (const auto& f : found) {
      if (f.terminal) return PendingEvent{f.ev, f.st};
      traj_.events.push_back(f.ev);
    }
    return std::nullopt;
  }

  std::optional<Event> capture_check(double t, const State& s) {
    if (traj_.direction != Direction::kForward) return std::nullopt;
    const double rho = std::hypot(s[0], s[1]);
    recent_rho_.push_back(rho);
    const std::size_t need = static_cast<std::size_t>(policy_.origin_decreasing_steps) + 1;
    while (recent_rho_.size() > need) recent_rho_.pop_front();

    if (!origin_captured_ && rho < policy_.eps_origin && recent_rho_.size() == need) {
      bool decreasing = true;
      for (std::size_t i = 1; i < recent_rho_.size(); ++i) {
        if (!(recent_rho_[i] < recent_rho_[i - 1])) decreasing = false;
      }
      if (decreasing) {
        origin_captured_ = true;
        return Event{EventKind::kOriginCapture, t, s[0], s[1], 0};
      }
    }

    const auto& cp = model_.critical();
    if (cp && !p_captured_) {
      const double dp = std::hypot(s[0] - cp->plus.x, s[1] - cp->plus.y);
      const double dm = std::hypot(s[0] - cp->minus.x, s[1] - cp->minus.y);
      const int side = dp <= dm ? 1 : -1;
      const double dist = std::min(dp, dm);
      if (dist < policy_.eps_p) {
        if (p_side_ != side) {
          p_side_ = side;
          p_since_ = t;
        }
        if (t - p_since_ >= policy_.p_dwell) {
          p_captured_ = true;
          return Event{EventKind::kPCapture, t, s[0], s[1], side};
        }
      } else {
        p_side_ = 0;
      }
    }
    return std::nullopt;
  }

  const Model& model_;
  const StopPolicy& policy_;
  Stepper stepper_;
  double t_end_;
  double theta_hint_;
  Trajectory traj_;
  std::deque<double> recent_rho_;
  bool origin_captured_ = false;
  bool p_captured_ = false;
  int p_side_ = 0;
  double p_since_ = 0.0;
};

}  // namespace

Trajectory integrate_to(const Model& model, const PhaseState& start, double t_end,
                        const StopPolicy& policy, double theta_hint) {
  Integration run(model, policy, t_end, theta_hint);
  return run.run(start);
}

Trajectory integrate(const Model& model, const PhaseState& start, Direction direction,
                     const StopPolicy& policy, double theta_hint) {
  const double t_end = direction == Direction::kForward ? start.t + policy.forward_span
                                                        : start.t - policy.backward_span;
  return integrate_to(model, start, t_end, policy, theta_hint);
}

void write_csv(std::ostream& os, const Trajectory& traj, const Model& model) {
  os << "t,x,y,theta,rho,H,r,u,du\n";
  os.precision(17);
  for (const auto& s : traj.samples) {
    const RadialState rs = from_fowler(PhaseState{s.t, s.x, s.y}, model.exps());
    os << s.t << ',' << s.x << ',' << s.y << ',' << s.theta << ',' << s.rho << ',' << s.H << ','
       << rs.r << ',' << rs.u << ',' << rs.du << '\n';
  }
}

}  // namespace radial
