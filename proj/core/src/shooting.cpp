#include "radial/shooting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace radial {

std::string_view outcome_name(OutcomeClass cls) {
  switch (cls) {
    case OutcomeClass::kFastDecay: return "FastDecay";
    case OutcomeClass::kSlowDecay: return "SlowDecay";
    case OutcomeClass::kEscaped: return "Escaped";
    case OutcomeClass::kUndetermined: return "Undetermined";
  }
  return "?";
}

PhaseState init_regular(const Model& model, double d, double r0) {
  const auto& spec = model.spec();
  const auto& e = model.exps();
  const double p = e.p;
  const double delta = spec.weight.delta;
  const double h0 = spec.weight.h0;
  const double fd = model.fbar().f(d);
  // phi(u') = -h0 f(d) r^{1+delta} / (n + delta) near r = 0.
  const double c = -h0 * fd / (e.n + delta);
  const double ex = (1.0 + delta) / (p - 1.0);
  const double slope = spow(c, 1.0 / (p - 1.0));
  RadialState rs;
  rs.r = r0;
  rs.u = d + slope * std::pow(r0, ex + 1.0) / (ex + 1.0);
  rs.du = slope * std::pow(r0, ex);
  return to_fowler(rs, e);
}

PhaseState seed_regular(const Model& model, double d, double r0, const StopPolicy& policy) {
  StopPolicy check = policy;
  check.origin_capture_terminal = false;
  check.p_capture_terminal = false;
  const double t_common = 0.0;
  double r = r0;
  PhaseState seed = init_regular(model, d, r);
  if (std::log(r) >= t_common) return seed;
  double worst = 0.0;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const PhaseState half = init_regular(model, d, 0.5 * r);
    const Trajectory a = integrate_to(model, seed, t_common, check);
    const Trajectory b = integrate_to(model, half, t_common, check);
    // Seeds that leave the band before t = 0 cannot be compared there; accept them.
    if (a.terminal != EventKind::kTimeout || b.terminal != EventKind::kTimeout) return seed;
    const Sample& sa = a.back();
    const Sample& sb = b.back();
    const double diff = std::hypot(sa.x - sb.x, sa.y - sb.y);
    worst = diff;
    if (diff < 1e-8 * (1.0 + sa.rho)) return seed;
    r *= 0.5;
    seed = half;
  }
  throw BadSeed("regular seed for d=" + std::to_string(d) + " not converged, diff=" +
                std::to_string(worst));
}

PhaseState init_fast_decay(const Model& model, double L, double T) {
  const auto& e = model.exps();
  const double m = e.fast_decay_rate;
  PhaseState ps;
  ps.t = T;
  ps.x = L * std::exp((e.alpha - m) * T);
  ps.y = -spow(m * L, e.p - 1.0) * std::exp(e.gamma * T);
  return ps;
}

double unstable_base_angle(double d) { return d < 0.0 ? -M_PI : 0.0; }

double stable_tangent_offset(const ExponentSet& exps) {
  if (exps.p < 2.0) return 0.0;
  return -0.5 * M_PI + std::atan(exps.n - 2.0);
}

ShotOutcome classify_and_count(const Trajectory& traj, const Model& model, double d) {
  const auto& e = model.exps();
  ShotOutcome out;
  out.d = d;
  out.non_generic = model.fbar().f(d) == 0.0;
  out.t_terminal = traj.back().t;

  const double eps_nd = 1e-9 * traj.max_rho;
  for (const auto& ev : traj.events) {
    if (ev.kind == EventKind::kYAxisCrossing && std::abs(ev.y) > eps_nd) ++out.zeros;
  }

  const double theta_end = traj.back().theta;
  const double base = unstable_base_angle(d);
  out.total_angle = theta_end - base;

  const EventKind term = traj.terminal.value_or(EventKind::kTimeout);
  if (out.non_generic) {
    out.cls = OutcomeClass::kUndetermined;
  } else if (term == EventKind::kOriginCapture) {
    out.cls = OutcomeClass::kFastDecay;
    const Sample& s = traj.back();
    out.L = s.x * std::exp((e.fast_decay_rate - e.alpha) * s.t);
    out.total_angle += stable_tangent_offset(e);
  } else if (term == EventKind::kPCapture) {
    out.cls = OutcomeClass::kSlowDecay;
    out.target = traj.events.back().side;
  } else if (term == EventKind::kStripExit) {
    out.cls = OutcomeClass::kEscaped;
  } else {
    out.cls = OutcomeClass::kUndetermined;
  }

  // Zeros implied by the angle swept since r = 0.
  if (out.cls == OutcomeClass::kFastDecay) {
    out.angle_zeros = static_cast<int>(std::lround((-out.total_angle - 0.5 * M_PI) / M_PI));
  } else {
    out.angle_zeros = static_cast<int>(std::floor(-out.total_angle / M_PI));
  }
  if (out.cls == OutcomeClass::kFastDecay || out.cls == OutcomeClass::kSlowDecay) {
    if (out.angle_zeros != out.zeros) {
      throw InconsistentAngle("d=" + std::to_string(d) + ": " + std::to_string(out.zeros) +
                              " zeros but angle " + std::to_string(out.total_angle));
    }
  }
  return out;
}

ShotOutcome shoot(const Model& model, double d, const StopPolicy& policy) {
  if (d == 0.0) throw BadSeed("d must be nonzero");
  StopPolicy pol = policy;
  const bool constant = model.fbar().f(d) == 0.0;
  if (constant) pol.forward_span = 10.0;
  const PhaseState seed = seed_regular(model, d, 1e-3, pol);
  auto traj = std::make_shared<Trajectory>(
      integrate(model, seed, Direction::kForward, pol, unstable_base_angle(d)));
  ShotOutcome out = classify_and_count(*traj, model, d);
  out.trajectory = std::move(traj);
  return out;
}

// ---------------------------------------------------------------------------
// Sequences

namespace {

struct Signature {
  OutcomeClass cls;
  int zeros;
  bool operator==(const Signature& o) const { return cls == o.cls && zeros == o.zeros; }
};

struct Probe {
  double m = 0.0;  // |d|
  Signature sig{OutcomeClass::kUndetermined, 0};
  double t_terminal = 0.0;
  double min_rho = 0.0;
  ShotOutcome summary;  // without trajectory
};

class SideSearch {
 public:
  SideSearch(const Model& model, const SequenceOptions& opt, int side)
      : model_(model), opt_(opt), side_(side) {
    policy_ = opt.policy;
    policy_.origin_capture_terminal = false;
    d_max_ = side > 0 ? model.d_plus() : model.d_minus();
  }

  SequenceSide run(std::size_t& shots) {
    SequenceSide out;
    std::vector<double> grid = scan_grid();
    std::vector<Probe> probes = shoot_all(grid);
    // Extend toward the band edge until more than k_max zeros are seen.
    double s = 2.0;
    while (max_zeros(probes) <= opt_.k_max && s < 15.0) {
      const double m = d_max_ * (1.0 - std::pow(10.0, -s));
      if (m >= d_max_) break;
      probes.push_back(probe(m));
      s += 0.05;
    }
    std::sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) { return a.m < b.m; });
    for (const auto& p : probes) out.scan.push_back(outcome_of(p));

    // Resolve every signature change into brackets.
    std::vector<TransitionBracket> brackets;
    std::vector<std::vector<Probe>> trails;
    for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
      resolve(probes[i], probes[i + 1], brackets, trails);
    }
    out.brackets = brackets;

    out.stars.assign(1, 0.0);
    for (int k = 0; k <= opt_.k_max; ++k) {
      std::size_t idx = brackets.size();
      for (std::size_t j = 0; j < brackets.size(); ++j) {
        if (brackets[j].zeros_lo <= k && brackets[j].zeros_hi >= k + 1) {
          idx = j;
          break;
        }
      }
      if (idx == brackets.size()) {
        throw UnresolvedBracket(k, "no transition above " + std::to_string(k) + " zeros found");
      }
      const auto& b = brackets[idx];
      if (b.width() > opt_.tol_d * d_max_) {
        throw UnresolvedBracket(k, "width " + std::to_string(b.width()));
      }
      out.values.push_back(0.5 * (b.lo + b.hi));
      out.widths.push_back(b.width());
      if (k >= 1) {
        out.stars.push_back(idx > 0 ? 0.5 * (brackets[idx - 1].lo + brackets[idx - 1].hi) : 0.0);
      }
      out.witnesses.push_back(witness(trails[idx], b));
    }
    shots += shots_.load();
    return out;
  }

 private:
  std::vector<double> scan_grid() const {
    std::vector<double> g;
    const int n = std::max(opt_.scan_points, 2);
    const double lo = std::log(1e-4 * d_max_);
    const double hi = std::log(d_max_);
    for (int i = 0; i < n; ++i) {
      const double m = std::exp(lo + (hi - lo) * i / (n - 1));
      if (m < d_max_) g.push_back(m);
    }
    for (double s = 1.0; s <= 2.0 + 1e-12; s += 0.05) g.push_back(d_max_ * (1.0 - std::pow(10.0, -s)));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  }

  Probe probe(double m) {
    ++shots_;
    const double d = side_ * m;
    const ShotOutcome o = shoot(model_, d, policy_);
    Probe p;
    p.m = m;
    p.sig = {o.cls, o.zeros};
    p.t_terminal = o.t_terminal;
    p.min_rho = o.trajectory ? o.trajectory->min_rho : 0.0;
    p.summary = o;
    p.summary.trajectory.reset();
    return p;
  }

  std::vector<Probe> shoot_all(const std::vector<double>& grid) {
    std::vector<Probe> out(grid.size());
    const int jobs = std::max(1, opt_.jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto worker = [&] {
      for (std::size_t i = next++; i < grid.size(); i = next++) {
        try {
          out[i] = probe(grid[i]);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
  }

  static int max_zeros(const std::vector<Probe>& probes) {
    int z = 0;
    for (const auto& p : probes) z = std::max(z, p.sig.zeros);
    return z;
  }

  ShotOutcome outcome_of(const Probe& p) const {
    ShotOutcome o = p.summary;
    o.d = side_ * p.m;
    o.cls = p.sig.cls;
    o.zeros = p.sig.zeros;
    o.t_terminal = p.t_terminal;
    return o;
  }

  /// Bisects [a, b]; appends the bracket found and recurses on the remainder if b differs.
  void resolve(const Probe& a, const Probe& b, std::vector<TransitionBracket>& brackets,
               std::vector<std::vector<Probe>>& trails) {
    if (a.sig == b.sig) return;
    Probe lo = a;
    Probe hi = b;
    std::vector<Probe> trail;
    const double tol = opt_.tol_d * d_max_;
    for (int it = 0; it < opt_.max_bisections && hi.m - lo.m > tol; ++it) {
      const double mid = 0.5 * (lo.m + hi.m);
      if (mid <= lo.m || mid >= hi.m) break;
      Probe pm = probe(mid);
      trail.push_back(pm);
      if (pm.sig == lo.sig) {
        lo = pm;
      } else {
        hi = pm;
      }
    }
    TransitionBracket br;
    br.side = side_;
    br.lo = lo.m;
    br.hi = hi.m;
    br.zeros_lo = lo.sig.zeros;
    br.zeros_hi = hi.sig.zeros;
    br.cls_lo = lo.sig.cls;
    br.cls_hi = hi.sig.cls;
    brackets.push_back(br);
    trails.push_back(trail);
    if (!(hi.sig == b.sig)) resolve(hi, b, brackets, trails);
  }

  /// The bisection midpoint that lingered longest before its terminal event, re-shot with
  /// origin capture enabled.
  ShotOutcome witness(const std::vector<Probe>& trail, const TransitionBracket& b) {
    double m = 0.5 * (b.lo + b.hi);
    double best_t = -std::numeric_limits<double>::infinity();
    double best_rho = std::numeric_limits<double>::infinity();
    for (const auto& p : trail) {
      if (p.t_terminal > best_t || (p.t_terminal == best_t && p.min_rho < best_rho)) {
        best_t = p.t_terminal;
        best_rho = p.min_rho;
        m = p.m;
      }
    }
    ++shots_;
    return shoot(model_, side_ * m, opt_.policy);
  }

  const Model& model_;
  const SequenceOptions& opt_;
  int side_;
  StopPolicy policy_;
  double d_max_ = 1.0;
  std::atomic<std::size_t> shots_{0};
};

}  // namespace

SequenceReport find_sequences(const Model& model, const SequenceOptions& options) {
  const auto& e = model.exps();
  if (!(e.l > e.p_sobolev * (1.0 + 1e-12))) {
    throw InvalidSpec(Clause::kSupercritical,
                      "sequences need l > p*, got l=" + std::to_string(e.l));
  }
  if (!model.fbar().active()) {
    throw InvalidSpec(Clause::kNonlinearityShape, "sequences need finite zeros d+ and d-");
  }
  SequenceReport rep;
  rep.k_max = options.k_max;
  rep.A = SideSearch(model, options, +1).run(rep.shots);
  if (options.mirror) rep.B = SideSearch(model, options, -1).run(rep.shots);
  return rep;
}

}  // namespace radial
