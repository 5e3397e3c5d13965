#include "radial/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace radial {

ClosedFormProfile::ClosedFormProfile(ClosedFormFamily family, int n, double param)
    : family_(family), n_(n), param_(param) {
  if (family_ == ClosedFormFamily::kAubinTalenti) {
    const double lam2 = param_ * param_;
    amp_ = std::pow(n_ * (n_ - 2.0) * lam2, (n_ - 2.0) / 4.0);
  }
}

ProfileValue ClosedFormProfile::operator()(double r) const {
  if (family_ == ClosedFormFamily::kConstant) return {param_, 0.0, 0.0};
  const double m = (n_ - 2.0) / 2.0;
  const double s = param_ * param_ + r * r;
  ProfileValue v;
  v.u = amp_ * std::pow(s, -m);
  v.du = -2.0 * m * amp_ * r * std::pow(s, -m - 1.0);
  v.ddu = -2.0 * m * amp_ * std::pow(s, -m - 1.0) +
          4.0 * m * (m + 1.0) * amp_ * r * r * std::pow(s, -m - 2.0);
  return v;
}

double ClosedFormProfile::L() const {
  return family_ == ClosedFormFamily::kAubinTalenti ? amp_ : 0.0;
}

namespace {

bool aubin_talenti_applies(const Model& model) {
  const auto& spec = model.spec();
  const auto& e = model.exps();
  return spec.p == 2.0 && spec.n > 2 && spec.oracle_mode &&
         spec.nonlinearity.family == NonlinearityFamily::kPurePower &&
         std::abs(spec.nonlinearity.q - e.p_sobolev) <= 1e-12 * e.p_sobolev &&
         spec.weight.family == WeightFamily::kConstant && spec.weight.h0 == 1.0 &&
         spec.weight.delta == 0.0;
}

bool autonomous_critical(const Model& model) {
  const auto& spec = model.spec();
  const auto& e = model.exps();
  return std::abs(e.l - e.p_sobolev) <= 1e-12 * e.p_sobolev &&
         spec.nonlinearity.family == NonlinearityFamily::kPurePower &&
         spec.weight.family == WeightFamily::kConstant;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult skipped(const std::string& name, const std::string& why) {
  CheckResult c;
  c.name = name;
  c.skipped = true;
  c.detail = why;
  return c;
}

double rel_gap(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

StopPolicy free_running(StopPolicy p) {
  p.origin_capture_terminal = false;
  p.p_capture_terminal = false;
  return p;
}

}  // namespace

ClosedFormProfile closed_form(const Model& model, ClosedFormFamily family, double param) {
  if (family == ClosedFormFamily::kAubinTalenti) {
    if (!aubin_talenti_applies(model)) {
      throw UnsupportedFamily("aubin-talenti needs p=2, q=p*, k=1 and the pure power in oracle mode");
    }
    if (!(param > 0.0)) throw UnsupportedFamily("aubin-talenti needs lambda > 0");
    return ClosedFormProfile(family, model.spec().n, param);
  }
  if (model.spec().nonlinearity.f(param) != 0.0) {
    throw UnsupportedFamily("constant profile needs f(d) = 0, got f=" +
                            fmt(model.spec().nonlinearity.f(param)));
  }
  return ClosedFormProfile(family, model.spec().n, param);
}

double ode_residual(const Model& model, const ClosedFormProfile& profile, double r) {
  const auto& spec = model.spec();
  if (spec.p != 2.0) throw UnsupportedFamily("residual is implemented for p = 2");
  const ProfileValue v = profile(r);
  const double a = v.ddu;
  const double b = (spec.n - 1.0) * v.du / r;
  const double c = spec.weight.k(r) * spec.nonlinearity.f(v.u);
  const double scale = std::abs(a) + std::abs(b) + std::abs(c);
  if (scale == 0.0) return 0.0;
  return std::abs(a + b + c) / scale;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

CheckResult check_pohozaev_relation(const Model& model, const Trajectory& traj) {
  CheckResult c;
  c.name = "pohozaev_relation";
  c.threshold = 1e-8;
  for (const auto& s : traj.samples) {
    const PhaseState ps{s.t, s.x, s.y};
    const double via_h = energy(model, ps).pohozaev;
    const double direct = pohozaev_direct(model, from_fowler(ps, model.exps()));
    const double err = std::abs(direct - via_h) / (1.0 + std::abs(direct));
    c.worst = std::max(c.worst, err);
  }
  c.passed = c.worst <= c.threshold;
  c.detail = std::to_string(traj.samples.size()) + " samples";
  return c;
}

CheckResult check_energy_monotonicity(const Model& model,
                                      const std::vector<const Trajectory*>& trajs) {
  const auto& e = model.exps();
  if (!(e.l > e.p_sobolev * (1.0 + 1e-12))) return skipped("energy_monotonicity", "l = p*");
  CheckResult c;
  c.name = "energy_monotonicity";
  c.threshold = 1e-8;
  c.worst = -std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  std::size_t violations = 0;
  double where_t = 0.0;
  double where_d = 0.0;
  for (const Trajectory* tr : trajs) {
    if (!tr) continue;
    const auto& sm = tr->samples;
    for (std::size_t i = 0; i + 1 < sm.size(); ++i) {
      if (sm[i].H < 0.0) continue;
      const double rate = (sm[i + 1].H - sm[i].H) / (sm[i + 1].t - sm[i].t);
      ++checked;
      if (rate > c.threshold) ++violations;
      if (rate > c.worst) {
        c.worst = rate;
        where_t = sm[i].t;
        where_d = sm.front().x * std::exp(-e.alpha * sm.front().t);
      }
    }
  }
  if (checked == 0) c.worst = 0.0;
  c.passed = violations == 0;
  c.detail = std::to_string(violations) + " of " + std::to_string(checked) +
             " samples with H >= 0 increase; worst at t=" + fmt(where_t) + " on the shot from u0=" +
             fmt(where_d);
  return c;
}

CheckResult check_flow_signs(const Model& model, const std::vector<const Trajectory*>& trajs) {
  CheckResult c;
  c.name = "flow_sign_conditions";
  const auto& e = model.exps();
  std::size_t bad = 0;
  std::size_t seen = 0;
  for (const Trajectory* traj : trajs) {
    if (!traj) continue;
    const double eps_nd = 1e-9 * traj->max_rho;
    for (const auto& ev : traj->events) {
      const Field f = vector_field(model, ev.t, ev.x, ev.y);
      if (ev.kind == EventKind::kXAxisCrossing) {
        const double u = ev.x * std::exp(-e.alpha * ev.t);
        if (u == 0.0 || u <= -model.d_minus() || u >= model.d_plus()) continue;
        ++seen;
        if (!(ev.x * f.dy < 0.0)) ++bad;
      } else if (ev.kind == EventKind::kYAxisCrossing) {
        if (std::abs(ev.y) <= eps_nd) continue;
        ++seen;
        if (!(f.dx * ev.y > 0.0)) ++bad;
      }
    }
  }
  c.worst = static_cast<double>(bad);
  c.passed = bad == 0;
  c.detail = std::to_string(seen) + " axis crossings checked";
  return c;
}

CheckResult check_rescaling(const Model& model, int tuples, unsigned seed) {
  CheckResult c;
  c.name = "rescaling_identities";
  c.threshold = 1e-10;
  const auto& e = model.exps();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> idx(e.p_serrin + 0.05, 3.0 * e.p_sobolev);
  std::uniform_real_distribution<double> tt(-4.0, 4.0);
  const double hi = model.fbar().active() ? 1.5 * model.d_plus() : 2.0;
  const double lo = model.fbar().active() ? -1.5 * model.d_minus() : -2.0;
  std::uniform_real_distribution<double> uu(lo, hi);
  std::uniform_real_distribution<double> yy(-2.0, 2.0);
  for (int i = 0; i < tuples; ++i) {
    const double l = idx(rng);
    const double L = idx(rng);
    const double t = tt(rng);
    const double u = uu(rng);
    const ExponentSet el = ExponentSet::for_index(e.n, e.p, l);
    const ExponentSet eL = ExponentSet::for_index(e.n, e.p, L);
    const double xl = u * std::exp(el.alpha * t);
    const double yl = yy(rng);

    const PhaseState to = rescale(PhaseState{t, xl, yl}, el, eL);
    const double xL = xl * std::exp((eL.alpha - el.alpha) * t);
    const double yL = yl * std::exp((eL.beta - el.beta) * t);
    c.worst = std::max({c.worst, rel_gap(to.x, xL), rel_gap(to.y, yL)});

    // g_L(x, t) against g_l evaluated at the rescaled x.
    const double x = xL;
    const double xs = x * std::exp(-(eL.alpha - el.alpha) * t);
    const GValue gL = g_eval(model, eL, x, t);
    const GValue gl = g_eval(model, el, xs, t);
    const double g_rhs = gl.g * std::exp((eL.alpha * (L - 1.0) - el.alpha * (l - 1.0)) * t);
    const double G_rhs = gl.G * std::exp((eL.alpha * L - el.alpha * l) * t);
    if (gL.g != 0.0 || g_rhs != 0.0) c.worst = std::max(c.worst, rel_gap(gL.g, g_rhs));
    if (gL.G != 0.0 || G_rhs != 0.0) c.worst = std::max(c.worst, rel_gap(gL.G, G_rhs));
  }
  c.passed = c.worst <= c.threshold;
  c.detail = std::to_string(tuples) + " tuples";
  return c;
}

CheckResult check_truncation_joins(const Model& model) {
  const auto& fb = model.fbar();
  if (!fb.active()) return skipped("truncation_c1_joins", "no truncation band");
  CheckResult c;
  c.name = "truncation_c1_joins";
  c.threshold = 1e-6;
  const double h = 1e-5;
  auto left_slope = [&](double a) { return (3.0 * fb.f(a) - 4.0 * fb.f(a - h) + fb.f(a - 2 * h)) / (2 * h); };
  auto right_slope = [&](double a) { return (-3.0 * fb.f(a) + 4.0 * fb.f(a + h) - fb.f(a + 2 * h)) / (2 * h); };
  const double dp = model.d_plus();
  const double dm = model.d_minus();
  for (double a : {dp, dp + 1.0, -dm, -dm - 1.0}) {
    const double jump = std::abs(fb.f(a + 1e-12) - fb.f(a - 1e-12));
    const double kink = std::abs(left_slope(a) - right_slope(a));
    c.worst = std::max({c.worst, jump, kink / (1.0 + std::abs(left_slope(a)))});
  }
  // Sign and size on the bands.
  bool shape_ok = true;
  for (int i = 1; i < 1000; ++i) {
    const double s = i / 1000.0;
    const double up = fb.f(dp + s);
    const double down = fb.f(-dm - s);
    if (up > 0.0 || down < 0.0 || std::abs(up) > fb.f_inf() * (1 + 1e-12) ||
        std::abs(down) > fb.f_inf() * (1 + 1e-12)) {
      shape_ok = false;
    }
  }
  c.passed = c.worst <= c.threshold && shape_ok;
  c.detail = "bridge powers " + std::to_string(fb.bridge_power_plus()) + "/" +
             std::to_string(fb.bridge_power_minus()) + (shape_ok ? "" : "; sign or bound violated");
  return c;
}

CheckResult check_hamiltonian(const Model& model, const PhaseState& start, double t_lo,
                              double t_hi, const StopPolicy& policy) {
  if (!autonomous_critical(model)) return skipped("hamiltonian_conservation", "not autonomous at l = p*");
  CheckResult c;
  c.name = "hamiltonian_conservation";
  c.threshold = 1e-7;
  const StopPolicy pol = free_running(policy);
  const double h0 = energy(model, start).H;
  for (double end : {t_lo, t_hi}) {
    const Trajectory tr = integrate_to(model, start, end, pol);
    for (const auto& s : tr.samples) c.worst = std::max(c.worst, std::abs(s.H - h0));
  }
  c.passed = c.worst <= c.threshold;
  c.detail = "H(start)=" + fmt(h0) + " over t in [" + fmt(t_lo) + ", " + fmt(t_hi) + "]";
  return c;
}

CheckResult check_homoclinic(const Model& model, const PhaseState& start, double T,
                             const StopPolicy& policy) {
  CheckResult c;
  c.name = "homoclinic_orbit";
  c.threshold = 1e-3;
  const StopPolicy pol = free_running(policy);
  double worst_h = 0.0;
  for (double end : {start.t - T, start.t + T}) {
    const Trajectory tr = integrate_to(model, start, end, pol);
    c.worst = std::max(c.worst, tr.back().rho);
    for (const auto& s : tr.samples) worst_h = std::max(worst_h, std::abs(s.H));
  }
  c.passed = c.worst < c.threshold && worst_h <= 1e-7;
  c.detail = "max |H| along the orbit " + fmt(worst_h);
  return c;
}

CheckResult check_closed_form_reproduction(const Model& model, const StopPolicy& policy) {
  if (!aubin_talenti_applies(model)) return skipped("closed_form_reproduction", "no closed form");
  CheckResult c;
  c.name = "closed_form_reproduction";
  c.threshold = 1e-4;
  const ClosedFormProfile prof = closed_form(model, ClosedFormFamily::kAubinTalenti, 1.0);
  const PhaseState seed = init_fast_decay(model, prof.L(), 8.0);
  const Trajectory tr = integrate_to(model, seed, std::log(0.5), free_running(policy));
  std::size_t used = 0;
  for (const auto& s : tr.samples) {
    const RadialState rs = from_fowler(PhaseState{s.t, s.x, s.y}, model.exps());
    if (rs.r < 0.5 - 1e-12 || rs.r > 20.0) continue;
    const double exact = prof(rs.r).u;
    c.worst = std::max(c.worst, std::abs(rs.u - exact) / std::abs(exact));
    ++used;
  }
  c.passed = used > 0 && c.worst <= c.threshold;
  c.detail = std::to_string(used) + " samples on r in [0.5, 20]";
  return c;
}

ValidationReport validate_suite(const Model& model, const StopPolicy& policy) {
  ValidationReport rep;
  const bool banded = model.fbar().active();
  const bool at = aubin_talenti_applies(model);

  rep.checks.push_back(check_truncation_joins(model));

  double d0 = 1.0;
  if (banded) {
    d0 = 0.5 * model.d_plus();
  } else if (at) {
    d0 = closed_form(model, ClosedFormFamily::kAubinTalenti, 1.0)(0.0).u;
  }
  const ShotOutcome shot = shoot(model, d0, policy);
  rep.checks.push_back(check_pohozaev_relation(model, *shot.trajectory));
  rep.checks.back().detail += " on the shot from d=" + fmt(d0);

  std::vector<ShotOutcome> shots;
  const double top = banded ? model.d_plus() : 2.0 * d0;
  for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) shots.push_back(shoot(model, frac * top, policy));
  std::vector<const Trajectory*> trajs{shot.trajectory.get()};
  for (const auto& s : shots) trajs.push_back(s.trajectory.get());
  rep.checks.push_back(check_flow_signs(model, trajs));
  rep.checks.push_back(check_rescaling(model, 200, 20240607u));

  if (autonomous_critical(model)) {
    PhaseState start{0.0, 0.0, 0.0};
    if (at) {
      const ClosedFormProfile prof = closed_form(model, ClosedFormFamily::kAubinTalenti, 1.0);
      start = to_fowler(RadialState{1.0, prof(1.0).u, prof(1.0).du}, model.exps());
    } else {
      const Sample& s = shot.trajectory->samples[shot.trajectory->samples.size() / 2];
      start = {s.t, s.x, s.y};
    }
    rep.checks.push_back(check_hamiltonian(model, start, start.t - 10.0, start.t + 10.0, policy));
    if (at) rep.checks.push_back(check_homoclinic(model, start, 12.0, policy));
  } else {
    rep.checks.push_back(skipped("hamiltonian_conservation", "not autonomous at l = p*"));
  }
  rep.checks.push_back(check_closed_form_reproduction(model, policy));

  rep.checks.push_back(check_energy_monotonicity(model, trajs));
  return rep;
}

}  // namespace radial
