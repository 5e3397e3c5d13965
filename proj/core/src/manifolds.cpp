#include "radial/manifolds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace radial {

std::string_view manifold_name(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::kUnstablePlus: return "unstable-plus";
    case ManifoldKind::kUnstableMinus: return "unstable-minus";
    case ManifoldKind::kStablePlus: return "stable-plus";
    case ManifoldKind::kStableMinus: return "stable-minus";
  }
  return "?";
}

ManifoldKind parse_manifold_kind(std::string_view name) {
  for (auto k : {ManifoldKind::kUnstablePlus, ManifoldKind::kUnstableMinus,
                 ManifoldKind::kStablePlus, ManifoldKind::kStableMinus}) {
    if (manifold_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown manifold kind: " + std::string(name));
}

bool is_unstable(ManifoldKind kind) {
  return kind == ManifoldKind::kUnstablePlus || kind == ManifoldKind::kUnstableMinus;
}

double manifold_base_angle(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::kUnstablePlus: return 0.0;
    case ManifoldKind::kUnstableMinus: return -M_PI;
    case ManifoldKind::kStablePlus: return -0.5 * M_PI;
    case ManifoldKind::kStableMinus: return -1.5 * M_PI;
  }
  return 0.0;
}

namespace {

StopPolicy tracing_policy(const StopPolicy& base) {
  StopPolicy p = base;
  p.origin_capture_terminal = false;
  p.p_capture_terminal = false;
  p.strip_exit_terminal = false;
  return p;
}

double sign_of(ManifoldKind kind) {
  return kind == ManifoldKind::kUnstableMinus || kind == ManifoldKind::kStableMinus ? -1.0 : 1.0;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

CurvePoint manifold_point(const Model& model, ManifoldKind kind, double tau, double param,
                          const ManifoldOptions& options) {
  const StopPolicy pol = tracing_policy(options.policy);
  const double base = manifold_base_angle(kind);
  const double sgn = sign_of(kind);
  PhaseState seed;
  if (is_unstable(kind)) {
    seed = seed_regular(model, sgn * param, 1e-3, pol);
    if (seed.t >= tau) throw BadSeed("tau must exceed the seeding radius");
  } else {
    seed = init_fast_decay(model, sgn * param, tau + options.seed_offset);
  }
  const Trajectory traj = integrate_to(model, seed, tau, pol, base);
  CurvePoint pt;
  pt.param = param;
  pt.state = {traj.back().t, traj.back().x, traj.back().y};
  pt.rho = traj.back().rho;
  pt.theta_time = traj.back().theta;
  pt.theta = pt.theta_time;
  return pt;
}

ManifoldCurve trace_manifold(const Model& model, ManifoldKind kind, double tau,
                             std::vector<double> params, const ManifoldOptions& options) {
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());
  params.erase(std::remove_if(params.begin(), params.end(), [](double v) { return !(v > 0.0); }),
               params.end());

  ManifoldCurve curve;
  curve.kind = kind;
  curve.tau = tau;
  if (!is_unstable(kind)) curve.seed_T = tau + options.seed_offset;
  if (params.empty()) return curve;

  std::vector<CurvePoint> pts(params.size());
  parallel_for(params.size(), options.jobs,
               [&](std::size_t i) { pts[i] = manifold_point(model, kind, tau, params[i], options); });

  // Unwrap along the parameter, bisecting (geometrically) wherever neighbours jump too far.
  std::vector<CurvePoint> out;
  out.push_back(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    std::vector<std::pair<CurvePoint, int>> stack{{pts[i], 0}};
    while (!stack.empty()) {
      auto [next, depth] = stack.back();
      const CurvePoint& prev = out.back();
      next.theta = unwrap_near(next.state.x, next.state.y, prev.theta);
      if (std::abs(next.theta - prev.theta) < options.max_angle_gap) {
        out.push_back(next);
        stack.pop_back();
        continue;
      }
      if (depth >= options.max_refinements) {
        throw GridTooCoarse("angle jump " + std::to_string(next.theta - prev.theta) +
                            " between params " + std::to_string(prev.param) + " and " +
                            std::to_string(next.param));
      }
      const double mid = std::sqrt(prev.param * next.param);
      stack.back().second = depth + 1;
      stack.push_back({manifold_point(model, kind, tau, mid, options), depth + 1});
    }
  }
  curve.points = std::move(out);

  if (!is_unstable(kind) && options.estimate_seed_error) {
    ManifoldOptions later = options;
    later.seed_offset += 10.0;
    double worst = 0.0;
    for (const auto& p : curve.points) {
      const CurvePoint q = manifold_point(model, kind, tau, p.param, later);
      worst = std::max(worst, std::hypot(p.state.x - q.state.x, p.state.y - q.state.y));
    }
    curve.seed_error = worst;
  }
  return curve;
}

std::pair<ManifoldKind, int> stable_branch_for(ManifoldKind unstable, int k) {
  // A homoclinic with k zeros enters the origin at angle base - pi/2 - k pi, which must equal a
  // stable base angle translated by -2 pi j.
  const bool plus = unstable == ManifoldKind::kUnstablePlus;
  const bool even = k % 2 == 0;
  if (plus) {
    return even ? std::pair{ManifoldKind::kStablePlus, k / 2}
                : std::pair{ManifoldKind::kStableMinus, (k - 1) / 2};
  }
  return even ? std::pair{ManifoldKind::kStableMinus, k / 2}
              : std::pair{ManifoldKind::kStablePlus, (k + 1) / 2};
}

namespace {

struct Crossing {
  std::size_t seg_u = 0;
  double param_u = 0.0;
  double param_s = 0.0;
};

/// Intersection of segments p0-p1 and q0-q1; returns the fractions along each.
bool segment_hit(double px0, double py0, double px1, double py1, double qx0, double qy0,
                 double qx1, double qy1, double& s, double& t) {
  const double rx = px1 - px0, ry = py1 - py0;
  const double sx = qx1 - qx0, sy = qy1 - qy0;
  const double den = rx * sy - ry * sx;
  if (den == 0.0) return false;
  const double wx = qx0 - px0, wy = qy0 - py0;
  s = (wx * sy - wy * sx) / den;
  t = (wx * ry - wy * rx) / den;
  return s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0;
}

std::optional<Crossing> first_crossing(const ManifoldCurve& u, const ManifoldCurve& st,
                                       double shift) {
  for (std::size_t i = 0; i + 1 < u.points.size(); ++i) {
    const auto& a = u.points[i];
    const auto& b = u.points[i + 1];
    std::optional<Crossing> best;
    double best_s = 2.0;
    for (std::size_t j = 0; j + 1 < st.points.size(); ++j) {
      const auto& c = st.points[j];
      const auto& e = st.points[j + 1];
      double s = 0.0, t = 0.0;
      if (segment_hit(a.theta, a.rho, b.theta, b.rho, c.theta - shift, c.rho, e.theta - shift,
                      e.rho, s, t) &&
          s < best_s) {
        best_s = s;
        best = Crossing{i, a.param + s * (b.param - a.param), c.param + t * (e.param - c.param)};
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

}  // namespace

std::vector<IntersectionRecord> intersect(const Model& model, const ManifoldCurve& unstable,
                                          const ManifoldCurve& stable_plus,
                                          const ManifoldCurve& stable_minus, int k_max,
                                          const ManifoldOptions& options) {
  if (!is_unstable(unstable.kind)) throw std::invalid_argument("first curve must be unstable");
  std::vector<IntersectionRecord> out;
  for (int k = 0; k <= k_max; ++k) {
    const auto [skind, shift] = stable_branch_for(unstable.kind, k);
    const ManifoldCurve& st = skind == ManifoldKind::kStablePlus ? stable_plus : stable_minus;
    if (st.kind != skind || std::abs(st.tau - unstable.tau) > 1e-12) {
      throw std::invalid_argument("stable curve kind or tau mismatch");
    }
    const auto hit = first_crossing(unstable, st, 2.0 * M_PI * shift);
    if (!hit) {
      throw NoCrossing(k, "stable slice " + std::string(manifold_name(skind)) +
                              " does not reach the winding needed");
    }

    // Newton on (d, L): Sigma_u(d) - Sigma_s(L) = 0 in the (x, y) plane.
    const double tau = unstable.tau;
    auto pu = [&](double d) { return manifold_point(model, unstable.kind, tau, d, options).state; };
    auto ps = [&](double L) { return manifold_point(model, skind, tau, L, options).state; };
    double d = hit->param_u;
    double L = hit->param_s;
    PhaseState a = pu(d);
    PhaseState b = ps(L);
    double fx = a.x - b.x;
    double fy = a.y - b.y;
    double res = std::hypot(fx, fy);
    for (int it = 0; it < 40 && res > 0.0; ++it) {
      const double hd = 1e-7 * d;
      const double hl = 1e-7 * L;
      const PhaseState ad = pu(d + hd);
      const PhaseState bl = ps(L + hl);
      const double j11 = (ad.x - a.x) / hd, j21 = (ad.y - a.y) / hd;
      const double j12 = -(bl.x - b.x) / hl, j22 = -(bl.y - b.y) / hl;
      const double det = j11 * j22 - j12 * j21;
      if (det == 0.0 || !std::isfinite(det)) break;
      double dd = -(j22 * fx - j12 * fy) / det;
      double dl = -(-j21 * fx + j11 * fy) / det;
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls) {
        const double dn = d + dd;
        const double ln = L + dl;
        if (dn > 0.0 && ln > 0.0) {
          const PhaseState an = pu(dn);
          const PhaseState bn = ps(ln);
          const double rn = std::hypot(an.x - bn.x, an.y - bn.y);
          if (rn < res) {
            d = dn;
            L = ln;
            a = an;
            b = bn;
            fx = a.x - b.x;
            fy = a.y - b.y;
            res = rn;
            improved = true;
            break;
          }
        }
        dd *= 0.5;
        dl *= 0.5;
      }
      if (!improved || std::abs(dd) <= 4e-16 * d) break;
    }

    IntersectionRecord rec;
    rec.k = k;
    rec.d_at = d;
    rec.L_at = L;
    rec.R_point = a;
    rec.stable_kind = skind;
    rec.shift = shift;
    rec.residual = res;
    out.push_back(rec);
  }
  return out;
}

InvarianceReport invariance_check(const Trajectory& traj, const Model& model) {
  const auto& e = model.exps();
  const double dp = model.d_plus();
  const double dm = model.d_minus();
  InvarianceReport rep;
  rep.samples = traj.samples.size();

  // Samples in increasing t, whatever the integration direction.
  std::vector<const Sample*> ordered;
  for (const auto& s : traj.samples) ordered.push_back(&s);
  if (traj.direction == Direction::kBackward) std::reverse(ordered.begin(), ordered.end());

  auto tol_of = [](const Sample& s) { return 1e-9 * (1.0 + std::abs(s.x) + std::abs(s.y)); };

  // Upper copy of the shifted quadrants and its mirror below -d-.
  for (const double sgn : {1.0, -1.0}) {
    const double d = sgn > 0.0 ? dp : dm;
    if (!std::isfinite(d)) continue;
    auto xi_of = [&](const Sample& s) { return sgn * s.x - d * std::exp(e.alpha * s.t); };

    std::optional<double> q1_since;
    std::optional<std::size_t> last_q2;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const Sample& s = *ordered[i];
      const double xi = xi_of(s);
      const double y = sgn * s.y;
      const double tol = tol_of(s);
      if (q1_since && (xi < -tol || y < -tol)) {
        throw ViolationFound(s.t, "left Q1 entered at t=" + std::to_string(*q1_since));
      }
      if (!q1_since && xi > tol && y > tol) {
        q1_since = s.t;
        rep.entered_q1 = true;
      }
      if (xi >= -tol && y <= tol) last_q2 = i;
    }
    if (last_q2) {
      rep.touched_q2 = true;
      for (std::size_t i = 0; i <= *last_q2; ++i) {
        const Sample& s = *ordered[i];
        const double tol = tol_of(s);
        if (xi_of(s) < -tol || sgn * s.y > tol) {
          throw ViolationFound(s.t, "sample outside Q2 precedes a Q2 sample");
        }
      }
    }
  }

  // Strip consequence: between two samples inside (-d-, d+), every sample is inside.
  auto u_of = [&](const Sample& s) { return s.x * std::exp(-e.alpha * s.t); };
  std::optional<std::size_t> first, last;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const double u = u_of(*ordered[i]);
    if (u > -dm && u < dp) {
      if (!first) first = i;
      last = i;
    }
  }
  if (first) {
    for (std::size_t i = *first; i <= *last; ++i) {
      const double u = u_of(*ordered[i]);
      const double tol = 1e-9 * (1.0 + std::abs(u));
      if (u <= -dm - tol || u >= dp + tol) {
        throw ViolationFound(ordered[i]->t,
                             "left the strip between two interior samples, u=" + std::to_string(u));
      }
      ++rep.strip_samples;
    }
  }
  return rep;
}

}  // namespace radial
