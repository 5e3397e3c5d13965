#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"

using namespace radial;
using namespace radial::testing;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  return g;
}

std::vector<double> unstable_grid() {
  std::vector<double> g = log_grid(1e-4, 0.9, 100);
  for (double s = 1.0; s <= 3.0 + 1e-12; s += 0.05) g.push_back(1.0 - std::pow(10.0, -s));
  return g;
}

ManifoldOptions opts() {
  ManifoldOptions o;
  o.jobs = 4;
  return o;
}

/// Distance from a point to the polygonal curve restricted to a window of rho.
double distance_to(const ManifoldCurve& c, double x, double y) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const double ax = c.points[i - 1].state.x, ay = c.points[i - 1].state.y;
    const double bx = c.points[i].state.x, by = c.points[i].state.y;
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    const double s = len2 > 0.0 ? std::clamp(((x - ax) * dx + (y - ay) * dy) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::hypot(ax + s * dx - x, ay + s * dy - y));
  }
  return best;
}

}  // namespace

TEST_CASE("kind names and base angles") {
  for (auto k : {ManifoldKind::kUnstablePlus, ManifoldKind::kUnstableMinus,
                 ManifoldKind::kStablePlus, ManifoldKind::kStableMinus}) {
    CHECK(parse_manifold_kind(manifold_name(k)) == k);
  }
  CHECK_THROWS_AS(parse_manifold_kind("sideways"), std::invalid_argument);
  CHECK(manifold_base_angle(ManifoldKind::kUnstableMinus) == doctest::Approx(-kPi));
  CHECK(manifold_base_angle(ManifoldKind::kStableMinus) == doctest::Approx(-1.5 * kPi));
}

TEST_CASE("unstable slice is tangent to the x-axis near the origin") {
  const ManifoldCurve c = trace_manifold(model_a(), ManifoldKind::kUnstablePlus, 2.0,
                                         log_grid(1e-7, 1e-3, 5), opts());
  REQUIRE(c.points.size() >= 5);
  CHECK(std::abs(c.points.front().theta) < 1e-3);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    CHECK(std::abs(c.points[i].theta) >= std::abs(c.points[i - 1].theta) - 1e-12);
  }
  const ManifoldCurve m = trace_manifold(model_a(), ManifoldKind::kUnstableMinus, 2.0,
                                         log_grid(1e-7, 1e-3, 5), opts());
  CHECK(m.points.front().theta == doctest::Approx(-kPi).epsilon(1e-3));
}

TEST_CASE("stable slice is tangent to the stable direction near the origin") {
  const ManifoldCurve c = trace_manifold(model_a(), ManifoldKind::kStablePlus, 3.0,
                                         log_grid(1e-7, 1e-4, 4), opts());
  // Fast-decay states satisfy y = -(n-2) x, at angle -pi/2 + atan(n-2) from the y-axis frame.
  const double expected = -kPi / 2.0 - stable_tangent_offset(model_a().exps());
  CHECK(c.points.front().theta == doctest::Approx(expected).epsilon(1e-3));
  CHECK(c.points.front().theta > -kPi / 2.0);
}

TEST_CASE("unstable and stable angle bounds") {
  const ManifoldCurve u = trace_manifold(model_a(), ManifoldKind::kUnstablePlus, 3.0, unstable_grid(), opts());
  for (const auto& p : u.points) CHECK(p.theta <= 1e-12);
  const ManifoldCurve um = trace_manifold(model_a(), ManifoldKind::kUnstableMinus, 3.0, unstable_grid(), opts());
  for (const auto& p : um.points) CHECK(p.theta <= -kPi + 1e-12);
  const ManifoldCurve s = trace_manifold(model_a(), ManifoldKind::kStablePlus, 3.0, log_grid(1e-3, 1e4, 150), opts());
  for (const auto& p : s.points) CHECK(p.theta > -kPi / 2.0);
  const ManifoldCurve sm = trace_manifold(model_a(), ManifoldKind::kStableMinus, 3.0, log_grid(1e-3, 1e4, 150), opts());
  for (const auto& p : sm.points) CHECK(p.theta > -1.5 * kPi);
}

TEST_CASE("stable slice spirals past 2 pi + pi/2") {
  const ManifoldCurve s = trace_manifold(model_a(), ManifoldKind::kStablePlus, 3.0,
                                         log_grid(1e-3, 1e4, 150), opts());
  double top = -1e300;
  for (const auto& p : s.points) top = std::max(top, p.theta);
  CHECK(top > 2.0 * kPi + kPi / 2.0);
}

TEST_CASE("angle continuity along the parameter") {
  const ManifoldCurve s = trace_manifold(model_a(), ManifoldKind::kStablePlus, 3.0,
                                         log_grid(1e-3, 1e4, 40), opts());
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    CHECK(std::abs(s.points[i].theta - s.points[i - 1].theta) < kPi / 4.0);
  }
  ManifoldOptions strict = opts();
  strict.max_refinements = 0;
  CHECK_THROWS_AS(trace_manifold(model_a(), ManifoldKind::kStablePlus, 3.0, {1e-3, 1e4}, strict),
                  GridTooCoarse);
}

TEST_CASE("property: parameter angle equals time angle") {
  const ManifoldCurve u = trace_manifold(model_a(), ManifoldKind::kUnstablePlus, 4.0, unstable_grid(), opts());
  for (const auto& p : u.points) CHECK(std::abs(p.theta - p.theta_time) <= 0.05);
  const ManifoldCurve s = trace_manifold(model_a(), ManifoldKind::kStablePlus, 4.0, log_grid(1e-3, 1e4, 150), opts());
  for (const auto& p : s.points) CHECK(std::abs(p.theta - p.theta_time) <= 0.05);
}

TEST_CASE("property: membership propagates along the flow") {
  StopPolicy pol;
  pol.origin_capture_terminal = pol.p_capture_terminal = pol.strip_exit_terminal = false;
  for (double d : {0.1, 0.5, 0.8, 0.95}) {
    const CurvePoint q = manifold_point(model_a(), ManifoldKind::kUnstablePlus, 2.0, d, opts());
    const Sample moved = integrate_to(model_a(), q.state, 3.0, pol, q.theta).back();
    const CurvePoint direct = manifold_point(model_a(), ManifoldKind::kUnstablePlus, 3.0, d, opts());
    CHECK(std::hypot(moved.x - direct.state.x, moved.y - direct.state.y) <= 1e-6);
    CHECK(moved.theta == doctest::Approx(direct.theta).epsilon(1e-6));
  }
  for (double L : {0.01, 1.0, 10.0}) {
    const CurvePoint q = manifold_point(model_a(), ManifoldKind::kStablePlus, 4.0, L, opts());
    const Sample moved = integrate_to(model_a(), q.state, 3.0, pol, q.theta).back();
    const CurvePoint direct = manifold_point(model_a(), ManifoldKind::kStablePlus, 3.0, L, opts());
    CHECK(std::hypot(moved.x - direct.state.x, moved.y - direct.state.y) <= 1e-6);
  }
}

TEST_CASE("property: stable slices converge as tau grows") {
  std::vector<double> gaps;
  for (double tau : {2.0, 4.0, 6.0}) {
    const auto grid = log_grid(1e-4, 1e4, 400);
    const ManifoldCurve near = trace_manifold(model_a(), ManifoldKind::kStablePlus, tau, grid, opts());
    const ManifoldCurve far = trace_manifold(model_a(), ManifoldKind::kStablePlus, tau + 5.0, grid, opts());
    double worst = 0.0;
    for (const auto& p : far.points) {
      if (p.rho < 0.05 || p.rho > 0.5 || p.theta > 0.0) continue;
      worst = std::max(worst, distance_to(near, p.state.x, p.state.y));
    }
    gaps.push_back(worst);
  }
  INFO("gaps " << gaps[0] << " " << gaps[1] << " " << gaps[2]);
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
}

TEST_CASE("stable branch bookkeeping") {
  using K = ManifoldKind;
  CHECK(stable_branch_for(K::kUnstablePlus, 0) == std::pair{K::kStablePlus, 0});
  CHECK(stable_branch_for(K::kUnstablePlus, 1) == std::pair{K::kStableMinus, 0});
  CHECK(stable_branch_for(K::kUnstablePlus, 2) == std::pair{K::kStablePlus, 1});
  CHECK(stable_branch_for(K::kUnstableMinus, 0) == std::pair{K::kStableMinus, 0});
  CHECK(stable_branch_for(K::kUnstableMinus, 1) == std::pair{K::kStablePlus, 1});
}

TEST_CASE("intersections agree with the shooting sequence") {
  const SequenceReport& rep = sequence_a();
  const double tau = 6.0;
  const auto sgrid = log_grid(1e-3, 1e4, 150);
  const ManifoldCurve u = trace_manifold(model_a(), ManifoldKind::kUnstablePlus, tau, unstable_grid(), opts());
  const ManifoldCurve sp = trace_manifold(model_a(), ManifoldKind::kStablePlus, tau, sgrid, opts());
  const ManifoldCurve sm = trace_manifold(model_a(), ManifoldKind::kStableMinus, tau, sgrid, opts());
  const auto recs = intersect(model_a(), u, sp, sm, 1, opts());
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    INFO("k=" << r.k << " d_at=" << r.d_at << " A=" << rep.A.values[r.k]);
    CHECK(std::abs(r.d_at - rep.A.values[r.k]) <= 10.0 * 1e-12);
    CHECK(r.residual <= 1e-6 * (1.0 + std::hypot(r.R_point.x, r.R_point.y)));
  }
}

TEST_CASE("no winding means no crossing") {
  const ManifoldCurve u = trace_manifold(model_a(), ManifoldKind::kUnstablePlus, 3.0, unstable_grid(), opts());
  const auto tiny = log_grid(1e-6, 1e-5, 5);
  const ManifoldCurve sp = trace_manifold(model_a(), ManifoldKind::kStablePlus, 3.0, tiny, opts());
  const ManifoldCurve sm = trace_manifold(model_a(), ManifoldKind::kStableMinus, 3.0, tiny, opts());
  CHECK_THROWS_AS(intersect(model_a(), u, sp, sm, 0, opts()), NoCrossing);
}

TEST_CASE("invariance on the constant solution") {
  StopPolicy pol;
  pol.origin_capture_terminal = pol.p_capture_terminal = pol.strip_exit_terminal = false;
  const Trajectory tr = integrate_to(model_a(), {0.0, 1.0, 0.0}, 2.0, pol);
  CHECK_NOTHROW(invariance_check(tr, model_a()));
}

TEST_CASE("ground-state witness stays inside the strip") {
  const ShotOutcome& w = sequence_a().A.witnesses[0];
  const InvarianceReport rep = invariance_check(*w.trajectory, model_a());
  CHECK(rep.strip_samples == rep.samples);
  for (const Sample& s : w.trajectory->samples) {
    const double u = profile_u(model_a(), s);
    CHECK(u > -1.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("Q1 is forward invariant") {
  StopPolicy pol;
  pol.origin_capture_terminal = pol.p_capture_terminal = pol.strip_exit_terminal = false;
  const Trajectory tr = integrate_to(model_a(), {0.0, 1.2, 0.1}, 1.0, pol);
  const InvarianceReport rep = invariance_check(tr, model_a());
  CHECK(rep.entered_q1);
  double prev = -1.0;
  for (const Sample& s : tr.samples) {
    const double xi = s.x - std::exp(model_a().exps().alpha * s.t);
    CHECK(xi > prev);
    prev = xi;
  }
}

TEST_CASE("a forged exit from Q1 is reported") {
  Trajectory tr;
  tr.samples.push_back({0.0, 1.2, 0.1, 0.0, 0.0, 0.0});
  tr.samples.push_back({0.1, 0.5, 0.1, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(invariance_check(tr, model_a()), ViolationFound);
}
