#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "common.hpp"

using namespace radial;
using namespace radial::testing;

TEST_CASE("to_fowler at r = 1") {
  const ExponentSet e2 = ExponentSet::for_index(3, 2.0, 7.0);
  const PhaseState a = to_fowler({1.0, 2.0, -4.0}, e2);
  CHECK(a.t == 0.0);
  CHECK(a.x == doctest::Approx(2.0));
  CHECK(a.y == doctest::Approx(-4.0));

  const ExponentSet e15 = ExponentSet::for_index(3, 1.5, 7.0);
  const PhaseState b = to_fowler({1.0, 2.0, -4.0}, e15);
  CHECK(b.x == doctest::Approx(2.0));
  CHECK(b.y == doctest::Approx(-2.0));
  const RadialState back = from_fowler(b, e15);
  CHECK(back.du == doctest::Approx(-4.0));
}

TEST_CASE("property: fowler round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lr(std::log(1e-6), std::log(1e6));
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  for (double p : {2.0, 1.5, 1.2}) {
    const ExponentSet e = ExponentSet::for_index(3, p, 8.0);
    for (int i = 0; i < 500; ++i) {
      const RadialState s{std::exp(lr(rng)), val(rng), val(rng)};
      const RadialState r = from_fowler(to_fowler(s, e), e);
      CHECK(std::abs(r.r - s.r) <= 1e-14 * s.r);
      CHECK(std::abs(r.u - s.u) <= 1e-14 * std::abs(s.u));
      CHECK(std::abs(r.du - s.du) <= 1e-14 * std::abs(s.du));
    }
  }
  const RadialState s{std::exp(1.0), 0.3, -0.2};
  const RadialState r = from_fowler(to_fowler(s, model_a().exps()), model_a().exps());
  CHECK(std::abs(r.u - s.u) <= 1e-14 * std::abs(s.u));
  CHECK(std::abs(r.du - s.du) <= 1e-14 * std::abs(s.du));
}

TEST_CASE("g_eval examples, config A") {
  const Model& m = model_a();
  CHECK(g_eval(m, 0.5, 0.0).g == doctest::Approx(0.01171875).epsilon(1e-14));
  CHECK(g_eval(m, 2.5, 0.0).g == 0.0);
  CHECK(g_eval(m, 1.0, 0.0, false).G == doctest::Approx(2.0 / 63.0).epsilon(1e-14));
  CHECK(g_eval(m, 1.0, 0.0, false).G == doctest::Approx(0.0317460).epsilon(1e-6));
}

TEST_CASE("truncated nonlinearity shape") {
  const TruncatedNonlinearity& fb = model_a().fbar();
  REQUIRE(fb.active());
  double max_in = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double u = -1.0 + 2.0 * i / 4000.0;
    CHECK(fb.f(u) == fb.f_untruncated(u));
    max_in = std::max(max_in, std::abs(fb.f(u)));
  }
  double max_all = 0.0;
  for (int i = 0; i <= 8000; ++i) {
    const double u = -3.0 + 6.0 * i / 8000.0;
    max_all = std::max(max_all, std::abs(fb.f(u)));
    if (u >= 1.0 && u <= 2.0) CHECK(fb.f(u) <= 0.0);
    if (u >= -2.0 && u <= -1.0) CHECK(fb.f(u) >= 0.0);
    if (std::abs(u) >= 2.0) CHECK(fb.f(u) == 0.0);
  }
  CHECK(max_all <= max_in * (1.0 + 1e-12));
}

TEST_CASE("truncation joins are C1") {
  const TruncatedNonlinearity& fb = model_a().fbar();
  const double h = 1e-6;
  for (double u0 : {1.0, 2.0, -1.0, -2.0}) {
    CHECK(std::abs(fb.f(u0 + h) - fb.f(u0 - h)) < 1e-5);
    const double left = (fb.f(u0) - fb.f(u0 - h)) / h;
    const double right = (fb.f(u0 + h) - fb.f(u0)) / h;
    CHECK(std::abs(left - right) < 1e-4);
  }
  CHECK(check_truncation_joins(model_a()).passed);
}

TEST_CASE("primitive of the truncated nonlinearity") {
  const TruncatedNonlinearity& fb = model_a().fbar();
  for (double u : {-2.5, -1.5, -0.7, 0.3, 1.0, 1.4, 1.9, 3.0}) {
    const int n = 20000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = u * i / n;
      const double b = u * (i + 1) / n;
      s += (b - a) / 6.0 * (fb.f(a) + 4.0 * fb.f(0.5 * (a + b)) + fb.f(b));
    }
    CHECK(fb.F(u) == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("rescale examples") {
  const Model& m = model_a();
  const ExponentSet to = ExponentSet::for_index(3, 2.0, 6.0);
  const PhaseState r = rescale({1.0, 1.0, 0.3}, m.exps(), to);
  CHECK(r.x == doctest::Approx(std::exp(0.1)).epsilon(1e-14));
  CHECK(r.x == doctest::Approx(1.105171).epsilon(1e-6));

  const PhaseState id = rescale({0.0, 0.7, -0.2}, m.exps(), to);
  CHECK(id.x == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(id.y == doctest::Approx(-0.2).epsilon(1e-15));

  const PhaseState same = rescale({2.0, 0.7, -0.2}, m.exps(), m.exps());
  CHECK(same.x == 0.7);
  CHECK(same.y == -0.2);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const PhaseState ps{5.0 * u(rng), u(rng), u(rng)};
    const PhaseState back = rescale(rescale(ps, m.exps(), to), to, m.exps());
    CHECK(std::abs(back.x - ps.x) <= 1e-14 * std::abs(ps.x));
    CHECK(std::abs(back.y - ps.y) <= 1e-14 * std::abs(ps.y));
  }
}

TEST_CASE("property: g and G rescaling identities") {
  const Model& m = model_a();
  const ExponentSet& l = m.exps();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(-1.5, 1.5), ts(-4.0, 4.0), ls(4.5, 18.0);
  for (int i = 0; i < 300; ++i) {
    const double x = xs(rng), t = ts(rng);
    const ExponentSet L = ExponentSet::for_index(3, 2.0, ls(rng));
    const double xl = x * std::exp(-(L.alpha - l.alpha) * t);
    const double gscale = std::exp((L.alpha * (L.l - 1.0) - l.alpha * (l.l - 1.0)) * t);
    const double Gscale = std::exp((L.alpha * L.l - l.alpha * l.l) * t);
    const GValue gL = g_eval(m, L, x, t);
    const GValue gl = g_eval(m, l, xl, t);
    CHECK(std::abs(gL.g - gl.g * gscale) <= 1e-10 * std::max(std::abs(gL.g), 1e-300));
    CHECK(std::abs(gL.G - gl.G * Gscale) <= 1e-10 * std::max(std::abs(gL.G), 1e-300));
  }
}

TEST_CASE("energy examples") {
  const Model& b = model_b();
  CHECK(std::abs(energy(b, {0.0, std::sqrt(2.0), -std::sqrt(2.0)}).H) < 1e-15);
  CHECK(energy(b, {0.0, 1.0, -1.0}).H == doctest::Approx(-0.25));
  CHECK(energy(b, {0.0, -1.0, 1.0}).H == doctest::Approx(-0.25));

  const Model& a = model_a();
  CHECK(energy(a, {0.0, 1.0, -1.0}, false).H == doctest::Approx(2.0 / 63.0).epsilon(1e-14));
  for (double t : {-5.0, 0.0, 3.0, 50.0}) {
    CHECK(energy(a, {t, 0.0, 0.0}).H == 0.0);
    CHECK(energy(b, {t, 0.0, 0.0}).H == 0.0);
  }
}

TEST_CASE("property: Pohozaev function through H matches the direct form") {
  const Model& m = model_a();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.2, 1.2), t(-6.0, 6.0);
  for (int i = 0; i < 500; ++i) {
    const PhaseState ps{t(rng), u(rng), u(rng)};
    const double via_h = energy(m, ps).pohozaev;
    const double direct = pohozaev_direct(m, from_fowler(ps, m.exps()));
    CHECK(std::abs(via_h - direct) <= 1e-8 * (1.0 + std::abs(direct)));
  }
}

namespace {

void check_calG_nondecreasing(const Model& m) {
  double prev = -1.0;
  int drops = 0;
  double first_drop = 0.0;
  for (int i = 1; i <= 2000; ++i) {
    const double x = i / 2000.0;
    const double calG = g_eval(m, x, 0.0, false).G / (x * std::pow(x, m.spec().p - 1.0));
    if (calG < prev - 1e-15 && drops++ == 0) first_drop = x;
    prev = calG;
  }
  INFO("first decrease at x=" << first_drop);
  CHECK(drops == 0);
}

}  // namespace

TEST_CASE("property: G/(x|x|^(p-1)) is nondecreasing on (0, d+], pure power") {
  check_calG_nondecreasing(model_b());
  check_calG_nondecreasing(Model(pure_supercritical()));
}

TEST_CASE("property: G/(x|x|^(p-1)) is nondecreasing on (0, d+], config A") {
  check_calG_nondecreasing(model_a());
}

TEST_CASE("vector field of the log-radius system") {
  const Model& a = model_a();
  const Field f = vector_field(a, 0.0, 0.5, -0.25);
  CHECK(f.dx == doctest::Approx(0.4 * 0.5 - 0.25));
  CHECK(f.dy == doctest::Approx(-0.6 * -0.25 - 0.01171875));
  const Field o = vector_field(a, 2.0, 0.0, 0.0);
  CHECK(o.dx == 0.0);
  CHECK(o.dy == 0.0);
}
