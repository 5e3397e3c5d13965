#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "common.hpp"

using namespace radial;
using namespace radial::testing;

namespace {

Clause clause_of(const ProblemSpec& s) {
  try {
    derive_exponents(s);
  } catch (const InvalidSpec& e) {
    return e.clause();
  }
  FAIL("spec accepted");
  return Clause::kDimension;
}

}  // namespace

TEST_CASE("exponents of config A") {
  const ExponentSet e = derive_exponents(config_a());
  CHECK(e.l == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(e.alpha == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(e.beta == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(e.gamma == doctest::Approx(-0.6).epsilon(1e-15));
  CHECK(e.p_serrin == doctest::Approx(4.0));
  CHECK(e.p_sobolev == doctest::Approx(6.0));
}

TEST_CASE("critical exponent in oracle mode") {
  const ExponentSet e = derive_exponents(oracle_b());
  CHECK(e.l == doctest::Approx(4.0));
  CHECK(e.alpha == doctest::Approx(1.0));
  CHECK(e.beta == doctest::Approx(2.0));
  CHECK(e.gamma == doctest::Approx(-1.0));
  CHECK(std::abs(e.alpha + e.gamma) < 1e-15);

  ProblemSpec s = oracle_b();
  s.oracle_mode = false;
  CHECK_THROWS_AS(derive_exponents(s), InvalidSpec);
}

TEST_CASE("subcritical index is rejected") {
  ProblemSpec s = config_a();
  s.nonlinearity = NonlinearitySpec::double_power(5.0, 9.0);
  s.weight.delta = 1.0;
  CHECK(clause_of(s) == Clause::kSupercritical);
}

TEST_CASE("each hypothesis clause is named") {
  ProblemSpec s = config_a();
  s.n = 1;
  CHECK(clause_of(s) == Clause::kDimension);
  s = config_a();
  s.p = 2.5;
  CHECK(clause_of(s) == Clause::kOrder);
  s = config_a();
  s.n = 2;
  CHECK(clause_of(s) == Clause::kDimensionVsOrder);
  s = config_a();
  s.nonlinearity = NonlinearitySpec::double_power(7.0, 6.0);
  CHECK(clause_of(s) == Clause::kOuterGrowth);
  s = config_a();
  s.weight.delta = -2.0;
  CHECK(clause_of(s) == Clause::kDelta);
  s = config_a();
  s.weight = WeightSpec::constant(-1.0);
  CHECK(clause_of(s) == Clause::kWeightLimits);
  s = config_a();
  s.nonlinearity = NonlinearitySpec::pure_power(7.0);
  CHECK(clause_of(s) == Clause::kOracleOnly);
  s = config_a();
  s.varpi = -0.1;
  CHECK(clause_of(s) == Clause::kVarpi);

  try {
    s = config_a();
    s.p = 2.5;
    derive_exponents(s);
  } catch (const InvalidSpec& e) {
    CHECK(std::string(e.what()).find(clause_name(Clause::kOrder)) != std::string::npos);
  }
}

TEST_CASE("critical points of config A") {
  const Model& m = model_a();
  REQUIRE(m.critical());
  const auto& cp = *m.critical();
  CHECK(cp.plus.x == doctest::Approx(std::pow(0.24, 0.2)).epsilon(1e-13));
  CHECK(cp.plus.x == doctest::Approx(0.7517).epsilon(1e-4));
  CHECK(cp.plus.y == doctest::Approx(-0.300679).epsilon(1e-5));
  CHECK(cp.minus.x == -cp.plus.x);
  CHECK(cp.minus.y == -cp.plus.y);
}

TEST_CASE("critical points of oracle B") {
  const Model& m = model_b();
  REQUIRE(m.critical());
  CHECK(m.critical()->plus.x == doctest::Approx(1.0));
  CHECK(m.critical()->plus.y == doctest::Approx(-1.0));
  CHECK(m.critical()->minus.x == doctest::Approx(-1.0));
  CHECK(m.critical()->minus.y == doctest::Approx(1.0));
}

TEST_CASE("property: alpha + gamma sign tracks l against p*") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> nd(3, 8);
  std::uniform_real_distribution<double> pd(1.1, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int accepted = 0;
  for (int i = 0; i < 400 && accepted < 100; ++i) {
    ProblemSpec s;
    s.n = nd(rng);
    s.p = pd(rng);
    const double ps = s.n * s.p / (s.n - s.p);
    const double q = std::max(2.05, ps * (0.6 + 1.2 * unit(rng)));
    s.nonlinearity = NonlinearitySpec::double_power(q, q + 0.5 + unit(rng));
    s.weight = WeightSpec::constant(0.5 + unit(rng), -0.5 * s.p * unit(rng));
    const double l = s.p * (q + s.weight.delta) / (s.p + s.weight.delta);
    const ExponentSet idx = ExponentSet::for_index(s.n, s.p, l);
    CHECK((idx.alpha + idx.gamma < 0.0) == (l > idx.p_sobolev));
    if (l > ps * (1.0 + 1e-9)) {
      const ExponentSet e = derive_exponents(s);
      CHECK(e.alpha + e.gamma < 0.0);
      ++accepted;
    } else {
      CHECK(clause_of(s) == Clause::kSupercritical);
    }
  }
  CHECK(accepted == 100);
}

TEST_CASE("constant weight gives l = q") {
  for (double q : {6.5, 7.0, 11.5}) {
    ProblemSpec s = config_a();
    s.nonlinearity = NonlinearitySpec::double_power(q, q + 2.0);
    CHECK(derive_exponents(s).l == doctest::Approx(q).epsilon(1e-15));
  }
}

TEST_CASE("critical point residual") {
  for (const ProblemSpec& s : {config_a(), oracle_b()}) {
    const ExponentSet e = derive_exponents(s);
    const CriticalPoints cp = critical_points(s, e);
    for (const CriticalPoint& P : {cp.plus, cp.minus}) {
      const double lhs = limiting_g(s, P.x);
      const double rhs = spow(P.x, e.p - 1.0) * std::pow(e.alpha, e.p - 1.0) * std::abs(e.gamma);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::pow(std::abs(P.x), s.nonlinearity.q - 1.0)));
    }
  }
}

TEST_CASE("rational weight and custom handles") {
  ProblemSpec s = config_a();
  s.weight = WeightSpec::rational(1.0, 2.0, 1.0, 2.0);
  const Model m(s);
  CHECK(m.spec().weight.h(0.0) == doctest::Approx(1.0));
  CHECK(m.spec().weight.h(1e8) == doctest::Approx(2.0));
  CHECK(m.varpi() > 0.0);
  CHECK(m.varpi() < m.exps().alpha);

  ProblemSpec c = config_a();
  c.nonlinearity = NonlinearitySpec::custom(7.0, [](double u) { return 1.0 - u * u; }, 1.0, 1.0);
  const Model mc(c);
  CHECK(mc.exps().l == doctest::Approx(7.0));

  ProblemSpec bad = config_a();
  bad.nonlinearity = NonlinearitySpec::custom(7.0, [](double u) { return 0.5 - u * u; }, 1.0, 1.0);
  CHECK(clause_of(bad) == Clause::kNonlinearityShape);
}
