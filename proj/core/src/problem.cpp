#include "radial/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace radial {

std::string_view clause_name(Clause clause) {
  switch (clause) {
    case Clause::kDimension: return "n integer >= 2";
    case Clause::kOrder: return "p in (1,2]";
    case Clause::kDimensionVsOrder: return "n > p";
    case Clause::kGrowth: return "q > 2";
    case Clause::kOuterGrowth: return "Q > q";
    case Clause::kNonlinearityShape: return "b > 0 on (-d-,d+), b(-d-) = b(d+) = 0";
    case Clause::kDelta: return "delta > -p";
    case Clause::kWeightPositive: return "h > 0";
    case Clause::kWeightLimits: return "h0, h_inf in (0,inf)";
    case Clause::kWeightDerivative: return "h'(r) decay conditions";
    case Clause::kVarpi: return "0 < varpi < alpha_l";
    case Clause::kSupercritical: return "l > p*";
    case Clause::kOracleOnly: return "oracle-mode only";
  }
  return "unknown";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

constexpr double kFiniteDiffStep = 1e-6;

}  // namespace

// ---------------------------------------------------------------------------
// NonlinearitySpec

NonlinearitySpec NonlinearitySpec::double_power(double q, double Q) {
  NonlinearitySpec s;
  s.family = NonlinearityFamily::kDoublePower;
  s.q = q;
  s.Q = Q;
  s.d_plus = 1.0;
  s.d_minus = 1.0;
  return s;
}

NonlinearitySpec NonlinearitySpec::pure_power(double q) {
  NonlinearitySpec s;
  s.family = NonlinearityFamily::kPurePower;
  s.q = q;
  s.d_plus = std::numeric_limits<double>::infinity();
  s.d_minus = std::numeric_limits<double>::infinity();
  return s;
}

NonlinearitySpec NonlinearitySpec::custom(double q, std::function<double(double)> b, double d_plus,
                                          double d_minus) {
  NonlinearitySpec s;
  s.family = NonlinearityFamily::kCustom;
  s.q = q;
  s.b_fn = std::move(b);
  s.d_plus = d_plus;
  s.d_minus = d_minus;
  return s;
}

double NonlinearitySpec::b(double u) const {
  switch (family) {
    case NonlinearityFamily::kDoublePower: return 1.0 - std::pow(std::abs(u), Q - q);
    case NonlinearityFamily::kPurePower: return 1.0;
    case NonlinearityFamily::kCustom: return b_fn(u);
  }
  return 0.0;
}

double NonlinearitySpec::db(double u) const {
  switch (family) {
    case NonlinearityFamily::kDoublePower:
      return -(Q - q) * spow(u, Q - q - 1.0);
    case NonlinearityFamily::kPurePower: return 0.0;
    case NonlinearityFamily::kCustom: {
      if (db_fn) return db_fn(u);
      const double h = kFiniteDiffStep * std::max(1.0, std::abs(u));
      return (b_fn(u + h) - b_fn(u - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

double NonlinearitySpec::f(double u) const { return spow(u, q - 1.0) * b(u); }

double NonlinearitySpec::df(double u) const {
  return (q - 1.0) * std::pow(std::abs(u), q - 2.0) * b(u) + spow(u, q - 1.0) * db(u);
}

double NonlinearitySpec::primitive_factor(double u) const {
  switch (family) {
    case NonlinearityFamily::kDoublePower:
      return 1.0 / q - std::pow(std::abs(u), Q - q) / Q;
    case NonlinearityFamily::kPurePower: return 1.0 / q;
    case NonlinearityFamily::kCustom: {
      auto integrand = [&](double s) { return std::pow(s, q - 1.0) * b_fn(u * s); };
      double error = 0.0;
      const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          integrand, 0.0, 1.0, 15, 1e-13, &error);
      if (!std::isfinite(value) || error > 1e-12 + 1e-10 * std::abs(value)) {
        throw QuadratureFailure("primitive of b did not converge at u=" + fmt(u));
      }
      return value;
    }
  }
  return 0.0;
}

double NonlinearitySpec::F(double u) const {
  return std::pow(std::abs(u), q) * primitive_factor(u);
}

// ---------------------------------------------------------------------------
// WeightSpec

WeightSpec WeightSpec::constant(double h0, double delta) {
  WeightSpec w;
  w.family = WeightFamily::kConstant;
  w.h0 = h0;
  w.h_inf = h0;
  w.delta = delta;
  return w;
}

WeightSpec WeightSpec::rational(double h0, double h_inf, double scale, double power, double delta) {
  WeightSpec w;
  w.family = WeightFamily::kRational;
  w.h0 = h0;
  w.h_inf = h_inf;
  w.scale = scale;
  w.power = power;
  w.delta = delta;
  return w;
}

WeightSpec WeightSpec::custom(std::function<double(double)> h, double h0, double h_inf,
                              double delta, double varpi_k) {
  WeightSpec w;
  w.family = WeightFamily::kCustom;
  w.h_fn = std::move(h);
  w.h0 = h0;
  w.h_inf = h_inf;
  w.delta = delta;
  w.varpi_k = varpi_k;
  return w;
}

double WeightSpec::h(double r) const {
  switch (family) {
    case WeightFamily::kConstant: return h0;
    case WeightFamily::kRational: {
      const double sm = std::pow(r / scale, power);
      if (!std::isfinite(sm)) return h_inf;
      return (h0 + h_inf * sm) / (1.0 + sm);
    }
    case WeightFamily::kCustom: return h_fn(r);
  }
  return 0.0;
}

double WeightSpec::dh(double r) const {
  switch (family) {
    case WeightFamily::kConstant: return 0.0;
    case WeightFamily::kRational: {
      const double sm = std::pow(r / scale, power);
      if (!std::isfinite(sm)) return 0.0;
      return (h_inf - h0) * power * sm / (r * (1.0 + sm) * (1.0 + sm));
    }
    case WeightFamily::kCustom: {
      const double hstep = kFiniteDiffStep * r;
      return (h_fn(r + hstep) - h_fn(r - hstep)) / (2.0 * hstep);
    }
  }
  return 0.0;
}

double WeightSpec::k(double r) const { return h(r) * std::pow(r, delta); }

double WeightSpec::varpi_bound() const {
  if (varpi_k) return *varpi_k;
  switch (family) {
    case WeightFamily::kConstant: return std::numeric_limits<double>::infinity();
    case WeightFamily::kRational: return 0.5 * power;
    case WeightFamily::kCustom: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Exponents and validation

ExponentSet ExponentSet::for_index(double n, double p, double l) {
  ExponentSet e;
  e.n = n;
  e.p = p;
  e.l = l;
  e.alpha = p / (l - p);
  e.beta = (e.alpha + 1.0) * (p - 1.0);
  e.gamma = e.beta - (n - 1.0);
  e.p_serrin = p * (n - 1.0) / (n - p);
  e.p_sobolev = n * p / (n - p);
  e.fast_decay_rate = (n - p) / (p - 1.0);
  e.fast_decay_slope_rate = (n - 1.0) / (p - 1.0);
  return e;
}

namespace {

void validate_nonlinearity(const ProblemSpec& spec) {
  const auto& nl = spec.nonlinearity;
  if (!(nl.q > 2.0)) throw InvalidSpec(Clause::kGrowth, "q=" + fmt(nl.q));
  if (nl.family == NonlinearityFamily::kPurePower) {
    if (!spec.oracle_mode) {
      throw InvalidSpec(Clause::kOracleOnly, "pure-power nonlinearity has no zero to truncate at");
    }
    return;
  }
  if (nl.family == NonlinearityFamily::kDoublePower && !(nl.Q > nl.q)) {
    throw InvalidSpec(Clause::kOuterGrowth, "Q=" + fmt(nl.Q) + " q=" + fmt(nl.q));
  }
  if (nl.family == NonlinearityFamily::kCustom && !nl.b_fn) {
    throw InvalidSpec(Clause::kNonlinearityShape, "custom family without b handle");
  }
  if (!(nl.d_plus > 0.0) || !(nl.d_minus > 0.0) || !std::isfinite(nl.d_plus) ||
      !std::isfinite(nl.d_minus)) {
    throw InvalidSpec(Clause::kNonlinearityShape, "d+ and d- must be finite and positive");
  }
  const double end_tol = nl.family == NonlinearityFamily::kCustom ? 1e-9 : 1e-12;
  if (std::abs(nl.b(nl.d_plus)) > end_tol) {
    throw InvalidSpec(Clause::kNonlinearityShape, "b(d+)=" + fmt(nl.b(nl.d_plus)));
  }
  if (std::abs(nl.b(-nl.d_minus)) > end_tol) {
    throw InvalidSpec(Clause::kNonlinearityShape, "b(-d-)=" + fmt(nl.b(-nl.d_minus)));
  }
  constexpr int kSamples = 2000;
  for (int i = 1; i < kSamples; ++i) {
    const double u = -nl.d_minus + (nl.d_plus + nl.d_minus) * i / kSamples;
    const double bu = nl.b(u);
    if (!(bu > 0.0)) throw InvalidSpec(Clause::kNonlinearityShape, "b(" + fmt(u) + ")=" + fmt(bu));
  }
}

void validate_weight(const ProblemSpec& spec) {
  const auto& w = spec.weight;
  if (!(w.delta > -spec.p)) {
    throw InvalidSpec(Clause::kDelta, "delta=" + fmt(w.delta) + " p=" + fmt(spec.p));
  }
  if (!(w.h0 > 0.0) || !(w.h_inf > 0.0) || !std::isfinite(w.h0) || !std::isfinite(w.h_inf)) {
    throw InvalidSpec(Clause::kWeightLimits, "h0=" + fmt(w.h0) + " h_inf=" + fmt(w.h_inf));
  }
  if (w.family == WeightFamily::kRational && (!(w.scale > 0.0) || !(w.power > 0.0))) {
    throw InvalidSpec(Clause::kWeightDerivative, "rational weight needs scale > 0 and power > 0");
  }
  if (w.family == WeightFamily::kCustom && !w.h_fn) {
    throw InvalidSpec(Clause::kWeightPositive, "custom family without h handle");
  }
  // Log-spaced sampling over r in [1e-8, 1e8].
  for (int i = 0; i <= 160; ++i) {
    const double r = std::pow(10.0, -8.0 + 0.1 * i);
    const double hr = w.h(r);
    if (!(hr > 0.0) || !std::isfinite(hr)) {
      throw InvalidSpec(Clause::kWeightPositive, "h(" + fmt(r) + ")=" + fmt(hr));
    }
  }
  if (std::abs(w.h(1e-8) - w.h0) > 1e-3 * w.h0) {
    throw InvalidSpec(Clause::kWeightLimits, "h(1e-8) far from declared h0");
  }
  if (std::abs(w.h(1e8) - w.h_inf) > 1e-3 * w.h_inf) {
    throw InvalidSpec(Clause::kWeightLimits, "h(1e8) far from declared h_inf");
  }
  double worst_small = 0.0;
  for (int i = 0; i <= 60; ++i) {
    const double r = std::pow(10.0, -8.0 + 0.1 * i);
    worst_small = std::max(worst_small, std::abs(w.dh(r) * r));
  }
  if (!(worst_small < 1e6)) {
    throw InvalidSpec(Clause::kWeightDerivative, "h'(r) r unbounded near 0");
  }
}

}  // namespace

double effective_varpi(const ProblemSpec& spec, const ExponentSet& exps) {
  if (spec.varpi) return *spec.varpi;
  return std::min(spec.weight.varpi_bound(), 0.5 * exps.alpha);
}

void validate(const ProblemSpec& spec) { (void)derive_exponents(spec); }

ExponentSet derive_exponents(const ProblemSpec& spec) {
  if (spec.n < 2) throw InvalidSpec(Clause::kDimension, "n=" + std::to_string(spec.n));
  if (!(spec.p > 1.0 && spec.p <= 2.0)) throw InvalidSpec(Clause::kOrder, "p=" + fmt(spec.p));
  if (!(spec.n > spec.p)) {
    throw InvalidSpec(Clause::kDimensionVsOrder, "n=" + std::to_string(spec.n) + " p=" + fmt(spec.p));
  }
  validate_nonlinearity(spec);
  validate_weight(spec);

  const double p = spec.p;
  const double q = spec.nonlinearity.q;
  const double delta = spec.weight.delta;
  const double l = p * (q + delta) / (p + delta);
  const ExponentSet e = ExponentSet::for_index(spec.n, p, l);
  constexpr double kGateTol = 1e-12;
  if (spec.oracle_mode) {
    if (l < e.p_sobolev * (1.0 - kGateTol)) {
      throw InvalidSpec(Clause::kSupercritical,
                        "l=" + fmt(l) + " < p*=" + fmt(e.p_sobolev) + " even in oracle mode");
    }
  } else if (!(l > e.p_sobolev * (1.0 + kGateTol))) {
    throw InvalidSpec(Clause::kSupercritical, "l=" + fmt(l) + " <= p*=" + fmt(e.p_sobolev));
  }

  const double varpi = effective_varpi(spec, e);
  if (!(varpi > 0.0) || !(varpi < e.alpha)) {
    throw InvalidSpec(Clause::kVarpi, "varpi=" + fmt(varpi) + " alpha=" + fmt(e.alpha));
  }
  const auto& w = spec.weight;
  if (w.family != WeightFamily::kConstant) {
    const double far = std::abs(w.dh(1e8) * std::pow(1e8, 1.0 + varpi));
    const double mid = std::abs(w.dh(1e6) * std::pow(1e6, 1.0 + varpi));
    if (far > 1e-6 * std::max(w.h0, w.h_inf) && far >= mid) {
      throw InvalidSpec(Clause::kWeightDerivative,
                        "h'(r) r^(1+varpi) does not decay for varpi=" + fmt(varpi));
    }
  }
  return e;
}

double limiting_g(const ProblemSpec& spec, double x) {
  return spec.weight.h_inf * spec.nonlinearity.b(0.0) * spow(x, spec.nonlinearity.q - 1.0);
}

CriticalPoints critical_points(const ProblemSpec& spec, const ExponentSet& exps) {
  const double c = spec.weight.h_inf * spec.nonlinearity.b(0.0);
  if (!(c > 0.0)) throw DegenerateLimit("h_inf b(0) must be positive, got " + fmt(c));
  const double p = exps.p;
  const double q = spec.nonlinearity.q;
  const double px = std::pow(std::pow(exps.alpha, p - 1.0) * std::abs(exps.gamma) / c, 1.0 / (q - p));
  const double py = -std::pow(exps.alpha * px, p - 1.0);
  CriticalPoints cp;
  cp.plus = {px, py, std::atan2(py, px), std::hypot(px, py)};
  cp.minus = {-px, -py, cp.plus.phi - M_PI, cp.plus.rho};
  return cp;
}

}  // namespace radial
