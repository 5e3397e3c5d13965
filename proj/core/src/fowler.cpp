#include "radial/fowler.hpp"

#include <algorithm>
#include <cmath>

namespace radial {

namespace {

double max_abs_on(const NonlinearitySpec& nl) {
  // Dense sampling, then golden-section polish around the best sample.
  constexpr int kSamples = 4000;
  const double lo = -nl.d_minus;
  const double hi = nl.d_plus;
  const double step = (hi - lo) / kSamples;
  double best_u = lo;
  double best = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double u = lo + step * i;
    const double v = std::abs(nl.f(u));
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  double a = std::max(lo, best_u - step);
  double b = std::min(hi, best_u + step);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (std::abs(nl.f(c)) > std::abs(nl.f(d))) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::max(best, std::abs(nl.f(0.5 * (a + b))));
}

int bridge_power(double slope, double f_inf) {
  const double m = std::abs(slope);
  for (int k = 2; k < 10000; ++k) {
    const double peak = std::pow(static_cast<double>(k) / (k + 1), k) / (k + 1);
    if (m * peak <= f_inf) return k;
  }
  return 10000;
}

}  // namespace

TruncatedNonlinearity::TruncatedNonlinearity(const NonlinearitySpec& base) : base_(base) {
  active_ = base_.has_zeros();
  if (!active_) return;
  f_inf_ = max_abs_on(base_);
  m_plus_ = std::min(0.0, base_.df(base_.d_plus));
  m_minus_ = std::min(0.0, base_.df(-base_.d_minus));
  k_plus_ = bridge_power(m_plus_, f_inf_);
  k_minus_ = bridge_power(m_minus_, f_inf_);
  F_plus_ = base_.F(base_.d_plus);
  F_minus_ = base_.F(-base_.d_minus);
}

double TruncatedNonlinearity::bridge(double s, double m, int k) const {
  return m * s * std::pow(1.0 - s, k);
}

double TruncatedNonlinearity::bridge_primitive(double s, double m, int k) const {
  const double w = 1.0 - s;
  const double k1 = k + 1.0;
  const double k2 = k + 2.0;
  const double full = 1.0 / k1 - 1.0 / k2;
  return m * (full - (std::pow(w, k1) / k1 - std::pow(w, k2) / k2));
}

double TruncatedNonlinearity::f(double u) const {
  if (!active_) return base_.f(u);
  const double dp = base_.d_plus;
  const double dm = base_.d_minus;
  if (u > -dm && u < dp) return base_.f(u);
  if (u >= dp + 1.0 || u <= -dm - 1.0) return 0.0;
  if (u >= dp) return bridge(u - dp, m_plus_, k_plus_);
  return -bridge(-dm - u, m_minus_, k_minus_);
}

double TruncatedNonlinearity::F(double u) const {
  if (!active_) return base_.F(u);
  const double dp = base_.d_plus;
  const double dm = base_.d_minus;
  if (u > -dm && u < dp) return base_.F(u);
  if (u >= dp) return F_plus_ + bridge_primitive(std::min(u - dp, 1.0), m_plus_, k_plus_);
  return F_minus_ + bridge_primitive(std::min(-dm - u, 1.0), m_minus_, k_minus_);
}

Model::Model(ProblemSpec spec)
    : spec_(std::move(spec)), exps_(derive_exponents(spec_)), fbar_(spec_.nonlinearity) {
  varpi_ = effective_varpi(spec_, exps_);
  if (spec_.weight.h_inf * spec_.nonlinearity.b(0.0) > 0.0) {
    critical_ = critical_points(spec_, exps_);
  }
}

PhaseState to_fowler(const RadialState& s, const ExponentSet& exps) {
  PhaseState ps;
  ps.t = std::log(s.r);
  ps.x = s.u * std::pow(s.r, exps.alpha);
  ps.y = spow(s.du, exps.p - 1.0) * std::pow(s.r, exps.beta);
  return ps;
}

RadialState from_fowler(const PhaseState& ps, const ExponentSet& exps) {
  RadialState s;
  s.r = std::exp(ps.t);
  s.u = ps.x * std::exp(-exps.alpha * ps.t);
  s.du = spow(ps.y * std::exp(-exps.beta * ps.t), 1.0 / (exps.p - 1.0));
  return s;
}

namespace {

GValue evaluate_g(const Model& model, const ExponentSet& index, double x, double t, bool truncated,
                  bool with_primitive) {
  const auto& spec = model.spec();
  const auto& nl = spec.nonlinearity;
  const auto& w = spec.weight;
  const auto& fbar = model.fbar();
  const double alpha = index.alpha;
  const double u = x * std::exp(-alpha * t);
  const double r = std::exp(t);
  const bool inside = !truncated || !fbar.active() || (u > -nl.d_minus && u < nl.d_plus);

  GValue out;
  if (inside) {
    // g = h b(u) x|x|^{q-2} e^{c t}; c vanishes at the problem's own index.
    double c = w.delta + alpha * (index.l - nl.q);
    if (std::abs(c) < 1e-13) c = 0.0;
    const double scale = w.h(r) * (c == 0.0 ? 1.0 : std::exp(c * t));
    out.g = scale * nl.b(u) * spow(x, nl.q - 1.0);
    if (with_primitive) out.G = scale * std::pow(std::abs(x), nl.q) * nl.primitive_factor(u);
    return out;
  }
  const double k = w.k(r);
  out.g = k * fbar.f(u) * std::exp(alpha * (index.l - 1.0) * t);
  if (with_primitive) out.G = k * fbar.F(u) * std::exp(alpha * index.l * t);
  return out;
}

}  // namespace

GValue g_eval(const Model& model, const ExponentSet& index, double x, double t, bool truncated) {
  return evaluate_g(model, index, x, t, truncated, true);
}

PhaseState rescale(const PhaseState& ps, const ExponentSet& from, const ExponentSet& to) {
  return {ps.t, ps.x * std::exp((to.alpha - from.alpha) * ps.t),
          ps.y * std::exp((to.beta - from.beta) * ps.t)};
}

Energy energy(const Model& model, const ExponentSet& index, const PhaseState& ps, bool truncated) {
  const double n = index.n;
  const double p = index.p;
  const GValue gv = g_eval(model, index, ps.x, ps.t, truncated);
  Energy e;
  e.H = (n - p) / p * ps.x * ps.y + (p - 1.0) / p * std::pow(std::abs(ps.y), p / (p - 1.0)) + gv.G;
  e.pohozaev = e.H * std::exp(-(index.alpha + index.gamma) * ps.t);
  return e;
}

Energy energy(const Model& model, const PhaseState& ps, bool truncated) {
  return energy(model, model.exps(), ps, truncated);
}

double pohozaev_direct(const Model& model, const RadialState& s, bool truncated) {
  const auto& e = model.exps();
  const double n = e.n;
  const double p = e.p;
  const double F = truncated ? model.fbar().F(s.u) : model.fbar().F_untruncated(s.u);
  const double bracket = (n - p) / p * s.u * spow(s.du, p - 1.0) / s.r +
                         (p - 1.0) / p * std::pow(std::abs(s.du), p) +
                         model.spec().weight.k(s.r) * F;
  return std::pow(s.r, n) * bracket;
}

Field vector_field(const Model& model, double t, double x, double y, bool truncated) {
  const auto& e = model.exps();
  const double g = evaluate_g(model, e, x, t, truncated, false).g;
  return {e.alpha * x + spow(y, 1.0 / (e.p - 1.0)), e.gamma * y - g};
}

}  // namespace radial
