#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "radial/errors.hpp"

namespace radial {

/// sign(v) |v|^e, exactly zero at v = 0.
inline double spow(double v, double e) {
  if (v == 0.0) return 0.0;
  return v > 0.0 ? std::pow(v, e) : -std::pow(-v, e);
}

enum class NonlinearityFamily { kDoublePower, kPurePower, kCustom };

/// f(u) = u |u|^(q-2) b(u), with b > 0 on (-d_minus, d_plus) and vanishing at both ends.
struct NonlinearitySpec {
  NonlinearityFamily family = NonlinearityFamily::kDoublePower;
  double q = 0.0;
  double Q = 0.0;  // double-power only: f(u) = u|u|^(q-2) - u|u|^(Q-2)
  double d_plus = 1.0;
  double d_minus = 1.0;
  std::function<double(double)> b_fn;   // custom only
  std::function<double(double)> db_fn;  // custom, optional; finite differences otherwise

  static NonlinearitySpec double_power(double q, double Q);
  /// Oracle-only: no zeros of b, hence no truncation.
  static NonlinearitySpec pure_power(double q);
  static NonlinearitySpec custom(double q, std::function<double(double)> b, double d_plus,
                                 double d_minus);

  double b(double u) const;
  double db(double u) const;
  double f(double u) const;
  double df(double u) const;
  /// Phi(u) with F(u) = |u|^q Phi(u), F the primitive of f vanishing at 0.
  double primitive_factor(double u) const;
  double F(double u) const;
  bool has_zeros() const { return family != NonlinearityFamily::kPurePower; }
};

enum class WeightFamily { kConstant, kRational, kCustom };

/// k(r) = h(r) r^delta.
struct WeightSpec {
  WeightFamily family = WeightFamily::kConstant;
  double delta = 0.0;
  double h0 = 1.0;
  double h_inf = 1.0;
  double scale = 1.0;  // rational: h(r) = (h0 + h_inf s^m) / (1 + s^m), s = r / scale
  double power = 2.0;
  std::function<double(double)> h_fn;  // custom only
  /// Decay constant from the weight hypothesis; +inf when h is eventually constant.
  std::optional<double> varpi_k;

  static WeightSpec constant(double h0, double delta = 0.0);
  static WeightSpec rational(double h0, double h_inf, double scale, double power, double delta = 0.0);
  static WeightSpec custom(std::function<double(double)> h, double h0, double h_inf, double delta,
                           double varpi_k);

  double h(double r) const;
  double dh(double r) const;
  double k(double r) const;
  double varpi_bound() const;
};

struct ProblemSpec {
  int n = 3;
  double p = 2.0;
  NonlinearitySpec nonlinearity;
  WeightSpec weight;
  std::optional<double> varpi;
  /// Allows l = p* and the untruncated pure-power family; used only for closed-form checks.
  bool oracle_mode = false;
};

struct ExponentSet {
  double n = 0.0;
  double p = 0.0;
  double l = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double p_serrin = 0.0;
  double p_sobolev = 0.0;
  double fast_decay_rate = 0.0;
  double fast_decay_slope_rate = 0.0;

  /// Constants of the log-radius transformation at an arbitrary index l > p_serrin.
  static ExponentSet for_index(double n, double p, double l);
};

struct CriticalPoint {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double rho = 0.0;
};

struct CriticalPoints {
  CriticalPoint plus;
  CriticalPoint minus;
};

/// Validates hypotheses on (n, p, f, k); throws InvalidSpec naming the first violated clause.
void validate(const ProblemSpec& spec);

ExponentSet derive_exponents(const ProblemSpec& spec);

/// Nontrivial equilibria of the limiting autonomous system as t -> +inf.
CriticalPoints critical_points(const ProblemSpec& spec, const ExponentSet& exps);

/// Value of the limiting nonlinearity h_inf b(0) x|x|^(q-2).
double limiting_g(const ProblemSpec& spec, double x);

double effective_varpi(const ProblemSpec& spec, const ExponentSet& exps);

}  // namespace radial
