#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radial/manifolds.hpp"
#include "radial/oracle.hpp"

namespace radial::testing {

/// n=3, p=2, f = u^7 - u^9 (d+ = d- = 1), k = 1.
inline ProblemSpec config_a() {
  ProblemSpec s;
  s.n = 3;
  s.p = 2.0;
  s.nonlinearity = NonlinearitySpec::double_power(7.0, 9.0);
  s.weight = WeightSpec::constant(1.0);
  return s;
}

/// n=4, p=2, f = u^3, k = 1: the critical Hamiltonian case.
inline ProblemSpec oracle_b() {
  ProblemSpec s;
  s.n = 4;
  s.p = 2.0;
  s.nonlinearity = NonlinearitySpec::pure_power(4.0);
  s.weight = WeightSpec::constant(1.0);
  s.oracle_mode = true;
  return s;
}

/// Supercritical pure power, n=3, f = u^6 (l = 7 > p* = 6), untruncated.
inline ProblemSpec pure_supercritical() {
  ProblemSpec s = oracle_b();
  s.n = 3;
  s.nonlinearity = NonlinearitySpec::pure_power(7.0);
  return s;
}

inline const Model& model_a() {
  static const Model m(config_a());
  return m;
}

inline const Model& model_b() {
  static const Model m(oracle_b());
  return m;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Radial value u at a trajectory sample.
inline double profile_u(const Model& m, const Sample& s) {
  return from_fowler({s.t, s.x, s.y}, m.exps()).u;
}

/// Sequence run shared by the tests that need A_k; computed once per process.
inline const SequenceReport& sequence_a() {
  static const SequenceReport rep = [] {
    SequenceOptions o;
    o.k_max = 2;
    o.jobs = 4;
    return find_sequences(model_a(), o);
  }();
  return rep;
}

}  // namespace radial::testing
