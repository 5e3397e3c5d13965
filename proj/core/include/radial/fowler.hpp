#pragma once

#include <optional>

#include "radial/problem.hpp"

namespace radial {

/// Point (x, y) of the planar log-radius system at t = ln r.
struct PhaseState {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct RadialState {
  double r = 1.0;
  double u = 0.0;
  double du = 0.0;
};

/// f truncated outside (-d_minus, d_plus).
///
/// On the band [d+, d+ + 1] the bridge is m s (1-s)^k with s = u - d+ and m = f'(d+) <= 0,
/// mirrored on [-d- - 1, -d-]. k = 2 is the cubic Hermite join; larger k is used when the
/// cubic overshoots max |f| on [-d-, d+]. The bridge is C^1 at all four junctions and
/// has a closed-form primitive.
class TruncatedNonlinearity {
 public:
  explicit TruncatedNonlinearity(const NonlinearitySpec& base);

  double f(double u) const;
  double F(double u) const;
  /// u |u|^(q-2) b(u) extended without truncation.
  double f_untruncated(double u) const { return base_.f(u); }
  double F_untruncated(double u) const { return base_.F(u); }

  bool active() const { return active_; }
  double f_inf() const { return f_inf_; }
  int bridge_power_plus() const { return k_plus_; }
  int bridge_power_minus() const { return k_minus_; }
  double slope_plus() const { return m_plus_; }
  double slope_minus() const { return m_minus_; }
  const NonlinearitySpec& base() const { return base_; }

 private:
  double bridge(double s, double m, int k) const;
  double bridge_primitive(double s, double m, int k) const;

  NonlinearitySpec base_;
  bool active_ = false;
  double f_inf_ = 0.0;
  double m_plus_ = 0.0;
  double m_minus_ = 0.0;
  int k_plus_ = 2;
  int k_minus_ = 2;
  double F_plus_ = 0.0;
  double F_minus_ = 0.0;
};

/// Validated problem together with everything derived from it. Immutable and shareable.
class Model {
 public:
  explicit Model(ProblemSpec spec);

  const ProblemSpec& spec() const { return spec_; }
  const ExponentSet& exps() const { return exps_; }
  const TruncatedNonlinearity& fbar() const { return fbar_; }
  const std::optional<CriticalPoints>& critical() const { return critical_; }
  double varpi() const { return varpi_; }
  double d_plus() const { return spec_.nonlinearity.d_plus; }
  double d_minus() const { return spec_.nonlinearity.d_minus; }

 private:
  ProblemSpec spec_;
  ExponentSet exps_;
  TruncatedNonlinearity fbar_;
  std::optional<CriticalPoints> critical_;
  double varpi_ = 0.0;
};

PhaseState to_fowler(const RadialState& s, const ExponentSet& exps);
RadialState from_fowler(const PhaseState& ps, const ExponentSet& exps);

struct GValue {
  double g = 0.0;
  double G = 0.0;  // primitive in x, vanishing at x = 0
};

/// g_l(x,t) = k(e^t) fbar(x e^{-alpha t}) e^{alpha (l-1) t} and its x-primitive, at the index
/// carried by `index` (the model's own exponents unless rescaling).
GValue g_eval(const Model& model, const ExponentSet& index, double x, double t, bool truncated = true);
inline GValue g_eval(const Model& model, double x, double t, bool truncated = true) {
  return g_eval(model, model.exps(), x, t, truncated);
}

/// Maps a state of the index-`from` system to the index-`to` system at the same t.
PhaseState rescale(const PhaseState& ps, const ExponentSet& from, const ExponentSet& to);

struct Energy {
  double H = 0.0;
  double pohozaev = 0.0;  // H e^{-(alpha+gamma) t}
};

Energy energy(const Model& model, const PhaseState& ps, bool truncated = true);
Energy energy(const Model& model, const ExponentSet& index, const PhaseState& ps, bool truncated = true);

/// Pohozaev function evaluated directly from (r, u, u').
double pohozaev_direct(const Model& model, const RadialState& s, bool truncated = true);

/// Vector field of the log-radius system.
struct Field {
  double dx = 0.0;
  double dy = 0.0;
};
Field vector_field(const Model& model, double t, double x, double y, bool truncated = true);

}  // namespace radial
