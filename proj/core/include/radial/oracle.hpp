#pragma once

#include <string>
#include <vector>

#include "radial/shooting.hpp"

namespace radial {

enum class ClosedFormFamily { kAubinTalenti, kConstant };

struct ProfileValue {
  double u = 0.0;
  double du = 0.0;
  double ddu = 0.0;
};

/// Exact radial solution: Aubin-Talenti bubble with scale lambda, or the constant u = d.
class ClosedFormProfile {
 public:
  ClosedFormProfile(ClosedFormFamily family, int n, double param);

  ClosedFormFamily family() const { return family_; }
  double param() const { return param_; }
  ProfileValue operator()(double r) const;
  /// lim u r^{n-2}; zero for the constant family.
  double L() const;

 private:
  ClosedFormFamily family_;
  int n_;
  double param_;
  double amp_ = 0.0;
};

/// Throws UnsupportedFamily unless the model admits the family: Aubin-Talenti needs p = 2,
/// q = p*, k = 1 and the pure power in oracle mode; the constant needs f(param) = 0.
ClosedFormProfile closed_form(const Model& model, ClosedFormFamily family, double param);

/// |u'' + (n-1)u'/r + k f(u)| relative to the size of its terms (p = 2).
double ode_residual(const Model& model, const ClosedFormProfile& profile, double r);

struct CheckResult {
  std::string name;
  bool passed = true;
  bool skipped = false;
  double worst = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Identity and conservation checks that apply to `model`; non-applicable ones are skipped.
ValidationReport validate_suite(const Model& model, const StopPolicy& policy = {});

/// Individual checks, also used by the acceptance suite.
CheckResult check_pohozaev_relation(const Model& model, const Trajectory& traj);
CheckResult check_energy_monotonicity(const Model& model, const std::vector<const Trajectory*>& trajs);
CheckResult check_flow_signs(const Model& model, const std::vector<const Trajectory*>& trajs);
CheckResult check_rescaling(const Model& model, int tuples, unsigned seed);
CheckResult check_truncation_joins(const Model& model);
/// max |H(t) - H(start)| over [t_lo, t_hi].
CheckResult check_hamiltonian(const Model& model, const PhaseState& start, double t_lo, double t_hi,
                              const StopPolicy& policy);
/// rho at t = +-T along the orbit through `start`, and |H| along it.
CheckResult check_homoclinic(const Model& model, const PhaseState& start, double T,
                             const StopPolicy& policy);
CheckResult check_closed_form_reproduction(const Model& model, const StopPolicy& policy);

}  // namespace radial
