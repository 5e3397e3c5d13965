#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radial/manifolds.hpp"
#include "radial/oracle.hpp"

namespace radial::io {

using nlohmann::json;

/// Problem block of a run configuration.
///
/// The nonlinearity is the double power u|u|^(q-2) - u|u|^(Q-2) when Q is given, otherwise the
/// pure power (oracle mode only). h is {"type": "const", "params": [h0]} or
/// {"type": "rational", "params": [h0, h_inf, scale, power]}.
struct ProblemConfig {
  int n = 3;
  double p = 2.0;
  double q = 7.0;
  std::optional<double> Q = 9.0;
  double delta = 0.0;
  std::string h_type = "const";
  std::vector<double> h_params{1.0};
  std::optional<double> varpi;
  bool oracle_mode = false;

  bool operator==(const ProblemConfig&) const = default;
};

ProblemSpec to_spec(const ProblemConfig& cfg);

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool operator==(const GridSpec&) const = default;
};

/// Everything a CLI run reads. Unset keys keep the defaults below.
struct RunConfig {
  ProblemConfig problem;
  StopPolicy policy;

  double d = 1e-3;

  int k_max = 2;
  double tol_d = 1e-12;
  int scan_points = 200;
  bool mirror = true;

  std::string manifold_kind = "unstable-plus";
  double tau = 6.0;
  /// Empty count selects a default grid for the kind.
  GridSpec manifold_grid;
  double seed_offset = 30.0;

  /// "xmin:xmax:nx,ymin:ymax:ny"
  std::string portrait_grid = "-1.5:1.5:61,-1.5:1.5:61";
  double portrait_t = 0.0;

  int jobs = 1;
  std::string output_dir = "out";
};

RunConfig parse_config(const json& j);
json to_json(const RunConfig& cfg);
RunConfig load_config(const std::string& path);
bool same_policy(const StopPolicy& a, const StopPolicy& b);

json to_json(const ShotOutcome& o);
json to_json(const SequenceReport& rep, const std::vector<std::string>& witness_files_a,
             const std::vector<std::string>& witness_files_b);
json to_json(const IntersectionRecord& rec);
json to_json(const ValidationReport& rep);

/// CSV columns: param,t,x,y,theta,rho
void write_curve_csv(std::ostream& os, const ManifoldCurve& curve);

/// Phase-plane data at a fixed t: vector field, energy and both isoclines.
void write_portrait_field_csv(std::ostream& os, const Model& model, double t, const GridSpec& gx,
                              const GridSpec& gy);
void write_isoclines_csv(std::ostream& os, const Model& model, double t, const GridSpec& gx);
std::pair<GridSpec, GridSpec> parse_portrait_grid(const std::string& text);

/// One-line human summary of a shot, e.g. "SlowDecay P+ zeros=0".
std::string summary(const ShotOutcome& o);

}  // namespace radial::io
