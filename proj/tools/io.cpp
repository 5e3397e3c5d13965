#include "io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace radial::io {

ProblemSpec to_spec(const ProblemConfig& cfg) {
  ProblemSpec spec;
  spec.n = cfg.n;
  spec.p = cfg.p;
  spec.nonlinearity = cfg.Q ? NonlinearitySpec::double_power(cfg.q, *cfg.Q)
                            : NonlinearitySpec::pure_power(cfg.q);
  const auto& hp = cfg.h_params;
  if (cfg.h_type == "const") {
    if (hp.size() != 1) throw std::invalid_argument("h.params for const must be [h0]");
    spec.weight = WeightSpec::constant(hp[0], cfg.delta);
  } else if (cfg.h_type == "rational") {
    if (hp.size() != 4) {
      throw std::invalid_argument("h.params for rational must be [h0, h_inf, scale, power]");
    }
    spec.weight = WeightSpec::rational(hp[0], hp[1], hp[2], hp[3], cfg.delta);
  } else {
    throw std::invalid_argument("unknown h.type: " + cfg.h_type);
  }
  spec.varpi = cfg.varpi;
  spec.oracle_mode = cfg.oracle_mode;
  return spec;
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json policy_json(const StopPolicy& p) {
  return json{{"forward_span", p.forward_span},
              {"backward_span", p.backward_span},
              {"rtol", p.rtol},
              {"atol", p.atol},
              {"h_init", p.h_init},
              {"h_min", p.h_min},
              {"h_max", p.h_max},
              {"max_steps", p.max_steps},
              {"event_tol", p.event_tol},
              {"eps_origin", p.eps_origin},
              {"origin_decreasing_steps", p.origin_decreasing_steps},
              {"eps_p", p.eps_p},
              {"p_dwell", p.p_dwell},
              {"strip_margin", p.strip_margin},
              {"escape_radius", p.escape_radius}};
}

StopPolicy parse_policy(const json& j) {
  StopPolicy p;
  read(j, "forward_span", p.forward_span);
  read(j, "backward_span", p.backward_span);
  read(j, "rtol", p.rtol);
  read(j, "atol", p.atol);
  read(j, "h_init", p.h_init);
  read(j, "h_min", p.h_min);
  read(j, "h_max", p.h_max);
  read(j, "max_steps", p.max_steps);
  read(j, "event_tol", p.event_tol);
  read(j, "eps_origin", p.eps_origin);
  read(j, "origin_decreasing_steps", p.origin_decreasing_steps);
  read(j, "eps_p", p.eps_p);
  read(j, "p_dwell", p.p_dwell);
  read(j, "strip_margin", p.strip_margin);
  read(j, "escape_radius", p.escape_radius);
  return p;
}

ProblemConfig parse_problem(const json& j) {
  ProblemConfig c;
  c.n = j.at("n").get<int>();
  c.p = j.at("p").get<double>();
  c.q = j.at("q").get<double>();
  c.Q = j.contains("Q") && !j.at("Q").is_null() ? std::optional<double>(j.at("Q").get<double>())
                                                : std::nullopt;
  read(j, "delta", c.delta);
  if (j.contains("h")) {
    const json& h = j.at("h");
    c.h_type = h.at("type").get<std::string>();
    c.h_params = h.at("params").get<std::vector<double>>();
  }
  if (j.contains("varpi") && !j.at("varpi").is_null()) c.varpi = j.at("varpi").get<double>();
  read(j, "oracle_mode", c.oracle_mode);
  return c;
}

json problem_json(const ProblemConfig& c) {
  json j{{"n", c.n}, {"p", c.p}, {"q", c.q}, {"delta", c.delta},
         {"h", {{"type", c.h_type}, {"params", c.h_params}}}, {"oracle_mode", c.oracle_mode}};
  if (c.Q) j["Q"] = *c.Q;
  if (c.varpi) j["varpi"] = *c.varpi;
  return j;
}

json grid_json(const GridSpec& g) { return json{{"min", g.min}, {"max", g.max}, {"count", g.count}}; }

GridSpec parse_grid(const json& j) {
  GridSpec g;
  read(j, "min", g.min);
  read(j, "max", g.max);
  read(j, "count", g.count);
  return g;
}

}  // namespace

bool same_policy(const StopPolicy& a, const StopPolicy& b) {
  return policy_json(a) == policy_json(b);
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  c.problem = parse_problem(j.contains("problem") ? j.at("problem") : j);
  if (j.contains("policy")) c.policy = parse_policy(j.at("policy"));
  if (j.contains("shoot")) read(j.at("shoot"), "d", c.d);
  if (j.contains("sequence")) {
    const json& s = j.at("sequence");
    read(s, "k_max", c.k_max);
    read(s, "tol_d", c.tol_d);
    read(s, "scan_points", c.scan_points);
    read(s, "mirror", c.mirror);
  }
  if (j.contains("manifold")) {
    const json& m = j.at("manifold");
    read(m, "kind", c.manifold_kind);
    read(m, "tau", c.tau);
    read(m, "seed_offset", c.seed_offset);
    if (m.contains("grid")) c.manifold_grid = parse_grid(m.at("grid"));
  }
  if (j.contains("portrait")) {
    read(j.at("portrait"), "grid", c.portrait_grid);
    read(j.at("portrait"), "t", c.portrait_t);
  }
  read(j, "jobs", c.jobs);
  read(j, "output_dir", c.output_dir);
  return c;
}

json to_json(const RunConfig& c) {
  return json{{"problem", problem_json(c.problem)},
              {"policy", policy_json(c.policy)},
              {"shoot", {{"d", c.d}}},
              {"sequence",
               {{"k_max", c.k_max}, {"tol_d", c.tol_d}, {"scan_points", c.scan_points},
                {"mirror", c.mirror}}},
              {"manifold",
               {{"kind", c.manifold_kind}, {"tau", c.tau}, {"seed_offset", c.seed_offset},
                {"grid", grid_json(c.manifold_grid)}}},
              {"portrait", {{"grid", c.portrait_grid}, {"t", c.portrait_t}}},
              {"jobs", c.jobs},
              {"output_dir", c.output_dir}};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_config(json::parse(in));
}

json to_json(const ShotOutcome& o) {
  json j{{"d", o.d},
         {"class", std::string(outcome_name(o.cls))},
         {"zeros", o.zeros},
         {"angle_zeros", o.angle_zeros},
         {"total_angle", o.total_angle},
         {"t_terminal", o.t_terminal},
         {"non_generic", o.non_generic}};
  if (o.cls == OutcomeClass::kFastDecay) j["L"] = o.L;
  if (o.cls == OutcomeClass::kSlowDecay) j["target"] = o.target > 0 ? "P+" : "P-";
  if (o.trajectory) {
    const Sample& s = o.trajectory->back();
    j["terminal_state"] = {{"t", s.t}, {"x", s.x}, {"y", s.y}};
  }
  return j;
}

namespace {

json side_json(const SequenceSide& side, const std::vector<std::string>& files) {
  json brackets = json::array();
  for (const auto& b : side.brackets) {
    brackets.push_back({{"lo", b.lo},
                        {"hi", b.hi},
                        {"width", b.width()},
                        {"zeros_lo", b.zeros_lo},
                        {"zeros_hi", b.zeros_hi},
                        {"class_lo", std::string(outcome_name(b.cls_lo))},
                        {"class_hi", std::string(outcome_name(b.cls_hi))}});
  }
  json witnesses = json::array();
  for (std::size_t k = 0; k < side.witnesses.size(); ++k) {
    json w = to_json(side.witnesses[k]);
    w["k"] = k;
    w["bracket_width"] = side.widths[k];
    if (k < files.size()) w["trajectory_file"] = files[k];
    witnesses.push_back(w);
  }
  return json{{"values", side.values}, {"stars", side.stars}, {"brackets", brackets},
              {"witnesses", witnesses}};
}

}  // namespace

json to_json(const SequenceReport& rep, const std::vector<std::string>& witness_files_a,
             const std::vector<std::string>& witness_files_b) {
  const json a = side_json(rep.A, witness_files_a);
  const json b = side_json(rep.B, witness_files_b);
  return json{{"k_max", rep.k_max},
              {"A", rep.A.values},
              {"A_star", rep.A.stars},
              {"B", rep.B.values},
              {"B_star", rep.B.stars},
              {"brackets", {{"A", a["brackets"]}, {"B", b["brackets"]}}},
              {"witnesses", {{"A", a["witnesses"]}, {"B", b["witnesses"]}}},
              {"shots", rep.shots}};
}

json to_json(const IntersectionRecord& r) {
  return json{{"k", r.k},
              {"d_at", r.d_at},
              {"L_at", r.L_at},
              {"stable_kind", std::string(manifold_name(r.stable_kind))},
              {"shift", r.shift},
              {"residual", r.residual},
              {"R_point", {{"t", r.R_point.t}, {"x", r.R_point.x}, {"y", r.R_point.y}}}};
}

json to_json(const ValidationReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"skipped", c.skipped},
                      {"worst", c.worst},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
  }
  return json{{"passed", rep.passed()}, {"checks", checks}};
}

void write_curve_csv(std::ostream& os, const ManifoldCurve& curve) {
  os << "param,t,x,y,theta,rho\n" << std::setprecision(17);
  for (const auto& p : curve.points) {
    os << p.param << ',' << p.state.t << ',' << p.state.x << ',' << p.state.y << ',' << p.theta
       << ',' << p.rho << '\n';
  }
}

std::pair<GridSpec, GridSpec> parse_portrait_grid(const std::string& text) {
  auto axis = [](const std::string& part) {
    GridSpec g;
    char c1 = 0, c2 = 0;
    std::istringstream is(part);
    if (!(is >> g.min >> c1 >> g.max >> c2 >> g.count) || c1 != ':' || c2 != ':' || g.count < 2) {
      throw std::invalid_argument("grid axis must be min:max:count, got '" + part + "'");
    }
    return g;
  };
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("grid must be xspec,yspec");
  return {axis(text.substr(0, comma)), axis(text.substr(comma + 1))};
}

void write_portrait_field_csv(std::ostream& os, const Model& model, double t, const GridSpec& gx,
                              const GridSpec& gy) {
  os << "x,y,dx,dy,H\n" << std::setprecision(17);
  for (int i = 0; i < gx.count; ++i) {
    const double x = gx.min + (gx.max - gx.min) * i / (gx.count - 1);
    for (int j = 0; j < gy.count; ++j) {
      const double y = gy.min + (gy.max - gy.min) * j / (gy.count - 1);
      const Field f = vector_field(model, t, x, y);
      const double H = energy(model, PhaseState{t, x, y}).H;
      os << x << ',' << y << ',' << f.dx << ',' << f.dy << ',' << H << '\n';
    }
  }
}

void write_isoclines_csv(std::ostream& os, const Model& model, double t, const GridSpec& gx) {
  // dx/dt = 0 on y = phi(-alpha x); dy/dt = 0 on y = g(x, t) / gamma.
  const auto& e = model.exps();
  os << "x,y_dx0,y_dy0\n" << std::setprecision(17);
  for (int i = 0; i < gx.count; ++i) {
    const double x = gx.min + (gx.max - gx.min) * i / (gx.count - 1);
    const double y0 = spow(-e.alpha * x, e.p - 1.0);
    const double y1 = g_eval(model, x, t).g / e.gamma;
    os << x << ',' << y0 << ',' << y1 << '\n';
  }
}

std::string summary(const ShotOutcome& o) {
  std::ostringstream os;
  os << outcome_name(o.cls);
  if (o.cls == OutcomeClass::kSlowDecay) os << (o.target > 0 ? " P+" : " P-");
  os << " zeros=" << o.zeros;
  if (o.cls == OutcomeClass::kFastDecay) os << " L=" << o.L;
  if (o.non_generic) os << " (constant solution)";
  return os.str();
}

}  // namespace radial::io
