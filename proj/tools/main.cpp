// radial: command-line front end for the shooting / manifold / oracle library.
//
// Exit codes: 0 success, 2 invalid specification, 3 numerical failure, 4 validation failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "io.hpp"

namespace fs = std::filesystem;
using namespace radial;
using radial::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidSpec = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

struct Options {
  std::string config_path;
  std::string out;
  int jobs = 0;
  std::optional<double> d;
  std::optional<int> k_max;
  std::optional<std::string> kind;
  std::optional<double> tau;
  std::optional<std::string> grid;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    g.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1)));
  }
  return g;
}

std::vector<double> default_unstable_grid(double d_max) {
  std::vector<double> g = log_grid(1e-4 * d_max, 0.9 * d_max, 100);
  for (double s = 1.0; s <= 3.0 + 1e-12; s += 0.05) g.push_back(d_max * (1.0 - std::pow(10.0, -s)));
  return g;
}

std::vector<double> grid_for(const io::RunConfig& cfg, ManifoldKind kind, const Model& model) {
  if (cfg.manifold_grid.count >= 2) {
    return log_grid(cfg.manifold_grid.min, cfg.manifold_grid.max, cfg.manifold_grid.count);
  }
  if (is_unstable(kind)) {
    return default_unstable_grid(kind == ManifoldKind::kUnstablePlus ? model.d_plus()
                                                                     : model.d_minus());
  }
  return log_grid(1e-3, 1e4, 150);
}

int run_shoot(const io::RunConfig& cfg, const Model& model, const fs::path& out) {
  const ShotOutcome o = shoot(model, cfg.d, cfg.policy);
  std::ofstream csv(out / "shot.csv");
  write_csv(csv, *o.trajectory, model);
  json j = io::to_json(o);
  j["trajectory_file"] = "shot.csv";
  write_json(out / "shot.json", j);
  std::cout << "d=" << cfg.d << " " << io::summary(o) << "\n";
  return kExitOk;
}

int run_sequence(const io::RunConfig& cfg, const Model& model, const fs::path& out) {
  SequenceOptions opt;
  opt.k_max = cfg.k_max;
  opt.tol_d = cfg.tol_d;
  opt.scan_points = cfg.scan_points;
  opt.jobs = cfg.jobs;
  opt.mirror = cfg.mirror;
  opt.policy = cfg.policy;
  const SequenceReport rep = find_sequences(model, opt);
  auto dump = [&](const SequenceSide& side, const std::string& prefix) {
    std::vector<std::string> files;
    for (std::size_t k = 0; k < side.witnesses.size(); ++k) {
      const std::string name = "witness_" + prefix + std::to_string(k) + ".csv";
      std::ofstream os(out / name);
      write_csv(os, *side.witnesses[k].trajectory, model);
      files.push_back(name);
    }
    return files;
  };
  const auto fa = dump(rep.A, "A");
  const auto fb = dump(rep.B, "B");
  write_json(out / "sequence.json", io::to_json(rep, fa, fb));
  std::cout << std::setprecision(15) << "A =";
  for (double a : rep.A.values) std::cout << " " << a;
  if (!rep.B.values.empty()) {
    std::cout << " | B =";
    for (double b : rep.B.values) std::cout << " " << b;
  }
  std::cout << " | shots=" << rep.shots << "\n";
  return kExitOk;
}

int run_manifold(const io::RunConfig& cfg, const Model& model, const fs::path& out) {
  const ManifoldKind kind = parse_manifold_kind(cfg.manifold_kind);
  ManifoldOptions opt;
  opt.policy = cfg.policy;
  opt.seed_offset = cfg.seed_offset;
  opt.jobs = cfg.jobs;
  opt.estimate_seed_error = !is_unstable(kind);
  const ManifoldCurve curve = trace_manifold(model, kind, cfg.tau, grid_for(cfg, kind, model), opt);
  const std::string name = std::string(manifold_name(kind)) + ".csv";
  {
    std::ofstream os(out / name);
    io::write_curve_csv(os, curve);
  }
  json j{{"kind", manifold_name(kind)},
         {"tau", cfg.tau},
         {"points", curve.points.size()},
         {"curve_file", name}};
  if (!is_unstable(kind)) {
    j["seed_T"] = curve.seed_T;
    j["seed_error"] = curve.seed_error;
  }
  std::cout << manifold_name(kind) << " tau=" << cfg.tau << " points=" << curve.points.size();
  if (is_unstable(kind)) {
    ManifoldOptions sopt = opt;
    sopt.estimate_seed_error = false;
    io::RunConfig stable_cfg = cfg;
    stable_cfg.manifold_grid = {};
    const auto sgrid = grid_for(stable_cfg, ManifoldKind::kStablePlus, model);
    const ManifoldCurve sp = trace_manifold(model, ManifoldKind::kStablePlus, cfg.tau, sgrid, sopt);
    const ManifoldCurve sm = trace_manifold(model, ManifoldKind::kStableMinus, cfg.tau, sgrid, sopt);
    const auto recs = intersect(model, curve, sp, sm, cfg.k_max, opt);
    json arr = json::array();
    for (const auto& r : recs) arr.push_back(io::to_json(r));
    j["intersections"] = arr;
    std::cout << std::setprecision(15) << " d_at =";
    for (const auto& r : recs) std::cout << " " << r.d_at;
  }
  std::cout << "\n";
  write_json(out / "manifold.json", j);
  return kExitOk;
}

int run_portrait(const io::RunConfig& cfg, const Model& model, const fs::path& out) {
  const auto [gx, gy] = io::parse_portrait_grid(cfg.portrait_grid);
  {
    std::ofstream os(out / "portrait_field.csv");
    io::write_portrait_field_csv(os, model, cfg.portrait_t, gx, gy);
  }
  {
    std::ofstream os(out / "isoclines.csv");
    io::write_isoclines_csv(os, model, cfg.portrait_t, gx);
  }
  json j{{"t", cfg.portrait_t}, {"field_file", "portrait_field.csv"}, {"isocline_file", "isoclines.csv"}};
  if (const auto& cp = model.critical()) {
    j["critical_points"] = {
        {"P+", {{"x", cp->plus.x}, {"y", cp->plus.y}, {"H", energy(model, {cfg.portrait_t, cp->plus.x, cp->plus.y}).H}}},
        {"P-", {{"x", cp->minus.x}, {"y", cp->minus.y}, {"H", energy(model, {cfg.portrait_t, cp->minus.x, cp->minus.y}).H}}}};
  }
  write_json(out / "portrait.json", j);
  std::cout << "portrait " << gx.count << "x" << gy.count << " at t=" << cfg.portrait_t << "\n";
  return kExitOk;
}

int run_validate(const io::RunConfig& cfg, const Model& model, const fs::path& out) {
  const ValidationReport rep = validate_suite(model, cfg.policy);
  write_json(out / "validation.json", io::to_json(rep));
  int failed = 0;
  for (const auto& c : rep.checks) {
    if (!c.passed) ++failed;
  }
  std::cout << (rep.passed() ? "validation passed" : "validation FAILED") << " (" << failed
            << " of " << rep.checks.size() << " checks failed)\n";
  return rep.passed() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial p-Laplace shooting, manifolds and oracle checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "Output directory (overrides config and RADIAL_OUTPUT_DIR)");
  app.add_option("--jobs", opt.jobs, "Maximum concurrent shots")->check(CLI::PositiveNumber);

  auto* shoot_cmd = app.add_subcommand("shoot", "Shoot a regular solution u(0) = d");
  shoot_cmd->add_option("--d", opt.d, "Initial height (signed)");
  auto* seq_cmd = app.add_subcommand("sequence", "Locate A_k, A*_k, B_k, B*_k");
  seq_cmd->add_option("--kmax", opt.k_max, "Largest zero count")->check(CLI::NonNegativeNumber);
  auto* man_cmd = app.add_subcommand("manifold", "Trace a manifold slice (and intersect)");
  man_cmd->add_option("--kind", opt.kind, "unstable-plus|unstable-minus|stable-plus|stable-minus");
  man_cmd->add_option("--tau", opt.tau, "Slice log-radius");
  man_cmd->add_option("--kmax", opt.k_max, "Largest winding index for intersections");
  auto* por_cmd = app.add_subcommand("portrait", "Phase-plane field, isoclines, critical points");
  por_cmd->add_option("--grid", opt.grid, "xmin:xmax:nx,ymin:ymax:ny");
  auto* val_cmd = app.add_subcommand("validate", "Run the identity and conservation checks");

  CLI11_PARSE(app, argc, argv);

  try {
    io::RunConfig cfg = io::load_config(opt.config_path);
    if (const char* env = std::getenv("RADIAL_OUTPUT_DIR")) cfg.output_dir = env;
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    if (opt.jobs > 0) cfg.jobs = opt.jobs;
    if (opt.d) cfg.d = *opt.d;
    if (opt.k_max) cfg.k_max = *opt.k_max;
    if (opt.kind) cfg.manifold_kind = *opt.kind;
    if (opt.tau) cfg.tau = *opt.tau;
    if (opt.grid) cfg.portrait_grid = *opt.grid;

    const Model model(io::to_spec(cfg.problem));
    const fs::path out(cfg.output_dir);
    fs::create_directories(out);

    if (*shoot_cmd) return run_shoot(cfg, model, out);
    if (*seq_cmd) return run_sequence(cfg, model, out);
    if (*man_cmd) return run_manifold(cfg, model, out);
    if (*por_cmd) return run_portrait(cfg, model, out);
    if (*val_cmd) return run_validate(cfg, model, out);
  } catch (const InvalidSpec& e) {
    std::cerr << "invalid specification: " << e.what() << "\n";
    return kExitInvalidSpec;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "invalid specification: malformed config: " << e.what() << "\n";
    return kExitInvalidSpec;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid specification: " << e.what() << "\n";
    return kExitInvalidSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
