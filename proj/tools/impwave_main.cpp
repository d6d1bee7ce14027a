// impwave command-line front end: reproducible scenario runs, eps sweeps,
// crossing certificates, eps -> 0 limits, and plot data extraction.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "impwave/impwave.hpp"

namespace fs = std::filesystem;
using namespace impwave;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  double eps_override = -1.0;
  int crossings_override = -1;
  int ladder_override = -1;
};

RunConfig load_and_override(const CliOptions& opt) {
  RunConfig cfg = load_config(opt.config_path);
  if (opt.eps_override > 0.0) cfg.eps = opt.eps_override;
  if (opt.crossings_override >= 0) cfg.integration.max_crossings = opt.crossings_override;
  if (opt.ladder_override > 0) cfg.ladder.count = opt.ladder_override;
  if (!opt.out_dir.empty()) cfg.outputs.dir = opt.out_dir;
  cfg.integration.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

SeedData checked_seed(const RunConfig& cfg, const BackgroundParams& bg) {
  if (cfg.seed.U0dot == 0.0) return cfg.seed;  // U == 0 family handled downstream
  const SeedValidation v = validate_seed(cfg.seed, bg);
  if (!v.pass) throw ConfigError(v.message());
  return cfg.seed;
}

int cmd_integrate(const CliOptions& opt) {
  const RunConfig cfg = load_and_override(opt);
  const BackgroundParams bg = cfg.background();
  const WaveProfile profile = cfg.make_profile();
  const Mollifier moll = cfg.make_mollifier();
  const SeedData seed = checked_seed(cfg, bg);

  Trajectory traj =
      integrate_global(seed, cfg.eps, profile, moll, bg, cfg.integration, cfg.t_span);
  traj.resample(cfg.outputs.samples);

  const fs::path out(cfg.outputs.dir);
  {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, profile, moll);
    write_text(out / "trajectory.csv", csv.str());
  }
  json rep;
  rep["inputs"] = to_json(cfg);
  rep["trajectory"] = trajectory_summary(traj);
  write_text(out / "run_report.json", rep.dump(2) + "\n");
  std::cout << "integrate: " << traj.crossings.size() << " crossing(s), wrote "
            << (out / "trajectory.csv").string() << "\n";
  return 0;
}

int cmd_sweep(const CliOptions& opt) {
  const RunConfig cfg = load_and_override(opt);
  const BackgroundParams bg = cfg.background();
  const WaveProfile profile = cfg.make_profile();
  const Mollifier moll = cfg.make_mollifier();
  const SeedData seed = checked_seed(cfg, bg);

  const int workers = worker_cap_from_env();
  const auto rungs =
      run_crossing_ladder(seed, profile, moll, bg, cfg.integration, cfg.ladder, workers);
  const auto fits = detail::fit_exit_channels(rungs);

  json rep;
  rep["inputs"] = to_json(cfg);
  json jr = json::array();
  for (const auto& r : rungs) jr.push_back(to_json(r));
  rep["rungs"] = jr;
  rep["fits"] = {{"A2", to_json(fits[0])},
                 {"A3", to_json(fits[1])},
                 {"A4", to_json(fits[2])},
                 {"B", to_json(fits[3])},
                 {"C", to_json(fits[4])}};
  const fs::path out(cfg.outputs.dir);
  write_text(out / "sweep_report.json", rep.dump(2) + "\n");
  std::cout << "sweep: " << rungs.size() << " rung(s), wrote "
            << (out / "sweep_report.json").string() << "\n";
  return 0;
}

int cmd_certify(const CliOptions& opt) {
  const RunConfig cfg = load_and_override(opt);
  const BackgroundParams bg = cfg.background();
  const WaveProfile profile = cfg.make_profile();
  const Mollifier moll = cfg.make_mollifier();
  const SeedData seed = checked_seed(cfg, bg);
  if (seed.U0dot == 0.0) throw ConfigError("certify requires a crossing seed (U0dot > 0)");

  const Certificate cert = certificate(seed, profile, moll, bg, cfg.C1);
  json rep;
  rep["inputs"] = to_json(cfg);
  rep["certificate"] = to_json(cert);
  const fs::path out(cfg.outputs.dir);
  write_text(out / "certificate_report.json", rep.dump(2) + "\n");
  std::cout << "certify: C2 = " << fmt17(cert.C2) << ", eta = " << fmt17(cert.eta)
            << ", eps0' = " << fmt17(cert.eps0_prime) << ", eps0 = " << fmt17(cert.eps0) << "\n";
  return 0;
}

int cmd_limit(const CliOptions& opt) {
  const RunConfig cfg = load_and_override(opt);
  const BackgroundParams bg = cfg.background();
  const WaveProfile profile = cfg.make_profile();
  const Mollifier moll = cfg.make_mollifier();
  const SeedData seed = checked_seed(cfg, bg);
  if (seed.U0dot == 0.0) throw ConfigError("limit requires a crossing seed (U0dot > 0)");

  const int workers = worker_cap_from_env();
  const JumpData jump =
      jump_extrapolate(seed, profile, moll, bg, cfg.integration, cfg.ladder, workers);
  const LimitingGeodesic lim = limiting_geodesic(seed, jump, bg);
  const std::vector<std::function<double(double)>> phis = {
      make_bump_test_function(-0.10 * bg.a, 0.15 * bg.a),
      make_bump_test_function(0.0, 0.15 * bg.a),
      make_bump_test_function(0.10 * bg.a, 0.15 * bg.a)};
  const AssociationReport assoc =
      association_verdict(AssociationChannel::All, seed, profile, moll, bg, cfg.integration,
                          cfg.ladder, phis, lim, workers);

  json rep;
  rep["inputs"] = to_json(cfg);
  rep["jump"] = to_json(jump);
  rep["limiting"] = {
      {"plus_data", to_json(lim.plus.state(0.0))},
      {"minus_data", to_json(lim.minus.state(0.0))},
      {"residual_tangency", lim.residual_tangency},
      {"residual_norm", lim.residual_norm}};
  rep["association"] = to_json(assoc);
  const fs::path out(cfg.outputs.dir);
  write_text(out / "limit_report.json", rep.dump(2) + "\n");
  std::cout << "limit: B = " << fmt17(jump.B) << ", C = " << fmt17(jump.C) << ", spread = "
            << fmt17(jump.mollifier_spread)
            << (jump.low_confidence ? " (low confidence)" : "") << "\n";
  return 0;
}

int cmd_plotdata(const CliOptions& opt) {
  const RunConfig cfg = load_and_override(opt);
  const BackgroundParams bg = cfg.background();
  const WaveProfile profile = cfg.make_profile();
  const Mollifier moll = cfg.make_mollifier();
  const SeedData seed = checked_seed(cfg, bg);

  const fs::path out(cfg.outputs.dir);
  const auto rungs = cfg.ladder.rungs();
  for (size_t k = 0; k < rungs.size(); ++k) {
    Trajectory traj =
        integrate_global(seed, rungs[k], profile, moll, bg, cfg.integration, cfg.t_span);
    traj.resample(cfg.outputs.samples);
    std::ostringstream csv;
    write_plotdata_csv(csv, traj, profile, moll);
    write_text(out / ("plot_eps" + std::to_string(k) + ".csv"), csv.str());
  }
  std::cout << "plotdata: wrote " << rungs.size() << " file(s) under " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesics of impulsive waves on (anti-)de Sitter backgrounds"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "run configuration (JSON)")->required();
  app.add_option("--out", opt.out_dir, "output directory (overrides outputs.dir)");
  app.add_option("--eps", opt.eps_override, "override the single-run eps");
  app.add_option("--crossings", opt.crossings_override, "override max_crossings");
  app.add_option("--ladder", opt.ladder_override, "override the ladder rung count");

  auto* integrate = app.add_subcommand("integrate", "run one scenario, emit trajectory CSV");
  auto* sweep = app.add_subcommand("sweep", "run the eps ladder, emit exit observables");
  auto* certify = app.add_subcommand("certify", "evaluate the crossing certificate");
  auto* limit = app.add_subcommand("limit", "extrapolate jump data and check association");
  auto* plotdata = app.add_subcommand("plotdata", "emit long-format plot CSVs per rung");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (integrate->parsed()) return cmd_integrate(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (certify->parsed()) return cmd_certify(opt);
    if (limit->parsed()) return cmd_limit(opt);
    if (plotdata->parsed()) return cmd_plotdata(opt);
  } catch (const CertificateViolation& ex) {
    std::cerr << "certificate violation: " << ex.what() << "\n";
    return 4;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const NumericError& ex) {
    std::cerr << "numeric failure: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}
