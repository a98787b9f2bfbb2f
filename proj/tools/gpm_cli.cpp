// gpm: command-line front end for moment-constrained Bayesian estimation.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpm/error.hpp"
#include "gpm/experiment.hpp"
#include "gpm/pipeline.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> path;
  std::optional<std::size_t> m_grid;
  std::optional<std::size_t> reps;
  bool timing = false;

  gpm::Overrides overrides() const { return {seed, out, path, m_grid, reps, timing}; }
};

// Named setups in `reproduce` are fixed presets, so they take no config file.
void add_common(CLI::App* cmd, CommonFlags& f, bool preset_run) {
  if (!preset_run) cmd->add_option("--config", f.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "data seed (chain seed defaults to seed + 1)");
  cmd->add_option("--out", f.out, "output location");
  cmd->add_option("--path", f.path, "posterior path")->check(CLI::IsMember({"svd", "basis", "cu_gmm", "conjugate"}));
  cmd->add_option("--m-grid", f.m_grid, "grid size M");
  if (preset_run) cmd->add_option("--reps", f.reps, "Monte Carlo replications");
  cmd->add_flag("--timing", f.timing, "record runtime_s (makes result.json run-dependent)");
}

gpm::ExperimentConfig load_config(const CommonFlags& f) {
  gpm::ExperimentConfig c;
  if (!f.config.empty()) {
    try {
      c = gpm::ExperimentConfig::load(f.config);
    } catch (const std::exception& e) {
      throw gpm::StageError("config", e.what());
    }
  }
  gpm::apply_overrides(c, f.overrides());
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian estimation of moment condition models with constrained Gaussian process priors"};
  app.require_subcommand(1);

  CommonFlags sim_flags, est_flags, rep_flags, scan_flags;
  std::string sim_model = "exponential_overid";
  std::size_t sim_n = 500;
  std::vector<double> sim_theta = {2.0};
  std::uint64_t sim_seed = 1;
  std::string sim_out = "data.csv";
  auto* sim = app.add_subcommand("simulate", "draw a sample from a builtin model");
  sim->add_option("--model", sim_model, "model name");
  sim->add_option("--n", sim_n, "sample size");
  sim->add_option("--theta-star", sim_theta, "true parameter")->delimiter(',');
  sim->add_option("--seed", sim_seed, "seed");
  sim->add_option("--out", sim_out, "CSV file");

  auto* est = app.add_subcommand("estimate", "run the full pipeline and M-H sampler");
  add_common(est, est_flags, false);
  std::string data_file;
  est->add_option("--data", data_file, "CSV sample (header x); simulated when omitted");

  std::string experiment;
  auto* rep = app.add_subcommand("reproduce", "run a named experiment setup");
  rep->add_option("experiment", experiment, "exp1 | exp2_cdf | exp2_mgf | exp3 | exp3_mc100")
      ->required()
      ->check(CLI::IsMember({"exp1", "exp2_cdf", "exp2_mgf", "exp3", "exp3_mc100"}));
  add_common(rep, rep_flags, true);

  auto* sc = app.add_subcommand("scan", "dump the log-posterior on a theta grid");
  add_common(sc, scan_flags, false);
  std::size_t scan_points = 0;
  sc->add_option("--points", scan_points, "grid points (default scan.points)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "gpm: [cli] " << e.what() << '\n';
    return 1;
  }

  try {
    if (sim->parsed()) {
      const auto data = [&] {
        try {
          return gpm::simulate_data(sim_model, sim_n, sim_theta, sim_seed);
        } catch (const std::exception& e) {
          throw gpm::StageError("simulate", e.what());
        }
      }();
      gpm::write_data_csv(data, sim_out);
    } else if (est->parsed()) {
      gpm::ExperimentConfig c = load_config(est_flags);
      if (!data_file.empty()) c.data = data_file;
      const std::string dir = c.out.empty() ? "out" : c.out;
      const gpm::EstimationRun run = gpm::run_estimate(c);
      gpm::write_run(run, dir);
      std::cout << gpm::to_json(run.result).dump(2) << '\n';
    } else if (rep->parsed()) {
      gpm::Overrides o = rep_flags.overrides();
      const std::string dir = o.out ? *o.out : "out/" + experiment;
      std::cout << gpm::reproduce(experiment, o, dir).dump(2) << '\n';
    } else if (sc->parsed()) {
      gpm::ExperimentConfig c = load_config(scan_flags);
      const std::string dir = c.out.empty() ? "out" : c.out;
      const gpm::Pipeline p = gpm::build_pipeline(c);
      const auto rows = gpm::scan(p, scan_points ? scan_points : c.scan_points);
      gpm::write_scan_csv(rows, p.path, (std::filesystem::path(dir) / "scan.csv").string());
    }
  } catch (const gpm::StageError& e) {
    std::cerr << "gpm: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gpm: [cli] " << e.what() << '\n';
    return 1;
  }
  return 0;
}
