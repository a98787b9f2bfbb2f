#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpm/config.hpp"
#include "gpm/mcmc.hpp"
#include "gpm/pipeline.hpp"

namespace gpm {

// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> path;
  std::optional<std::size_t> m_grid;
  std::optional<std::size_t> reps;
  bool timing = false;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

struct DensityGrid {
  Eigen::VectorXd theta;
  Eigen::VectorXd density;
};

struct EstimationResult {
  Theta posterior_mean, map, posterior_sd;
  double ci_low = 0.0, ci_high = 0.0;
  Eigen::VectorXd asym_sd;
  std::optional<double> acceptance_rate;
  std::optional<double> ess;
  std::optional<double> runtime_s;
  std::string path;
};

struct EstimationRun {
  EstimationResult result;
  std::optional<Chain> chain;  // empty on the conjugate path
  DensityGrid posterior_density;
  DensityGrid prior_density;
};

EstimationRun estimate(const Pipeline& pipeline);
EstimationRun run_estimate(const ExperimentConfig& config);

nlohmann::json to_json(const EstimationResult& result);

// Writers; each throws StageError("output", ...) on I/O failure.
void write_run(const EstimationRun& run, const std::string& dir);
void write_data_csv(const std::vector<double>& data, const std::string& file);

struct ScanRow {
  double theta;
  double logpost;
};
std::vector<ScanRow> scan(const Pipeline& pipeline, std::size_t points);
void write_scan_csv(const std::vector<ScanRow>& rows, PosteriorPath path, const std::string& file);

// Runs a named setup, writes its files under dir and returns a summary report.
nlohmann::json reproduce(const std::string& id, const Overrides& overrides, const std::string& dir);

}  // namespace gpm
