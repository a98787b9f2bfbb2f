#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gpm {

// Flat key = value configuration with dotted section names. Lines starting with
// '#' are comments. Every key has a default; unknown keys are rejected.
struct ExperimentConfig {
  std::string model = "exponential_overid";
  std::size_t n = 500;
  std::vector<double> theta_star = {2.0};
  std::uint64_t seed = 1;
  std::string data;  // CSV path; simulated from the model when empty
  std::string out;

  std::size_t grid_m = 1000;
  std::string grid_bounds = "data";  // data | support | "lo,hi"
  double grid_margin = 1.0;
  std::string measure_pi = "exponential";  // exponential | lebesgue | gaussian | empirical
  std::string measure_rho = "lebesgue";    // lebesgue | gaussian

  std::string transform_kind = "cdf";
  std::vector<double> t_bounds = {-3.0, 3.0};
  std::string regularize = "auto";

  std::string eigen_kind = "polynomial";
  double eigen_alpha = 1.7;
  double eigen_a = 0.3;
  double eigen_sigma0 = 1.0;
  double eigen_c = 1.0;
  std::size_t eigen_J = 300;
  std::string basis_family = "monomial";

  std::string mean_strategy = "two_step";  // series | beta | two_step | normal
  double mean_q = 2.0;
  double mean_tikhonov = 0.1;
  double mean_location = 2.0;
  std::map<std::size_t, double> mean_coefficients;

  std::string path = "svd";
  std::vector<double> theta_box;  // lo,hi pairs; model default when empty

  std::size_t mcmc_total = 10000;
  std::size_t mcmc_burn_in = 5000;
  std::optional<std::uint64_t> mcmc_seed;
  std::string mcmc_proposal = "chi2";
  double mcmc_scale = 0.1;
  std::vector<double> mcmc_init = {1.0};

  double kde_bandwidth = 0.3;
  std::size_t kde_points = 401;
  std::size_t scan_points = 101;
  std::size_t reps = 100;
  bool timing = false;

  void set(const std::string& key, const std::string& value);
  void validate() const;
  std::string to_text() const;
  std::uint64_t chain_seed() const { return mcmc_seed ? *mcmc_seed : seed + 1; }

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
};

// exp1, exp2_cdf, exp2_mgf, exp3 (exp3_mc100 uses exp3)
ExperimentConfig preset(const std::string& id);

}  // namespace gpm
