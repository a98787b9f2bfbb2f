#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gpm/moment_model.hpp"

namespace gpm {

class Proposal {
 public:
  enum class Kind { triangular, chi_squared_ceil, gaussian_rw };

  // Triangular density on [lo, hi] with its mode at the current state.
  static Proposal triangular(double lo = -1.0, double hi = 1.0);
  // chi-squared with ceil(current) degrees of freedom (at least 1).
  static Proposal chi_squared_ceil();
  static Proposal gaussian_rw(double scale);

  Kind kind() const { return kind_; }
  Theta sample(const Theta& current, Rng& rng) const;
  double log_density(const Theta& candidate, const Theta& current) const;

 private:
  Proposal(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_, b_;
};

Proposal::Kind parse_proposal_kind(std::string_view name);

struct Chain {
  std::vector<Theta> draws;     // retained draws
  std::vector<double> log_posts;
  std::vector<char> accepted;   // per retained iteration
  double acceptance_rate = 0.0; // over all iterations
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  std::size_t total = 0;
};

using LogDensityFn = std::function<double(const Theta&)>;

Chain run_mh(const LogDensityFn& log_post, const Proposal& proposal, const Theta& init, std::size_t total,
             std::size_t burn_in, std::uint64_t seed);

Theta posterior_mean(const Chain& chain);
Theta posterior_sd(const Chain& chain);
// Equal-tailed interval of the first coordinate.
std::pair<double, double> credible_interval(const Chain& chain, double level = 0.95);
Theta map_estimate(const Chain& chain, const LogDensityFn& log_post);
Eigen::VectorXd kernel_density(const Chain& chain, double bandwidth, const Eigen::VectorXd& grid);
// Effective sample size of the first coordinate (initial positive sequence estimator).
double effective_sample_size(const Chain& chain);

}  // namespace gpm
