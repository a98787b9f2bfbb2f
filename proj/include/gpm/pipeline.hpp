#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpm/config.hpp"
#include "gpm/gp_prior.hpp"
#include "gpm/moment_model.hpp"
#include "gpm/posterior.hpp"
#include "gpm/sampling_model.hpp"

namespace gpm {

// Assembled estimation problem: data, measures, transform, prior factory and the
// log-posterior for the configured path. Immutable once built, so replicated
// chains may share it.
struct Pipeline {
  ExperimentConfig config;
  MomentModel model;
  Box box;
  std::vector<double> data;
  PosteriorPath path = PosteriorPath::svd;
  std::optional<Measure> pi;
  std::shared_ptr<const SampleTransform> transform;
  std::shared_ptr<const PriorFactory> priors;
  std::shared_ptr<const Whitening> whitening;
  std::shared_ptr<const LogPosterior> log_posterior;  // empty on the conjugate path
};

std::vector<double> simulate_data(const std::string& model, std::size_t n, const std::vector<double>& theta_star,
                                  std::uint64_t seed);
std::vector<double> read_data_csv(const std::string& path);

Box resolve_box(const ExperimentConfig& config, const MomentModel& model);
Measure make_pi(const ExperimentConfig& config, const MomentModel& model, const std::vector<double>& data);
KernelTransform make_kernel(const ExperimentConfig& config, const std::vector<double>& data);
EigenSpec make_eigen_spec(const ExperimentConfig& config);
MeanRule make_mean_rule(const ExperimentConfig& config, const SampleTransform& st);

// Throws StageError tagged with the failing stage.
Pipeline build_pipeline(const ExperimentConfig& config, std::vector<double> data);
Pipeline build_pipeline(const ExperimentConfig& config);

struct ConjugateResult {
  GaussianSummary prior;
  GaussianSummary posterior;
};

// Closed-form prior and posterior of theta = <f, x> on the linear-functional path.
ConjugateResult conjugate_estimate(const Pipeline& pipeline);

}  // namespace gpm
