#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string_view>

#include "gpm/basis.hpp"
#include "gpm/grid.hpp"
#include "gpm/moment_model.hpp"
#include "gpm/sampling_model.hpp"

namespace gpm {

struct EigenSpec {
  enum class Kind { polynomial, geometric };
  Kind kind = Kind::polynomial;
  double rate = 1.7;  // alpha (polynomial j^-alpha) or a (geometric a^j)
  double sigma0 = 1.0;
  double c = 1.0;
  std::size_t J = 300;

  double lambda(std::size_t j) const;
  // J-vector c*sigma0*lambda_j with zeros on indices 0..d.
  Eigen::VectorXd eigenvalues(std::size_t d) const;
  void validate(std::size_t d) const;
};

EigenSpec::Kind parse_eigen_kind(std::string_view name);

// Orthonormalized constraint functions (1, h_1, ..., h_d) at one theta.
struct ConstraintBasis {
  Eigen::MatrixXd functions;  // (d+1) x M raw rows (1, h_1, ..., h_d)
  Eigen::MatrixXd rows;       // (d+1) x M orthonormal rows phi_0..phi_d
  Eigen::MatrixXd factor;     // lower triangular, functions = factor * rows

  std::size_t d() const { return static_cast<std::size_t>(rows.rows()) - 1; }
  // v = factor^{-1} e_1: the coordinates <f, phi_j> shared by every f with
  // <f, 1> = 1 and <f, h_j> = 0.
  Eigen::VectorXd targets() const;
};

ConstraintBasis constraint_basis(const MomentModel& model, const Theta& theta, const Measure& pi);
// Only the normalization <f, 1> = 1.
ConstraintBasis normalization_basis(const Measure& pi);

class ConstrainedGpPrior {
 public:
  ConstrainedGpPrior(ConstraintBasis constraints, std::shared_ptr<const Eigen::MatrixXd> completion,
                     Eigen::VectorXd eigenvalues, GridFn mean, Measure measure, Theta theta);

  std::size_t d() const { return constraints_.d(); }
  std::size_t size() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  // J x M; rows 0..d are the constraint rows.
  Eigen::MatrixXd basis() const;
  const ConstraintBasis& constraints() const { return constraints_; }
  // Rows d+1..J-1 of the basis.
  const Eigen::MatrixXd& completion() const { return *completion_; }
  const std::shared_ptr<const Eigen::MatrixXd>& completion_ptr() const { return completion_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const GridFn& prior_mean() const { return mean_; }
  const Measure& measure() const { return measure_; }
  const Theta& theta() const { return theta_; }

  GridFn apply_covariance(const GridFn& v) const;
  GridFn apply_covariance_sqrt(const GridFn& v) const;
  // M x M operator matrix of the covariance (acts on grid values, weights included).
  Eigen::MatrixXd covariance_matrix() const;
  // (<f,1> - 1, <f,h_1>, ..., <f,h_d>)
  Eigen::VectorXd constraint_residuals(const GridFn& f) const;

  ConstrainedGpPrior with_mean(GridFn mean) const;

 private:
  ConstraintBasis constraints_;
  std::shared_ptr<const Eigen::MatrixXd> completion_;
  Eigen::VectorXd eigenvalues_;
  GridFn mean_;
  Measure measure_;
  Theta theta_;
};

// Prior mean rules. Each receives the constraint basis, the completion rows and theta.
using MeanRule = std::function<GridFn(const ConstraintBasis&, const Eigen::MatrixXd&, const Theta&, const Measure&)>;

// Affine projection onto {f : <f,1> = 1, <f,h_j> = 0} closest in the measure's norm.
GridFn project_onto_constraints(const GridFn& f, const ConstraintBasis& constraints, const Measure& pi);

// base + sum_k a_k * completion_k, where base is the smallest constrained function in
// the constraint span (the constant 1 when the measure already satisfies the moments).
GridFn prior_mean_series(const ConstraintBasis& constraints, const Eigen::MatrixXd& completion,
                         const std::map<std::size_t, double>& coefficients, const Measure& pi);
// Beta(p_theta, q) density on [-1, 1] relative to the measure density, p_theta fixed by the mean.
GridFn prior_mean_beta(const Theta& theta, double q, const Measure& pi);
double beta_shape_for_mean(double theta, double q);
GridFn prior_mean_two_step(const GridFn& pilot, const ConstraintBasis& constraints, const Measure& pi);
// (alpha I + K*K)^{-1} K* r_n
GridFn tikhonov_pilot(const SampleTransform& st, double alpha);
// N(location, 1) density relative to the measure density.
GridFn normal_density_mean(double location, const Measure& pi);

MeanRule series_rule(std::map<std::size_t, double> coefficients);
MeanRule beta_rule(double q);
MeanRule two_step_rule(GridFn pilot);
MeanRule normal_rule(double location);

ConstrainedGpPrior build_prior(const ConstraintBasis& constraints, const EigenSpec& spec, const Measure& pi,
                               BasisFamily family, const MeanRule& mean, const Theta& theta);
ConstrainedGpPrior build_prior(const MomentModel& model, const Theta& theta, const EigenSpec& spec,
                               const Measure& pi, BasisFamily family, const MeanRule& mean);

GridFn sample_prior(const ConstrainedGpPrior& prior, Rng& rng);

// Builds priors across theta. When span{1, h(theta)} coincides with the span at the
// reference theta (separable moment functions), the completion rows do not depend on
// theta and are computed once.
class PriorFactory {
 public:
  PriorFactory(MomentModel model, Measure pi, EigenSpec spec, BasisFamily family, MeanRule mean,
               const Theta& reference);

  ConstrainedGpPrior operator()(const Theta& theta) const;
  ConstraintBasis constraints(const Theta& theta) const { return constraint_basis(model_, theta, pi_); }
  // True when the constraint rows span the reference constraint space.
  bool shares_completion(const ConstraintBasis& constraints) const;
  const std::shared_ptr<const Eigen::MatrixXd>& reference_completion() const { return completion_; }
  const std::vector<std::size_t>& skipped_candidates() const { return skipped_; }

  const MomentModel& model() const { return model_; }
  const Measure& measure() const { return pi_; }
  const EigenSpec& spec() const { return spec_; }

 private:
  MomentModel model_;
  Measure pi_;
  EigenSpec spec_;
  BasisFamily family_;
  MeanRule mean_;
  Eigen::MatrixXd reference_rows_;
  std::shared_ptr<const Eigen::MatrixXd> completion_;
  std::vector<std::size_t> skipped_;
  Eigen::VectorXd eigenvalues_;
};

}  // namespace gpm
