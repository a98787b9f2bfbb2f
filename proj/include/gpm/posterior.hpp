#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>

#include "gpm/gp_prior.hpp"
#include "gpm/moment_model.hpp"
#include "gpm/sampling_model.hpp"

namespace gpm {

// Coordinates in which both quadrature inner products are Euclidean: x-grid values
// are scaled by sqrt(pi weights), t-grid values by sqrt(rho weights). The operator
// Sigma becomes the symmetric S = R^{1/2} sigma R^{1/2} (+ I/n when regularized).
class Whitening {
 public:
  explicit Whitening(const SampleTransform& st, double relative_cutoff = 1e-12);

  const Eigen::MatrixXd& G() const { return G_; }  // S^{+1/2} K in whitened coordinates
  const Eigen::VectorXd& y() const { return y_; }  // S^{+1/2} r_n in whitened coordinates
  const Eigen::VectorXd& sqrt_pi() const { return sqrt_pi_; }
  const Eigen::VectorXd& sqrt_rho() const { return sqrt_rho_; }
  std::size_t n() const { return n_; }
  Eigen::Index rank() const { return rank_; }

 private:
  Eigen::MatrixXd G_;
  Eigen::VectorXd y_, sqrt_pi_, sqrt_rho_;
  std::size_t n_;
  Eigen::Index rank_;
};

struct SvdSystem {
  Eigen::VectorXd singular_values;   // nonincreasing
  Eigen::MatrixXd right_functions;   // columns: psi_j on the t rows, orthonormal under rho
  Eigen::MatrixXd left_functions;    // columns: on the x-grid, orthonormal under pi
  Eigen::MatrixXd whitened_right;    // columns: psi_j in whitened t coordinates
};

SvdSystem svd_system(const Whitening& w, const ConstrainedGpPrior& prior);
SvdSystem svd_system(const Whitening& w, const Eigen::MatrixXd& completion, const Eigen::VectorXd& tail_eigenvalues);

// -1/2 sum_j log(1 + n l_j^2) - 1/2 sum_j n <z, u_j>^2 / (1 + n l_j^2) with
// z = S^{+1/2}(r_n - K f0), summed over a complete orthonormal system of the range
// of S (directions with l_j = 0 contribute n <z, u_j>^2).
double log_lik_svd(const Whitening& w, const ConstrainedGpPrior& prior);
double log_lik_svd(const Whitening& w, const ConstrainedGpPrior& prior, const SvdSystem& system);

// Basis form under the empirical measure of `data`.
double log_lik_basis(std::span<const double> data, const ConstrainedGpPrior& prior);

double log_quasi_lik_cu_gmm(std::span<const double> data, const MomentModel& model, const Theta& theta);

// theta-indexed evaluators over shared immutable state; safe for concurrent calls.
class SvdLikelihood {
 public:
  SvdLikelihood(std::shared_ptr<const PriorFactory> priors, std::shared_ptr<const Whitening> whitening);
  double operator()(const Theta& theta) const;
  SvdSystem system(const Theta& theta) const;
  const PriorFactory& priors() const { return *priors_; }
  const Whitening& whitening() const { return *whitening_; }

 private:
  std::shared_ptr<const PriorFactory> priors_;
  std::shared_ptr<const Whitening> whitening_;
  SvdSystem reference_;
};

class BasisLikelihood {
 public:
  BasisLikelihood(std::shared_ptr<const PriorFactory> priors, std::vector<double> data);
  double operator()(const Theta& theta) const;

 private:
  std::shared_ptr<const PriorFactory> priors_;
  std::vector<double> data_;
};

struct GaussianSummary {
  double mean = 0.0;
  double variance = 0.0;
};

// Posterior of <f, g>_pi under f ~ GP(f0, omega) and r_n | f ~ N(K f, Sigma / n).
// `omega` is the covariance operator matrix acting on grid values.
GaussianSummary conjugate_linear_posterior(const GridFn& f0, const Eigen::MatrixXd& omega, const SampleTransform& st,
                                           const GridFn& g);

struct FunctionPosterior {
  GridFn mean;
  Eigen::MatrixXd covariance;  // operator matrix
};

FunctionPosterior conditional_posterior_f(const ConstrainedGpPrior& prior, const SampleTransform& st);

struct AsymptoticInfo {
  Eigen::MatrixXd info;
  Eigen::VectorXd posterior_sd_pred;
};

struct MomentMatrices {
  Eigen::MatrixXd mean_jacobian;  // E[dh/dtheta], d x p
  Eigen::MatrixXd second_moment;  // E[h h^T], d x d
};

MomentMatrices sample_moment_matrices(const MomentModel& model, const Theta& theta, std::span<const double> data);
AsymptoticInfo asymptotic_information(const MomentMatrices& moments, std::size_t n);

enum class PosteriorPath { svd, basis, cu_gmm, conjugate };
PosteriorPath parse_posterior_path(std::string_view name);
std::string_view to_string(PosteriorPath path);

class LogPosterior {
 public:
  LogPosterior(PosteriorPath path, std::function<double(const Theta&)> log_lik, ThetaPrior prior);

  // log prior + log likelihood; -inf where the prior vanishes (likelihood not evaluated).
  double operator()(const Theta& theta) const;
  double log_likelihood(const Theta& theta) const { return log_lik_(theta); }
  PosteriorPath path() const { return path_; }
  const ThetaPrior& prior() const { return prior_; }

 private:
  PosteriorPath path_;
  std::function<double(const Theta&)> log_lik_;
  ThetaPrior prior_;
};

}  // namespace gpm
