#include <cmath>
#include <sstream>
#include <string>

#include "gpm/error.hpp"
#include "gpm/linalg.hpp"
#include "gpm/posterior.hpp"

namespace gpm {

namespace {

std::string theta_text(const Theta& theta) {
  std::ostringstream out;
  out.precision(10);
  out << "theta = (";
  for (Eigen::Index k = 0; k < theta.size(); ++k) out << (k ? ", " : "") << theta[k];
  out << ")";
  return out.str();
}

Eigen::VectorXd safe_inverse(const Eigen::VectorXd& v) {
  return v.unaryExpr([](double x) { return x > 0.0 ? 1.0 / x : 0.0; });
}

}  // namespace

Whitening::Whitening(const SampleTransform& st, double relative_cutoff) : n_(st.n) {
  sqrt_rho_ = st.rho_weights.cwiseSqrt();
  sqrt_pi_ = st.pi_weights.cwiseSqrt();
  Eigen::MatrixXd s = sqrt_rho_.asDiagonal() * st.sigma_kernel * sqrt_rho_.asDiagonal();
  s.diagonal().array() += st.shift();
  Eigen::MatrixXd inv_sqrt = symmetric_power(s, -0.5, relative_cutoff);
  rank_ = symmetric_rank(s, relative_cutoff);
  Eigen::MatrixXd k_hat = sqrt_rho_.asDiagonal() * st.K * safe_inverse(sqrt_pi_).asDiagonal();
  G_.noalias() = inv_sqrt * k_hat;
  y_.noalias() = inv_sqrt * sqrt_rho_.cwiseProduct(st.rn);
}

SvdSystem svd_system(const Whitening& w, const Eigen::MatrixXd& completion, const Eigen::VectorXd& tail_eigenvalues) {
  Eigen::MatrixXd scaled = completion * w.sqrt_pi().asDiagonal();
  Eigen::MatrixXd b = w.G() * scaled.transpose() * tail_eigenvalues.cwiseSqrt().asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw EvaluationError("singular value decomposition failed");
  SvdSystem out;
  out.singular_values = svd.singularValues();
  out.whitened_right = svd.matrixU();
  out.right_functions = safe_inverse(w.sqrt_rho()).asDiagonal() * svd.matrixU();
  out.left_functions = completion.transpose() * svd.matrixV();
  return out;
}

SvdSystem svd_system(const Whitening& w, const ConstrainedGpPrior& prior) {
  const Eigen::MatrixXd& c = prior.completion();
  return svd_system(w, c, prior.eigenvalues().tail(c.rows()));
}

double log_lik_svd(const Whitening& w, const ConstrainedGpPrior& prior, const SvdSystem& system) {
  const double n = static_cast<double>(w.n());
  Eigen::VectorXd z = w.y() - w.G() * w.sqrt_pi().cwiseProduct(prior.prior_mean());
  Eigen::VectorXd proj = system.whitened_right.transpose() * z;
  const Eigen::ArrayXd nl2 = n * system.singular_values.array().square();
  const double outside = (z - system.whitened_right * proj).squaredNorm();
  const double inside = (proj.array().square() / (1.0 + nl2)).sum();
  const double value = -0.5 * nl2.log1p().sum() - 0.5 * n * (outside + inside);
  if (!std::isfinite(value)) throw EvaluationError("non-finite SVD-path likelihood at " + theta_text(prior.theta()));
  return value;
}

double log_lik_svd(const Whitening& w, const ConstrainedGpPrior& prior) {
  return log_lik_svd(w, prior, svd_system(w, prior));
}

double log_lik_basis(std::span<const double> data, const ConstrainedGpPrior& prior) {
  const Measure& m = prior.measure();
  if (m.kind() != Measure::Kind::empirical || m.size() != data.size())
    throw ConfigError("basis-form likelihood needs a prior built on the empirical measure of the data");
  for (std::size_t i = 0; i < data.size(); ++i)
    if (m.nodes()[static_cast<Eigen::Index>(i)] != data[i])
      throw ConfigError("basis-form likelihood: prior nodes differ from the data");
  const double n = static_cast<double>(data.size());
  const std::size_t d = prior.d();
  const Eigen::MatrixXd basis = prior.basis();
  const Eigen::VectorXd& f0 = prior.prior_mean();
  // <1 - f0, phi_j> under the empirical measure: sample average minus prior-mean coefficient.
  Eigen::VectorXd delta = basis * (Eigen::VectorXd::Ones(f0.size()) - f0) / n;
  Eigen::VectorXd tail = Eigen::VectorXd::Ones(f0.size()) - f0 - basis.transpose() * delta;
  const Eigen::VectorXd& lambda = prior.eigenvalues();
  double quad = tail.squaredNorm() / n;
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < delta.size(); ++j) {
    if (static_cast<std::size_t>(j) <= d) {
      quad += delta[j] * delta[j];
    } else {
      quad += delta[j] * delta[j] / (1.0 + n * lambda[j]);
      log_det += std::log1p(n * lambda[j]);
    }
  }
  const double value = -0.5 * n * quad - 0.5 * log_det;
  if (!std::isfinite(value)) throw EvaluationError("non-finite basis-path likelihood at " + theta_text(prior.theta()));
  return value;
}

double log_quasi_lik_cu_gmm(std::span<const double> data, const MomentModel& model, const Theta& theta) {
  if (data.empty()) throw DomainError("CU-GMM objective of an empty sample");
  const auto d = static_cast<Eigen::Index>(model.d);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
  for (double x : data) {
    Eigen::VectorXd h = model.h(theta, x);
    g += h;
    v.noalias() += h * h.transpose();
  }
  const double n = static_cast<double>(data.size());
  g /= n;
  v /= n;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(v);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14))
    throw SingularSystemError("singular moment covariance V_n at " + theta_text(theta));
  return -0.5 * n * g.dot(ldlt.solve(g));
}

SvdLikelihood::SvdLikelihood(std::shared_ptr<const PriorFactory> priors, std::shared_ptr<const Whitening> whitening)
    : priors_(std::move(priors)), whitening_(std::move(whitening)) {
  const Eigen::MatrixXd& c = *priors_->reference_completion();
  reference_ = svd_system(*whitening_, c, priors_->spec().eigenvalues(priors_->model().d).tail(c.rows()));
}

double SvdLikelihood::operator()(const Theta& theta) const {
  ConstrainedGpPrior prior = (*priors_)(theta);
  if (prior.completion_ptr() == priors_->reference_completion()) return log_lik_svd(*whitening_, prior, reference_);
  return log_lik_svd(*whitening_, prior);
}

SvdSystem SvdLikelihood::system(const Theta& theta) const {
  ConstrainedGpPrior prior = (*priors_)(theta);
  if (prior.completion_ptr() == priors_->reference_completion()) return reference_;
  return svd_system(*whitening_, prior);
}

BasisLikelihood::BasisLikelihood(std::shared_ptr<const PriorFactory> priors, std::vector<double> data)
    : priors_(std::move(priors)), data_(std::move(data)) {
  if (priors_->measure().kind() != Measure::Kind::empirical)
    throw ConfigError("basis-form likelihood needs the empirical-measure convention");
}

double BasisLikelihood::operator()(const Theta& theta) const { return log_lik_basis(data_, (*priors_)(theta)); }

}  // namespace gpm
