#include <cmath>
#include <limits>
#include <string>

#include "gpm/error.hpp"
#include "gpm/posterior.hpp"

namespace gpm {

PosteriorPath parse_posterior_path(std::string_view name) {
  if (name == "svd") return PosteriorPath::svd;
  if (name == "basis") return PosteriorPath::basis;
  if (name == "cu_gmm") return PosteriorPath::cu_gmm;
  if (name == "conjugate") return PosteriorPath::conjugate;
  throw ConfigError("unknown posterior path '" + std::string(name) + "'");
}

std::string_view to_string(PosteriorPath path) {
  switch (path) {
    case PosteriorPath::svd: return "svd";
    case PosteriorPath::basis: return "basis";
    case PosteriorPath::cu_gmm: return "cu_gmm";
    case PosteriorPath::conjugate: return "conjugate";
  }
  return "?";
}

namespace {

// n^{-1} Sigma + K omega K*
Eigen::PartialPivLU<Eigen::MatrixXd> marginal_system(const Eigen::MatrixXd& omega_kadj, const SampleTransform& st) {
  Eigen::MatrixXd c = st.Sigma / static_cast<double>(st.n);
  c.noalias() += st.K * omega_kadj;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(c);
  if (!(lu.rcond() > 1e-15))
    throw SingularSystemError("marginal covariance of r_n is singular; enable transform.regularize");
  return lu;
}

}  // namespace

GaussianSummary conjugate_linear_posterior(const GridFn& f0, const Eigen::MatrixXd& omega, const SampleTransform& st,
                                           const GridFn& g) {
  if (omega.rows() != f0.size() || omega.cols() != f0.size())
    throw DimensionError("conjugate posterior: omega vs f0", omega.rows(), f0.size());
  if (g.size() != f0.size()) throw DimensionError("conjugate posterior: g vs f0", g.size(), f0.size());
  const Eigen::VectorXd wg = st.pi_weights.cwiseProduct(g);
  const Eigen::MatrixXd omega_kadj = omega * st.K_adj;
  auto lu = marginal_system(omega_kadj, st);
  // <A v, g> = (omega K*)^T W g . C^{-1} v, so one transposed solve serves mean and variance.
  const Eigen::VectorXd a_t_g = lu.transpose().solve(omega_kadj.transpose() * wg);
  const Eigen::VectorXd resid = st.rn - st.K * f0;
  GaussianSummary out;
  out.mean = wg.dot(f0) + a_t_g.dot(resid);
  const Eigen::VectorXd omega_g = omega * g;
  out.variance = wg.dot(omega_g) - a_t_g.dot(st.K * omega_g);
  return out;
}

FunctionPosterior conditional_posterior_f(const ConstrainedGpPrior& prior, const SampleTransform& st) {
  const Eigen::MatrixXd omega = prior.covariance_matrix();
  const Eigen::MatrixXd omega_kadj = omega * st.K_adj;
  auto lu = marginal_system(omega_kadj, st);
  FunctionPosterior out;
  out.mean = prior.prior_mean() + omega_kadj * lu.solve(st.rn - st.K * prior.prior_mean());
  out.covariance = omega - omega_kadj * lu.solve(st.K * omega);
  return out;
}

MomentMatrices sample_moment_matrices(const MomentModel& model, const Theta& theta, std::span<const double> data) {
  if (data.empty()) throw DomainError("moment matrices of an empty sample");
  const auto d = static_cast<Eigen::Index>(model.d), p = static_cast<Eigen::Index>(model.p);
  MomentMatrices out{Eigen::MatrixXd::Zero(d, p), Eigen::MatrixXd::Zero(d, d)};
  for (double x : data) {
    Eigen::VectorXd h = model.h(theta, x);
    out.second_moment.noalias() += h * h.transpose();
    out.mean_jacobian += model.jacobian(theta, x);
  }
  out.second_moment /= static_cast<double>(data.size());
  out.mean_jacobian /= static_cast<double>(data.size());
  return out;
}

AsymptoticInfo asymptotic_information(const MomentMatrices& moments, std::size_t n) {
  const Eigen::MatrixXd& g = moments.mean_jacobian;
  const Eigen::MatrixXd& v = moments.second_moment;
  if (v.rows() != v.cols() || v.rows() != g.rows()) throw DimensionError("moment matrices", v.rows(), g.rows());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(v);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14))
    throw SingularSystemError("singular second-moment matrix E[h h^T]");
  AsymptoticInfo out;
  out.info = g.transpose() * ldlt.solve(g);
  out.info = 0.5 * (out.info + out.info.transpose());
  Eigen::MatrixXd inv = out.info.inverse();
  out.posterior_sd_pred = (inv.diagonal() / static_cast<double>(n)).cwiseSqrt();
  return out;
}

LogPosterior::LogPosterior(PosteriorPath path, std::function<double(const Theta&)> log_lik, ThetaPrior prior)
    : path_(path), log_lik_(std::move(log_lik)), prior_(std::move(prior)) {}

double LogPosterior::operator()(const Theta& theta) const {
  const double lp = prior_.log_density(theta);
  if (lp == -std::numeric_limits<double>::infinity()) return lp;
  return lp + log_lik_(theta);
}

}  // namespace gpm
