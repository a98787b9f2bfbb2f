#include "gpm/sampling_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gpm/error.hpp"
#include "gpm/kernels.hpp"

namespace gpm {

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "cdf") return TransformKind::cdf;
  if (name == "mgf") return TransformKind::mgf;
  if (name == "characteristic") return TransformKind::characteristic;
  throw ConfigError("unknown transform kind '" + std::string(name) + "'");
}

Regularization parse_regularization(std::string_view name) {
  if (name == "auto") return Regularization::automatic;
  if (name == "always") return Regularization::always;
  if (name == "never") return Regularization::never;
  throw ConfigError("unknown regularization policy '" + std::string(name) + "'");
}

KernelTransform KernelTransform::cdf(Measure rho) { return {TransformKind::cdf, std::move(rho)}; }
KernelTransform KernelTransform::mgf(Measure rho) { return {TransformKind::mgf, std::move(rho)}; }
KernelTransform KernelTransform::characteristic(Measure rho) {
  return {TransformKind::characteristic, std::move(rho)};
}
KernelTransform KernelTransform::custom(std::function<double(double, double)> k, Measure rho) {
  KernelTransform out{TransformKind::custom, std::move(rho)};
  out.custom_ = std::move(k);
  return out;
}

std::size_t KernelTransform::rows() const {
  return kind_ == TransformKind::characteristic ? 2 * rho_.size() : rho_.size();
}

double KernelTransform::operator()(std::size_t row, double x) const {
  const std::size_t m = rho_.size();
  const double t = rho_.nodes()[static_cast<Eigen::Index>(row < m ? row : row - m)];
  switch (kind_) {
    case TransformKind::cdf: return x <= t ? 1.0 : 0.0;
    case TransformKind::mgf: return std::exp(t * x);
    case TransformKind::characteristic: return row < m ? std::cos(t * x) : std::sin(t * x);
    case TransformKind::custom: return custom_(t, x);
  }
  return 0.0;
}

Eigen::VectorXd KernelTransform::row_weights() const {
  if (kind_ != TransformKind::characteristic) return rho_.weights();
  Eigen::VectorXd w(2 * rho_.weights().size());
  w << rho_.weights(), rho_.weights();
  return w;
}

Eigen::VectorXd KernelTransform::row_nodes() const {
  if (kind_ != TransformKind::characteristic) return rho_.nodes();
  Eigen::VectorXd t(2 * rho_.nodes().size());
  t << rho_.nodes(), rho_.nodes();
  return t;
}

namespace {

Eigen::VectorXd as_vector(std::span<const double> data) {
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace

Eigen::VectorXd compute_rn(const KernelTransform& kernel, std::span<const double> data) {
  if (data.empty()) throw DomainError("r_n needs at least one observation");
  return kernels::parallel::kernel_matrix(kernel, as_vector(data)).rowwise().mean();
}

Eigen::MatrixXd build_K(const KernelTransform& kernel, const Measure& pi) {
  return kernels::parallel::kernel_matrix(kernel, pi.nodes()) * pi.weights().asDiagonal();
}

Eigen::MatrixXd build_K_adjoint(const KernelTransform& kernel, const Measure& pi) {
  return kernels::parallel::kernel_matrix(kernel, pi.nodes()).transpose() * kernel.row_weights().asDiagonal();
}

Eigen::MatrixXd build_sigma_kernel(const KernelTransform& kernel, std::span<const double> data) {
  if (data.size() < 2) throw DomainError("covariance of r_n needs n >= 2");
  return kernels::parallel::sigma_kernel(kernels::parallel::kernel_matrix(kernel, as_vector(data)));
}

Eigen::MatrixXd build_sigma(const KernelTransform& kernel, std::span<const double> data) {
  return build_sigma_kernel(kernel, data) * kernel.row_weights().asDiagonal();
}

Eigen::MatrixXd regularize_sigma(const Eigen::MatrixXd& sigma, std::size_t n) {
  if (sigma.rows() != sigma.cols()) throw DimensionError("regularize_sigma", sigma.rows(), sigma.cols());
  if (n == 0) throw DomainError("regularize_sigma needs n >= 1");
  Eigen::MatrixXd out = sigma;
  out.diagonal().array() += 1.0 / static_cast<double>(n);
  return out;
}

double sigma_condition(const Eigen::MatrixXd& sigma_kernel, const Eigen::VectorXd& rho_weights) {
  Eigen::VectorXd s = rho_weights.cwiseSqrt();
  Eigen::MatrixXd sym = s.asDiagonal() * sigma_kernel * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

SampleTransform build_sample_transform(const KernelTransform& kernel, const Measure& pi,
                                       std::span<const double> data, Regularization policy) {
  if (data.size() < 2) throw DomainError("sample transform needs n >= 2");
  SampleTransform st;
  st.n = data.size();
  const Eigen::MatrixXd raw_x = kernels::parallel::kernel_matrix(kernel, pi.nodes());
  const Eigen::MatrixXd raw_data = kernels::parallel::kernel_matrix(kernel, as_vector(data));
  st.rho_weights = kernel.row_weights();
  st.pi_weights = pi.weights();
  st.rn = raw_data.rowwise().mean();
  st.K = raw_x * pi.weights().asDiagonal();
  st.K_adj = raw_x.transpose() * st.rho_weights.asDiagonal();
  st.sigma_kernel = kernels::parallel::sigma_kernel(raw_data);
  st.Sigma = st.sigma_kernel * st.rho_weights.asDiagonal();
  st.regularized = policy == Regularization::always ||
                   (policy == Regularization::automatic && sigma_condition(st.sigma_kernel, st.rho_weights) > 1e12);
  if (st.regularized) st.Sigma = regularize_sigma(st.Sigma, st.n);
  return st;
}

}  // namespace gpm
