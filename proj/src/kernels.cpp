#include "gpm/kernels.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "gpm/error.hpp"

namespace gpm::kernels {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j)))
        throw EvaluationError(std::string("non-finite ") + what + " at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
}

}  // namespace

namespace serial {

Eigen::MatrixXd kernel_matrix(const KernelTransform& kernel, const Eigen::VectorXd& x) {
  const auto rows = static_cast<Eigen::Index>(kernel.rows());
  Eigen::MatrixXd out(rows, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = kernel(static_cast<std::size_t>(i), x[j]);
  check_finite(out, "kernel value");
  return out;
}

Eigen::MatrixXd sigma_kernel(const Eigen::MatrixXd& raw) {
  const Eigen::Index m = raw.rows(), n = raw.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd r = raw.rowwise().sum() * inv_n;
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index l = 0; l <= i; ++l) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) s += raw(i, j) * raw(l, j);
      out(i, l) = out(l, i) = s * inv_n - r[i] * r[l];
    }
  return out;
}

Eigen::MatrixXd spectral_operator(const Eigen::MatrixXd& basis, const Eigen::VectorXd& eigenvalues,
                                  const Eigen::VectorXd& weights) {
  const Eigen::Index m = basis.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index i = 0; i < m; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < basis.rows(); ++j) s += basis(j, i) * eigenvalues[j] * basis(j, k);
      out(i, k) = s * weights[k];
    }
  return out;
}

std::vector<double> evaluate_all(const std::function<double(const Theta&)>& f, const std::vector<Theta>& thetas) {
  std::vector<double> out(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) out[i] = f(thetas[i]);
  return out;
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXd kernel_matrix(const KernelTransform& kernel, const Eigen::VectorXd& x) {
  const auto rows = static_cast<Eigen::Index>(kernel.rows());
  Eigen::MatrixXd out(rows, x.size());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < x.size(); ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = kernel(static_cast<std::size_t>(i), x[j]);
  check_finite(out, "kernel value");
  return out;
}

Eigen::MatrixXd sigma_kernel(const Eigen::MatrixXd& raw) {
  const Eigen::Index m = raw.rows();
  const double inv_n = 1.0 / static_cast<double>(raw.cols());
  Eigen::VectorXd r = raw.rowwise().sum() * inv_n;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  out.selfadjointView<Eigen::Lower>().rankUpdate(raw, inv_n);
  out.selfadjointView<Eigen::Lower>().rankUpdate(r, -1.0);
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

Eigen::MatrixXd spectral_operator(const Eigen::MatrixXd& basis, const Eigen::VectorXd& eigenvalues,
                                  const Eigen::VectorXd& weights) {
  Eigen::MatrixXd scaled = eigenvalues.asDiagonal() * basis;
  Eigen::MatrixXd out(basis.cols(), basis.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < basis.cols(); ++k)
    out.col(k).noalias() = basis.transpose() * (scaled.col(k) * weights[k]);
  return out;
}

std::vector<double> evaluate_all(const std::function<double(const Theta&)>& f, const std::vector<Theta>& thetas) {
  std::vector<double> out(thetas.size());
  std::vector<std::exception_ptr> errors(thetas.size());
  const auto count = static_cast<long>(thetas.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = f(thetas[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace parallel

}  // namespace gpm::kernels
