#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gpm/moment_model.hpp"
#include "gpm/sampling_model.hpp"

// Data-parallel kernels. `serial` holds plain loop implementations kept as the
// reference; `parallel` holds the OpenMP versions used by the library.
namespace gpm::kernels {

namespace serial {
// (i, j) = k(row i, x_j)
Eigen::MatrixXd kernel_matrix(const KernelTransform& kernel, const Eigen::VectorXd& x);
// sigma(t_i, t_l) = n^{-1} sum_j k_ij k_lj - r_i r_l from the raw kernel matrix of the sample.
Eigen::MatrixXd sigma_kernel(const Eigen::MatrixXd& raw);
// basis^T diag(eigenvalues) basis diag(weights)
Eigen::MatrixXd spectral_operator(const Eigen::MatrixXd& basis, const Eigen::VectorXd& eigenvalues,
                                  const Eigen::VectorXd& weights);
std::vector<double> evaluate_all(const std::function<double(const Theta&)>& f, const std::vector<Theta>& thetas);
}  // namespace serial

namespace parallel {
Eigen::MatrixXd kernel_matrix(const KernelTransform& kernel, const Eigen::VectorXd& x);
Eigen::MatrixXd sigma_kernel(const Eigen::MatrixXd& raw);
Eigen::MatrixXd spectral_operator(const Eigen::MatrixXd& basis, const Eigen::VectorXd& eigenvalues,
                                  const Eigen::VectorXd& weights);
std::vector<double> evaluate_all(const std::function<double(const Theta&)>& f, const std::vector<Theta>& thetas);
}  // namespace parallel

}  // namespace gpm::kernels
