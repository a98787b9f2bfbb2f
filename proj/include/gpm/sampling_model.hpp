#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>

#include "gpm/grid.hpp"

namespace gpm {

enum class TransformKind { cdf, mgf, characteristic, custom };
enum class Regularization { automatic, always, never };

TransformKind parse_transform_kind(std::string_view name);
Regularization parse_regularization(std::string_view name);

// k(t, x) on the nodes of rho. The characteristic kind stacks cos(tx) and sin(tx)
// as two blocks of rows, so the transform has twice as many rows as t nodes.
class KernelTransform {
 public:
  static KernelTransform cdf(Measure rho);
  static KernelTransform mgf(Measure rho);
  static KernelTransform characteristic(Measure rho);
  static KernelTransform custom(std::function<double(double, double)> k, Measure rho);

  TransformKind kind() const { return kind_; }
  std::size_t rows() const;
  double operator()(std::size_t row, double x) const;
  const Measure& rho() const { return rho_; }
  // Quadrature weights of the rows (duplicated for the characteristic kind).
  Eigen::VectorXd row_weights() const;
  // t value attached to each row.
  Eigen::VectorXd row_nodes() const;

 private:
  KernelTransform(TransformKind kind, Measure rho) : kind_(kind), rho_(std::move(rho)) {}
  TransformKind kind_;
  Measure rho_;
  std::function<double(double, double)> custom_;
};

struct SampleTransform {
  Eigen::VectorXd rn;            // r_n on the transform rows
  Eigen::MatrixXd K;             // (i, j) = k(t_i, x_j) pi_j
  Eigen::MatrixXd K_adj;         // (j, i) = k(t_i, x_j) rho_i
  Eigen::MatrixXd sigma_kernel;  // sigma(t_i, t_l), symmetric
  Eigen::MatrixXd Sigma;         // (i, l) = sigma(t_i, t_l) rho_l, plus I/n when regularized
  Eigen::VectorXd rho_weights;
  Eigen::VectorXd pi_weights;
  std::size_t n = 0;
  bool regularized = false;

  // Regularization shift applied to the operator (1/n or 0).
  double shift() const { return regularized ? 1.0 / static_cast<double>(n) : 0.0; }
};

Eigen::VectorXd compute_rn(const KernelTransform& kernel, std::span<const double> data);
Eigen::MatrixXd build_K(const KernelTransform& kernel, const Measure& pi);
Eigen::MatrixXd build_K_adjoint(const KernelTransform& kernel, const Measure& pi);
// Unweighted sigma(t_i, t_l) from the sample.
Eigen::MatrixXd build_sigma_kernel(const KernelTransform& kernel, std::span<const double> data);
Eigen::MatrixXd build_sigma(const KernelTransform& kernel, std::span<const double> data);
Eigen::MatrixXd regularize_sigma(const Eigen::MatrixXd& sigma, std::size_t n);

// Condition number of the symmetric form R^{1/2} sigma R^{1/2} of the operator.
double sigma_condition(const Eigen::MatrixXd& sigma_kernel, const Eigen::VectorXd& rho_weights);

SampleTransform build_sample_transform(const KernelTransform& kernel, const Measure& pi,
                                       std::span<const double> data, Regularization policy);

}  // namespace gpm
