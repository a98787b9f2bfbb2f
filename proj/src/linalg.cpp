#include "gpm/linalg.hpp"

#include <cmath>

#include "gpm/error.hpp"

namespace gpm {

Eigen::MatrixXd symmetric_power(const Eigen::MatrixXd& a, double power, double relative_cutoff) {
  if (a.rows() != a.cols()) throw DimensionError("symmetric_power", a.rows(), a.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) throw SingularSystemError("symmetric eigendecomposition failed");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = relative_cutoff * std::max(0.0, ev.maxCoeff());
  Eigen::VectorXd scaled(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    scaled[i] = ev[i] > cutoff ? std::pow(ev[i], power) : 0.0;
  return eig.eigenvectors() * scaled.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::Index symmetric_rank(const Eigen::MatrixXd& a, double relative_cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = relative_cutoff * std::max(0.0, ev.maxCoeff());
  return (ev.array() > cutoff).count();
}

}  // namespace gpm
