#pragma once

#include <Eigen/Dense>

namespace gpm {

// a^power for a symmetric positive semi-definite matrix via its eigendecomposition.
// Eigenvalues below `relative_cutoff` times the largest are treated as zero, so
// negative powers give the Moore-Penrose inverse power on the retained subspace.
Eigen::MatrixXd symmetric_power(const Eigen::MatrixXd& a, double power, double relative_cutoff = 1e-12);

// Number of eigenvalues retained by symmetric_power for the same cutoff.
Eigen::Index symmetric_rank(const Eigen::MatrixXd& a, double relative_cutoff = 1e-12);

}  // namespace gpm
