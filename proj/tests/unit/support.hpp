#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

#include "gpm/grid.hpp"

namespace gpm::test {

// Seeded generator for property tests. Every case draws from its own stream so
// failures replay deterministically.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (auto& x : v) x = normal();
    return v;
  }
  std::vector<double> sample(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Gram matrix of the rows under the measure.
inline Eigen::MatrixXd gram(const Eigen::MatrixXd& rows, const Measure& m) {
  return rows * m.weights().asDiagonal() * rows.transpose();
}

}  // namespace gpm::test
