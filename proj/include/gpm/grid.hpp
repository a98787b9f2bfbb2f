#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>

namespace gpm {

// A function sampled on the nodes of a Measure.
using GridFn = Eigen::VectorXd;

class Grid {
 public:
  Grid(double lo, double hi, std::size_t size);

  // [min(sample) - margin, max(sample) + margin]
  static Grid covering(std::span<const double> sample, double margin, std::size_t size);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return step_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.size()); }
  const Eigen::VectorXd& points() const { return points_; }
  double operator[](std::size_t i) const { return points_[static_cast<Eigen::Index>(i)]; }

 private:
  double lo_, hi_, step_;
  Eigen::VectorXd points_;
};

// Discrete stand-in for a measure on the real line: nodes with quadrature weights.
// Trapezoid measures carry the grid and the density; the empirical measure puts
// mass 1/n on each observation.
class Measure {
 public:
  enum class Kind { trapezoid, empirical };

  static Measure trapezoid(const Grid& grid, Eigen::VectorXd density);
  static Measure trapezoid(const Grid& grid, const std::function<double(double)>& density);
  static Measure lebesgue(const Grid& grid);
  static Measure empirical(std::span<const double> sample);

  Kind kind() const { return kind_; }
  std::size_t size() const { return static_cast<std::size_t>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& density() const { return density_; }
  const std::optional<Grid>& grid() const { return grid_; }
  double total_mass() const { return weights_.sum(); }
  std::pair<double, double> bounds() const { return {nodes_.minCoeff(), nodes_.maxCoeff()}; }

  // Same nodes and density, weights multiplied by `factor`.
  Measure scaled(double factor) const;

 private:
  Measure() = default;
  Kind kind_ = Kind::trapezoid;
  Eigen::VectorXd nodes_, weights_, density_;
  std::optional<Grid> grid_;
};

double inner_product(const GridFn& f, const GridFn& g, const Measure& m);
double norm(const GridFn& f, const Measure& m);

// Rows of `basis` are orthonormal under `m`; inputs = factor * basis with
// `factor` lower triangular (row j of the input is a combination of basis rows 0..j).
struct Orthonormalization {
  Eigen::MatrixXd basis;
  Eigen::MatrixXd factor;
};

// Gram-Schmidt with one re-orthogonalization pass, applied to the rows of `vectors`.
// Throws DegenerateBasisError when a residual falls below 1e-12 of its input norm.
Orthonormalization gram_schmidt(const Eigen::MatrixXd& vectors, const Measure& m);

inline constexpr double kDependenceTolerance = 1e-12;

}  // namespace gpm
