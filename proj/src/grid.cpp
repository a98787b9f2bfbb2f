#include "gpm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpm/error.hpp"

namespace gpm {

Grid::Grid(double lo, double hi, std::size_t size) : lo_(lo), hi_(hi) {
  if (size < 2) throw DomainError("grid needs at least 2 points, got " + std::to_string(size));
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("grid bounds must be finite with lo < hi");
  step_ = (hi - lo) / static_cast<double>(size - 1);
  points_.resize(static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) points_[static_cast<Eigen::Index>(i)] = lo + step_ * static_cast<double>(i);
  points_[points_.size() - 1] = hi;
}

Grid Grid::covering(std::span<const double> sample, double margin, std::size_t size) {
  if (sample.empty()) throw DomainError("cannot build a grid around an empty sample");
  auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  return Grid(*lo - margin, *hi + margin, size);
}

Measure Measure::trapezoid(const Grid& grid, Eigen::VectorXd density) {
  if (static_cast<std::size_t>(density.size()) != grid.size())
    throw DimensionError("measure density", static_cast<std::size_t>(density.size()), grid.size());
  for (Eigen::Index i = 0; i < density.size(); ++i)
    if (!(density[i] >= 0.0) || !std::isfinite(density[i]))
      throw DomainError("measure density must be finite and non-negative (node " + std::to_string(i) + ")");
  Measure m;
  m.kind_ = Kind::trapezoid;
  m.nodes_ = grid.points();
  m.density_ = std::move(density);
  m.weights_ = m.density_ * grid.step();
  m.weights_[0] *= 0.5;
  m.weights_[m.weights_.size() - 1] *= 0.5;
  m.grid_ = grid;
  return m;
}

Measure Measure::trapezoid(const Grid& grid, const std::function<double(double)>& density) {
  Eigen::VectorXd d(grid.points().size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = density(grid.points()[i]);
  return trapezoid(grid, std::move(d));
}

Measure Measure::lebesgue(const Grid& grid) {
  return trapezoid(grid, Eigen::VectorXd::Ones(grid.points().size()));
}

Measure Measure::empirical(std::span<const double> sample) {
  if (sample.empty()) throw DomainError("empirical measure of an empty sample");
  Measure m;
  m.kind_ = Kind::empirical;
  m.nodes_ = Eigen::Map<const Eigen::VectorXd>(sample.data(), static_cast<Eigen::Index>(sample.size()));
  m.density_ = Eigen::VectorXd::Ones(m.nodes_.size());
  m.weights_ = Eigen::VectorXd::Constant(m.nodes_.size(), 1.0 / static_cast<double>(sample.size()));
  return m;
}

Measure Measure::scaled(double factor) const {
  Measure m = *this;
  m.weights_ *= factor;
  m.density_ *= factor;
  return m;
}

double inner_product(const GridFn& f, const GridFn& g, const Measure& m) {
  if (f.size() != g.size()) throw DimensionError("inner_product", f.size(), g.size());
  if (static_cast<std::size_t>(f.size()) != m.size())
    throw DimensionError("inner_product vs measure", f.size(), m.size());
  return (f.array() * g.array() * m.weights().array()).sum();
}

double norm(const GridFn& f, const Measure& m) { return std::sqrt(inner_product(f, f, m)); }

Orthonormalization gram_schmidt(const Eigen::MatrixXd& vectors, const Measure& m) {
  const Eigen::Index k = vectors.rows();
  if (static_cast<std::size_t>(vectors.cols()) != m.size())
    throw DimensionError("gram_schmidt vectors vs measure", vectors.cols(), m.size());
  const Eigen::VectorXd& w = m.weights();
  Orthonormalization out{Eigen::MatrixXd::Zero(k, vectors.cols()), Eigen::MatrixXd::Zero(k, k)};
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd v = vectors.row(j).transpose();
    const double input_norm = std::sqrt(v.dot(w.cwiseProduct(v)));
    if (!std::isfinite(input_norm)) throw EvaluationError("non-finite vector at index " + std::to_string(j));
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(j);
    for (int pass = 0; pass < 2 && j > 0; ++pass) {
      auto prev = out.basis.topRows(j);
      Eigen::VectorXd c = prev * w.cwiseProduct(v);
      v.noalias() -= prev.transpose() * c;
      coeff += c;
    }
    const double r = std::sqrt(v.dot(w.cwiseProduct(v)));
    if (input_norm == 0.0 || r < kDependenceTolerance * input_norm)
      throw DegenerateBasisError(static_cast<std::size_t>(j), input_norm == 0.0 ? 0.0 : r / input_norm);
    out.basis.row(j) = v.transpose() / r;
    out.factor.row(j).head(j) = coeff.transpose();
    out.factor(j, j) = r;
  }
  return out;
}

}  // namespace gpm
