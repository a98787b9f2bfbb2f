#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace gpm {

using Theta = Eigen::VectorXd;
using Rng = std::mt19937_64;
using Box = std::vector<std::pair<double, double>>;

struct MomentModel {
  std::string name;
  std::size_t d = 0;
  std::size_t p = 0;
  Box theta_box;
  std::pair<double, double> support;
  std::function<Eigen::VectorXd(const Theta&, double)> h;
  std::function<Eigen::MatrixXd(const Theta&, double)> dh_dtheta;  // d x p, may be empty
  // Draws n observations from the data-generating process indexed by theta_star.
  std::function<std::vector<double>(std::size_t, const Theta&, Rng&)> simulate;

  bool in_box(const Theta& theta) const;
  // Analytic Jacobian when supplied, central differences otherwise.
  Eigen::MatrixXd jacobian(const Theta& theta, double x) const;
  MomentModel with_box(Box box) const;
};

struct ThetaPrior {
  enum class Kind { uniform, custom };
  Kind kind = Kind::uniform;
  std::function<double(const Theta&)> log_density;
  std::function<Theta(Rng&)> sample;

  static ThetaPrior uniform(const Box& box);
};

// Row j, column i holds h_j(theta, points_i).
Eigen::MatrixXd evaluate_h_matrix(const MomentModel& model, const Theta& theta, const Eigen::VectorXd& points);

// mean_gaussian, mean_truncated, exponential_overid
const std::map<std::string, MomentModel>& builtin_models();
const MomentModel& builtin_model(const std::string& name);

Theta scalar_theta(double value);

}  // namespace gpm
