#include "gpm/moment_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "gpm/error.hpp"

namespace gpm {

Theta scalar_theta(double value) { return Theta::Constant(1, value); }

bool MomentModel::in_box(const Theta& theta) const {
  if (static_cast<std::size_t>(theta.size()) != p) return false;
  for (std::size_t k = 0; k < p; ++k) {
    const double v = theta[static_cast<Eigen::Index>(k)];
    if (!(v >= theta_box[k].first && v <= theta_box[k].second)) return false;
  }
  return true;
}

Eigen::MatrixXd MomentModel::jacobian(const Theta& theta, double x) const {
  if (dh_dtheta) return dh_dtheta(theta, x);
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(p));
  for (Eigen::Index k = 0; k < jac.cols(); ++k) {
    const double step = 1e-6 * std::max(1.0, std::abs(theta[k]));
    Theta up = theta, down = theta;
    up[k] += step;
    down[k] -= step;
    jac.col(k) = (h(up, x) - h(down, x)) / (2.0 * step);
  }
  return jac;
}

MomentModel MomentModel::with_box(Box box) const {
  if (box.size() != p) throw DimensionError("theta box", box.size(), p);
  MomentModel m = *this;
  m.theta_box = std::move(box);
  return m;
}

ThetaPrior ThetaPrior::uniform(const Box& box) {
  double log_volume = 0.0;
  for (const auto& [lo, hi] : box) {
    if (!(hi > lo)) throw DomainError("uniform prior needs lo < hi");
    log_volume += std::log(hi - lo);
  }
  ThetaPrior prior;
  prior.kind = Kind::uniform;
  prior.log_density = [box, log_volume](const Theta& theta) {
    if (static_cast<std::size_t>(theta.size()) != box.size()) return -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < box.size(); ++k) {
      const double v = theta[static_cast<Eigen::Index>(k)];
      if (!(v >= box[k].first && v <= box[k].second)) return -std::numeric_limits<double>::infinity();
    }
    return -log_volume;
  };
  prior.sample = [box](Rng& rng) {
    Theta theta(static_cast<Eigen::Index>(box.size()));
    for (std::size_t k = 0; k < box.size(); ++k)
      theta[static_cast<Eigen::Index>(k)] = std::uniform_real_distribution<double>(box[k].first, box[k].second)(rng);
    return theta;
  };
  return prior;
}

Eigen::MatrixXd evaluate_h_matrix(const MomentModel& model, const Theta& theta, const Eigen::VectorXd& points) {
  if (!model.in_box(theta)) throw DomainError("theta outside the parameter box of " + model.name);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(model.d), points.size());
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    Eigen::VectorXd col = model.h(theta, points[i]);
    if (static_cast<std::size_t>(col.size()) != model.d) throw DimensionError("h output", col.size(), model.d);
    for (Eigen::Index j = 0; j < col.size(); ++j)
      if (!std::isfinite(col[j]))
        throw EvaluationError("non-finite h at (j=" + std::to_string(j) + ", i=" + std::to_string(i) + ")");
    out.col(i) = col;
  }
  return out;
}

namespace {

double truncated_normal_mean(double mu) {
  const boost::math::normal z;
  const double a = -1.0 - mu, b = 1.0 - mu;
  const double mass = boost::math::cdf(z, b) - boost::math::cdf(z, a);
  return mu + (boost::math::pdf(z, a) - boost::math::pdf(z, b)) / mass;
}

// Location of N(mu, 1) truncated to [-1, 1] whose mean equals `target`.
double truncated_normal_location(double target) {
  if (!(target > -1.0 && target < 1.0)) throw DomainError("truncated-normal mean must lie in (-1, 1)");
  if (target == 0.0) return 0.0;
  double lo = -50.0, hi = 50.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (truncated_normal_mean(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MomentModel mean_gaussian() {
  MomentModel m;
  m.name = "mean_gaussian";
  m.d = m.p = 1;
  m.theta_box = {{-10.0, 10.0}};
  m.support = {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  m.h = [](const Theta& t, double x) { return Eigen::VectorXd::Constant(1, x - t[0]); };
  m.dh_dtheta = [](const Theta&, double) { return Eigen::MatrixXd::Constant(1, 1, -1.0); };
  m.simulate = [](std::size_t n, const Theta& ts, Rng& rng) {
    std::normal_distribution<double> dist(ts[0], 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    return x;
  };
  return m;
}

MomentModel mean_truncated() {
  MomentModel m;
  m.name = "mean_truncated";
  m.d = m.p = 1;
  m.theta_box = {{-1.0, 1.0}};
  m.support = {-1.0, 1.0};
  m.h = [](const Theta& t, double x) { return Eigen::VectorXd::Constant(1, x - t[0]); };
  m.dh_dtheta = [](const Theta&, double) { return Eigen::MatrixXd::Constant(1, 1, -1.0); };
  // Rejection sampling from N(mu, 1) restricted to [-1, 1]; mu = 0 when theta* = 0.
  m.simulate = [](std::size_t n, const Theta& ts, Rng& rng) {
    std::normal_distribution<double> dist(truncated_normal_location(ts[0]), 1.0);
    std::vector<double> x;
    x.reserve(n);
    while (x.size() < n) {
      const double v = dist(rng);
      if (v >= -1.0 && v <= 1.0) x.push_back(v);
    }
    return x;
  };
  return m;
}

MomentModel exponential_overid() {
  MomentModel m;
  m.name = "exponential_overid";
  m.d = 2;
  m.p = 1;
  m.theta_box = {{1.0, 3.0}};
  m.support = {0.0, std::numeric_limits<double>::infinity()};
  m.h = [](const Theta& t, double x) {
    Eigen::VectorXd v(2);
    v << x - t[0], 2.0 * t[0] * t[0] - x * x;
    return v;
  };
  m.dh_dtheta = [](const Theta& t, double) {
    Eigen::MatrixXd j(2, 1);
    j << -1.0, 4.0 * t[0];
    return j;
  };
  m.simulate = [](std::size_t n, const Theta& ts, Rng& rng) {
    if (!(ts[0] > 0.0)) throw DomainError("exponential mean must be positive");
    std::exponential_distribution<double> dist(1.0 / ts[0]);
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    return x;
  };
  return m;
}

}  // namespace

const std::map<std::string, MomentModel>& builtin_models() {
  static const std::map<std::string, MomentModel> catalog = {
      {"mean_gaussian", mean_gaussian()},
      {"mean_truncated", mean_truncated()},
      {"exponential_overid", exponential_overid()},
  };
  return catalog;
}

const MomentModel& builtin_model(const std::string& name) {
  const auto& catalog = builtin_models();
  auto it = catalog.find(name);
  if (it == catalog.end()) throw ConfigError("unknown model '" + name + "'");
  return it->second;
}

}  // namespace gpm
