#include "gpm/gp_prior.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "gpm/error.hpp"
#include "gpm/kernels.hpp"
#include "gpm/log.hpp"

namespace gpm {

EigenSpec::Kind parse_eigen_kind(std::string_view name) {
  if (name == "polynomial") return EigenSpec::Kind::polynomial;
  if (name == "geometric") return EigenSpec::Kind::geometric;
  throw ConfigError("unknown eigenvalue kind '" + std::string(name) + "'");
}

double EigenSpec::lambda(std::size_t j) const {
  const double jd = static_cast<double>(j);
  return kind == Kind::polynomial ? std::pow(jd, -rate) : std::pow(rate, jd);
}

Eigen::VectorXd EigenSpec::eigenvalues(std::size_t d) const {
  Eigen::VectorXd ev = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(J));
  for (std::size_t j = d + 1; j < J; ++j) ev[static_cast<Eigen::Index>(j)] = c * sigma0 * lambda(j);
  return ev;
}

void EigenSpec::validate(std::size_t d) const {
  if (kind == Kind::polynomial && !(rate > 1.0)) throw ConfigError("polynomial eigenvalues need alpha > 1");
  if (kind == Kind::geometric && !(rate > 0.0 && rate < 1.0)) throw ConfigError("geometric eigenvalues need 0 < a < 1");
  if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be positive");
  if (!(c > 0.0)) throw ConfigError("c must be positive");
  if (J <= d + 1) throw ConfigError("J must exceed d + 1");
}

Eigen::VectorXd ConstraintBasis::targets() const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(factor.rows());
  e[0] = 1.0;
  return factor.triangularView<Eigen::Lower>().solve(e);
}

namespace {

ConstraintBasis orthonormalize_constraints(Eigen::MatrixXd functions, const Measure& pi) {
  Orthonormalization o = gram_schmidt(functions, pi);
  return {std::move(functions), std::move(o.basis), std::move(o.factor)};
}

}  // namespace

ConstraintBasis constraint_basis(const MomentModel& model, const Theta& theta, const Measure& pi) {
  Eigen::MatrixXd functions(static_cast<Eigen::Index>(model.d + 1), static_cast<Eigen::Index>(pi.size()));
  functions.row(0).setOnes();
  functions.bottomRows(static_cast<Eigen::Index>(model.d)) = evaluate_h_matrix(model, theta, pi.nodes());
  return orthonormalize_constraints(std::move(functions), pi);
}

ConstraintBasis normalization_basis(const Measure& pi) {
  return orthonormalize_constraints(Eigen::MatrixXd::Ones(1, static_cast<Eigen::Index>(pi.size())), pi);
}

ConstrainedGpPrior::ConstrainedGpPrior(ConstraintBasis constraints, std::shared_ptr<const Eigen::MatrixXd> completion,
                                       Eigen::VectorXd eigenvalues, GridFn mean, Measure measure, Theta theta)
    : constraints_(std::move(constraints)),
      completion_(std::move(completion)),
      eigenvalues_(std::move(eigenvalues)),
      mean_(std::move(mean)),
      measure_(std::move(measure)),
      theta_(std::move(theta)) {
  const auto k = constraints_.rows.rows();
  if (completion_->rows() + k != eigenvalues_.size())
    throw DimensionError("prior eigenvalues vs basis rows", eigenvalues_.size(), completion_->rows() + k);
  if (static_cast<std::size_t>(mean_.size()) != measure_.size())
    throw DimensionError("prior mean vs measure", mean_.size(), measure_.size());
}

Eigen::MatrixXd ConstrainedGpPrior::basis() const {
  Eigen::MatrixXd b(eigenvalues_.size(), constraints_.rows.cols());
  b << constraints_.rows, *completion_;
  return b;
}

GridFn ConstrainedGpPrior::apply_covariance(const GridFn& v) const {
  Eigen::VectorXd coef = *completion_ * measure_.weights().cwiseProduct(v);
  return completion_->transpose() * eigenvalues_.tail(completion_->rows()).cwiseProduct(coef);
}

GridFn ConstrainedGpPrior::apply_covariance_sqrt(const GridFn& v) const {
  Eigen::VectorXd coef = *completion_ * measure_.weights().cwiseProduct(v);
  return completion_->transpose() * eigenvalues_.tail(completion_->rows()).cwiseSqrt().cwiseProduct(coef);
}

Eigen::MatrixXd ConstrainedGpPrior::covariance_matrix() const {
  return kernels::parallel::spectral_operator(*completion_, eigenvalues_.tail(completion_->rows()),
                                              measure_.weights());
}

Eigen::VectorXd ConstrainedGpPrior::constraint_residuals(const GridFn& f) const {
  Eigen::VectorXd r = constraints_.functions * measure_.weights().cwiseProduct(f);
  r[0] -= 1.0;
  return r;
}

ConstrainedGpPrior ConstrainedGpPrior::with_mean(GridFn mean) const {
  ConstrainedGpPrior out = *this;
  if (mean.size() != mean_.size()) throw DimensionError("prior mean", mean.size(), mean_.size());
  out.mean_ = std::move(mean);
  return out;
}

GridFn project_onto_constraints(const GridFn& f, const ConstraintBasis& constraints, const Measure& pi) {
  Eigen::VectorXd current = constraints.rows * pi.weights().cwiseProduct(f);
  return f + constraints.rows.transpose() * (constraints.targets() - current);
}

GridFn prior_mean_series(const ConstraintBasis& constraints, const Eigen::MatrixXd& completion,
                         const std::map<std::size_t, double>& coefficients, const Measure& pi) {
  (void)pi;
  const std::size_t d = constraints.d();
  GridFn f = constraints.rows.transpose() * constraints.targets();
  double bound = 0.0;
  for (const auto& [j, a] : coefficients) {
    if (j <= d || j - d - 1 >= static_cast<std::size_t>(completion.rows()))
      throw DomainError("series coefficient index " + std::to_string(j) + " outside (d, J)");
    const auto row = static_cast<Eigen::Index>(j - d - 1);
    f += a * completion.row(row).transpose();
    bound += std::abs(a) * completion.row(row).cwiseAbs().maxCoeff();
  }
  if (bound > 1.0) warn("series prior mean exceeds the boundedness rule; non-negativity is not guaranteed");
  return f;
}

double beta_shape_for_mean(double theta, double q) {
  if (!(theta > -1.0 && theta < 1.0)) throw DomainError("beta prior mean needs theta in (-1, 1)");
  if (!(q > 0.0)) throw DomainError("beta prior mean needs q > 0");
  return q * (1.0 + theta) / (1.0 - theta);
}

GridFn prior_mean_beta(const Theta& theta, double q, const Measure& pi) {
  const double p = beta_shape_for_mean(theta[0], q);
  const double log_norm = std::log(boost::math::beta(p, q)) + (p + q - 1.0) * std::log(2.0);
  const Eigen::VectorXd& x = pi.nodes();
  const double half_cell = pi.grid() ? 0.5 * pi.grid()->step() : 0.0;
  GridFn f(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    double value = 0.0;
    if (xi > -1.0 && xi < 1.0) {
      value = std::exp((p - 1.0) * std::log1p(xi) + (q - 1.0) * std::log1p(-xi) - log_norm);
    } else if (xi == -1.0 || xi == 1.0) {
      const double shape = xi == -1.0 ? p : q;
      if (shape > 1.0) value = 0.0;
      else if (shape == 1.0) value = std::exp(-log_norm) * std::pow(2.0, xi == -1.0 ? q - 1.0 : p - 1.0);
      else if (half_cell > 0.0) {
        // Singular endpoint: use the density's average over the adjacent half cell.
        const double u = half_cell / 2.0;
        const double mass = xi == -1.0 ? boost::math::ibeta(p, q, u) : boost::math::ibetac(p, q, 1.0 - u);
        value = mass / half_cell;
      } else {
        throw DomainError("beta prior mean is unbounded at a node on the boundary");
      }
    }
    const double dens = pi.density()[i];
    f[i] = dens > 0.0 ? value / dens : 0.0;
  }
  return f;
}

GridFn prior_mean_two_step(const GridFn& pilot, const ConstraintBasis& constraints, const Measure& pi) {
  return project_onto_constraints(pilot, constraints, pi);
}

GridFn tikhonov_pilot(const SampleTransform& st, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("Tikhonov constant must be positive");
  Eigen::MatrixXd a = st.K_adj * st.K;
  a.diagonal().array() += alpha;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  return lu.solve(st.K_adj * st.rn);
}

GridFn normal_density_mean(double location, const Measure& pi) {
  const Eigen::VectorXd& x = pi.nodes();
  GridFn f(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double z = x[i] - location;
    const double dens = pi.density()[i];
    f[i] = dens > 0.0 ? std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) / dens : 0.0;
  }
  return f;
}

MeanRule series_rule(std::map<std::size_t, double> coefficients) {
  return [coefficients = std::move(coefficients)](const ConstraintBasis& cb, const Eigen::MatrixXd& completion,
                                                  const Theta&, const Measure& pi) {
    return prior_mean_series(cb, completion, coefficients, pi);
  };
}

MeanRule beta_rule(double q) {
  return [q](const ConstraintBasis& cb, const Eigen::MatrixXd&, const Theta& theta, const Measure& pi) {
    return project_onto_constraints(prior_mean_beta(theta, q, pi), cb, pi);
  };
}

MeanRule two_step_rule(GridFn pilot) {
  return [pilot = std::move(pilot)](const ConstraintBasis& cb, const Eigen::MatrixXd&, const Theta&,
                                    const Measure& pi) { return prior_mean_two_step(pilot, cb, pi); };
}

MeanRule normal_rule(double location) {
  return [location](const ConstraintBasis& cb, const Eigen::MatrixXd&, const Theta&, const Measure& pi) {
    return project_onto_constraints(normal_density_mean(location, pi), cb, pi);
  };
}

ConstrainedGpPrior build_prior(const ConstraintBasis& constraints, const EigenSpec& spec, const Measure& pi,
                               BasisFamily family, const MeanRule& mean, const Theta& theta) {
  spec.validate(constraints.d());
  BasisCompletion bc = complete_basis(constraints.rows, spec.J, family, pi);
  const auto tail = static_cast<Eigen::Index>(spec.J - constraints.d() - 1);
  auto completion = std::make_shared<const Eigen::MatrixXd>(bc.basis.bottomRows(tail));
  GridFn f0 = mean(constraints, *completion, theta, pi);
  return ConstrainedGpPrior(constraints, std::move(completion), spec.eigenvalues(constraints.d()), std::move(f0), pi,
                            theta);
}

ConstrainedGpPrior build_prior(const MomentModel& model, const Theta& theta, const EigenSpec& spec,
                               const Measure& pi, BasisFamily family, const MeanRule& mean) {
  return build_prior(constraint_basis(model, theta, pi), spec, pi, family, mean, theta);
}

GridFn sample_prior(const ConstrainedGpPrior& prior, Rng& rng) {
  const Eigen::MatrixXd& c = prior.completion();
  std::normal_distribution<double> z;
  Eigen::VectorXd coef(c.rows());
  const auto tail = prior.eigenvalues().tail(c.rows());
  for (Eigen::Index j = 0; j < c.rows(); ++j) coef[j] = std::sqrt(tail[j]) * z(rng);
  return prior.prior_mean() + c.transpose() * coef;
}

PriorFactory::PriorFactory(MomentModel model, Measure pi, EigenSpec spec, BasisFamily family, MeanRule mean,
                           const Theta& reference)
    : model_(std::move(model)), pi_(std::move(pi)), spec_(spec), family_(family), mean_(std::move(mean)) {
  spec_.validate(model_.d);
  ConstraintBasis cb = constraint_basis(model_, reference, pi_);
  BasisCompletion bc = complete_basis(cb.rows, spec_.J, family_, pi_);
  const auto tail = static_cast<Eigen::Index>(spec_.J - model_.d - 1);
  completion_ = std::make_shared<const Eigen::MatrixXd>(bc.basis.bottomRows(tail));
  skipped_ = std::move(bc.skipped);
  reference_rows_ = std::move(cb.rows);
  eigenvalues_ = spec_.eigenvalues(model_.d);
}

bool PriorFactory::shares_completion(const ConstraintBasis& cb) const {
  if (cb.rows.rows() != reference_rows_.rows()) return false;
  const Eigen::VectorXd& w = pi_.weights();
  Eigen::MatrixXd coef = cb.rows * w.asDiagonal() * reference_rows_.transpose();
  Eigen::MatrixXd resid = cb.rows - coef * reference_rows_;
  for (Eigen::Index k = 0; k < resid.rows(); ++k) {
    const double r = std::sqrt(resid.row(k).cwiseAbs2().dot(w));
    if (!(r < kDependenceTolerance)) return false;
  }
  return true;
}

ConstrainedGpPrior PriorFactory::operator()(const Theta& theta) const {
  ConstraintBasis cb = constraint_basis(model_, theta, pi_);
  std::shared_ptr<const Eigen::MatrixXd> completion = completion_;
  if (!shares_completion(cb)) {
    BasisCompletion bc = complete_basis(cb.rows, spec_.J, family_, pi_);
    completion = std::make_shared<const Eigen::MatrixXd>(bc.basis.bottomRows(completion_->rows()));
  }
  GridFn f0 = mean_(cb, *completion, theta, pi_);
  return ConstrainedGpPrior(std::move(cb), std::move(completion), eigenvalues_, std::move(f0), pi_, theta);
}

}  // namespace gpm
