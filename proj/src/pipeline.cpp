#include "gpm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gpm/error.hpp"

namespace gpm {

namespace {

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

Theta to_theta(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::pair<double, double> parse_bounds(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b;
  if (!std::getline(ss, a, ',') || !std::getline(ss, b)) throw ConfigError("grid.bounds must be data, support or lo,hi");
  try {
    return {std::stod(a), std::stod(b)};
  } catch (const std::exception&) {
    throw ConfigError("grid.bounds must be data, support or lo,hi");
  }
}

}  // namespace

std::vector<double> simulate_data(const std::string& model, std::size_t n, const std::vector<double>& theta_star,
                                  std::uint64_t seed) {
  if (n == 0) throw DomainError("simulate: n must be positive");
  const MomentModel& m = builtin_model(model);
  if (theta_star.size() != m.p) throw DimensionError("simulate: theta_star", theta_star.size(), m.p);
  Rng rng(seed);
  return m.simulate(n, to_theta(theta_star), rng);
}

std::vector<double> read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path);
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "x" || line == "x\r") continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(line, &used));
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  if (out.size() < 2) throw ConfigError(path + ": need at least 2 observations");
  return out;
}

Box resolve_box(const ExperimentConfig& config, const MomentModel& model) {
  if (config.theta_box.empty()) return model.theta_box;
  if (config.theta_box.size() != 2 * model.p) throw DimensionError("theta.box pairs", config.theta_box.size() / 2, model.p);
  Box box;
  for (std::size_t k = 0; k < model.p; ++k) {
    const double lo = config.theta_box[2 * k], hi = config.theta_box[2 * k + 1];
    if (!(hi > lo)) throw ConfigError("theta.box: empty interval");
    box.emplace_back(lo, hi);
  }
  return box;
}

Measure make_pi(const ExperimentConfig& config, const MomentModel& model, const std::vector<double>& data) {
  if (config.measure_pi == "empirical") {
    std::vector<double> sorted = data;
    std::sort(sorted.begin(), sorted.end());
    return Measure::empirical(sorted);
  }
  std::optional<Grid> grid;
  if (config.grid_bounds == "data") {
    grid = Grid::covering(data, config.grid_margin, config.grid_m);
  } else if (config.grid_bounds == "support") {
    if (!std::isfinite(model.support.first) || !std::isfinite(model.support.second))
      throw ConfigError("grid.bounds = support needs a compact model support");
    grid.emplace(model.support.first, model.support.second, config.grid_m);
  } else {
    const auto [lo, hi] = parse_bounds(config.grid_bounds);
    grid.emplace(lo, hi, config.grid_m);
  }
  if (config.measure_pi == "lebesgue") return Measure::lebesgue(*grid);
  if (config.measure_pi == "exponential") return Measure::trapezoid(*grid, [](double x) { return std::exp(-x); });
  if (config.measure_pi == "gaussian") return Measure::trapezoid(*grid, [](double x) { return std::exp(-0.5 * x * x); });
  throw ConfigError("unknown measure.pi '" + config.measure_pi + "'");
}

KernelTransform make_kernel(const ExperimentConfig& config, const std::vector<double>& data) {
  const TransformKind kind = parse_transform_kind(config.transform_kind);
  double lo = config.t_bounds[0], hi = config.t_bounds[1];
  if (kind == TransformKind::cdf) {
    const auto [mn, mx] = std::minmax_element(data.begin(), data.end());
    lo = *mn;
    hi = *mx;
  }
  const Grid t(lo, hi, config.grid_m);
  Measure rho = [&] {
    if (config.measure_rho == "lebesgue") return Measure::lebesgue(t);
    if (config.measure_rho == "gaussian") return Measure::trapezoid(t, [](double x) { return std::exp(-0.5 * x * x); });
    throw ConfigError("unknown measure.rho '" + config.measure_rho + "'");
  }();
  switch (kind) {
    case TransformKind::cdf: return KernelTransform::cdf(std::move(rho));
    case TransformKind::mgf: return KernelTransform::mgf(std::move(rho));
    case TransformKind::characteristic: return KernelTransform::characteristic(std::move(rho));
    case TransformKind::custom: break;
  }
  throw ConfigError("transform.kind = custom is only available through the library interface");
}

EigenSpec make_eigen_spec(const ExperimentConfig& config) {
  EigenSpec spec;
  spec.kind = parse_eigen_kind(config.eigen_kind);
  spec.rate = spec.kind == EigenSpec::Kind::polynomial ? config.eigen_alpha : config.eigen_a;
  spec.sigma0 = config.eigen_sigma0;
  spec.c = config.eigen_c;
  spec.J = config.eigen_J;
  return spec;
}

MeanRule make_mean_rule(const ExperimentConfig& config, const SampleTransform& st) {
  if (config.mean_strategy == "series") return series_rule(config.mean_coefficients);
  if (config.mean_strategy == "beta") return beta_rule(config.mean_q);
  if (config.mean_strategy == "normal") return normal_rule(config.mean_location);
  if (config.mean_strategy == "two_step") return two_step_rule(tikhonov_pilot(st, config.mean_tikhonov));
  throw ConfigError("unknown prior_mean.strategy '" + config.mean_strategy + "'");
}

Pipeline build_pipeline(const ExperimentConfig& config, std::vector<double> data) {
  Pipeline p;
  p.config = config;
  staged("config", [&] {
    config.validate();
    p.path = parse_posterior_path(config.path);
    p.box = resolve_box(config, builtin_model(config.model));
    p.model = builtin_model(config.model).with_box(p.box);
  });
  p.data = std::move(data);
  if (p.path == PosteriorPath::cu_gmm) {
    p.log_posterior = std::make_shared<const LogPosterior>(
        p.path, [model = p.model, data = p.data](const Theta& th) { return log_quasi_lik_cu_gmm(data, model, th); },
        ThetaPrior::uniform(p.box));
    return p;
  }

  ExperimentConfig effective = config;
  if (p.path == PosteriorPath::basis) {
    // The basis form lives on the empirical measure; node order must match the data.
    effective.measure_pi = "empirical";
    std::sort(p.data.begin(), p.data.end());
  }
  p.pi = staged("grid", [&] { return make_pi(effective, p.model, p.data); });
  p.transform = staged("transform", [&] {
    const KernelTransform kernel = make_kernel(effective, p.data);
    return std::make_shared<const SampleTransform>(
        build_sample_transform(kernel, *p.pi, p.data, parse_regularization(effective.regularize)));
  });
  if (p.path == PosteriorPath::conjugate) return p;

  p.priors = staged("prior", [&] {
    Theta reference(p.model.p);
    for (std::size_t k = 0; k < p.model.p; ++k)
      reference[static_cast<Eigen::Index>(k)] = 0.5 * (p.box[k].first + p.box[k].second);
    return std::make_shared<const PriorFactory>(p.model, *p.pi, make_eigen_spec(effective),
                                                parse_basis_family(effective.basis_family),
                                                make_mean_rule(effective, *p.transform), reference);
  });
  p.log_posterior = staged("likelihood", [&] {
    std::function<double(const Theta&)> log_lik;
    if (p.path == PosteriorPath::svd) {
      p.whitening = std::make_shared<const Whitening>(*p.transform);
      log_lik = [lik = std::make_shared<const SvdLikelihood>(p.priors, p.whitening)](const Theta& th) {
        return (*lik)(th);
      };
    } else {
      log_lik = [lik = std::make_shared<const BasisLikelihood>(p.priors, p.data)](const Theta& th) {
        return (*lik)(th);
      };
    }
    return std::make_shared<const LogPosterior>(p.path, std::move(log_lik), ThetaPrior::uniform(p.box));
  });
  return p;
}

Pipeline build_pipeline(const ExperimentConfig& config) {
  std::vector<double> data = staged("data", [&] {
    return config.data.empty() ? simulate_data(config.model, config.n, config.theta_star, config.seed)
                               : read_data_csv(config.data);
  });
  return build_pipeline(config, std::move(data));
}

ConjugateResult conjugate_estimate(const Pipeline& p) {
  return staged("posterior", [&] {
    if (!p.pi || !p.transform) throw ConfigError("conjugate path needs a grid measure and transform");
    const ConstrainedGpPrior prior = build_prior(normalization_basis(*p.pi), make_eigen_spec(p.config), *p.pi,
                                                 parse_basis_family(p.config.basis_family),
                                                 make_mean_rule(p.config, *p.transform), Theta());
    const Eigen::MatrixXd omega = prior.covariance_matrix();
    const GridFn& g = p.pi->nodes();
    const Eigen::VectorXd wg = p.pi->weights().cwiseProduct(g);
    ConjugateResult out;
    out.prior = {wg.dot(prior.prior_mean()), wg.dot(omega * g)};
    out.posterior = conjugate_linear_posterior(prior.prior_mean(), omega, *p.transform, g);
    return out;
  });
}

}  // namespace gpm
