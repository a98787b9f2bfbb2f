#include "gpm/config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gpm/error.hpp"

namespace gpm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': not a number: " + v);
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': not a non-negative integer: " + v);
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': not a boolean: " + v);
}

std::string list_text(const std::vector<double>& v) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "model") model = v;
  else if (key == "n") n = to_uint(key, v);
  else if (key == "theta_star") theta_star = to_list(key, v);
  else if (key == "seed") seed = to_uint(key, v);
  else if (key == "data") data = v;
  else if (key == "out") out = v;
  else if (key == "grid.M") grid_m = to_uint(key, v);
  else if (key == "grid.bounds") grid_bounds = v;
  else if (key == "grid.margin") grid_margin = to_double(key, v);
  else if (key == "measure.pi") measure_pi = v;
  else if (key == "measure.rho") measure_rho = v;
  else if (key == "transform.kind") transform_kind = v;
  else if (key == "transform.t_bounds") t_bounds = to_list(key, v);
  else if (key == "transform.regularize") regularize = v;
  else if (key == "eigen.kind") eigen_kind = v;
  else if (key == "eigen.alpha") eigen_alpha = to_double(key, v);
  else if (key == "eigen.a") eigen_a = to_double(key, v);
  else if (key == "eigen.sigma0") eigen_sigma0 = to_double(key, v);
  else if (key == "eigen.c") eigen_c = to_double(key, v);
  else if (key == "eigen.J") eigen_J = to_uint(key, v);
  else if (key == "basis.family") basis_family = v;
  else if (key == "prior_mean.strategy") mean_strategy = v;
  else if (key == "prior_mean.q") mean_q = to_double(key, v);
  else if (key == "prior_mean.tikhonov") mean_tikhonov = to_double(key, v);
  else if (key == "prior_mean.location") mean_location = to_double(key, v);
  else if (key == "prior_mean.coefficients") {
    mean_coefficients.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("prior_mean.coefficients expects j:a pairs");
      mean_coefficients[to_uint(key, trim(item.substr(0, colon)))] = to_double(key, trim(item.substr(colon + 1)));
    }
  }
  else if (key == "posterior.path") path = v;
  else if (key == "theta.box") theta_box = to_list(key, v);
  else if (key == "mcmc.total") mcmc_total = to_uint(key, v);
  else if (key == "mcmc.burn_in") mcmc_burn_in = to_uint(key, v);
  else if (key == "mcmc.seed") mcmc_seed = to_uint(key, v);
  else if (key == "mcmc.proposal") mcmc_proposal = v;
  else if (key == "mcmc.scale") mcmc_scale = to_double(key, v);
  else if (key == "mcmc.init") mcmc_init = to_list(key, v);
  else if (key == "kde.bandwidth") kde_bandwidth = to_double(key, v);
  else if (key == "kde.points") kde_points = to_uint(key, v);
  else if (key == "scan.points") scan_points = to_uint(key, v);
  else if (key == "reps") reps = to_uint(key, v);
  else if (key == "timing") timing = to_bool(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

void ExperimentConfig::validate() const {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (grid_m < 100) throw ConfigError("grid.M must be at least 100");
  if (theta_box.size() % 2 != 0) throw ConfigError("theta.box needs lo,hi pairs");
  if (t_bounds.size() != 2 || !(t_bounds[1] > t_bounds[0])) throw ConfigError("transform.t_bounds needs lo,hi");
  if (!(mcmc_total > mcmc_burn_in)) throw ConfigError("mcmc.total must exceed mcmc.burn_in");
  if (!(kde_bandwidth > 0.0)) throw ConfigError("kde.bandwidth must be positive");
  if (kde_points < 2 || scan_points < 2) throw ConfigError("density and scan grids need at least 2 points");
  if (reps == 0) throw ConfigError("reps must be positive");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "model = " << model << "\nn = " << n << "\ntheta_star = " << list_text(theta_star) << "\nseed = " << seed
    << "\ndata = " << data << "\nout = " << out << "\ngrid.M = " << grid_m << "\ngrid.bounds = " << grid_bounds
    << "\ngrid.margin = " << grid_margin << "\nmeasure.pi = " << measure_pi << "\nmeasure.rho = " << measure_rho
    << "\ntransform.kind = " << transform_kind << "\ntransform.t_bounds = " << list_text(t_bounds)
    << "\ntransform.regularize = " << regularize << "\neigen.kind = " << eigen_kind << "\neigen.alpha = " << eigen_alpha
    << "\neigen.a = " << eigen_a << "\neigen.sigma0 = " << eigen_sigma0 << "\neigen.c = " << eigen_c
    << "\neigen.J = " << eigen_J << "\nbasis.family = " << basis_family << "\nprior_mean.strategy = " << mean_strategy
    << "\nprior_mean.q = " << mean_q << "\nprior_mean.tikhonov = " << mean_tikhonov
    << "\nprior_mean.location = " << mean_location << "\n";
  if (!mean_coefficients.empty()) {
    o << "prior_mean.coefficients = ";
    bool first = true;
    for (const auto& [j, a] : mean_coefficients) {
      o << (first ? "" : ",") << j << ":" << a;
      first = false;
    }
    o << "\n";
  }
  o << "posterior.path = " << path << "\n";
  if (!theta_box.empty()) o << "theta.box = " << list_text(theta_box) << "\n";
  o << "mcmc.total = " << mcmc_total << "\nmcmc.burn_in = " << mcmc_burn_in << "\n";
  if (mcmc_seed) o << "mcmc.seed = " << *mcmc_seed << "\n";
  o << "mcmc.proposal = " << mcmc_proposal << "\nmcmc.scale = " << mcmc_scale << "\nmcmc.init = " << list_text(mcmc_init)
    << "\nkde.bandwidth = " << kde_bandwidth << "\nkde.points = " << kde_points << "\nscan.points = " << scan_points
    << "\nreps = " << reps << "\ntiming = " << (timing ? "true" : "false") << "\n";
  return o.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    c.set(trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ExperimentConfig preset(const std::string& id) {
  ExperimentConfig c;
  if (id == "exp1") {
    c.model = "mean_gaussian";
    c.n = 1000;
    c.theta_star = {1.0};
    c.measure_pi = "gaussian";
    c.measure_rho = "gaussian";
    c.transform_kind = "mgf";
    // Var of the sample estimate of Sigma(t, t) grows like exp(4 t^2) / n for unit-variance data.
    c.t_bounds = {-0.5, 0.5};
    c.eigen_kind = "geometric";
    c.eigen_a = 0.3;
    c.eigen_sigma0 = 1.0;
    c.eigen_J = 15;
    c.basis_family = "hermite";
    c.mean_strategy = "normal";
    c.mean_location = 2.0;
    c.path = "conjugate";
  } else if (id == "exp2_cdf" || id == "exp2_mgf") {
    c.model = "mean_truncated";
    c.n = 1000;
    c.theta_star = {0.0};
    c.grid_bounds = "support";
    c.measure_pi = "lebesgue";
    c.measure_rho = "lebesgue";
    c.transform_kind = id == "exp2_cdf" ? "cdf" : "mgf";
    c.t_bounds = {-3.0, 3.0};
    c.eigen_alpha = 1.7;
    c.eigen_sigma0 = 5.0;
    c.basis_family = "legendre";
    c.mean_strategy = "beta";
    c.mean_q = 2.0;
    c.theta_box = {-1.0, 1.0};
    c.mcmc_proposal = "triangular";
    c.mcmc_init = {0.5};
  } else if (id == "exp3" || id == "exp3_mc100") {
    c.regularize = "always";
  } else {
    throw ConfigError("unknown experiment id '" + id + "'");
  }
  return c;
}

}  // namespace gpm
