#include "gpm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  if (v.size() == 1) return v[0];
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  return out;
}

Eigen::VectorXd linspace(double lo, double hi, std::size_t k) {
  return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(k), lo, hi);
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

Eigen::VectorXd asymptotic_sd(const Pipeline& p, const Theta& at) {
  const AsymptoticInfo info = asymptotic_information(sample_moment_matrices(p.model, at, p.data), p.data.size());
  return info.posterior_sd_pred;
}

EstimationRun estimate_conjugate(const Pipeline& p) {
  const ConjugateResult cr = conjugate_estimate(p);
  if (!(cr.posterior.variance > 0.0)) throw StageError("posterior", "non-positive conjugate posterior variance");
  const double sd = std::sqrt(cr.posterior.variance);
  EstimationRun run;
  EstimationResult& r = run.result;
  r.path = std::string(to_string(p.path));
  r.posterior_mean = scalar_theta(cr.posterior.mean);
  r.map = r.posterior_mean;
  r.posterior_sd = scalar_theta(sd);
  r.ci_low = cr.posterior.mean - 1.959963984540054 * sd;
  r.ci_high = cr.posterior.mean + 1.959963984540054 * sd;
  r.asym_sd = staged("posterior", [&] { return asymptotic_sd(p, r.posterior_mean); });

  const double prior_sd = std::sqrt(std::max(cr.prior.variance, 0.0));
  const double lo = std::min(cr.posterior.mean - 6.0 * sd, cr.prior.mean - 4.0 * prior_sd);
  const double hi = std::max(cr.posterior.mean + 6.0 * sd, cr.prior.mean + 4.0 * prior_sd);
  const Eigen::VectorXd grid = linspace(lo, hi, p.config.kde_points);
  run.posterior_density = {grid, grid.unaryExpr([&](double t) { return normal_pdf(t, cr.posterior.mean, sd); })};
  run.prior_density = {grid, prior_sd > 0.0
                                 ? Eigen::VectorXd(grid.unaryExpr([&](double t) { return normal_pdf(t, cr.prior.mean, prior_sd); }))
                                 : Eigen::VectorXd::Zero(grid.size())};
  return run;
}

Proposal make_proposal(const ExperimentConfig& c, const Box& box) {
  switch (parse_proposal_kind(c.mcmc_proposal)) {
    case Proposal::Kind::triangular: return Proposal::triangular(box[0].first, box[0].second);
    case Proposal::Kind::chi_squared_ceil: return Proposal::chi_squared_ceil();
    case Proposal::Kind::gaussian_rw: return Proposal::gaussian_rw(c.mcmc_scale);
  }
  throw ConfigError("unknown proposal");
}

EstimationRun estimate_mh(const Pipeline& p) {
  const ExperimentConfig& c = p.config;
  const LogPosterior& lp = *p.log_posterior;
  const LogDensityFn target = [&lp](const Theta& th) { return lp(th); };
  Chain chain = staged("mcmc", [&] {
    if (c.mcmc_init.size() != p.model.p) throw DimensionError("mcmc.init", c.mcmc_init.size(), p.model.p);
    const Theta init = Eigen::Map<const Eigen::VectorXd>(c.mcmc_init.data(), static_cast<Eigen::Index>(c.mcmc_init.size()));
    return run_mh(target, make_proposal(c, p.box), init, c.mcmc_total, c.mcmc_burn_in, c.chain_seed());
  });
  EstimationRun run;
  EstimationResult& r = run.result;
  staged("summary", [&] {
    r.path = std::string(to_string(p.path));
    r.posterior_mean = posterior_mean(chain);
    r.posterior_sd = posterior_sd(chain);
    r.map = map_estimate(chain, target);
    std::tie(r.ci_low, r.ci_high) = credible_interval(chain, 0.95);
    r.acceptance_rate = chain.acceptance_rate;
    r.ess = effective_sample_size(chain);
    r.asym_sd = asymptotic_sd(p, r.posterior_mean);

    double lo = p.box[0].first, hi = p.box[0].second;
    const double pad = 6.0 * r.posterior_sd[0] + 5.0 * c.kde_bandwidth;
    if (!std::isfinite(lo)) lo = r.posterior_mean[0] - pad;
    if (!std::isfinite(hi)) hi = r.posterior_mean[0] + pad;
    const Eigen::VectorXd grid = linspace(lo, hi, c.kde_points);
    run.posterior_density = {grid, kernel_density(chain, c.kde_bandwidth, grid)};
    run.prior_density = {grid, Eigen::VectorXd::Constant(grid.size(), 1.0 / (hi - lo))};
  });
  run.chain = std::move(chain);
  return run;
}

void write_density(const DensityGrid& g, const std::filesystem::path& file) {
  std::ofstream out = open_out(file);
  out << "theta,density\n";
  for (Eigen::Index i = 0; i < g.theta.size(); ++i) out << num(g.theta[i]) << ',' << num(g.density[i]) << '\n';
}

void write_chain(const Chain& chain, const std::filesystem::path& file) {
  std::ofstream out = open_out(file);
  out << "iter";
  const Eigen::Index p = chain.draws.empty() ? 1 : chain.draws.front().size();
  for (Eigen::Index k = 0; k < p; ++k) out << (p == 1 ? ",theta" : ",theta" + std::to_string(k + 1));
  out << ",logpost,accepted\n";
  for (std::size_t i = 0; i < chain.draws.size(); ++i) {
    out << chain.burn_in + i;
    for (Eigen::Index k = 0; k < p; ++k) out << ',' << num(chain.draws[i][k]);
    out << ',' << num(chain.log_posts[i]) << ',' << (chain.accepted[i] ? 1 : 0) << '\n';
  }
}

void write_json(const nlohmann::json& j, const std::filesystem::path& file) {
  std::ofstream out = open_out(file);
  out << j.dump(2) << '\n';
}

}  // namespace

void apply_overrides(ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.path) c.path = *o.path;
  if (o.m_grid) c.grid_m = *o.m_grid;
  if (o.reps) c.reps = *o.reps;
  if (o.timing) c.timing = true;
}

EstimationRun estimate(const Pipeline& p) {
  const auto start = std::chrono::steady_clock::now();
  EstimationRun run = p.path == PosteriorPath::conjugate ? estimate_conjugate(p) : estimate_mh(p);
  if (p.config.timing)
    run.result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

EstimationRun run_estimate(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  EstimationRun run = estimate(build_pipeline(config));
  if (config.timing)
    run.result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

nlohmann::json to_json(const EstimationResult& r) {
  nlohmann::json j;
  j["posterior_mean"] = vec_json(r.posterior_mean);
  j["map"] = vec_json(r.map);
  j["posterior_sd"] = vec_json(r.posterior_sd);
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["asym_sd"] = vec_json(r.asym_sd);
  j["acceptance_rate"] = r.acceptance_rate ? nlohmann::json(*r.acceptance_rate) : nlohmann::json(nullptr);
  j["runtime_s"] = r.runtime_s ? nlohmann::json(*r.runtime_s) : nlohmann::json(nullptr);
  j["ess"] = r.ess ? nlohmann::json(*r.ess) : nlohmann::json(nullptr);
  j["path"] = r.path;
  return j;
}

void write_run(const EstimationRun& run, const std::string& dir) {
  staged("output", [&] {
    const std::filesystem::path base(dir);
    if (run.chain) write_chain(*run.chain, base / "chain.csv");
    write_density(run.posterior_density, base / "density.csv");
    write_density(run.prior_density, base / "prior_density.csv");
    write_json(to_json(run.result), base / "result.json");
  });
}

void write_data_csv(const std::vector<double>& data, const std::string& file) {
  staged("output", [&] {
    std::ofstream out = open_out(file);
    out << "x\n";
    for (double x : data) out << num(x) << '\n';
  });
}

std::vector<ScanRow> scan(const Pipeline& p, std::size_t points) {
  return staged("scan", [&] {
    if (!p.log_posterior) throw ConfigError("scan needs an svd, basis or cu_gmm path");
    if (p.model.p != 1) throw ConfigError("scan supports scalar theta only");
    double lo = p.box[0].first, hi = p.box[0].second;
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("scan needs a bounded theta.box");
    // Open interval: the uniform prior boundary is excluded.
    const double h = (hi - lo) / static_cast<double>(points + 1);
    std::vector<ScanRow> rows(points);
    for (std::size_t i = 0; i < points; ++i) {
      const double th = lo + h * static_cast<double>(i + 1);
      rows[i] = {th, (*p.log_posterior)(scalar_theta(th))};
    }
    return rows;
  });
}

void write_scan_csv(const std::vector<ScanRow>& rows, PosteriorPath path, const std::string& file) {
  staged("output", [&] {
    std::ofstream out = open_out(file);
    out << "theta,logpost,path\n";
    for (const auto& r : rows) out << num(r.theta) << ',' << num(r.logpost) << ',' << to_string(path) << '\n';
  });
}

nlohmann::json reproduce(const std::string& id, const Overrides& overrides, const std::string& dir) {
  ExperimentConfig config = staged("config", [&] { return preset(id); });
  apply_overrides(config, overrides);
  const std::filesystem::path base(dir);

  if (id != "exp3_mc100") {
    const EstimationRun run = run_estimate(config);
    write_run(run, dir);
    staged("output", [&] {
      std::ofstream cfg = open_out(base / "config.txt");
      cfg << config.to_text();
    });
    nlohmann::json report = to_json(run.result);
    report["experiment"] = id;
    return report;
  }

  const std::size_t reps = config.reps;
  std::vector<EstimationResult> results(reps);
  std::vector<std::string> errors(reps);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < reps; ++r) {
    ExperimentConfig rc = config;
    rc.seed = config.seed + r;
    if (config.mcmc_seed) rc.mcmc_seed = *config.mcmc_seed + r;
    try {
      results[r] = run_estimate(rc).result;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  }
  for (std::size_t r = 0; r < reps; ++r)
    if (!errors[r].empty()) throw StageError("replication " + std::to_string(r), errors[r]);

  double mean_pm = 0.0, mean_map = 0.0;
  for (const auto& r : results) {
    mean_pm += r.posterior_mean[0];
    mean_map += r.map[0];
  }
  mean_pm /= static_cast<double>(reps);
  mean_map /= static_cast<double>(reps);

  staged("output", [&] {
    std::ofstream out = open_out(base / "replications.csv");
    out << "rep,seed,posterior_mean,map,posterior_sd,ci_low,ci_high,acceptance_rate\n";
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& x = results[r];
      out << r << ',' << config.seed + r << ',' << num(x.posterior_mean[0]) << ',' << num(x.map[0]) << ','
          << num(x.posterior_sd[0]) << ',' << num(x.ci_low) << ',' << num(x.ci_high) << ','
          << num(x.acceptance_rate.value_or(std::nan(""))) << '\n';
    }
    std::ofstream cfg = open_out(base / "config.txt");
    cfg << config.to_text();
  });
  nlohmann::json report;
  report["experiment"] = id;
  report["reps"] = reps;
  report["mean_posterior_mean"] = mean_pm;
  report["mean_map"] = mean_map;
  staged("output", [&] { write_json(report, base / "summary.json"); });
  return report;
}

}  // namespace gpm
