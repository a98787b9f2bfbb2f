#include "gpm/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "gpm/error.hpp"

namespace gpm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxConsecutiveFailures = 10000;

void require_scalar(const Theta& theta, const char* what) {
  if (theta.size() != 1) throw DomainError(std::string(what) + " proposal is defined for scalar theta only");
}

int chi_degrees(double current) { return std::max(1, static_cast<int>(std::ceil(current))); }

double chi_squared_log_pdf(double x, int k) {
  if (!(x > 0.0)) return kNegInf;
  const double half = 0.5 * k;
  return (half - 1.0) * std::log(x) - 0.5 * x - half * std::numbers::ln2 - std::lgamma(half);
}

}  // namespace

Proposal::Kind parse_proposal_kind(std::string_view name) {
  if (name == "triangular") return Proposal::Kind::triangular;
  if (name == "chi2" || name == "chi_squared_ceil") return Proposal::Kind::chi_squared_ceil;
  if (name == "gaussian_rw") return Proposal::Kind::gaussian_rw;
  throw ConfigError("unknown proposal '" + std::string(name) + "'");
}

Proposal Proposal::triangular(double lo, double hi) {
  if (!(hi > lo)) throw DomainError("triangular proposal needs lo < hi");
  return {Kind::triangular, lo, hi};
}

Proposal Proposal::chi_squared_ceil() { return {Kind::chi_squared_ceil, 0.0, 0.0}; }

Proposal Proposal::gaussian_rw(double scale) {
  if (!(scale > 0.0)) throw DomainError("random-walk scale must be positive");
  return {Kind::gaussian_rw, scale, 0.0};
}

Theta Proposal::sample(const Theta& current, Rng& rng) const {
  switch (kind_) {
    case Kind::triangular: {
      require_scalar(current, "triangular");
      const double lo = a_, hi = b_, mode = std::clamp(current[0], lo, hi);
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const double split = (mode - lo) / (hi - lo);
      const double x = u < split ? lo + std::sqrt(u * (hi - lo) * (mode - lo))
                                 : hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
      return scalar_theta(x);
    }
    case Kind::chi_squared_ceil: {
      require_scalar(current, "chi-squared");
      std::chi_squared_distribution<double> dist(chi_degrees(current[0]));
      return scalar_theta(dist(rng));
    }
    case Kind::gaussian_rw: {
      std::normal_distribution<double> z;
      Theta out = current;
      for (Eigen::Index k = 0; k < out.size(); ++k) out[k] += a_ * z(rng);
      return out;
    }
  }
  return current;
}

double Proposal::log_density(const Theta& candidate, const Theta& current) const {
  switch (kind_) {
    case Kind::triangular: {
      const double lo = a_, hi = b_, mode = std::clamp(current[0], lo, hi), x = candidate[0];
      if (x < lo || x > hi) return kNegInf;
      const double num = x < mode ? x - lo : hi - x;
      const double den = (hi - lo) * (x < mode ? mode - lo : hi - mode);
      if (!(den > 0.0) || !(num > 0.0)) return kNegInf;
      return std::log(2.0 * num / den);
    }
    case Kind::chi_squared_ceil:
      return chi_squared_log_pdf(candidate[0], chi_degrees(current[0]));
    case Kind::gaussian_rw: {
      const double k = static_cast<double>(candidate.size());
      return -0.5 * (candidate - current).squaredNorm() / (a_ * a_) - k * std::log(a_) -
             0.5 * k * std::log(2.0 * std::numbers::pi);
    }
  }
  return kNegInf;
}

Chain run_mh(const LogDensityFn& log_post, const Proposal& proposal, const Theta& init, std::size_t total,
             std::size_t burn_in, std::uint64_t seed) {
  if (!(total > burn_in)) throw DomainError("MH needs total > burn_in");
  Theta x = init;
  double lp = log_post(x);
  if (!std::isfinite(lp)) throw DomainError("MH initial state has non-finite log-posterior");
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Chain chain;
  chain.seed = seed;
  chain.burn_in = burn_in;
  chain.total = total;
  chain.draws.reserve(total - burn_in);
  chain.log_posts.reserve(total - burn_in);
  chain.accepted.reserve(total - burn_in);
  std::size_t accepted = 0, failures = 0;
  for (std::size_t it = 0; it < total; ++it) {
    Theta cand = proposal.sample(x, rng);
    double lc = kNegInf;
    try {
      lc = log_post(cand);
    } catch (const EvaluationError&) {
      lc = std::numeric_limits<double>::quiet_NaN();
    }
    bool accept = false;
    if (lc == kNegInf) {
      failures = 0;  // outside the support: an ordinary rejection
    } else if (!std::isfinite(lc)) {
      if (++failures > kMaxConsecutiveFailures) {
        std::ostringstream msg;
        msg << "MH aborted after " << failures << " consecutive non-finite candidates at iteration " << it
            << " (current " << x.transpose() << ", log-posterior " << lp << ")";
        throw EvaluationError(msg.str());
      }
    } else {
      failures = 0;
      const double log_alpha = lc - lp + proposal.log_density(x, cand) - proposal.log_density(cand, x);
      accept = std::log(unif(rng)) < log_alpha;
    }
    if (accept) {
      x = std::move(cand);
      lp = lc;
      ++accepted;
    }
    if (it >= burn_in) {
      chain.draws.push_back(x);
      chain.log_posts.push_back(lp);
      chain.accepted.push_back(accept ? 1 : 0);
    }
  }
  chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
  return chain;
}

Theta posterior_mean(const Chain& chain) {
  if (chain.draws.empty()) throw DomainError("posterior mean of an empty chain");
  Theta sum = Theta::Zero(chain.draws.front().size());
  for (const auto& t : chain.draws) sum += t;
  return sum / static_cast<double>(chain.draws.size());
}

Theta posterior_sd(const Chain& chain) {
  if (chain.draws.size() < 2) throw DomainError("posterior sd needs at least two draws");
  const Theta mean = posterior_mean(chain);
  Theta ss = Theta::Zero(mean.size());
  for (const auto& t : chain.draws) ss += (t - mean).cwiseAbs2();
  return (ss / static_cast<double>(chain.draws.size() - 1)).cwiseSqrt();
}

std::pair<double, double> credible_interval(const Chain& chain, double level) {
  if (chain.draws.empty()) throw DomainError("credible interval of an empty chain");
  std::vector<double> v;
  v.reserve(chain.draws.size());
  for (const auto& t : chain.draws) v.push_back(t[0]);
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  const double tail = 0.5 * (1.0 - level);
  return {quantile(tail), quantile(1.0 - tail)};
}

namespace {

bool lexicographic_less(const Theta& a, const Theta& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

// Maximizes f on [lo, hi]; returns the best abscissa found.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  const double tol = 1e-10 * std::max(1.0, std::abs(hi - lo));
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Theta map_estimate(const Chain& chain, const LogDensityFn& log_post) {
  if (chain.draws.empty()) throw DomainError("MAP of an empty chain");
  std::size_t best = 0;
  for (std::size_t i = 1; i < chain.draws.size(); ++i) {
    const double a = chain.log_posts[i], b = chain.log_posts[best];
    if (a > b || (a == b && lexicographic_less(chain.draws[i], chain.draws[best]))) best = i;
  }
  Theta theta = chain.draws[best];
  double value = chain.log_posts[best];
  if (chain.draws.size() < 2) return theta;
  const Theta sd = posterior_sd(chain);
  auto safe = [&](const Theta& t) {
    try {
      const double v = log_post(t);
      return std::isnan(v) ? kNegInf : v;
    } catch (const EvaluationError&) {
      return kNegInf;
    }
  };
  Theta refined = theta;
  for (int sweep = 0; sweep < (theta.size() == 1 ? 1 : 3); ++sweep) {
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      if (!(sd[k] > 0.0)) continue;
      auto along = [&](double v) {
        Theta t = refined;
        t[k] = v;
        return safe(t);
      };
      Theta trial = refined;
      trial[k] = golden_section_max(along, theta[k] - sd[k], theta[k] + sd[k]);
      if (safe(trial) > safe(refined)) refined = trial;
    }
  }
  if (safe(refined) > value) return refined;
  return theta;
}

Eigen::VectorXd kernel_density(const Chain& chain, double bandwidth, const Eigen::VectorXd& grid) {
  if (!(bandwidth > 0.0)) throw DomainError("kernel density needs a positive bandwidth");
  if (chain.draws.empty()) throw DomainError("kernel density of an empty chain");
  const double norm = 1.0 / (static_cast<double>(chain.draws.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
  for (const auto& t : chain.draws) out.array() += (-0.5 * ((grid.array() - t[0]) / bandwidth).square()).exp();
  return out * norm;
}

double effective_sample_size(const Chain& chain) {
  const std::size_t n = chain.draws.size();
  if (n < 4) return static_cast<double>(n);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = chain.draws[i][0];
  x.array() -= x.mean();
  const double c0 = x.squaredNorm() / static_cast<double>(n);
  if (!(c0 > 0.0)) return static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    const auto len = static_cast<Eigen::Index>(n - lag);
    return x.head(len).dot(x.segment(static_cast<Eigen::Index>(lag), len)) / static_cast<double>(n);
  };
  double sum = 0.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = autocov(2 * k) + autocov(2 * k + 1);
    if (pair <= 0.0) break;
    sum += pair;
  }
  const double tau = std::max(1.0, 2.0 * sum / c0 - 1.0);
  return static_cast<double>(n) / tau;
}

}  // namespace gpm
