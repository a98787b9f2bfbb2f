#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "gpm/error.hpp"
#include "gpm/mcmc.hpp"
#include "support.hpp"

using namespace gpm;
using gpm::test::Gen;

namespace {

Chain chain_of(const std::vector<double>& values, const std::vector<double>& log_posts) {
  Chain c;
  for (double v : values) c.draws.push_back(scalar_theta(v));
  c.log_posts = log_posts;
  c.accepted.assign(values.size(), 1);
  c.total = values.size();
  return c;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_SUITE("mcmc") {

TEST_CASE("triangular proposal density") {
  const Proposal p = Proposal::triangular();
  Gen gen(1);
  for (int i = 0; i < 50; ++i) {
    const double th = gen.uniform(-0.95, 0.95), xi = gen.uniform(-1.0, 1.0);
    const double expected = xi < th ? (xi + 1.0) / (th + 1.0) : (1.0 - xi) / (1.0 - th);
    CHECK(std::exp(p.log_density(scalar_theta(xi), scalar_theta(th))) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(p.log_density(scalar_theta(1.5), scalar_theta(0.0)) == -kInf);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Theta cur = scalar_theta(0.4);
    const Theta c = p.sample(cur, rng);
    REQUIRE(std::isfinite(p.log_density(c, cur)));
  }
  CHECK(parse_proposal_kind("triangular") == Proposal::Kind::triangular);
  CHECK(parse_proposal_kind("chi2") == Proposal::Kind::chi_squared_ceil);
  CHECK_THROWS_AS(parse_proposal_kind("hmc"), ConfigError);
}

TEST_CASE("chi-squared proposal is state dependent through the ceiling") {
  const Proposal p = Proposal::chi_squared_ceil();
  // k = 2: density e^{-x/2}/2
  CHECK(std::exp(p.log_density(scalar_theta(1.3), scalar_theta(1.5))) == doctest::Approx(std::exp(-0.65) / 2.0));
  // k = 3: sqrt(x) e^{-x/2} / (2^{1.5} Gamma(1.5))
  const double g15 = std::sqrt(std::numbers::pi) / 2.0;
  CHECK(std::exp(p.log_density(scalar_theta(1.3), scalar_theta(2.5))) ==
        doctest::Approx(std::sqrt(1.3) * std::exp(-0.65) / (std::pow(2.0, 1.5) * g15)));
  CHECK(p.log_density(scalar_theta(1.3), scalar_theta(1.5)) != p.log_density(scalar_theta(1.5), scalar_theta(1.3)) + 1.0);
  CHECK(p.log_density(scalar_theta(-1.0), scalar_theta(1.5)) == -kInf);
}

TEST_CASE("flat target with a symmetric proposal accepts everything") {
  const Chain c = run_mh([](const Theta&) { return 0.0; }, Proposal::gaussian_rw(0.5), scalar_theta(0.0), 2000, 0, 1);
  CHECK(c.acceptance_rate == 1.0);
}

TEST_CASE("standard normal target") {
  const Chain c = run_mh([](const Theta& t) { return -0.5 * t.squaredNorm(); }, Proposal::gaussian_rw(1.0),
                         scalar_theta(0.0), 55000, 5000, 17);
  CHECK(c.draws.size() == 50000);
  CHECK(std::abs(posterior_mean(c)[0]) < 0.05);
  CHECK(std::abs(posterior_sd(c)[0] * posterior_sd(c)[0] - 1.0) < 0.1);
  CHECK(effective_sample_size(c) > 1000.0);
  CHECK(effective_sample_size(c) <= 50000.0 * 1.01);
}

TEST_CASE("chain protocol and determinism") {
  auto target = [](const Theta& t) { return -std::abs(t[0]); };
  const Chain a = run_mh(target, Proposal::triangular(), scalar_theta(0.5), 10000, 5000, 99);
  const Chain b = run_mh(target, Proposal::triangular(), scalar_theta(0.5), 10000, 5000, 99);
  CHECK(a.draws.size() == 5000);
  CHECK(a.log_posts == b.log_posts);
  CHECK(a.accepted == b.accepted);
  for (std::size_t i = 0; i < a.draws.size(); ++i) REQUIRE(a.draws[i] == b.draws[i]);
  CHECK_THROWS_AS(run_mh(target, Proposal::triangular(), scalar_theta(0.5), 10, 10, 1), DomainError);
}

TEST_CASE("draws never leave the support") {
  auto target = [](const Theta& t) { return (t[0] < 1.0 || t[0] > 3.0) ? -kInf : -(t[0] - 2.0) * (t[0] - 2.0); };
  const Chain c = run_mh(target, Proposal::chi_squared_ceil(), scalar_theta(1.0), 20000, 1000, 5);
  for (const auto& t : c.draws) REQUIRE((t[0] >= 1.0 && t[0] <= 3.0));
  CHECK(c.acceptance_rate > 0.0);
}

TEST_CASE("Hastings correction recovers the target under the chi-squared proposal") {
  // target: Exp(1) restricted to [0.5, 4]
  auto target = [](const Theta& t) { return (t[0] < 0.5 || t[0] > 4.0) ? -kInf : -t[0]; };
  const Chain c = run_mh(target, Proposal::chi_squared_ceil(), scalar_theta(1.0), 400000, 10000, 8);
  const double a = 0.5, b = 4.0;
  const double mean = (a * std::exp(-a) - b * std::exp(-b) + std::exp(-a) - std::exp(-b)) / (std::exp(-a) - std::exp(-b));
  CHECK(posterior_mean(c)[0] == doctest::Approx(mean).epsilon(0.01));
}

TEST_CASE("detailed balance on a five-state target with the triangular proposal") {
  const double probs[5] = {0.1, 0.3, 0.2, 0.25, 0.15};
  auto bin = [](double x) { return std::min(4, static_cast<int>((x + 1.0) / 0.4)); };
  // piecewise-constant density: mass p_k spread over a bin of width 0.4
  auto target = [&](const Theta& t) {
    if (t[0] < -1.0 || t[0] > 1.0) return -kInf;
    return std::log(probs[bin(t[0])] / 0.4);
  };
  const Chain c = run_mh(target, Proposal::triangular(), scalar_theta(0.0), 1000000, 1000, 21);
  double freq[5] = {0, 0, 0, 0, 0};
  for (const auto& t : c.draws) freq[bin(t[0])] += 1.0;
  for (int k = 0; k < 5; ++k) CHECK(std::abs(freq[k] / c.draws.size() - probs[k]) < 0.02);
}

TEST_CASE("non-finite streaks and bad starts") {
  CHECK_THROWS_AS(run_mh([](const Theta&) { return -kInf; }, Proposal::triangular(), scalar_theta(0.0), 10, 0, 1),
                  DomainError);
  int calls = 0;
  auto broken = [&](const Theta&) {
    if (calls++ == 0) return 0.0;
    throw EvaluationError("broken");
  };
  try {
    (void)run_mh(broken, Proposal::gaussian_rw(1.0), scalar_theta(0.0), 20000, 0, 1);
    FAIL("expected abort");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("consecutive") != std::string::npos);
  }
}

TEST_CASE("point estimators") {
  const Chain constant = chain_of({0.7, 0.7, 0.7}, {0, 0, 0});
  CHECK(posterior_mean(constant)[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(posterior_mean(chain_of({0.0, 2.0}, {0, 0}))[0] == 1.0);
  CHECK_THROWS_AS(posterior_mean(Chain{}), DomainError);

  auto quad = [](const Theta& t) { return -(t[0] - 0.3) * (t[0] - 0.3); };
  const Chain near = chain_of({0.1, 0.25, 0.5, 0.2, 0.45}, {quad(scalar_theta(0.1)), quad(scalar_theta(0.25)),
                                                             quad(scalar_theta(0.5)), quad(scalar_theta(0.2)),
                                                             quad(scalar_theta(0.45))});
  CHECK(std::abs(map_estimate(near, quad)[0] - 0.3) < 1e-4);

  auto flat = [](const Theta&) { return 0.0; };
  CHECK(map_estimate(chain_of({0.2, 0.1}, {0.0, 0.0}), flat)[0] == 0.1);

  const auto [lo, hi] = credible_interval(chain_of({1, 2, 3, 4, 5}, {0, 0, 0, 0, 0}), 0.5);
  CHECK(lo == doctest::Approx(2.0));
  CHECK(hi == doctest::Approx(4.0));
}

TEST_CASE("kernel density") {
  const Chain one = chain_of({0.4}, {0.0});
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(101, -1.0, 2.0);
  const Eigen::VectorXd dens = kernel_density(one, 0.3, grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double z = (grid[i] - 0.4) / 0.3;
    CHECK(dens[i] == doctest::Approx(std::exp(-0.5 * z * z) / (0.3 * std::sqrt(2 * std::numbers::pi))));
  }
  Gen gen(4);
  std::vector<double> draws(500);
  for (auto& d : draws) d = gen.normal();
  const Chain many = chain_of(draws, std::vector<double>(500, 0.0));
  const double lo = *std::min_element(draws.begin(), draws.end()) - 1.5;
  const double hi = *std::max_element(draws.begin(), draws.end()) + 1.5;
  const Grid g(lo, hi, 2001);
  const Eigen::VectorXd f = kernel_density(many, 0.3, g.points());
  CHECK(std::abs(f.dot(Measure::lebesgue(g).weights()) - 1.0) < 1e-2);
  CHECK_THROWS_AS(kernel_density(many, 0.0, g.points()), DomainError);
}

}  // TEST_SUITE
