#include <cmath>
#include <limits>

#include "doctest.h"
#include "gpm/error.hpp"
#include "gpm/gp_prior.hpp"
#include "gpm/log.hpp"
#include "support.hpp"

using namespace gpm;
using gpm::test::Gen;
using gpm::test::max_abs;

namespace {

// Exponential overidentified model on a data-like grid under e^{-x}.
struct ExpoSetup {
  Grid grid{-1.0, 12.0, 600};
  Measure pi = Measure::trapezoid(grid, [](double x) { return std::exp(-x); });
  MomentModel model = builtin_model("exponential_overid");
  EigenSpec spec;
  ExpoSetup() { spec.J = 60; }
};

MeanRule constant_rule() { return series_rule({}); }

}  // namespace

TEST_SUITE("gp-prior") {

TEST_CASE("eigenvalue sequences") {
  EigenSpec s;
  s.rate = 1.7;
  s.sigma0 = 2.0;
  s.c = 3.0;
  s.J = 10;
  const Eigen::VectorXd ev = s.eigenvalues(2);
  CHECK(ev[0] == 0.0);
  CHECK(ev[1] == 0.0);
  CHECK(ev[2] == 0.0);
  CHECK(ev[3] == doctest::Approx(6.0 * std::pow(3.0, -1.7)));
  EigenSpec g;
  g.kind = EigenSpec::Kind::geometric;
  g.rate = 0.3;
  CHECK(g.lambda(2) == doctest::Approx(0.09));
  EigenSpec bad;
  bad.rate = 1.0;
  CHECK_THROWS_AS(bad.validate(1), ConfigError);
  bad.rate = 2.0;
  bad.J = 3;
  CHECK_THROWS_AS(bad.validate(2), ConfigError);
}

TEST_CASE("covariance annihilates the constraint span and acts spectrally") {
  ExpoSetup s;
  const ConstrainedGpPrior prior = build_prior(s.model, scalar_theta(2.0), s.spec, s.pi, BasisFamily::monomial,
                                               constant_rule());
  CHECK(prior.eigenvalues().head(3).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd omega = prior.covariance_matrix();
  const Eigen::MatrixXd h = evaluate_h_matrix(s.model, scalar_theta(2.0), s.pi.nodes());
  const GridFn one = GridFn::Ones(600);
  CHECK((omega * one).norm() < 1e-10 * one.norm());
  for (Eigen::Index j = 0; j < h.rows(); ++j) {
    const GridFn hj = h.row(j).transpose();
    CHECK((omega * hj).norm() < 1e-10 * hj.norm());
  }
  const Eigen::MatrixXd basis = prior.basis();
  for (Eigen::Index k = 3; k < 60; k += 7) {
    const GridFn phi = basis.row(k).transpose();
    CHECK((omega * phi - prior.eigenvalues()[k] * phi).cwiseAbs().maxCoeff() < 1e-8 * phi.cwiseAbs().maxCoeff());
  }
  // operator form agrees with the dense matrix
  Gen gen(4);
  const GridFn v = gen.vector(600);
  CHECK(max_abs(prior.apply_covariance(v) - omega * v) < 1e-10 * max_abs(omega * v));
}

TEST_CASE("prior invariants, trace identity and exact c-scaling") {
  ExpoSetup s;
  const ConstrainedGpPrior p1 = build_prior(s.model, scalar_theta(2.0), s.spec, s.pi, BasisFamily::monomial,
                                            constant_rule());
  EigenSpec big = s.spec;
  big.c = 100.0;
  const ConstrainedGpPrior p100 = build_prior(s.model, scalar_theta(2.0), big, s.pi, BasisFamily::monomial,
                                              constant_rule());
  const Eigen::MatrixXd o1 = p1.covariance_matrix(), o100 = p100.covariance_matrix();
  CHECK(max_abs(o100 - 100.0 * o1) <= 1e-12 * max_abs(o100));
  double lam = 0.0;
  for (std::size_t j = 3; j < 60; ++j) lam += s.spec.lambda(j);
  CAPTURE(lam);
  CHECK(o1.trace() == doctest::Approx(lam).epsilon(1e-6));  // operator matrix already carries the weights
  CHECK(max_abs(gpm::test::gram(p1.basis(), s.pi) - Eigen::MatrixXd::Identity(60, 60)) < 1e-8);
  CHECK(p1.constraint_residuals(p1.prior_mean()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dependent constraint functions are rejected") {
  Grid g(-1.0, 1.0, 200);
  const Measure pi = Measure::lebesgue(g);
  MomentModel m = builtin_model("mean_truncated");
  m.h = [](const Theta&, double) { return Eigen::VectorXd::Constant(1, 1.0); };
  EigenSpec spec;
  spec.J = 10;
  CHECK_THROWS_AS(build_prior(m, scalar_theta(0.0), spec, pi, BasisFamily::legendre, constant_rule()),
                  DegenerateBasisError);
}

TEST_CASE("series prior mean") {
  Grid g(-1.0, 1.0, 801);
  const Measure pi = Measure::lebesgue(g).scaled(0.5);  // probability measure
  const MomentModel& m = builtin_model("mean_truncated");
  EigenSpec spec;
  spec.J = 12;
  const ConstraintBasis cb = constraint_basis(m, scalar_theta(0.0), pi);
  const BasisCompletion bc = complete_basis(cb.rows, spec.J, BasisFamily::legendre, pi);
  const Eigen::MatrixXd completion = bc.basis.bottomRows(10);

  const GridFn zero = prior_mean_series(cb, completion, {}, pi);
  CHECK((zero.array() - 1.0).abs().maxCoeff() < 1e-10);

  Gen gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::size_t, double> a;
    for (std::size_t j = 2; j < 12; ++j) a[j] = 0.02 * gen.normal();
    const GridFn f = prior_mean_series(cb, completion, a, pi);
    const GridFn x = g.points();
    CHECK(std::abs(inner_product(f, GridFn::Ones(801), pi) - 1.0) < 1e-10);
    CHECK(std::abs(inner_product(f, x, pi)) < 1e-10);
  }
  const GridFn f = prior_mean_series(cb, completion, {{2, 0.1}}, pi);
  CHECK(inner_product(f, completion.row(0).transpose(), pi) == doctest::Approx(0.1).epsilon(1e-8));

  int warnings = 0;
  auto prev = set_warning_sink([&](std::string_view) { ++warnings; });
  (void)prior_mean_series(cb, completion, {{2, 5.0}}, pi);
  set_warning_sink(prev);
  CHECK(warnings == 1);
  CHECK_THROWS_AS(prior_mean_series(cb, completion, {{1, 0.1}}, pi), DomainError);
}

TEST_CASE("beta prior mean") {
  CHECK(beta_shape_for_mean(0.0, 2.0) == doctest::Approx(2.0));
  CHECK(beta_shape_for_mean(0.5, 2.0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(beta_shape_for_mean(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(beta_shape_for_mean(-1.0, 2.0), DomainError);

  Grid g(-1.0, 1.0, 4001);
  const Measure pi = Measure::lebesgue(g);
  const GridFn sym = prior_mean_beta(scalar_theta(0.0), 2.0, pi);
  // Beta(2,2) on [-1,1]: (3/4)(1 - x^2)
  CHECK((sym.array() - 0.75 * (1.0 - g.points().array().square())).abs().maxCoeff() < 1e-12);

  Gen gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    // shapes >= 2 keep the endpoint behaviour smooth enough for the trapezoid rule
    const double theta = gen.uniform(0.0, 0.8), q = gen.uniform(2.0, 4.0);
    const double p = beta_shape_for_mean(theta, q);
    const GridFn f = prior_mean_beta(scalar_theta(theta), q, pi);
    CHECK(inner_product(f, GridFn::Ones(4001), pi) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(inner_product(f, g.points(), pi) - (p - q) / (p + q)) < 1e-5);
    CHECK(std::abs(inner_product(f, g.points(), pi) - theta) < 1e-5);
  }
  // singular endpoint stays finite
  const GridFn sing = prior_mean_beta(scalar_theta(-0.5), 2.0, pi);
  CHECK(sing.allFinite());
}

TEST_CASE("two-step prior mean is the closest constrained function") {
  ExpoSetup s;
  const ConstraintBasis cb = constraint_basis(s.model, scalar_theta(2.0), s.pi);
  Gen gen(21);
  const GridFn pilot = gen.vector(600);
  const GridFn f0 = prior_mean_two_step(pilot, cb, s.pi);
  CHECK(std::abs(inner_product(f0, GridFn::Ones(600), s.pi) - 1.0) < 1e-10);
  const Eigen::MatrixXd h = evaluate_h_matrix(s.model, scalar_theta(2.0), s.pi.nodes());
  for (Eigen::Index j = 0; j < 2; ++j) CHECK(std::abs(inner_product(f0, h.row(j).transpose(), s.pi)) < 1e-10);
  const GridFn again = prior_mean_two_step(f0, cb, s.pi);
  CHECK(max_abs(again - f0) < 1e-10 * max_abs(f0));
  const double best = norm(f0 - pilot, s.pi);
  for (int trial = 0; trial < 100; ++trial) {
    const GridFn other = project_onto_constraints(gen.vector(600), cb, s.pi);
    CHECK(best <= norm(other - pilot, s.pi) + 1e-12);
  }
}

TEST_CASE("prior draws satisfy the constraints") {
  ExpoSetup s;
  const ConstrainedGpPrior prior = build_prior(s.model, scalar_theta(2.0), s.spec, s.pi, BasisFamily::monomial,
                                               constant_rule());
  const Eigen::MatrixXd h = evaluate_h_matrix(s.model, scalar_theta(2.0), s.pi.nodes());
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const GridFn f = sample_prior(prior, rng);
    CHECK(std::abs(inner_product(f, GridFn::Ones(600), s.pi) - 1.0) < 1e-10);
    CHECK(std::abs(inner_product(f, h.row(0).transpose(), s.pi)) < 1e-10);
    CHECK(std::abs(inner_product(f, h.row(1).transpose(), s.pi)) < 1e-10 * 50);
  }
  const ConstrainedGpPrior flat(prior.constraints(), prior.completion_ptr(),
                                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(prior.size())), prior.prior_mean(),
                                s.pi, scalar_theta(2.0));
  CHECK(sample_prior(flat, rng) == prior.prior_mean());
}

TEST_CASE("prior draw variance matches the covariance diagonal") {
  Grid g(-1.0, 1.0, 101);
  const Measure pi = Measure::lebesgue(g);
  EigenSpec spec;
  spec.J = 15;
  const ConstrainedGpPrior prior = build_prior(builtin_model("mean_truncated"), scalar_theta(0.2), spec, pi,
                                               BasisFamily::legendre, beta_rule(2.0));
  const Eigen::MatrixXd omega = prior.covariance_matrix();
  // Omega is an operator matrix; the pointwise covariance is Omega diag(1/w).
  const Eigen::VectorXd var = omega.diagonal().cwiseQuotient(pi.weights());
  Rng rng(77);
  const int draws = 10000;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(101), s2 = s1;
  for (int i = 0; i < draws; ++i) {
    const GridFn f = sample_prior(prior, rng) - prior.prior_mean();
    s1 += f;
    s2 += f.cwiseAbs2();
  }
  int outside = 0;
  for (Eigen::Index i = 0; i < 101; ++i) {
    const double v = s2[i] / draws;
    // sd of the sample variance of a normal: var * sqrt(2/N)
    if (std::abs(v - var[i]) > 5.0 * var[i] * std::sqrt(2.0 / draws) + 1e-14) ++outside;
  }
  CHECK(outside == 0);
}

TEST_CASE("prior factory shares the completion across theta") {
  ExpoSetup s;
  const PriorFactory factory(s.model, s.pi, s.spec, BasisFamily::monomial, constant_rule(), scalar_theta(2.0));
  Gen gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const double th = gen.uniform(1.0, 3.0);
    const ConstrainedGpPrior a = factory(scalar_theta(th));
    CHECK(a.completion_ptr() == factory.reference_completion());
    const ConstrainedGpPrior b =
        build_prior(s.model, scalar_theta(th), s.spec, s.pi, BasisFamily::monomial, constant_rule());
    CHECK(max_abs(a.covariance_matrix() - b.covariance_matrix()) < 1e-8 * max_abs(b.covariance_matrix()));
    CHECK(max_abs(a.prior_mean() - b.prior_mean()) < 1e-8 * max_abs(b.prior_mean()));
  }
}

}  // TEST_SUITE
