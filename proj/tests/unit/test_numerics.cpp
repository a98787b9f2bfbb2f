#include <cmath>
#include <optional>

#include "doctest.h"
#include "gpm/basis.hpp"
#include "gpm/error.hpp"
#include "gpm/grid.hpp"
#include "gpm/log.hpp"
#include "support.hpp"

using namespace gpm;
using gpm::test::Gen;

TEST_SUITE("numerics-core") {

TEST_CASE("grid invariants") {
  Grid g(-1.0, 1.0, 5);
  CHECK(g.size() == 5);
  CHECK(g.step() == doctest::Approx(0.5));
  CHECK(g[0] == -1.0);
  CHECK(g[4] == 1.0);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(Grid(1.0, 1.0, 10), DomainError);
  const std::vector<double> s = {0.5, 3.0, 1.0};
  Grid c = Grid::covering(s, 1.0, 11);
  CHECK(c.lo() == doctest::Approx(-0.5));
  CHECK(c.hi() == doctest::Approx(4.0));
}

TEST_CASE("trapezoid weights halve the end points") {
  Grid g(0.0, 1.0, 3);
  Measure m = Measure::lebesgue(g);
  CHECK(m.weights()[0] == doctest::Approx(0.25));
  CHECK(m.weights()[1] == doctest::Approx(0.5));
  CHECK(m.weights()[2] == doctest::Approx(0.25));
  CHECK(m.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("inner product examples") {
  Grid g(-1.0, 1.0, 1001);
  Measure m = Measure::lebesgue(g);
  const GridFn one = GridFn::Ones(1001);
  const GridFn& x = g.points();
  CHECK(inner_product(one, one, m) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(inner_product(one, x, m)) < 1e-14);
  // trapezoid error for x^2 is exactly h^2 (b - a) / 6 with h = 0.002
  CHECK(std::abs(inner_product(x, x, m) - (2.0 / 3.0 + 0.002 * 0.002 / 3.0)) < 1e-12);
}

TEST_CASE("inner product rejects mismatched lengths and names both") {
  Grid g(0.0, 1.0, 4);
  Measure m = Measure::lebesgue(g);
  try {
    (void)inner_product(GridFn::Ones(3), GridFn::Ones(4), m);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(e.lhs() == 3);
    CHECK(e.rhs() == 4);
  }
}

TEST_CASE("inner product is symmetric and bilinear") {
  Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m_size = static_cast<Eigen::Index>(gen.index(2, 300));
    Grid g(gen.uniform(-3, 0), gen.uniform(0.5, 3), static_cast<std::size_t>(m_size));
    Measure m = Measure::trapezoid(g, [](double t) { return std::exp(-t * t); });
    const GridFn f = gen.vector(m_size), h = gen.vector(m_size), k = gen.vector(m_size);
    const double a = gen.normal(), b = gen.normal();
    CHECK(inner_product(f, h, m) == doctest::Approx(inner_product(h, f, m)).epsilon(1e-13));
    const double lhs = inner_product(a * f + b * k, h, m);
    const double rhs = a * inner_product(f, h, m) + b * inner_product(k, h, m);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("quadrature error is second order") {
  auto err = [](std::size_t m_size) {
    Grid g(0.0, 2.0, m_size);
    Measure m = Measure::lebesgue(g);
    const GridFn f = g.points().array().sin();
    const GridFn h = g.points().array().exp();
    // oracle: integral of sin(x) e^x on [0,2] = e^x (sin x - cos x)/2
    const double exact = (std::exp(2.0) * (std::sin(2.0) - std::cos(2.0)) + 1.0) / 2.0;
    return std::abs(inner_product(f, h, m) - exact);
  };
  const double ratio = err(201) / err(401);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("gram_schmidt of the constant") {
  Grid g(-1.0, 1.0, 501);
  Measure m = Measure::lebesgue(g);
  const Orthonormalization o = gram_schmidt(Eigen::MatrixXd::Ones(1, 501), m);
  CHECK(o.basis(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(o.factor(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("gram_schmidt of {1, x - theta} gives normalized P1 for any theta") {
  Gen gen(3);
  Grid g(-1.0, 1.0, 2001);
  Measure m = Measure::lebesgue(g);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = gen.uniform(-5.0, 5.0);
    Eigen::MatrixXd rows(2, 2001);
    rows.row(0).setOnes();
    rows.row(1) = (g.points().array() - theta).matrix().transpose();
    const Orthonormalization o = gram_schmidt(rows, m);
    // discrete normalization: sum of x^2 weights rather than 2/3
    const double scale = 1.0 / std::sqrt(inner_product(g.points(), g.points(), m));
    const Eigen::VectorXd expected = scale * g.points();
    CHECK((o.basis.row(1).transpose() - expected).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(scale == doctest::Approx(std::sqrt(1.5)).epsilon(1e-6));
  }
}

TEST_CASE("gram_schmidt leaves orthonormal input unchanged") {
  Grid g(-1.0, 1.0, 801);
  Measure m = Measure::lebesgue(g);
  Eigen::MatrixXd rows(3, 801);
  rows.row(0).setOnes();
  rows.row(1) = g.points().transpose();
  rows.row(2) = g.points().array().square().matrix().transpose();
  const Orthonormalization once = gram_schmidt(rows, m);
  const Orthonormalization twice = gram_schmidt(once.basis, m);
  CHECK(gpm::test::max_abs(twice.basis - once.basis) < 1e-12);
  CHECK(gpm::test::max_abs(twice.factor - Eigen::MatrixXd::Identity(3, 3)) < 1e-12);
}

TEST_CASE("gram_schmidt reports the dependent index") {
  Grid g(0.0, 1.0, 200);
  Measure m = Measure::lebesgue(g);
  Eigen::MatrixXd rows(3, 200);
  rows.row(0).setOnes();
  rows.row(1) = g.points().transpose();
  rows.row(2) = 2.0 * rows.row(1) - 3.0 * rows.row(0);
  try {
    (void)gram_schmidt(rows, m);
    FAIL("expected DegenerateBasisError");
  } catch (const DegenerateBasisError& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("gram_schmidt properties on random inputs") {
  Gen gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m_size = gen.index(500, 900);
    Grid g(gen.uniform(-2.0, -0.5), gen.uniform(0.5, 2.0), m_size);
    Measure m = Measure::trapezoid(g, [](double t) { return 1.0 + 0.5 * std::sin(t); });
    const auto k = static_cast<Eigen::Index>(gen.index(1, 6));
    Eigen::MatrixXd rows(k, static_cast<Eigen::Index>(m_size));
    for (Eigen::Index r = 0; r < k; ++r) rows.row(r) = gen.vector(static_cast<Eigen::Index>(m_size)).transpose();
    const Orthonormalization o = gram_schmidt(rows, m);
    CHECK(gpm::test::max_abs(gpm::test::gram(o.basis, m) - Eigen::MatrixXd::Identity(k, k)) < 1e-8);
    CHECK(gpm::test::max_abs(o.factor * o.basis - rows) < 1e-8 * gpm::test::max_abs(rows));
    // order preservation: factor lower triangular
    CHECK(gpm::test::max_abs(o.factor.triangularView<Eigen::StrictlyUpper>().toDenseMatrix()) == 0.0);
  }
}

TEST_CASE("complete_basis reproduces the normalized Legendre sequence") {
  Grid g(-1.0, 1.0, 4001);
  Measure m = Measure::lebesgue(g);
  const Eigen::MatrixXd seed = Eigen::MatrixXd::Constant(1, 4001, 1.0 / std::sqrt(2.0));
  const BasisCompletion bc = complete_basis(seed, 3, BasisFamily::monomial, m);
  REQUIRE(bc.basis.rows() == 3);
  const Eigen::ArrayXd x = g.points().array();
  const Eigen::ArrayXd p1 = std::sqrt(1.5) * x;
  const Eigen::ArrayXd p2 = std::sqrt(2.5) * 0.5 * (3.0 * x.square() - 1.0);
  CHECK(gpm::test::max_abs(bc.basis.row(0) - seed) < 1e-12);
  // sign is fixed by the candidate direction
  CHECK((bc.basis.row(1).transpose().array() - p1).abs().maxCoeff() < 1e-5);
  CHECK((bc.basis.row(2).transpose().array() - p2).abs().maxCoeff() < 1e-5);
}

TEST_CASE("complete_basis with a full seed returns the seed") {
  Grid g(-1.0, 1.0, 300);
  Measure m = Measure::lebesgue(g);
  Eigen::MatrixXd rows(2, 300);
  rows.row(0).setOnes();
  rows.row(1) = g.points().transpose();
  const Orthonormalization o = gram_schmidt(rows, m);
  const BasisCompletion bc = complete_basis(o.basis, 2, BasisFamily::legendre, m);
  CHECK(gpm::test::max_abs(bc.basis - o.basis) == 0.0);
}

TEST_CASE("Hermite family under the Gaussian weight follows the recurrence") {
  Grid g(-9.0, 9.0, 3001);
  Measure m = Measure::trapezoid(g, [](double t) { return std::exp(-0.5 * t * t); });
  const Eigen::MatrixXd seed = Eigen::MatrixXd::Ones(1, 3001) / std::sqrt(m.total_mass());
  const BasisCompletion bc = complete_basis(seed, 6, BasisFamily::hermite, m);
  const Eigen::ArrayXd x = g.points().array();
  // He_{j+1} = x He_j - j He_{j-1}, hand-rolled
  Eigen::ArrayXd prev = Eigen::ArrayXd::Ones(x.size()), cur = x;
  double fact = 1.0;
  for (int j = 1; j < 6; ++j) {
    fact *= j;
    const Eigen::ArrayXd expected = cur / std::sqrt(fact * std::sqrt(2.0 * M_PI));
    const double sign = bc.basis.row(j).transpose().array().matrix().dot(expected.matrix()) > 0 ? 1.0 : -1.0;
    const Eigen::ArrayXd got = sign * bc.basis.row(j).transpose().array();
    // compare where the weight is non-negligible
    const Eigen::ArrayXd mask = (x.abs() < 4.0).cast<double>();
    CHECK(((got - expected) * mask).abs().maxCoeff() < 1e-6);
    const Eigen::ArrayXd next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  // raw recurrence oracle in the library agrees with the hand-rolled one
  const Eigen::VectorXd he3 = family_polynomial(BasisFamily::hermite, 3, g.points(), g.lo(), g.hi());
  CHECK((he3.array() - (x.cube() - 3.0 * x)).abs().maxCoeff() < 1e-9);
}

TEST_CASE("all families give the same span") {
  Grid g(0.0, 4.0, 700);
  Measure m = Measure::trapezoid(g, [](double t) { return std::exp(-t); });
  const Eigen::MatrixXd seed = Eigen::MatrixXd::Ones(1, 700) / std::sqrt(m.total_mass());
  const Eigen::MatrixXd a = complete_basis(seed, 12, BasisFamily::monomial, m).basis;
  const Eigen::MatrixXd b = complete_basis(seed, 12, BasisFamily::legendre, m).basis;
  const Eigen::MatrixXd c = complete_basis(seed, 12, BasisFamily::hermite, m).basis;
  const Eigen::MatrixXd w = m.weights().asDiagonal();
  // projector equality: B^T B W
  const Eigen::MatrixXd pa = a.transpose() * a * w, pb = b.transpose() * b * w, pc = c.transpose() * c * w;
  CHECK(gpm::test::max_abs(pa - pb) < 1e-8);
  CHECK(gpm::test::max_abs(pa - pc) < 1e-8);
}

TEST_CASE("complete_basis orthonormality and span at J = 300") {
  Gen gen(5);
  for (int trial = 0; trial < 3; ++trial) {
    const std::size_t m_size = gen.index(500, 1000);
    Grid g(gen.uniform(-2, -1), gen.uniform(5, 15), m_size);
    Measure m = Measure::trapezoid(g, [](double t) { return std::exp(-t); });
    Eigen::MatrixXd rows(3, static_cast<Eigen::Index>(m_size));
    const double theta = gen.uniform(1, 3);
    rows.row(0).setOnes();
    rows.row(1) = (g.points().array() - theta).matrix().transpose();
    rows.row(2) = (2 * theta * theta - g.points().array().square()).matrix().transpose();
    const Orthonormalization o = gram_schmidt(rows, m);
    const BasisCompletion bc = complete_basis(o.basis, 300, BasisFamily::monomial, m);
    CHECK(gpm::test::max_abs(gpm::test::gram(bc.basis, m) - Eigen::MatrixXd::Identity(300, 300)) < 1e-8);
    const Eigen::MatrixXd coef = rows * m.weights().asDiagonal() * bc.basis.transpose();
    CHECK(gpm::test::max_abs(coef * bc.basis - rows) < 1e-8 * gpm::test::max_abs(rows));
  }
}

TEST_CASE("dependent candidates are skipped with a warning and exhaustion throws") {
  Grid g(-1.0, 1.0, 200);
  Measure m = Measure::lebesgue(g);
  const Eigen::MatrixXd seed = Eigen::MatrixXd::Constant(1, 200, 1.0 / std::sqrt(m.total_mass()));
  std::vector<GridFn> pool = {GridFn::Ones(200), 2.0 * GridFn::Ones(200), g.points(), g.points().array().square().matrix()};
  std::size_t next = 0;
  CandidateSource source = [&]() -> std::optional<GridFn> {
    if (next >= pool.size()) return std::nullopt;
    return pool[next++];
  };
  int warnings = 0;
  auto previous = set_warning_sink([&](std::string_view) { ++warnings; });
  const BasisCompletion bc = complete_basis(seed, 3, source, m);
  CHECK(bc.skipped == std::vector<std::size_t>{0, 1});
  CHECK(warnings >= 1);
  next = 0;
  CHECK_THROWS_AS(complete_basis(seed, 5, source, m), DomainError);
  set_warning_sink(previous);
}

}  // TEST_SUITE
