#include "gpm/basis.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "gpm/error.hpp"
#include "gpm/log.hpp"

namespace gpm {

BasisFamily parse_basis_family(std::string_view name) {
  if (name == "monomial") return BasisFamily::monomial;
  if (name == "legendre") return BasisFamily::legendre;
  if (name == "hermite") return BasisFamily::hermite;
  throw ConfigError("unknown basis family '" + std::string(name) + "'");
}

std::string_view to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::monomial: return "monomial";
    case BasisFamily::legendre: return "legendre";
    case BasisFamily::hermite: return "hermite";
  }
  return "?";
}

namespace {

Eigen::VectorXd family_variable(BasisFamily family, const Eigen::VectorXd& x, double lo, double hi) {
  if (family == BasisFamily::hermite) return x;
  return ((2.0 * x.array() - lo - hi) / (hi - lo)).matrix();
}

}  // namespace

Eigen::VectorXd family_polynomial(BasisFamily family, std::size_t degree, const Eigen::VectorXd& x,
                                  double lo, double hi) {
  const Eigen::ArrayXd u = family_variable(family, x, lo, hi).array();
  Eigen::ArrayXd prev = Eigen::ArrayXd::Ones(x.size());
  if (degree == 0) return prev.matrix();
  if (family == BasisFamily::monomial) return u.pow(static_cast<double>(degree)).matrix();
  Eigen::ArrayXd cur = u;
  for (std::size_t k = 1; k < degree; ++k) {
    const double kd = static_cast<double>(k);
    Eigen::ArrayXd next = family == BasisFamily::legendre
                              ? (((2.0 * kd + 1.0) * u * cur - kd * prev) / (kd + 1.0)).eval()
                              : (u * cur - kd * prev).eval();
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur.matrix();
}

CandidateSource family_candidates(BasisFamily family, const Measure& m) {
  struct State {
    Eigen::VectorXd u, w;
    Eigen::MatrixXd q;  // rows: candidates produced so far
    Eigen::Index count = 0;
  };
  auto s = std::make_shared<State>();
  auto [lo, hi] = m.bounds();
  if (!(hi > lo)) hi = lo + 1.0;
  s->u = family_variable(family, m.nodes(), lo, hi);
  s->w = m.weights();
  return [s]() -> std::optional<GridFn> {
    const Eigen::Index n = s->u.size();
    if (s->count >= n) return std::nullopt;
    Eigen::VectorXd v = s->count == 0 ? Eigen::VectorXd::Ones(n)
                                      : Eigen::VectorXd(s->u.cwiseProduct(s->q.row(s->count - 1).transpose()));
    const double input_norm = std::sqrt(v.dot(s->w.cwiseProduct(v)));
    for (int pass = 0; pass < 2 && s->count > 0; ++pass) {
      auto prev = s->q.topRows(s->count);
      Eigen::VectorXd c = prev * s->w.cwiseProduct(v);
      v.noalias() -= prev.transpose() * c;
    }
    const double r = std::sqrt(v.dot(s->w.cwiseProduct(v)));
    if (!(r > kDependenceTolerance * input_norm)) return std::nullopt;
    if (s->q.rows() <= s->count) s->q.conservativeResize(std::min<Eigen::Index>(n, 2 * s->count + 16), n);
    s->q.row(s->count) = v.transpose() / r;
    return GridFn(s->q.row(s->count++).transpose());
  };
}

BasisCompletion complete_basis(const Eigen::MatrixXd& seed, std::size_t target,
                               const CandidateSource& candidates, const Measure& m) {
  const auto k0 = static_cast<std::size_t>(seed.rows());
  if (static_cast<std::size_t>(seed.cols()) != m.size())
    throw DimensionError("complete_basis seed vs measure", seed.cols(), m.size());
  if (target < k0) throw DomainError("basis target smaller than the seed");
  BasisCompletion out{Eigen::MatrixXd(static_cast<Eigen::Index>(target), seed.cols()), {}};
  out.basis.topRows(seed.rows()) = seed;
  const Eigen::VectorXd& w = m.weights();
  Eigen::Index k = seed.rows();
  std::size_t index = 0;
  while (static_cast<std::size_t>(k) < target) {
    std::optional<GridFn> cand = candidates();
    if (!cand)
      throw DomainError("candidate family exhausted after " + std::to_string(index) + " candidates with " +
                        std::to_string(k) + " of " + std::to_string(target) + " basis functions");
    if (static_cast<std::size_t>(cand->size()) != m.size())
      throw DimensionError("candidate vs measure", cand->size(), m.size());
    Eigen::VectorXd v = std::move(*cand);
    const double input_norm = std::sqrt(v.dot(w.cwiseProduct(v)));
    for (int pass = 0; pass < 2; ++pass) {
      auto prev = out.basis.topRows(k);
      Eigen::VectorXd c = prev * w.cwiseProduct(v);
      v.noalias() -= prev.transpose() * c;
    }
    const double r = std::sqrt(v.dot(w.cwiseProduct(v)));
    if (!(input_norm > 0.0) || r < kDependenceTolerance * input_norm) {
      out.skipped.push_back(index++);
      continue;
    }
    out.basis.row(k++) = v.transpose() / r;
    ++index;
  }
  // Up to one candidate per seed direction may fall in the seed span.
  if (out.skipped.size() > k0)
    warn("basis completion skipped " + std::to_string(out.skipped.size()) + " dependent candidates (seed size " +
         std::to_string(k0) + ")");
  return out;
}

BasisCompletion complete_basis(const Eigen::MatrixXd& seed, std::size_t target, BasisFamily family,
                               const Measure& m) {
  return complete_basis(seed, target, family_candidates(family, m), m);
}

}  // namespace gpm
