#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "gpm/grid.hpp"

namespace gpm {

enum class BasisFamily { monomial, legendre, hermite };

BasisFamily parse_basis_family(std::string_view name);
std::string_view to_string(BasisFamily family);

// Raw degree-k member of a family on `x`. Monomials and Legendre polynomials are
// evaluated in the variable mapped affinely from [lo, hi] onto [-1, 1]; Hermite
// polynomials (probabilists' convention) use x directly.
Eigen::VectorXd family_polynomial(BasisFamily family, std::size_t degree, const Eigen::VectorXd& x,
                                  double lo, double hi);

// Produces candidates one at a time; an empty optional means the source is exhausted.
using CandidateSource = std::function<std::optional<GridFn>()>;

// Degree-ordered candidates of a polynomial family on the nodes of `m`.
//
// High-degree polynomials sampled on a grid are numerically dependent long before
// the degree reaches the number of nodes, so the raw recurrence is replaced by the
// discrete Stieltjes recurrence under `m`: candidate k is the family variable times
// candidate k-1, orthonormalized against candidates 0..k-1. Candidate k therefore
// spans the same degree-k subspace as the raw family member and Gram-Schmidt of the
// sequence reproduces Gram-Schmidt of the raw family.
CandidateSource family_candidates(BasisFamily family, const Measure& m);

struct BasisCompletion {
  Eigen::MatrixXd basis;             // J x M, rows orthonormal under the measure
  std::vector<std::size_t> skipped;  // candidate indices rejected as dependent
};

// Appends candidates to an orthonormal seed until `target` rows are reached.
BasisCompletion complete_basis(const Eigen::MatrixXd& seed, std::size_t target,
                               const CandidateSource& candidates, const Measure& m);
BasisCompletion complete_basis(const Eigen::MatrixXd& seed, std::size_t target, BasisFamily family,
                               const Measure& m);

}  // namespace gpm
