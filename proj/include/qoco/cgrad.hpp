#pragma once

#include "qoco/geometry.hpp"
#include "qoco/losses.hpp"
#include "qoco/rng.hpp"

namespace qoco::cgrad {

// (f(z + r'*e_j) - f(z - r'*e_j)) / (2r'). Exactly 2 counted queries; f(z)
// itself is never evaluated.
double central_difference(LossOracle& f, const Vec& z, double r_prime, int j);

struct GradEstimate {
  Vec z;
  Vec grad;
  int queries = 0;  // always 2n
};

// Finite-difference estimator: sample z uniformly in B_inf(x, r), then one
// central difference per coordinate.
GradEstimate estimate_gradient_c(LossOracle& f, const Vec& x, double r, double r_prime,
                                 Rng& rng);

}  // namespace qoco::cgrad
