#include "qoco/cgrad.hpp"

#include <string>

#include "qoco/errors.hpp"

namespace qoco::cgrad {

double central_difference(LossOracle& f, const Vec& z, double r_prime, int j) {
  if (j < 0 || j >= static_cast<int>(z.size())) {
    throw DimensionMismatch("central_difference: coordinate index out of range");
  }
  if (!(r_prime > 0.0)) throw RuntimeFault("central_difference: r_prime must be positive");
  Vec probe = z;
  probe[j] = z[j] + r_prime;
  const double up = f.eval(probe);
  probe[j] = z[j] - r_prime;
  const double down = f.eval(probe);
  return (up - down) / (2.0 * r_prime);
}

GradEstimate estimate_gradient_c(LossOracle& f, const Vec& x, double r, double r_prime,
                                 Rng& rng) {
  if (!(r > 0.0) || !(r_prime > 0.0)) {
    throw RuntimeFault("estimate_gradient_c: radii must be positive");
  }
  GradEstimate est;
  est.z = sample_linf_ball(x, r, rng);
  est.grad.resize(x.size());
  for (int j = 0; j < static_cast<int>(x.size()); ++j) {
    est.grad[j] = central_difference(f, est.z, r_prime, j);
  }
  est.queries = 2 * static_cast<int>(x.size());
  return est;
}

}  // namespace qoco::cgrad
