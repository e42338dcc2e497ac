#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qoco/geometry.hpp"

namespace qoco {

// A counted zeroth-order value oracle. Player algorithms see only eval();
// exact_gradient() is a verification channel for tests and error audits and
// must never feed a player algorithm.
class LossOracle {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;

  LossOracle(ValueFn value_fn, GradFn exact_gradient_fn, double lipschitz_g,
             double strong_convexity_alpha);

  // Counted query. Throws DomainViolation if a domain box is installed and
  // x falls outside it.
  double eval(const Vec& x);

  // Counted query without the per-point domain check, for bulk callers that
  // already validated their whole probe region with check_box().
  double eval_prechecked(const Vec& x) {
    ++queries_;
    return value_fn_(x);
  }

  // Bookkeeping evaluation (regret sums, comparator objectives). Not
  // counted against the query budget and not domain-checked.
  double eval_uncounted(const Vec& x) const { return value_fn_(x); }

  // Test/verification only.
  Vec exact_gradient(const Vec& x) const { return grad_fn_(x); }

  double lipschitz() const { return lipschitz_g_; }
  double strong_convexity() const { return alpha_; }
  std::uint64_t queries() const { return queries_; }
  void reset_queries() { queries_ = 0; }

  // Installs a componentwise domain box; eval() outside it reports a
  // schedule bug. check_box() lets bulk callers validate a whole probe
  // region once instead of per point.
  void set_domain_box(Vec lo, Vec hi);
  bool has_domain() const { return domain_set_; }
  void check_point(const Vec& x) const;
  void check_box(const Vec& lo, const Vec& hi) const;

  // Family/problem-level Lipschitz constant handed to the player. Set by
  // adversaries so every round's oracle carries the game's G.
  void override_lipschitz(double g) { lipschitz_g_ = g; }

 private:
  ValueFn value_fn_;
  GradFn grad_fn_;
  double lipschitz_g_;
  double alpha_;
  std::uint64_t queries_ = 0;
  bool domain_set_ = false;
  Vec domain_lo_, domain_hi_;
};

// Concrete convex families. G is analytic (never estimated): noise in G
// would contaminate every schedule formula downstream.

// f(x) = g.x + offset; G = ||g||_2, alpha = 0.
LossOracle make_linear(Vec slope, double offset = 0.0);

// f(x) = (s/2)||x - a||^2; alpha = s; G = s * sup_{x in domain}||x - a||
// over `domain` enlarged by linf_margin. Rejects s <= 0.
LossOracle make_quadratic(double curvature, Vec center, const FeasibleSet& domain,
                          double linf_margin);

// f(x) = max_i (slopes[i].x + offsets[i]); G = max_i ||slopes[i]||_2,
// alpha = 0. The exact (sub)gradient picks the first maximizing piece.
LossOracle make_max_affine(std::vector<Vec> slopes, Vec offsets);

// Adversaries of the three power levels. Oblivious and adaptive rules never
// see x_t; a completely adaptive one may.
class Adversary {
 public:
  enum class Power { kOblivious, kAdaptive, kCompletelyAdaptive };

  static Adversary oblivious(std::vector<LossOracle> sequence);
  static Adversary adaptive(int horizon, std::function<LossOracle(int)> rule);
  static Adversary completely_adaptive(int horizon,
                                       std::function<LossOracle(int, const Vec&)> rule);

  // 1-based round index. The returned reference stays valid until the next
  // call (rule-based adversaries materialize one oracle at a time).
  LossOracle& next(int t, const Vec& x_t);

  Power power() const { return power_; }
  int horizon() const { return horizon_; }
  std::string describe() const;

 private:
  Adversary() = default;
  Power power_ = Power::kOblivious;
  int horizon_ = 0;
  std::vector<LossOracle> sequence_;
  std::function<LossOracle(int)> adaptive_rule_;
  std::function<LossOracle(int, const Vec&)> full_rule_;
  std::optional<LossOracle> current_;
};

}  // namespace qoco
