#include "qoco/losses.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "qoco/errors.hpp"

namespace qoco {

LossOracle::LossOracle(ValueFn value_fn, GradFn exact_gradient_fn, double lipschitz_g,
                       double strong_convexity_alpha)
    : value_fn_(std::move(value_fn)),
      grad_fn_(std::move(exact_gradient_fn)),
      lipschitz_g_(lipschitz_g),
      alpha_(strong_convexity_alpha) {
  if (!(lipschitz_g_ > 0.0) || !std::isfinite(lipschitz_g_)) {
    throw RuntimeFault("LossOracle: Lipschitz constant must be positive and finite");
  }
  if (alpha_ < 0.0) throw RuntimeFault("LossOracle: negative strong convexity");
}

double LossOracle::eval(const Vec& x) {
  if (domain_set_) check_point(x);
  ++queries_;
  return value_fn_(x);
}

void LossOracle::set_domain_box(Vec lo, Vec hi) {
  domain_lo_ = std::move(lo);
  domain_hi_ = std::move(hi);
  domain_set_ = true;
}

void LossOracle::check_point(const Vec& x) const {
  if (!domain_set_) return;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < domain_lo_[i] || x[i] > domain_hi_[i]) {
      std::ostringstream os;
      os << "oracle queried outside its domain: coordinate " << i << " = " << x[i]
         << " not in [" << domain_lo_[i] << ", " << domain_hi_[i] << "]";
      throw DomainViolation(os.str());
    }
  }
}

void LossOracle::check_box(const Vec& lo, const Vec& hi) const {
  if (!domain_set_) return;
  check_point(lo);
  check_point(hi);
}

LossOracle make_linear(Vec slope, double offset) {
  const double g2 = norm_l2(slope);
  if (!(g2 > 0.0)) throw RuntimeFault("make_linear: zero slope has no positive Lipschitz constant");
  Vec g = slope;
  auto value = [g, offset](const Vec& x) { return dot(g, x) + offset; };
  auto grad = [g](const Vec&) { return g; };
  return LossOracle(value, grad, g2, 0.0);
}

LossOracle make_quadratic(double curvature, Vec center, const FeasibleSet& domain,
                          double linf_margin) {
  if (!(curvature > 0.0)) {
    throw RuntimeFault("make_quadratic: curvature must be positive (convexity)");
  }
  const double g2 = curvature * domain.max_distance_to(center, linf_margin);
  Vec a = std::move(center);
  const double s = curvature;
  auto value = [s, a](const Vec& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = x[i] - a[i];
      acc += d * d;
    }
    return 0.5 * s * acc;
  };
  auto grad = [s, a](const Vec& x) {
    Vec g(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) g[i] = s * (x[i] - a[i]);
    return g;
  };
  return LossOracle(value, grad, g2, s);
}

LossOracle make_max_affine(std::vector<Vec> slopes, Vec offsets) {
  if (slopes.empty() || slopes.size() != offsets.size()) {
    throw RuntimeFault("make_max_affine: need one offset per slope and at least one piece");
  }
  double g2 = 0.0;
  for (const Vec& s : slopes) g2 = std::max(g2, norm_l2(s));
  if (!(g2 > 0.0)) throw RuntimeFault("make_max_affine: all-zero slopes");
  auto pieces = std::make_shared<std::pair<std::vector<Vec>, Vec>>(std::move(slopes),
                                                                   std::move(offsets));
  auto argmax = [pieces](const Vec& x) {
    std::size_t best = 0;
    double best_v = dot(pieces->first[0], x) + pieces->second[0];
    for (std::size_t i = 1; i < pieces->first.size(); ++i) {
      const double v = dot(pieces->first[i], x) + pieces->second[i];
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    return std::make_pair(best, best_v);
  };
  auto value = [argmax](const Vec& x) { return argmax(x).second; };
  auto grad = [pieces, argmax](const Vec& x) { return pieces->first[argmax(x).first]; };
  return LossOracle(value, grad, g2, 0.0);
}

Adversary Adversary::oblivious(std::vector<LossOracle> sequence) {
  if (sequence.empty()) throw RuntimeFault("Adversary::oblivious: empty sequence");
  Adversary a;
  a.power_ = Power::kOblivious;
  a.horizon_ = static_cast<int>(sequence.size());
  a.sequence_ = std::move(sequence);
  return a;
}

Adversary Adversary::adaptive(int horizon, std::function<LossOracle(int)> rule) {
  if (horizon < 1) throw RuntimeFault("Adversary::adaptive: horizon must be >= 1");
  Adversary a;
  a.power_ = Power::kAdaptive;
  a.horizon_ = horizon;
  a.adaptive_rule_ = std::move(rule);
  return a;
}

Adversary Adversary::completely_adaptive(int horizon,
                                         std::function<LossOracle(int, const Vec&)> rule) {
  if (horizon < 1) throw RuntimeFault("Adversary::completely_adaptive: horizon must be >= 1");
  Adversary a;
  a.power_ = Power::kCompletelyAdaptive;
  a.horizon_ = horizon;
  a.full_rule_ = std::move(rule);
  return a;
}

LossOracle& Adversary::next(int t, const Vec& x_t) {
  if (t < 1 || t > horizon_) {
    throw RuntimeFault("Adversary::next: round " + std::to_string(t) + " out of range [1, " +
                       std::to_string(horizon_) + "]");
  }
  switch (power_) {
    case Power::kOblivious:
      return sequence_[static_cast<std::size_t>(t - 1)];
    case Power::kAdaptive:
      current_.emplace(adaptive_rule_(t));
      return *current_;
    case Power::kCompletelyAdaptive:
      current_.emplace(full_rule_(t, x_t));
      return *current_;
  }
  throw RuntimeFault("Adversary::next: unreachable");
}

std::string Adversary::describe() const {
  switch (power_) {
    case Power::kOblivious: return "oblivious";
    case Power::kAdaptive: return "adaptive";
    case Power::kCompletelyAdaptive: return "completely_adaptive";
  }
  return "?";
}

}  // namespace qoco
