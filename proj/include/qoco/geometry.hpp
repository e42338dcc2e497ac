#pragma once

#include <string>
#include <vector>

#include "qoco/rng.hpp"

namespace qoco {

// Decision points, gradients and sample points are plain dense vectors.
using Vec = std::vector<double>;

enum class NormKind { kL1, kL2, kLinf };

double norm(const Vec& x, NormKind kind);
double norm_l1(const Vec& x);
double norm_l2(const Vec& x);
double norm_linf(const Vec& x);

// c = a - b
Vec sub(const Vec& a, const Vec& b);
// a + s*b
Vec axpy(const Vec& a, double s, const Vec& b);
double dot(const Vec& a, const Vec& b);
double dist_l2(const Vec& a, const Vec& b);

// Convex feasible set: an axis-aligned box or a Euclidean ball. Both have
// closed-form Euclidean projections. The cached diameter D is Euclidean;
// since ||.||_inf <= ||.||_2 it bounds the sup-norm spread as well.
class FeasibleSet {
 public:
  enum class Kind { kBox, kBall };

  static FeasibleSet box(Vec lower, Vec upper);
  static FeasibleSet ball(Vec center, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(lower_or_center_.size()); }
  double diameter() const { return diameter_; }

  const Vec& lower() const { return lower_or_center_; }   // box only
  const Vec& upper() const { return upper_; }             // box only
  const Vec& center() const { return lower_or_center_; }  // ball only
  double radius() const { return radius_; }               // ball only

  // Euclidean-nearest point of the set. Identity on members, idempotent,
  // nonexpansive, and satisfies ||P(y)-x|| <= ||y-x|| for all x in the set.
  Vec project(const Vec& y) const;

  bool contains(const Vec& x, double tol = 0.0) const;

  // Uniform sample from the set (per-coordinate for boxes, rejection from
  // the bounding box for balls).
  Vec sample_uniform(Rng& rng) const;

  // sup over the set, enlarged by linf_margin in every coordinate, of the
  // Euclidean distance to `a`. Exact for boxes; for balls an upper bound
  // (radius + margin*sqrt(n) + ||center-a||).
  double max_distance_to(const Vec& a, double linf_margin = 0.0) const;

  // Componentwise bounds of the set enlarged by linf_margin. Used as the
  // cheap domain check installed on loss oracles.
  void bounding_box(double linf_margin, Vec& lo, Vec& hi) const;

  std::string describe() const;

 private:
  FeasibleSet() = default;
  Kind kind_ = Kind::kBox;
  Vec lower_or_center_;
  Vec upper_;
  double radius_ = 0.0;
  double diameter_ = 0.0;
};

// One point of B_inf(center, r): each coordinate independently uniform on
// [center_i - r, center_i + r]. r = 0 returns the center exactly.
Vec sample_linf_ball(const Vec& center, double r, Rng& rng);

}  // namespace qoco
