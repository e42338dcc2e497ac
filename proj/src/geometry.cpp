#include "qoco/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qoco/errors.hpp"

namespace qoco {

namespace {

void check_finite(const Vec& x, const char* who) {
  for (double v : x) {
    if (!std::isfinite(v)) throw RuntimeFault(std::string(who) + ": non-finite coordinate");
  }
}

void check_dim(const Vec& x, int n, const char* who) {
  if (static_cast<int>(x.size()) != n) {
    throw DimensionMismatch(std::string(who) + ": expected dimension " + std::to_string(n) +
                            ", got " + std::to_string(x.size()));
  }
}

}  // namespace

double norm_l1(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return s;
}

double norm_l2(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double norm_linf(const Vec& x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::fabs(v));
  return s;
}

double norm(const Vec& x, NormKind kind) {
  switch (kind) {
    case NormKind::kL1: return norm_l1(x);
    case NormKind::kL2: return norm_l2(x);
    case NormKind::kLinf: return norm_linf(x);
  }
  return 0.0;
}

Vec sub(const Vec& a, const Vec& b) {
  check_dim(b, static_cast<int>(a.size()), "sub");
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vec axpy(const Vec& a, double s, const Vec& b) {
  check_dim(b, static_cast<int>(a.size()), "axpy");
  Vec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + s * b[i];
  return c;
}

double dot(const Vec& a, const Vec& b) {
  check_dim(b, static_cast<int>(a.size()), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dist_l2(const Vec& a, const Vec& b) { return norm_l2(sub(a, b)); }

FeasibleSet FeasibleSet::box(Vec lower, Vec upper) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw RuntimeFault("FeasibleSet::box: bounds must be nonempty and match");
  }
  check_finite(lower, "FeasibleSet::box");
  check_finite(upper, "FeasibleSet::box");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw RuntimeFault("FeasibleSet::box: lower > upper");
  }
  FeasibleSet s;
  s.kind_ = Kind::kBox;
  s.diameter_ = dist_l2(upper, lower);
  s.lower_or_center_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::ball(Vec center, double radius) {
  if (center.empty()) throw RuntimeFault("FeasibleSet::ball: empty center");
  check_finite(center, "FeasibleSet::ball");
  if (!(radius > 0.0)) throw RuntimeFault("FeasibleSet::ball: radius must be positive");
  FeasibleSet s;
  s.kind_ = Kind::kBall;
  s.lower_or_center_ = std::move(center);
  s.radius_ = radius;
  s.diameter_ = 2.0 * radius;
  return s;
}

Vec FeasibleSet::project(const Vec& y) const {
  check_dim(y, dim(), "FeasibleSet::project");
  check_finite(y, "FeasibleSet::project");
  if (kind_ == Kind::kBox) {
    Vec x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      x[i] = std::clamp(y[i], lower_or_center_[i], upper_[i]);
    }
    return x;
  }
  const double d = dist_l2(y, lower_or_center_);
  if (d <= radius_) return y;
  // Radial rescale toward the center. Rounding can land an ulp outside the
  // ball; shave the scale until the result truly contains, so projecting a
  // projected point hits the identity path bit-exactly.
  double scale = radius_ / d;
  Vec x(y.size());
  for (int attempt = 0; attempt < 8; ++attempt) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      x[i] = lower_or_center_[i] + scale * (y[i] - lower_or_center_[i]);
    }
    if (dist_l2(x, lower_or_center_) <= radius_) return x;
    scale = std::nextafter(scale, 0.0);
  }
  return x;
}

bool FeasibleSet::contains(const Vec& x, double tol) const {
  check_dim(x, dim(), "FeasibleSet::contains");
  if (kind_ == Kind::kBox) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < lower_or_center_[i] - tol || x[i] > upper_[i] + tol) return false;
    }
    return true;
  }
  return dist_l2(x, lower_or_center_) <= radius_ + tol;
}

Vec FeasibleSet::sample_uniform(Rng& rng) const {
  if (kind_ == Kind::kBox) {
    Vec x(lower_or_center_.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform(lower_or_center_[i], upper_[i]);
    }
    return x;
  }
  // Rejection from the bounding box; acceptance rate is fine for the small
  // dimensions a ball experiment uses.
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vec x(lower_or_center_.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform(lower_or_center_[i] - radius_, lower_or_center_[i] + radius_);
    }
    if (contains(x)) return x;
  }
  throw RuntimeFault("FeasibleSet::sample_uniform: rejection sampling failed");
}

double FeasibleSet::max_distance_to(const Vec& a, double linf_margin) const {
  check_dim(a, dim(), "FeasibleSet::max_distance_to");
  if (kind_ == Kind::kBox) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double lo = lower_or_center_[i] - linf_margin;
      const double hi = upper_[i] + linf_margin;
      const double d = std::max(std::fabs(a[i] - lo), std::fabs(hi - a[i]));
      s += d * d;
    }
    return std::sqrt(s);
  }
  return radius_ + linf_margin * std::sqrt(static_cast<double>(dim())) +
         dist_l2(a, lower_or_center_);
}

void FeasibleSet::bounding_box(double linf_margin, Vec& lo, Vec& hi) const {
  lo.assign(lower_or_center_.size(), 0.0);
  hi.assign(lower_or_center_.size(), 0.0);
  for (std::size_t i = 0; i < lower_or_center_.size(); ++i) {
    if (kind_ == Kind::kBox) {
      lo[i] = lower_or_center_[i] - linf_margin;
      hi[i] = upper_[i] + linf_margin;
    } else {
      lo[i] = lower_or_center_[i] - radius_ - linf_margin;
      hi[i] = lower_or_center_[i] + radius_ + linf_margin;
    }
  }
}

std::string FeasibleSet::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::kBox) {
    os << "box(n=" << dim() << ", D=" << diameter_ << ")";
  } else {
    os << "ball(n=" << dim() << ", radius=" << radius_ << ")";
  }
  return os.str();
}

Vec sample_linf_ball(const Vec& center, double r, Rng& rng) {
  if (r < 0.0) throw RuntimeFault("sample_linf_ball: negative radius");
  Vec z(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    z[i] = (r == 0.0) ? center[i] : rng.uniform(center[i] - r, center[i] + r);
  }
  return z;
}

}  // namespace qoco
