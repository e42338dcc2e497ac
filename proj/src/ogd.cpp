#include "qoco/ogd.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qoco/cgrad.hpp"
#include "qoco/errors.hpp"

namespace qoco {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(ScheduleVariant v) {
  switch (v) {
    case ScheduleVariant::kGeneralQuantum: return "general_quantum";
    case ScheduleVariant::kStronglyConvexQuantum: return "strongly_convex_quantum";
    case ScheduleVariant::kGeneralClassical: return "general_classical";
  }
  return "?";
}

std::string to_string(RPrimeMode m) {
  return m == RPrimeMode::kPaperLiteral ? "paper_literal" : "proof_consistent";
}

void Schedule::validate() const {
  if (n < 1) throw RuntimeFault("Schedule: n must be >= 1");
  if (horizon < 1) throw RuntimeFault("Schedule: T must be >= 1");
  if (!(diameter > 0.0) || !(lipschitz > 0.0)) {
    throw RuntimeFault("Schedule: D and G must be positive");
  }
  switch (variant) {
    case ScheduleVariant::kGeneralQuantum:
    case ScheduleVariant::kStronglyConvexQuantum:
      if (!(rho > 0.0) || rho > 1.0 || !(p > 0.0) || p > 1.0) {
        throw RuntimeFault("Schedule: rho and p must lie in (0, 1]");
      }
      if (std::fabs(delta - horizon * (p + rho)) > 1e-9 * std::max(1.0, delta)) {
        throw RuntimeFault("Schedule: delta must equal T*(p+rho) for quantum variants");
      }
      if (variant == ScheduleVariant::kStronglyConvexQuantum && !(alpha > 0.0)) {
        throw RuntimeFault("Schedule: strongly convex variant needs alpha > 0");
      }
      break;
    case ScheduleVariant::kGeneralClassical:
      if (!(delta > 0.0)) throw RuntimeFault("Schedule: classical variant needs delta > 0");
      break;
  }
}

RoundParams Schedule::at(int t) const {
  if (t < 1 || t > horizon) {
    throw RuntimeFault("Schedule::at: round " + std::to_string(t) + " out of range [1, " +
                       std::to_string(horizon) + "]");
  }
  const double td = static_cast<double>(t);
  const double nd = static_cast<double>(n);
  // The proof-consistent reading replaces the literal sqrt(t) decay of r'_t
  // by t (and scales the strongly convex r'_t by G/(D*t)) so the per-round
  // gradient-error term decays the way the summation steps require.
  const double t_decay = (mode == RPrimeMode::kPaperLiteral) ? std::sqrt(td) : td;
  RoundParams rp;
  switch (variant) {
    case ScheduleVariant::kGeneralQuantum: {
      rp.eta = diameter / (lipschitz * std::sqrt(td));
      rp.r = 1.0 / std::sqrt(td * nd);
      rp.r_prime = rho * rho * p / (8.0 * kPi * t_decay * std::pow(nd, 4.5) * (nd + rho));
      break;
    }
    case ScheduleVariant::kStronglyConvexQuantum: {
      const double mix = 2.0 * lipschitz * std::sqrt(nd) + alpha * nd * diameter;
      rp.eta = 1.0 / (alpha * td);
      rp.r = lipschitz * lipschitz / (td * mix);
      rp.r_prime = lipschitz * lipschitz * rho * rho * p /
                   (8.0 * kPi * td * std::pow(nd, 4.0) * (nd + rho) * mix);
      if (mode == RPrimeMode::kProofConsistent) {
        rp.r_prime *= lipschitz / (diameter * td);
      }
      break;
    }
    case ScheduleVariant::kGeneralClassical: {
      rp.eta = diameter / (lipschitz * std::sqrt(td));
      rp.r = 1.0 / std::sqrt(td * nd);
      rp.r_prime = delta / (static_cast<double>(horizon) * t_decay * std::pow(nd, 1.5));
      break;
    }
  }
  return rp;
}

std::string Schedule::describe() const {
  std::ostringstream os;
  os << to_string(variant) << "(" << to_string(mode) << ", n=" << n << ", T=" << horizon
     << ", D=" << diameter << ", G=" << lipschitz;
  if (variant == ScheduleVariant::kStronglyConvexQuantum) os << ", alpha=" << alpha;
  if (variant == ScheduleVariant::kGeneralClassical) {
    os << ", delta=" << delta;
  } else {
    os << ", rho=" << rho << ", p=" << p;
  }
  os << ")";
  return os.str();
}

Vec ogd_step(const Vec& x, const Vec& grad, double eta, const FeasibleSet& set) {
  if (x.size() != grad.size()) throw DimensionMismatch("ogd_step: dimension mismatch");
  return set.project(axpy(x, -eta, grad));
}

GameResult run_game(const FeasibleSet& set, Adversary& adversary, const Schedule& schedule,
                    EstimatorKind estimator, std::uint64_t seed,
                    std::uint64_t memory_guard) {
  schedule.validate();
  if (set.dim() != schedule.n) throw DimensionMismatch("run_game: set/schedule dimension");
  if (adversary.horizon() < schedule.horizon) {
    throw RuntimeFault("run_game: adversary horizon shorter than schedule");
  }
  if (std::fabs(set.diameter() - schedule.diameter) > 1e-9 * std::max(1.0, set.diameter())) {
    throw RuntimeFault("run_game: schedule D inconsistent with the feasible set");
  }

  Rng rng(seed);
  GameResult result;
  Transcript& tr = result.transcript;
  tr.n = schedule.n;
  tr.seed = seed;
  tr.schedule_desc = schedule.describe();
  tr.adversary_desc = adversary.describe();
  tr.rounds.reserve(schedule.horizon);
  result.losses.reserve(schedule.horizon);

  Vec x = set.sample_uniform(rng);
  for (int t = 1; t <= schedule.horizon; ++t) {
    LossOracle& f = adversary.next(t, x);
    if (f.lipschitz() > schedule.lipschitz * (1.0 + 1e-9)) {
      throw RuntimeFault("run_game: round " + std::to_string(t) +
                         " loss exceeds the schedule's Lipschitz constant");
    }
    if (schedule.variant == ScheduleVariant::kStronglyConvexQuantum &&
        f.strong_convexity() + 1e-12 < schedule.alpha) {
      throw RuntimeFault("run_game: round " + std::to_string(t) +
                         " loss is not alpha-strongly convex for the schedule's alpha");
    }

    const RoundParams rp = schedule.at(t);
    RoundRecord rec;
    rec.t = t;
    rec.x = x;
    rec.eta = rp.eta;
    rec.r = rp.r;
    rec.r_prime = rp.r_prime;
    rec.loss_value = f.eval_uncounted(x);

    try {
      if (estimator == EstimatorKind::kQuantum) {
        qgrad::GradEstimate est = qgrad::estimate_gradient_q(f, x, rp.r, rp.r_prime,
                                                             schedule.rho, schedule.p, rng,
                                                             memory_guard);
        rec.z = std::move(est.z);
        rec.grad = std::move(est.grad);
        rec.queries = est.queries;
        rec.sim_evals = est.sim_evals;
      } else {
        cgrad::GradEstimate est = cgrad::estimate_gradient_c(f, x, rp.r, rp.r_prime, rng);
        rec.z = std::move(est.z);
        rec.grad = std::move(est.grad);
        rec.queries = est.queries;
        rec.sim_evals = static_cast<std::uint64_t>(est.queries);
      }
    } catch (RuntimeFault& e) {
      throw RuntimeFault("round " + std::to_string(t) + ": " + e.what());
    }

    tr.total_queries += static_cast<std::uint64_t>(rec.queries);
    tr.total_sim_evals += rec.sim_evals;
    x = ogd_step(x, rec.grad, rp.eta, set);

    LossOracle copy = f;
    copy.reset_queries();
    result.losses.push_back(std::move(copy));
    tr.rounds.push_back(std::move(rec));
  }
  return result;
}

}  // namespace qoco
