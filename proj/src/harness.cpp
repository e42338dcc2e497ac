#include "qoco/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qoco/csv.hpp"
#include "qoco/errors.hpp"

namespace qoco {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMappingTol = 1e-8;

double total_objective(const std::vector<LossOracle>& losses, const Vec& x) {
  double s = 0.0;
  for (const LossOracle& f : losses) s += f.eval_uncounted(x);
  return s;
}

Vec total_gradient(const std::vector<LossOracle>& losses, const Vec& x) {
  Vec g(x.size(), 0.0);
  for (const LossOracle& f : losses) {
    const Vec gf = f.exact_gradient(x);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += gf[j];
  }
  return g;
}

// One projected-gradient run with proximal backtracking. Sufficient
// decrease: F(x+) <= F(x) + <g, x+ - x> + ||x+ - x||^2/(2s).
ComparatorResult pgd_from(const std::vector<LossOracle>& losses, const FeasibleSet& set,
                          Vec x) {
  ComparatorResult res;
  double step = 1.0;
  double fx = total_objective(losses, x);
  Vec best_x = x;
  double best_f = fx;
  double mapping = 0.0;
  const int max_iters = 20000;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Vec g = total_gradient(losses, x);
    mapping = dist_l2(x, set.project(axpy(x, -1.0, g)));
    if (mapping <= kMappingTol) {
      res.converged = true;
      break;
    }
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vec xn = set.project(axpy(x, -step, g));
      const Vec d = sub(xn, x);
      const double fn = total_objective(losses, xn);
      if (fn <= fx + dot(g, d) + dot(d, d) / (2.0 * step) + 1e-15 * std::fabs(fx)) {
        x = xn;
        fx = fn;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
    if (!moved) break;  // step underflow; keep best iterate
    step = std::min(step * 1.3, 1e6);
  }
  if (fx <= best_f) {
    best_f = fx;
    best_x = x;
  }
  res.x = std::move(best_x);
  res.objective = best_f;
  res.mapping_norm = mapping;
  return res;
}

}  // namespace

ComparatorResult solve_comparator(const std::vector<LossOracle>& losses,
                                  const FeasibleSet& set) {
  if (losses.empty()) throw RuntimeFault("solve_comparator: no losses");
  // Multi-start: a central point plus seeded random feasible starts.
  std::vector<Vec> starts;
  if (set.kind() == FeasibleSet::Kind::kBox) {
    Vec mid(set.dim());
    for (int j = 0; j < set.dim(); ++j) mid[j] = 0.5 * (set.lower()[j] + set.upper()[j]);
    starts.push_back(std::move(mid));
  } else {
    starts.push_back(set.center());
  }
  Rng rng(0x9e3779b9u);
  for (int k = 0; k < 4; ++k) starts.push_back(set.sample_uniform(rng));

  ComparatorResult best;
  bool have = false;
  for (Vec& s : starts) {
    ComparatorResult r = pgd_from(losses, set, std::move(s));
    if (!have || r.objective < best.objective ||
        (r.converged && !best.converged && r.objective <= best.objective + 1e-12)) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

double regret(const Transcript& transcript, const std::vector<LossOracle>& losses,
              const Vec& comparator) {
  if (losses.size() != transcript.rounds.size()) {
    throw RuntimeFault("regret: transcript/losses length mismatch");
  }
  double played = 0.0;
  double fixed = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    played += transcript.rounds[i].loss_value;
    fixed += losses[i].eval_uncounted(comparator);
  }
  return played - fixed;
}

double phase_estimation_error_bound(const qgrad::Params& prm) {
  const double n = static_cast<double>(prm.n);
  return 8.0 * kPi * n * n * n * (n / prm.rho + 1.0) * prm.beta * prm.r_prime / prm.rho;
}

double quantum_error_bound_at(const Schedule& schedule, int t) {
  if (schedule.variant == ScheduleVariant::kGeneralClassical) {
    throw RuntimeFault("quantum_error_bound_at: quantum variants only");
  }
  const RoundParams rp = schedule.at(t);
  const double n = static_cast<double>(schedule.n);
  const double beta = n * schedule.lipschitz / (schedule.p * rp.r);
  return 8.0 * kPi * n * n * n * (n / schedule.rho + 1.0) * beta * rp.r_prime / schedule.rho;
}

double classical_error_bound_at(const Schedule& schedule, int t) {
  if (schedule.variant != ScheduleVariant::kGeneralClassical) {
    throw RuntimeFault("classical_error_bound_at: classical variant only");
  }
  const RoundParams rp = schedule.at(t);
  return static_cast<double>(schedule.horizon) * schedule.n * schedule.lipschitz *
         rp.r_prime / (2.0 * schedule.delta * rp.r);
}

double round_error_bound(const Schedule& schedule, int t) {
  return schedule.variant == ScheduleVariant::kGeneralClassical
             ? classical_error_bound_at(schedule, t)
             : quantum_error_bound_at(schedule, t);
}

double certified_bound(const Transcript& transcript, const Schedule& schedule) {
  const int T = static_cast<int>(transcript.rounds.size());
  if (T != schedule.horizon) {
    throw RuntimeFault("certified_bound: transcript length does not match the schedule");
  }
  const double D = schedule.diameter;
  const double G = schedule.lipschitz;
  const double sqrt_n = std::sqrt(static_cast<double>(schedule.n));
  const bool strongly = schedule.variant == ScheduleVariant::kStronglyConvexQuantum;

  double grad_norm_term = 0.0;
  double error_term = 0.0;
  double sampling_term = 0.0;
  double eta_last = 0.0;
  for (const RoundRecord& rec : transcript.rounds) {
    const RoundParams rp = schedule.at(rec.t);
    if (rec.eta != rp.eta || rec.r != rp.r || rec.r_prime != rp.r_prime) {
      throw RuntimeFault("certified_bound: transcript round " + std::to_string(rec.t) +
                         " was not produced under this schedule");
    }
    const double l1 = round_error_bound(schedule, rec.t);
    grad_norm_term += rp.eta * (l1 + G) * (l1 + G) / 2.0;
    error_term += D * l1;
    sampling_term += (strongly ? (2.0 * G * sqrt_n + schedule.alpha * schedule.n * D)
                               : 2.0 * G * sqrt_n) *
                     rp.r;
    eta_last = rp.eta;
  }
  // Telescoped distance term; the strongly convex chain folds in the
  // -(alpha/2)||x_t - x*||^2 credit, which empties it at eta_t = 1/(alpha t).
  double distance_term = D * D / (2.0 * eta_last);
  if (strongly) {
    distance_term = D * D / 2.0 * (1.0 / eta_last - schedule.alpha * T);
  }
  return distance_term + grad_norm_term + error_term + sampling_term;
}

RegretReport evaluate_game(const GameResult& game, const FeasibleSet& set,
                           const Schedule& schedule) {
  RegretReport report;
  const ComparatorResult comp = solve_comparator(game.losses, set);
  report.comparator = comp.x;
  report.comparator_objective = comp.objective;
  report.comparator_converged = comp.converged;
  report.regret = regret(game.transcript, game.losses, comp.x);
  report.bound_value = certified_bound(game.transcript, schedule);
  report.bound_satisfied = report.regret <= report.bound_value;
  for (std::size_t i = 0; i < game.transcript.rounds.size(); ++i) {
    const RoundRecord& rec = game.transcript.rounds[i];
    const Vec true_grad = game.losses[i].exact_gradient(rec.z);
    const double err = norm_l1(sub(true_grad, rec.grad));
    if (err > round_error_bound(schedule, rec.t) * (1.0 + 1e-12)) {
      ++report.threshold_exceedances;
    }
  }
  return report;
}

std::uint64_t trial_seed(std::uint64_t seed_base, int trial_index) {
  return derive_seed(seed_base, 0x7472ull /* 'tr' */ + static_cast<std::uint64_t>(trial_index));
}

TrialsReport run_trials(const Experiment& experiment, int num_trials,
                        std::uint64_t seed_base, const std::optional<std::string>& out_dir) {
  if (num_trials < 1) throw RuntimeFault("run_trials: need at least one trial");
  TrialsReport report;
  report.trials.reserve(num_trials);
  std::ostringstream errors;

  for (int i = 0; i < num_trials; ++i) {
    const std::uint64_t seed = trial_seed(seed_base, i);
    try {
      Adversary adversary =
          experiment.adversary_factory(derive_seed(seed, 0x616476ull /* 'adv' */));
      const GameResult game = run_game(experiment.set, adversary, experiment.schedule,
                                       experiment.estimator, seed, experiment.memory_guard);
      TrialOutcome outcome;
      outcome.seed = seed;
      outcome.report = evaluate_game(game, experiment.set, experiment.schedule);
      outcome.total_queries = game.transcript.total_queries;
      outcome.total_sim_evals = game.transcript.total_sim_evals;
      if (out_dir) {
        write_file_atomic(*out_dir + "/trial_" + std::to_string(i) + ".csv",
                          transcript_to_csv(game.transcript));
      }
      report.trials.push_back(std::move(outcome));
      ++report.completed;
    } catch (const std::exception& e) {
      ++report.failed;
      errors << "trial " << i << " (seed " << seed << ") failed: " << e.what() << "\n";
    }
  }

  int ok = 0;
  int exceed = 0;
  double regret_sum = 0.0;
  double bound_sum = 0.0;
  for (const TrialOutcome& t : report.trials) {
    ok += t.report.bound_satisfied ? 1 : 0;
    exceed += t.report.threshold_exceedances;
    regret_sum += t.report.regret;
    bound_sum += t.report.bound_value;
    report.regret_max = std::max(report.regret_max, t.report.regret);
  }
  if (report.completed > 0) {
    report.success_fraction = static_cast<double>(ok) / report.completed;
    report.regret_mean = regret_sum / report.completed;
    report.bound_mean = bound_sum / report.completed;
    report.exceedance_rate = static_cast<double>(exceed) /
                             (static_cast<double>(report.completed) *
                              std::max(1, experiment.schedule.horizon));
  }

  std::ostringstream os;
  os << "# experiment summary\n";
  os << "schedule=" << experiment.schedule.describe() << "\n";
  os << "estimator="
     << (experiment.estimator == EstimatorKind::kQuantum ? "quantum" : "classical") << "\n";
  os << "trials=" << num_trials << "\n";
  os << "completed=" << report.completed << "\n";
  os << "failed=" << report.failed << "\n";
  os << "seed_base=" << seed_base << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", report.success_fraction);
  os << "success_fraction=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", report.regret_mean);
  os << "regret_mean=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", report.regret_max);
  os << "regret_max=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", report.bound_mean);
  os << "bound_mean=" << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", report.exceedance_rate);
  os << "threshold_exceedance_rate=" << buf << "\n";
  os << "comparator_mapping_tolerance=1e-08\n";
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const TrialOutcome& t = report.trials[i];
    os << "trial_" << i << ": seed=" << t.seed << " regret=" << t.report.regret
       << " bound=" << t.report.bound_value << " ok=" << (t.report.bound_satisfied ? 1 : 0)
       << " exceedances=" << t.report.threshold_exceedances << " queries=" << t.total_queries
       << " sim_evals=" << t.total_sim_evals << "\n";
  }
  const std::string errs = errors.str();
  if (!errs.empty()) os << "# per-trial failures\n" << errs;
  report.summary_text = os.str();

  if (out_dir) write_file_atomic(*out_dir + "/summary.txt", report.summary_text);
  return report;
}

}  // namespace qoco
