#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qoco/geometry.hpp"
#include "qoco/losses.hpp"
#include "qoco/ogd.hpp"
#include "qoco/qgrad.hpp"

namespace qoco {

struct ComparatorResult {
  Vec x;
  double objective = 0.0;
  bool converged = false;
  double mapping_norm = 0.0;
};

// Best fixed point in hindsight: multi-start projected gradient descent on
// the summed objective (exact gradients, verification channel), run until
// the projected-gradient-mapping norm falls below 1e-8. Non-convergence is
// reported through the flag with the best iterate kept.
ComparatorResult solve_comparator(const std::vector<LossOracle>& losses,
                                  const FeasibleSet& set);

// Sum_t f_t(x_t) - Sum_t f_t(comparator). Uses the transcript's recorded
// loss values; may be negative for a poor comparator guess.
double regret(const Transcript& transcript, const std::vector<LossOracle>& losses,
              const Vec& comparator);

// Gradient-error threshold of the phase-estimation analysis:
// 8*pi*n^3*(n/rho + 1)*beta*r'/rho.
double phase_estimation_error_bound(const qgrad::Params& prm);

// The same threshold evaluated from a round's schedule values, with the
// exact (pre-rounding) beta = n*G/(p*r_t).
double quantum_error_bound_at(const Schedule& schedule, int t);

// Classical per-round threshold: the finite-difference expectation bound
// amplified by Markov at level delta/T, i.e. T*n*G*r'_t/(2*delta*r_t).
double classical_error_bound_at(const Schedule& schedule, int t);

// Dispatches on the schedule variant.
double round_error_bound(const Schedule& schedule, int t);

// Numeric value of the regret proof chain evaluated with the actual
// per-round eta_t, r_t, r'_t of the transcript: telescoped distance term,
// gradient-norm term sum eta_t*(L1_t+G)^2/2, per-round error terms, and the
// strong-convexity credit where the variant has one. Valid as a regret
// upper bound whenever every round's gradient-error event held.
double certified_bound(const Transcript& transcript, const Schedule& schedule);

struct RegretReport {
  double regret = 0.0;
  Vec comparator;
  double comparator_objective = 0.0;
  bool comparator_converged = false;
  double bound_value = 0.0;
  bool bound_satisfied = false;
  // Rounds where ||grad f(z_t) - grad_t||_1 exceeded the round's threshold
  // (diagnostic; uses the test-only exact gradients).
  int threshold_exceedances = 0;
};

RegretReport evaluate_game(const GameResult& game, const FeasibleSet& set,
                           const Schedule& schedule);

// A fully wired experiment: the adversary factory must yield an independent,
// deterministically seeded adversary per trial.
struct Experiment {
  FeasibleSet set = FeasibleSet::box({0.0}, {1.0});
  Schedule schedule;
  EstimatorKind estimator = EstimatorKind::kQuantum;
  std::function<Adversary(std::uint64_t)> adversary_factory;
  std::uint64_t memory_guard = qgrad::kDefaultMemoryGuard;
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  RegretReport report;
  std::uint64_t total_queries = 0;
  std::uint64_t total_sim_evals = 0;
};

struct TrialsReport {
  std::vector<TrialOutcome> trials;
  int completed = 0;
  int failed = 0;
  double success_fraction = 0.0;  // fraction with regret <= certified bound
  double regret_mean = 0.0;
  double regret_max = 0.0;
  double bound_mean = 0.0;
  double exceedance_rate = 0.0;  // threshold exceedances per round, pooled
  std::string summary_text;      // human-readable + key=value block
};

// Runs num_trials independent seeded games (seeds derived from seed_base),
// evaluates each, and aggregates. When out_dir is given, per-trial
// transcripts land there as trial_<index>.csv along with summary.txt.
TrialsReport run_trials(const Experiment& experiment, int num_trials,
                        std::uint64_t seed_base,
                        const std::optional<std::string>& out_dir = std::nullopt);

// Seed of trial i under seed_base.
std::uint64_t trial_seed(std::uint64_t seed_base, int trial_index);

}  // namespace qoco
