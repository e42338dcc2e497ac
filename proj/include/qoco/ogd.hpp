#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qoco/geometry.hpp"
#include "qoco/losses.hpp"
#include "qoco/qgrad.hpp"

namespace qoco {

enum class ScheduleVariant {
  kGeneralQuantum,         // eta = D/(G sqrt(t)), sqrt(T) regret target
  kStronglyConvexQuantum,  // eta = 1/(alpha t), log(T) regret target
  kGeneralClassical,       // finite differences, 2n queries per round
};

// The literal r'_t formulas carry sqrt(t) where the summation steps of the
// corresponding regret chains need t: substituting them makes the per-round
// gradient-error term a constant instead of a decaying one. Both readings
// are shipped. kProofConsistent (the default) replaces sqrt(t) by t so that
// the chain really sums to the advertised rate; kPaperLiteral keeps the
// literal formulas.
enum class RPrimeMode { kPaperLiteral, kProofConsistent };

std::string to_string(ScheduleVariant v);
std::string to_string(RPrimeMode m);

struct RoundParams {
  double eta = 0.0;
  double r = 0.0;
  double r_prime = 0.0;
};

// Step-size and radius schedules of the three analyses, with the constants
// they need. For the quantum variants delta = T*(p+rho).
struct Schedule {
  ScheduleVariant variant = ScheduleVariant::kGeneralQuantum;
  RPrimeMode mode = RPrimeMode::kProofConsistent;
  int n = 0;
  int horizon = 0;     // T
  double diameter = 0.0;   // D (Euclidean)
  double lipschitz = 0.0;  // G
  double alpha = 0.0;      // strongly convex variant only
  double rho = 0.0;        // quantum variants
  double p = 0.0;          // quantum variants
  double delta = 0.0;      // failure budget over the whole game

  RoundParams at(int t) const;  // 1-based; throws on t out of [1, T]
  void validate() const;
  std::string describe() const;
};

enum class EstimatorKind { kQuantum, kClassical };

// x - eta*grad, projected back onto the set.
Vec ogd_step(const Vec& x, const Vec& grad, double eta, const FeasibleSet& set);

struct RoundRecord {
  int t = 0;
  Vec x;
  Vec z;
  double loss_value = 0.0;  // f_t(x_t), bookkeeping channel
  Vec grad;
  double eta = 0.0;
  double r = 0.0;
  double r_prime = 0.0;
  int queries = 0;              // oracle-model query count (4 or 2n)
  std::uint64_t sim_evals = 0;  // quantum runs: classical simulation cost
};

struct Transcript {
  int n = 0;
  std::uint64_t seed = 0;
  std::string schedule_desc;
  std::string adversary_desc;
  std::vector<RoundRecord> rounds;
  std::uint64_t total_queries = 0;
  std::uint64_t total_sim_evals = 0;
};

// A finished game plus the round losses, re-materialized copies with reset
// counters, for regret evaluation after the fact.
struct GameResult {
  Transcript transcript;
  std::vector<LossOracle> losses;
};

// The full T-round game: x_1 uniform over the set, then play/estimate/step.
// Deterministic given (inputs, seed). The f_t(x_t) bookkeeping evaluation is
// not charged to the query budget.
GameResult run_game(const FeasibleSet& set, Adversary& adversary, const Schedule& schedule,
                    EstimatorKind estimator, std::uint64_t seed,
                    std::uint64_t memory_guard = qgrad::kDefaultMemoryGuard);

}  // namespace qoco
