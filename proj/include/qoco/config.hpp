#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qoco/harness.hpp"

namespace qoco {

// Parsed experiment configuration (JSON file; schema documented in the
// README). build_experiment wires it into a runnable Experiment, deriving D
// from the set and G/alpha analytically from the loss family.
struct ExperimentConfig {
  // geometry
  std::string set_kind;  // "box" | "ball"
  Vec lower, upper;      // box
  Vec center;            // ball
  double radius = 0.0;   // ball
  int n = 0;

  // adversary
  std::string power;   // "oblivious" | "adaptive" | "completely_adaptive"
  std::string family;  // "linear" | "quadratic" | "max_affine"
  double curvature = 1.0;
  Vec chaser_offset;                // completely_adaptive quadratic
  std::optional<Vec> fixed_slope;   // linear
  double slope_scale = 1.0;         // linear / max_affine draws
  bool alternating = false;         // adaptive linear sign flip
  int pieces = 3;                   // max_affine

  // schedule
  ScheduleVariant variant = ScheduleVariant::kGeneralQuantum;
  RPrimeMode mode = RPrimeMode::kProofConsistent;
  int horizon = 0;
  std::optional<double> rho, p, delta;
  std::optional<double> lipschitz_override, diameter_override, alpha_override;

  // estimator
  EstimatorKind estimator = EstimatorKind::kQuantum;

  // runtime
  std::uint64_t seed = 1;
  int trials = 1;
  std::uint64_t memory_guard = qgrad::kDefaultMemoryGuard;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

Experiment build_experiment(const ExperimentConfig& config);

// One loss instance of a named family, drawing any randomized parameters
// from rng. `domain` plus linf_margin bound the region the analytic G must
// cover.
LossOracle make_family(const std::string& kind, const ExperimentConfig& config,
                       const FeasibleSet& domain, double linf_margin, Rng& rng);

}  // namespace qoco
