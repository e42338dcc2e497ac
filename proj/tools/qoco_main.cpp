#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qoco/cgrad.hpp"
#include "qoco/config.hpp"
#include "qoco/csv.hpp"
#include "qoco/errors.hpp"
#include "qoco/harness.hpp"
#include "qoco/qgrad.hpp"

namespace {

using namespace qoco;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitCalibration = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> memory_guard;
};

ExperimentConfig load_with_overrides(const CommonOpts& opts) {
  ExperimentConfig cfg = load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.memory_guard) cfg.memory_guard = *opts.memory_guard;
  if (opts.mode) {
    if (*opts.mode == "paper_literal") {
      cfg.mode = RPrimeMode::kPaperLiteral;
    } else if (*opts.mode == "proof_consistent") {
      cfg.mode = RPrimeMode::kProofConsistent;
    } else {
      throw ConfigError("--mode must be paper_literal or proof_consistent");
    }
  }
  return cfg;
}

void print_kv(const char* key, double v) { std::printf("%s=%.17g\n", key, v); }
void print_kv(const char* key, std::uint64_t v) { std::printf("%s=%llu\n", key, (unsigned long long)v); }

int cmd_run(const CommonOpts& opts) {
  const ExperimentConfig cfg = load_with_overrides(opts);
  const Experiment exp = build_experiment(cfg);
  const std::uint64_t game_seed = trial_seed(cfg.seed, 0);
  Adversary adversary = exp.adversary_factory(derive_seed(game_seed, 0x616476ull));
  const GameResult game =
      run_game(exp.set, adversary, exp.schedule, exp.estimator, game_seed, exp.memory_guard);
  const RegretReport report = evaluate_game(game, exp.set, exp.schedule);

  write_file_atomic(opts.out_dir + "/transcript.csv", transcript_to_csv(game.transcript));

  std::printf("schedule=%s\n", exp.schedule.describe().c_str());
  std::printf("adversary=%s\n", game.transcript.adversary_desc.c_str());
  std::printf("estimator=%s\n",
              exp.estimator == EstimatorKind::kQuantum ? "quantum" : "classical");
  print_kv("seed", game_seed);
  print_kv("rounds", static_cast<std::uint64_t>(game.transcript.rounds.size()));
  print_kv("regret", report.regret);
  print_kv("certified_bound", report.bound_value);
  std::printf("bound_satisfied=%d\n", report.bound_satisfied ? 1 : 0);
  print_kv("threshold_exceedances", static_cast<std::uint64_t>(report.threshold_exceedances));
  print_kv("total_queries", game.transcript.total_queries);
  print_kv("total_sim_evals", game.transcript.total_sim_evals);
  std::printf("transcript=%s\n", (opts.out_dir + "/transcript.csv").c_str());
  return kExitOk;
}

int cmd_trials(const CommonOpts& opts, int num_override) {
  const ExperimentConfig cfg = load_with_overrides(opts);
  const Experiment exp = build_experiment(cfg);
  const int num = num_override > 0 ? num_override : cfg.trials;
  const TrialsReport report = run_trials(exp, num, cfg.seed, opts.out_dir);
  std::fputs(report.summary_text.c_str(), stdout);
  if (report.failed > 0) {
    std::fprintf(stderr, "%d of %d trials failed\n", report.failed, num);
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_gradcheck(const CommonOpts& opts, int trials, int round) {
  const ExperimentConfig cfg = load_with_overrides(opts);
  const Experiment exp = build_experiment(cfg);
  const RoundParams rp = exp.schedule.at(round);
  const double threshold = round_error_bound(exp.schedule, round);

  std::string csv = "trial,err_l1,threshold\n";
  int exceed = 0;
  double max_err = 0.0;
  double sum_err = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t seed = trial_seed(cfg.seed, i);
    Rng rng(seed);
    Adversary adversary = exp.adversary_factory(derive_seed(seed, 0x616476ull));
    Vec x = exp.set.sample_uniform(rng);
    LossOracle& f = adversary.next(1, x);
    Vec z, grad;
    if (exp.estimator == EstimatorKind::kQuantum) {
      qgrad::GradEstimate est = qgrad::estimate_gradient_q(
          f, x, rp.r, rp.r_prime, exp.schedule.rho, exp.schedule.p, rng, exp.memory_guard);
      z = std::move(est.z);
      grad = std::move(est.grad);
    } else {
      cgrad::GradEstimate est = cgrad::estimate_gradient_c(f, x, rp.r, rp.r_prime, rng);
      z = std::move(est.z);
      grad = std::move(est.grad);
    }
    const double err = norm_l1(sub(f.exact_gradient(z), grad));
    sum_err += err;
    max_err = std::max(max_err, err);
    if (err > threshold * (1.0 + 1e-12)) ++exceed;
    char line[96];
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", i, err, threshold);
    csv += line;
  }
  write_file_atomic(opts.out_dir + "/gradcheck.csv", csv);

  print_kv("round", static_cast<std::uint64_t>(round));
  print_kv("trials", static_cast<std::uint64_t>(trials));
  print_kv("threshold", threshold);
  print_kv("err_mean", trials > 0 ? sum_err / trials : 0.0);
  print_kv("err_max", max_err);
  print_kv("exceedances", static_cast<std::uint64_t>(exceed));
  print_kv("exceedance_rate", trials > 0 ? static_cast<double>(exceed) / trials : 0.0);
  std::printf("gradcheck=%s\n", (opts.out_dir + "/gradcheck.csv").c_str());
  return kExitOk;
}

int cmd_calibrate(bool invert_sign) {
  std::printf("transform_sign=%d\n", qgrad::kTransformSign);
  std::printf("zero_outcome=%u\n", qgrad::kZeroOutcome);
  std::printf("window=signed_centered\n");
  bool all_ok = true;
  for (int b : {2, 3, 4}) {
    const bool ok = qgrad::calibrate_linear_exactness(1, b, 0xCA11B, invert_sign);
    std::printf("b=%d exact_recovery=%d\n", b, ok ? 1 : 0);
    all_ok = all_ok && ok;
  }
  std::printf("calibration=%s\n", all_ok ? "ok" : "failed");
  if (!all_ok) {
    std::fprintf(stderr, "calibration failed: on-grid linear slopes were not recovered exactly\n");
    return kExitCalibration;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroth-order online convex optimization lab"};
  app.require_subcommand(1);

  CommonOpts opts;
  int trials_num = 0;
  int gradcheck_trials = 200;
  int gradcheck_round = 1;
  bool invert_sign = false;

  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("config", opts.config_path, "experiment config (JSON)")->required();
    }
    sub->add_option("--out-dir", opts.out_dir, "output directory");
    sub->add_option("--seed", opts.seed, "seed override");
    sub->add_option("--mode", opts.mode, "r' schedule mode: paper_literal|proof_consistent");
    sub->add_option("--memory-guard", opts.memory_guard, "max statevector amplitudes");
  };

  CLI::App* run = app.add_subcommand("run", "play one seeded game, write transcript + summary");
  add_common(run, true);

  CLI::App* trials = app.add_subcommand("trials", "run independent seeded games and aggregate");
  add_common(trials, true);
  trials->add_option("--num", trials_num, "number of trials (default: runtime.trials)");

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "empirical gradient-error distribution vs. threshold");
  add_common(gradcheck, true);
  gradcheck->add_option("--trials", gradcheck_trials, "number of estimates");
  gradcheck->add_option("--round", gradcheck_round, "schedule round for the parameters");

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "verify the transform-sign/decode-window convention");
  calibrate->add_flag("--invert-transform-sign", invert_sign,
                      "test hook: run with the flipped transform sign");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(opts);
    if (trials->parsed()) return cmd_trials(opts, trials_num);
    if (gradcheck->parsed()) return cmd_gradcheck(opts, gradcheck_trials, gradcheck_round);
    if (calibrate->parsed()) return cmd_calibrate(invert_sign);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const RuntimeFault& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}
