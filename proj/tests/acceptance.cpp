// Acceptance suite: one criterion per function, one [PASS]/[FAIL] line each.
// With no arguments all ten run in order; passing numbers selects a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qoco/cgrad.hpp"
#include "qoco/config.hpp"
#include "qoco/csv.hpp"
#include "qoco/harness.hpp"
#include "qoco/qgrad.hpp"

using namespace qoco;

namespace {

constexpr double kPi = std::numbers::pi;

// --- small shared helpers ---------------------------------------------------

LossOracle random_loss(Rng& rng, int n) {
  const int pick = static_cast<int>(rng.next_u64() % 3);
  if (pick == 0) {
    Vec g(n);
    for (int j = 0; j < n; ++j) g[j] = rng.uniform(-1.0, 1.0);
    if (norm_l2(g) < 1e-6) g[0] = 0.5;
    return make_linear(std::move(g), rng.uniform(-1.0, 1.0));
  }
  if (pick == 1) {
    Vec a(n);
    for (int j = 0; j < n; ++j) a[j] = rng.uniform(-1.0, 1.0);
    const FeasibleSet box = FeasibleSet::box(Vec(n, -2.0), Vec(n, 2.0));
    return make_quadratic(rng.uniform(0.2, 2.0), std::move(a), box, 0.5);
  }
  std::vector<Vec> slopes(3, Vec(n));
  Vec offsets(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < n; ++j) slopes[i][j] = rng.uniform(-1.0, 1.0);
    offsets[i] = rng.uniform(-0.5, 0.5);
  }
  if (norm_l2(slopes[0]) < 1e-6) slopes[0][0] = 0.5;
  return make_max_affine(std::move(slopes), std::move(offsets));
}

// Oblivious quadratic experiment on a box, constants derived by the config
// layer (G analytic over the enlarged box, D from the set).
ExperimentConfig quadratic_box_config(int n, int horizon, double lo, double hi,
                                      ScheduleVariant variant, EstimatorKind estimator) {
  ExperimentConfig cfg;
  cfg.set_kind = "box";
  cfg.lower.assign(n, lo);
  cfg.upper.assign(n, hi);
  cfg.n = n;
  cfg.power = "oblivious";
  cfg.family = "quadratic";
  cfg.curvature = 1.0;
  cfg.variant = variant;
  cfg.mode = RPrimeMode::kProofConsistent;
  cfg.horizon = horizon;
  cfg.estimator = estimator;
  return cfg;
}

struct FractionStats {
  int ok = 0;
  int total = 0;
  double regret_mean = 0.0;
  double bound_mean = 0.0;
  double fraction() const { return total ? static_cast<double>(ok) / total : 0.0; }
};

FractionStats bound_fraction(const TrialsReport& report) {
  FractionStats st;
  for (const TrialOutcome& t : report.trials) {
    ++st.total;
    st.ok += t.report.bound_satisfied ? 1 : 0;
    st.regret_mean += t.report.regret;
    st.bound_mean += t.report.bound_value;
  }
  if (st.total) {
    st.regret_mean /= st.total;
    st.bound_mean /= st.total;
  }
  return st;
}

// --- criteria ----------------------------------------------------------------

// 1. Fast backend vs. gate-level circuit: fidelity >= 1 - 1e-9 over 50
//    random losses at n in {1,2}, b in {2,3}, c in {3,4}.
bool criterion1(std::string& detail) {
  Rng rng(101);
  double worst = 1.0;
  for (int it = 0; it < 50; ++it) {
    qgrad::Params prm;
    prm.n = 1 + static_cast<int>(rng.next_u64() % 2);
    prm.b = 2 + static_cast<int>(rng.next_u64() % 2);
    prm.c = 3 + static_cast<int>(rng.next_u64() % 2);
    prm.r = 0.5;
    prm.p = 0.5;
    prm.rho = 0.5;
    prm.r_prime = rng.uniform(0.05, 0.5);
    LossOracle f = random_loss(rng, prm.n);
    prm.lipschitz_g = std::max(f.lipschitz(), 1.0);
    prm.beta = prm.n * prm.lipschitz_g / (prm.p * prm.r);
    Vec z(prm.n);
    for (int j = 0; j < prm.n; ++j) z[j] = rng.uniform(-0.5, 0.5);
    const qgrad::PhaseState fast = qgrad::build_phase_state(f, z, prm);
    const qgrad::PhaseState naive = qgrad::naive_circuit_state(f, z, prm);
    worst = std::min(worst, qgrad::fidelity(fast, naive));
  }
  std::ostringstream os;
  os << "worst fidelity over 50 losses = " << worst;
  detail = os.str();
  return worst >= 1.0 - 1e-9;
}

// 2. Linear losses with on-grid slopes recovered exactly, probability 1,
//    100 seeds, n in {1,2}, b = 5.
bool criterion2(std::string& detail) {
  int failures = 0;
  for (int seed = 0; seed < 100; ++seed) {
    for (int n : {1, 2}) {
      if (!qgrad::calibrate_linear_exactness(n, 5, derive_seed(0xACC2, seed * 2 + n))) {
        ++failures;
      }
    }
  }
  detail = "failures across 100 seeds x n in {1,2}: " + std::to_string(failures);
  return failures == 0;
}

// 3. Gradient-error Monte Carlo at the general-schedule round-1 parameters:
//    n=2, quadratic losses, rho=p=0.1, 2000 trials.
bool criterion3(std::string& detail) {
  const int n = 2;
  const double rho = 0.1, p = 0.1;
  const double r = 1.0 / std::sqrt(2.0);
  const double r_prime = rho * rho * p / (8.0 * kPi * std::pow(2.0, 4.5) * (n + rho));
  const FeasibleSet box = FeasibleSet::box({-1.0, -1.0}, {1.0, 1.0});
  const double margin = r + r_prime;

  const int trials = 2000;
  int exceed = 0;
  int b_used = 0;
  for (int i = 0; i < trials; ++i) {
    Rng rng(derive_seed(0xACC3, i));
    Vec center{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    LossOracle f = make_quadratic(1.0, std::move(center), box, margin);
    Vec x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const qgrad::GradEstimate est =
        qgrad::estimate_gradient_q(f, x, r, r_prime, rho, p, rng);
    b_used = est.params.b;
    const double threshold = phase_estimation_error_bound(est.params);
    const double err = norm_l1(sub(f.exact_gradient(est.z), est.grad));
    if (err > threshold) ++exceed;
  }
  const double rate = static_cast<double>(exceed) / trials;
  const double sigma = std::sqrt(rho * (1.0 - rho) / trials);
  std::ostringstream os;
  os << "b=" << b_used << ", exceedance rate = " << rate << " vs " << rho
     << " + 3s = " << rho + 3.0 * sigma;
  detail = os.str();
  return b_used == 7 && rate <= rho + 3.0 * sigma;
}

// 4. General quantum schedule at theory-faithful parameters, n=1: T=64,
//    delta=0.2, rho=p=delta/(2T), 50 runs: regret <= certified bound in at
//    least (1-delta) - 3sigma of runs, and every passing run under the
//    conservative closed form 8(D+1)G sqrt(T).
bool criterion4(std::string& detail) {
  const int horizon = 64;
  const double delta = 0.2;
  ExperimentConfig cfg = quadratic_box_config(1, horizon, -1.0, 1.0,
                                              ScheduleVariant::kGeneralQuantum,
                                              EstimatorKind::kQuantum);
  cfg.delta = delta;
  const Experiment exp = build_experiment(cfg);

  const int runs = 50;
  const TrialsReport report = run_trials(exp, runs, 0xACC4);
  if (report.failed > 0) {
    detail = "trials failed to complete";
    return false;
  }
  const FractionStats st = bound_fraction(report);
  const double sigma = std::sqrt(delta * (1.0 - delta) / runs);
  const double required = (1.0 - delta) - 3.0 * sigma;
  const double closed_form = 8.0 * (exp.schedule.diameter + 1.0) * exp.schedule.lipschitz *
                             std::sqrt(static_cast<double>(horizon));
  int passing_over_closed_form = 0;
  for (const TrialOutcome& t : report.trials) {
    if (t.report.bound_satisfied && t.report.regret > closed_form) {
      ++passing_over_closed_form;
    }
  }
  std::ostringstream os;
  os << "bound held in " << st.ok << "/" << st.total << " (need >= " << required * runs
     << "), mean regret " << st.regret_mean << ", mean bound " << st.bound_mean
     << ", closed form " << closed_form;
  detail = os.str();
  return st.fraction() >= required && passing_over_closed_form == 0;
}

// 5. General quantum schedule at relaxed parameters, n=2 (rho=p=0.05 makes
//    the union bound vacuous; the memory guard forbids theory-faithful rho
//    at n=2): T=128, 50 runs, bound holds in >= 90%; and mean regret/sqrt(T)
//    does not increase from T=32 to T=128.
bool criterion5(std::string& detail) {
  ExperimentConfig cfg128 = quadratic_box_config(2, 128, -1.0, 1.0,
                                                 ScheduleVariant::kGeneralQuantum,
                                                 EstimatorKind::kQuantum);
  cfg128.rho = 0.05;
  cfg128.p = 0.05;
  ExperimentConfig cfg32 = cfg128;
  cfg32.horizon = 32;

  const int runs = 50;
  const TrialsReport rep128 = run_trials(build_experiment(cfg128), runs, 0xACC5);
  const TrialsReport rep32 = run_trials(build_experiment(cfg32), runs, 0xACC5);
  if (rep128.failed > 0 || rep32.failed > 0) {
    detail = "trials failed to complete";
    return false;
  }
  const FractionStats st = bound_fraction(rep128);
  const double norm128 = rep128.regret_mean / std::sqrt(128.0);
  const double norm32 = rep32.regret_mean / std::sqrt(32.0);
  std::ostringstream os;
  os << "bound held in " << st.ok << "/" << st.total << " (need >= 45); regret/sqrt(T): "
     << norm32 << " (T=32) -> " << norm128 << " (T=128)";
  detail = os.str();
  return st.fraction() >= 0.9 && norm128 <= norm32;
}

// 6. Strongly convex quantum schedule, n=1, alpha=1, completely adaptive
//    quadratic chaser: bound holds in >= 90% of 50 runs at T=256, and mean
//    regret grows at most logarithmically between T=16 and T=256.
bool criterion6(std::string& detail) {
  ExperimentConfig cfg256 = quadratic_box_config(1, 256, -1.0, 1.0,
                                                 ScheduleVariant::kStronglyConvexQuantum,
                                                 EstimatorKind::kQuantum);
  cfg256.power = "completely_adaptive";
  cfg256.chaser_offset = {0.5};
  cfg256.rho = 0.05;
  cfg256.p = 0.05;
  ExperimentConfig cfg16 = cfg256;
  cfg16.horizon = 16;

  const int runs = 50;
  const TrialsReport rep256 = run_trials(build_experiment(cfg256), runs, 0xACC6);
  const TrialsReport rep16 = run_trials(build_experiment(cfg16), runs, 0xACC6);
  if (rep256.failed > 0 || rep16.failed > 0) {
    detail = "trials failed to complete";
    return false;
  }
  const FractionStats st = bound_fraction(rep256);
  const double ratio = rep256.regret_mean / rep16.regret_mean;
  const double allowed = std::log(256.0) / std::log(16.0) * 1.5;  // = 3
  std::ostringstream os;
  os << "bound held in " << st.ok << "/" << st.total << " (need >= 45); regret growth "
     << rep16.regret_mean << " -> " << rep256.regret_mean << ", ratio " << ratio
     << " (allowed " << allowed << ")";
  detail = os.str();
  return st.fraction() >= 0.9 && ratio <= allowed && rep16.regret_mean > 0.0;
}

// 7. Classical schedule: n=8, T=1024, 50 runs: bound holds in >= 95% and
//    every run consumes exactly 2nT = 16384 queries.
bool criterion7(std::string& detail) {
  ExperimentConfig cfg = quadratic_box_config(8, 1024, 0.0, 1.0,
                                              ScheduleVariant::kGeneralClassical,
                                              EstimatorKind::kClassical);
  cfg.delta = 0.2;
  const Experiment exp = build_experiment(cfg);
  const int runs = 50;
  const TrialsReport report = run_trials(exp, runs, 0xACC7);
  if (report.failed > 0) {
    detail = "trials failed to complete";
    return false;
  }
  const FractionStats st = bound_fraction(report);
  bool queries_exact = true;
  for (const TrialOutcome& t : report.trials) {
    queries_exact = queries_exact && t.total_queries == 16384ull;
  }
  std::ostringstream os;
  os << "bound held in " << st.ok << "/" << st.total
     << " (need >= 48); queries exactly 16384 in every run: "
     << (queries_exact ? "yes" : "no");
  detail = os.str();
  return st.fraction() >= 0.95 && queries_exact;
}

// 8. Query accounting: 4T for quantum runs, 2nT for classical, exactly,
//    every trial.
bool criterion8(std::string& detail) {
  ExperimentConfig qcfg = quadratic_box_config(1, 16, -1.0, 1.0,
                                               ScheduleVariant::kGeneralQuantum,
                                               EstimatorKind::kQuantum);
  qcfg.rho = 0.1;
  qcfg.p = 0.1;
  const TrialsReport qrep = run_trials(build_experiment(qcfg), 10, 0xACC8);

  ExperimentConfig ccfg = quadratic_box_config(3, 32, 0.0, 1.0,
                                               ScheduleVariant::kGeneralClassical,
                                               EstimatorKind::kClassical);
  ccfg.delta = 0.2;
  const TrialsReport crep = run_trials(build_experiment(ccfg), 10, 0xACC8);

  bool ok = qrep.failed == 0 && crep.failed == 0;
  for (const TrialOutcome& t : qrep.trials) ok = ok && t.total_queries == 4ull * 16;
  for (const TrialOutcome& t : crep.trials) ok = ok && t.total_queries == 2ull * 3 * 32;
  detail = "quantum 4T=64 and classical 2nT=192 in every trial: " +
           std::string(ok ? "yes" : "no");
  return ok;
}

// 9. Register widths match the closed forms within one bit of rounding for
//    20 random literal-schedule tuples.
bool criterion9(std::string& detail) {
  Rng rng(0xACC9);
  int checked = 0;
  double worst_b = 0.0, worst_c = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    const double rho = rng.uniform(0.02, 0.9);
    const double p = rng.uniform(0.05, 0.9);
    const double g = rng.uniform(0.5, 4.0);
    const double t = 1.0 + static_cast<double>(rng.next_u64() % 50);
    const double r = 1.0 / std::sqrt(t * n);
    const double r_prime =
        rho * rho * p / (8.0 * kPi * std::sqrt(t * std::pow(n, 9.0)) * (n + rho));
    const qgrad::Params prm = qgrad::derive_params(n, g, rho, p, r, r_prime, 1ull << 62);
    const double db = std::fabs(prm.b - qgrad::closed_form_b_bits(n, rho));
    const double dc = std::fabs(prm.c - qgrad::closed_form_c_bits(n, rho));
    worst_b = std::max(worst_b, db);
    worst_c = std::max(worst_c, dc);
    ++checked;
  }
  std::ostringstream os;
  os << checked << " tuples; worst |b - closed form| = " << worst_b
     << ", worst |c - closed form| = " << worst_c;
  detail = os.str();
  return checked == 20 && worst_b <= 1.0 && worst_c <= 1.0;
}

// 10. Invariant sweep: projection properties, transform unitarity and state
//     normalization, central-difference exactness, game determinism, CSV
//     round trip.
bool criterion10(std::string& detail) {
  std::ostringstream os;
  bool ok = true;

  {  // projection: idempotent, nonexpansive, Pythagorean
    Rng rng(1001);
    const FeasibleSet sets[] = {FeasibleSet::box({-1.0, 0.0}, {2.0, 1.5}),
                                FeasibleSet::ball({0.5, -0.5}, 1.25)};
    bool good = true;
    for (const FeasibleSet& s : sets) {
      for (int it = 0; it < 1000; ++it) {
        Vec y1{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        Vec y2{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        const Vec p1 = s.project(y1);
        good = good && s.project(p1) == p1;
        good = good && dist_l2(p1, s.project(y2)) <= dist_l2(y1, y2) + 1e-12;
        const Vec inside = s.sample_uniform(rng);
        good = good && dist_l2(p1, inside) <= dist_l2(y1, inside) + 1e-12;
      }
    }
    os << "projection=" << (good ? "ok" : "FAIL");
    ok = ok && good;
  }

  {  // unitarity + normalization
    Rng rng(1002);
    bool good = true;
    for (int it = 0; it < 5; ++it) {
      qgrad::PhaseState st;
      st.n = 2;
      st.b = 3;
      st.amp.resize(64);
      for (auto& a : st.amp) a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      const double nrm = st.l2_norm();
      for (auto& a : st.amp) a /= nrm;
      qgrad::PhaseState orig = st;
      qgrad::inverse_qft_all(st);
      good = good && std::fabs(st.l2_norm() - 1.0) < 1e-9;
      qgrad::qft_all_axes(st, +1);
      good = good && qgrad::fidelity(st, orig) >= 1.0 - 1e-9;
    }
    os << " unitarity=" << (good ? "ok" : "FAIL");
    ok = ok && good;
  }

  {  // central-difference exactness on quadratics
    const FeasibleSet box = FeasibleSet::box({-1.0, -1.0}, {1.0, 1.0});
    Rng rng(1003);
    bool good = true;
    for (int it = 0; it < 100; ++it) {
      LossOracle f = make_quadratic(rng.uniform(0.2, 3.0),
                                    {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}, box,
                                    1.0);
      const cgrad::GradEstimate est = cgrad::estimate_gradient_c(
          f, {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)}, 0.3, 0.05, rng);
      const double err = norm_linf(sub(f.exact_gradient(est.z), est.grad));
      good = good && err <= 1e-10 && est.queries == 4;
    }
    os << " central_difference=" << (good ? "ok" : "FAIL");
    ok = ok && good;
  }

  {  // determinism + CSV round trip on a real game
    ExperimentConfig cfg = quadratic_box_config(2, 8, -1.0, 1.0,
                                                ScheduleVariant::kGeneralQuantum,
                                                EstimatorKind::kQuantum);
    cfg.rho = 0.1;
    cfg.p = 0.1;
    const Experiment exp = build_experiment(cfg);
    Adversary a1 = exp.adversary_factory(42);
    Adversary a2 = exp.adversary_factory(42);
    const GameResult g1 = run_game(exp.set, a1, exp.schedule, exp.estimator, 7);
    const GameResult g2 = run_game(exp.set, a2, exp.schedule, exp.estimator, 7);
    bool good = rounds_equal(g1.transcript, g2.transcript);
    const Transcript parsed = transcript_from_csv(transcript_to_csv(g1.transcript));
    good = good && rounds_equal(parsed, g1.transcript);
    os << " determinism_csv=" << (good ? "ok" : "FAIL");
    ok = ok && good;
  }

  detail = os.str();
  return ok;
}

struct Criterion {
  int id;
  const char* label;
  std::function<bool(std::string&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "backend equivalence (gate-level oracle)", criterion1},
      {2, "calibration exactness on grid slopes", criterion2},
      {3, "gradient-error Monte Carlo, n=2", criterion3},
      {4, "general quantum schedule, theory-faithful, n=1", criterion4},
      {5, "general quantum schedule, relaxed, n=2", criterion5},
      {6, "strongly convex schedule vs. chaser", criterion6},
      {7, "classical schedule, n=8", criterion7},
      {8, "query accounting 4T / 2nT", criterion8},
      {9, "register-width closed forms", criterion9},
      {10, "invariant sweep", criterion10},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] C%d %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id, c.label,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
