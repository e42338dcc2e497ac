#include "qoco/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qoco/errors.hpp"

namespace qoco {

namespace {

using nlohmann::json;

Vec to_vec(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a nonempty array");
  Vec v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(what + " must contain numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

double get_positive(const json& j, const std::string& key, const std::string& section) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ConfigError(section + "." + key + " missing or not a number");
  }
  const double v = j[key].get<double>();
  if (!(v > 0.0)) throw ConfigError(section + "." + key + " must be positive");
  return v;
}

FeasibleSet build_set(const ExperimentConfig& cfg) {
  if (cfg.set_kind == "box") return FeasibleSet::box(cfg.lower, cfg.upper);
  return FeasibleSet::ball(cfg.center, cfg.radius);
}

// Largest Euclidean distance between a point of the set enlarged by
// linf_margin and a point of the set itself (exact for boxes, an upper
// bound for balls). The quadratic families' G lives on this.
double max_pair_distance(const FeasibleSet& set, double linf_margin, const Vec& shift) {
  const double sn = std::sqrt(static_cast<double>(set.dim()));
  if (set.kind() == FeasibleSet::Kind::kBox) {
    double acc = 0.0;
    for (int j = 0; j < set.dim(); ++j) {
      const double w = set.upper()[j] - set.lower()[j];
      const double d = w + linf_margin + std::fabs(shift.empty() ? 0.0 : shift[j]);
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  return 2.0 * set.radius() + linf_margin * sn + (shift.empty() ? 0.0 : norm_l2(shift));
}

double family_lipschitz(const ExperimentConfig& cfg, const FeasibleSet& set,
                        double linf_margin) {
  const double sn = std::sqrt(static_cast<double>(cfg.n));
  if (cfg.family == "linear") {
    return cfg.fixed_slope ? norm_l2(*cfg.fixed_slope) : cfg.slope_scale * sn;
  }
  if (cfg.family == "max_affine") return cfg.slope_scale * sn;
  // quadratic
  const Vec shift = (cfg.power == "completely_adaptive") ? cfg.chaser_offset : Vec{};
  return cfg.curvature * max_pair_distance(set, linf_margin, shift);
}

double family_alpha(const ExperimentConfig& cfg) {
  return cfg.family == "quadratic" ? cfg.curvature : 0.0;
}

LossOracle stamp(LossOracle oracle, double game_g, const FeasibleSet& set,
                 double linf_margin) {
  if (oracle.lipschitz() > game_g * (1.0 + 1e-9)) {
    throw ConfigError("family instance exceeds the derived game Lipschitz constant");
  }
  oracle.override_lipschitz(game_g);
  Vec lo, hi;
  set.bounding_box(linf_margin, lo, hi);
  oracle.set_domain_box(std::move(lo), std::move(hi));
  return oracle;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  for (const char* section : {"geometry", "adversary", "schedule", "estimator", "runtime"}) {
    if (!root.contains(section)) throw ConfigError(std::string("missing section ") + section);
  }

  ExperimentConfig cfg;
  const json& geo = root["geometry"];
  cfg.set_kind = geo.value("kind", "");
  if (cfg.set_kind == "box") {
    cfg.lower = to_vec(geo.at("lower"), "geometry.lower");
    cfg.upper = to_vec(geo.at("upper"), "geometry.upper");
    if (cfg.lower.size() != cfg.upper.size()) {
      throw ConfigError("geometry: lower/upper lengths differ");
    }
    cfg.n = static_cast<int>(cfg.lower.size());
  } else if (cfg.set_kind == "ball") {
    cfg.center = to_vec(geo.at("center"), "geometry.center");
    cfg.radius = get_positive(geo, "radius", "geometry");
    cfg.n = static_cast<int>(cfg.center.size());
  } else {
    throw ConfigError("geometry.kind must be 'box' or 'ball'");
  }
  if (geo.contains("n") && geo["n"].get<int>() != cfg.n) {
    throw ConfigError("geometry.n inconsistent with the bound vectors");
  }

  const json& adv = root["adversary"];
  cfg.power = adv.value("power", "");
  if (cfg.power != "oblivious" && cfg.power != "adaptive" &&
      cfg.power != "completely_adaptive") {
    throw ConfigError("adversary.power must be oblivious|adaptive|completely_adaptive");
  }
  cfg.family = adv.value("family", "");
  if (cfg.family != "linear" && cfg.family != "quadratic" && cfg.family != "max_affine") {
    throw ConfigError("adversary.family must be linear|quadratic|max_affine");
  }
  const json params = adv.value("params", json::object());
  if (cfg.family == "quadratic") {
    cfg.curvature = params.contains("curvature") ? get_positive(params, "curvature", "params")
                                                 : 1.0;
    if (cfg.power == "completely_adaptive") {
      if (!params.contains("chaser_offset")) {
        throw ConfigError("completely_adaptive quadratic needs params.chaser_offset");
      }
      cfg.chaser_offset = to_vec(params["chaser_offset"], "params.chaser_offset");
      if (static_cast<int>(cfg.chaser_offset.size()) != cfg.n) {
        throw ConfigError("params.chaser_offset has the wrong dimension");
      }
    }
  } else {
    if (cfg.power == "completely_adaptive") {
      throw ConfigError("completely_adaptive play is implemented for the quadratic family");
    }
    if (params.contains("slope")) {
      cfg.fixed_slope = to_vec(params["slope"], "params.slope");
      if (static_cast<int>(cfg.fixed_slope->size()) != cfg.n) {
        throw ConfigError("params.slope has the wrong dimension");
      }
    }
    if (params.contains("slope_scale")) {
      cfg.slope_scale = get_positive(params, "slope_scale", "params");
    }
    cfg.alternating = params.value("alternating", false);
    if (cfg.alternating && !cfg.fixed_slope) {
      throw ConfigError("params.alternating needs a fixed params.slope");
    }
    if (cfg.family == "max_affine") {
      cfg.pieces = params.value("pieces", 3);
      if (cfg.pieces < 1) throw ConfigError("params.pieces must be >= 1");
    }
  }

  const json& sch = root["schedule"];
  const std::string variant = sch.value("variant", "");
  if (variant == "general_quantum") {
    cfg.variant = ScheduleVariant::kGeneralQuantum;
  } else if (variant == "strongly_convex_quantum") {
    cfg.variant = ScheduleVariant::kStronglyConvexQuantum;
  } else if (variant == "general_classical") {
    cfg.variant = ScheduleVariant::kGeneralClassical;
  } else {
    throw ConfigError(
        "schedule.variant must be general_quantum|strongly_convex_quantum|general_classical");
  }
  if (!sch.contains("T") || !sch["T"].is_number_integer() || sch["T"].get<int>() < 1) {
    throw ConfigError("schedule.T must be a positive integer");
  }
  cfg.horizon = sch["T"].get<int>();
  const std::string mode = sch.value("r_prime_mode", "proof_consistent");
  if (mode == "paper_literal") {
    cfg.mode = RPrimeMode::kPaperLiteral;
  } else if (mode == "proof_consistent") {
    cfg.mode = RPrimeMode::kProofConsistent;
  } else {
    throw ConfigError("schedule.r_prime_mode must be paper_literal|proof_consistent");
  }
  if (sch.contains("rho")) cfg.rho = get_positive(sch, "rho", "schedule");
  if (sch.contains("p")) cfg.p = get_positive(sch, "p", "schedule");
  if (sch.contains("delta")) cfg.delta = get_positive(sch, "delta", "schedule");
  if (sch.contains("G")) cfg.lipschitz_override = get_positive(sch, "G", "schedule");
  if (sch.contains("D")) cfg.diameter_override = get_positive(sch, "D", "schedule");
  if (sch.contains("alpha")) cfg.alpha_override = get_positive(sch, "alpha", "schedule");

  const std::string est = root["estimator"].is_string() ? root["estimator"].get<std::string>()
                                                        : std::string();
  if (est == "quantum") {
    cfg.estimator = EstimatorKind::kQuantum;
  } else if (est == "classical") {
    cfg.estimator = EstimatorKind::kClassical;
  } else {
    throw ConfigError("estimator must be 'quantum' or 'classical'");
  }

  const json& rt = root["runtime"];
  if (rt.contains("seed")) cfg.seed = rt["seed"].get<std::uint64_t>();
  if (rt.contains("trials")) {
    cfg.trials = rt["trials"].get<int>();
    if (cfg.trials < 1) throw ConfigError("runtime.trials must be >= 1");
  }
  if (rt.contains("memory_guard")) {
    cfg.memory_guard = rt["memory_guard"].get<std::uint64_t>();
    if (cfg.memory_guard < 4) throw ConfigError("runtime.memory_guard too small");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config(os.str());
}

LossOracle make_family(const std::string& kind, const ExperimentConfig& cfg,
                       const FeasibleSet& domain, double linf_margin, Rng& rng) {
  if (kind == "linear") {
    Vec slope(cfg.n);
    if (cfg.fixed_slope) {
      slope = *cfg.fixed_slope;
    } else {
      for (int j = 0; j < cfg.n; ++j) {
        slope[j] = rng.uniform(-cfg.slope_scale, cfg.slope_scale);
      }
      if (norm_l2(slope) < 1e-9 * cfg.slope_scale) slope[0] = 0.5 * cfg.slope_scale;
    }
    return make_linear(std::move(slope), rng.uniform(-1.0, 1.0));
  }
  if (kind == "quadratic") {
    return make_quadratic(cfg.curvature, domain.sample_uniform(rng), domain, linf_margin);
  }
  if (kind == "max_affine") {
    std::vector<Vec> slopes(cfg.pieces, Vec(cfg.n));
    Vec offsets(cfg.pieces);
    for (int i = 0; i < cfg.pieces; ++i) {
      for (int j = 0; j < cfg.n; ++j) {
        slopes[i][j] = rng.uniform(-cfg.slope_scale, cfg.slope_scale);
      }
      offsets[i] = rng.uniform(-1.0, 1.0);
    }
    if (norm_l2(slopes[0]) < 1e-9 * cfg.slope_scale) slopes[0][0] = 0.5 * cfg.slope_scale;
    return make_max_affine(std::move(slopes), std::move(offsets));
  }
  throw ConfigError("unknown loss family '" + kind + "'");
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  Experiment exp;
  exp.set = build_set(cfg);
  exp.estimator = cfg.estimator;
  exp.memory_guard = cfg.memory_guard;

  const bool quantum_variant = cfg.variant != ScheduleVariant::kGeneralClassical;
  if (quantum_variant != (cfg.estimator == EstimatorKind::kQuantum)) {
    throw ConfigError("schedule variant and estimator kind disagree");
  }
  if (cfg.variant == ScheduleVariant::kStronglyConvexQuantum && family_alpha(cfg) <= 0.0) {
    throw ConfigError("strongly_convex_quantum needs a strongly convex family (quadratic)");
  }

  Schedule sched;
  sched.variant = cfg.variant;
  sched.mode = cfg.mode;
  sched.n = cfg.n;
  sched.horizon = cfg.horizon;
  sched.diameter = exp.set.diameter();
  if (cfg.diameter_override &&
      std::fabs(*cfg.diameter_override - sched.diameter) > 1e-9 * sched.diameter) {
    throw ConfigError("schedule.D inconsistent with the feasible set's diameter");
  }
  if (quantum_variant) {
    if (cfg.rho && cfg.p) {
      sched.rho = *cfg.rho;
      sched.p = *cfg.p;
    } else if (cfg.delta) {
      sched.rho = *cfg.delta / (2.0 * cfg.horizon);
      sched.p = sched.rho;
    } else {
      throw ConfigError("quantum schedules need rho and p, or delta");
    }
    sched.delta = cfg.horizon * (sched.p + sched.rho);
    if (cfg.delta && std::fabs(*cfg.delta - sched.delta) > 1e-9 * sched.delta) {
      throw ConfigError("schedule.delta must equal T*(p+rho)");
    }
  } else {
    if (!cfg.delta) throw ConfigError("general_classical needs schedule.delta");
    sched.delta = *cfg.delta;
  }
  const double alpha = family_alpha(cfg);
  sched.alpha = cfg.alpha_override ? *cfg.alpha_override : alpha;
  if (sched.alpha > alpha + 1e-12) {
    throw ConfigError("schedule.alpha exceeds the family's strong convexity");
  }

  // The loss family must be Lipschitz on the region play actually queries:
  // K enlarged (sup norm) by r_1 + r'_1. For the strongly convex schedule
  // the radii depend on G which depends on the enlargement, so iterate the
  // monotone map to its fixed point.
  double margin = 0.0;
  bool settled = false;
  for (int iter = 0; iter < 64; ++iter) {
    const double g = cfg.lipschitz_override ? *cfg.lipschitz_override
                                            : family_lipschitz(cfg, exp.set, margin);
    sched.lipschitz = g;
    sched.validate();
    const RoundParams rp1 = sched.at(1);
    const double next = rp1.r + rp1.r_prime;
    if (next <= margin * (1.0 + 1e-12) + 1e-15) {
      settled = true;
      break;
    }
    margin = next;
  }
  if (!settled) {
    throw ConfigError("family Lipschitz constant and schedule radii failed to stabilize");
  }
  if (cfg.lipschitz_override &&
      *cfg.lipschitz_override < family_lipschitz(cfg, exp.set, margin) * (1.0 - 1e-9)) {
    throw ConfigError("schedule.G override is below the family's analytic constant");
  }
  exp.schedule = sched;

  const double game_g = sched.lipschitz;
  const FeasibleSet set = exp.set;
  const ExperimentConfig grabbed = cfg;
  const double final_margin = margin;
  const int horizon = cfg.horizon;

  exp.adversary_factory = [set, grabbed, game_g, final_margin,
                           horizon](std::uint64_t adversary_seed) -> Adversary {
    if (grabbed.power == "oblivious") {
      Rng rng(adversary_seed);
      std::vector<LossOracle> seq;
      seq.reserve(horizon);
      for (int t = 1; t <= horizon; ++t) {
        seq.push_back(
            stamp(make_family(grabbed.family, grabbed, set, final_margin, rng), game_g, set,
                  final_margin));
      }
      return Adversary::oblivious(std::move(seq));
    }
    if (grabbed.power == "adaptive") {
      auto rule = [set, grabbed, game_g, final_margin, adversary_seed](int t) {
        Rng rng(derive_seed(adversary_seed, static_cast<std::uint64_t>(t)));
        if (grabbed.family == "linear" && grabbed.alternating) {
          Vec slope = *grabbed.fixed_slope;
          if (t % 2 == 0) {
            for (double& s : slope) s = -s;
          }
          return stamp(make_linear(std::move(slope)), game_g, set, final_margin);
        }
        return stamp(make_family(grabbed.family, grabbed, set, final_margin, rng), game_g,
                     set, final_margin);
      };
      return Adversary::adaptive(horizon, rule);
    }
    // Completely adaptive quadratic chaser: the round's minimizer sits at
    // x_t + v, so the player's loss is v^2-flat at the decision itself.
    auto rule = [set, grabbed, game_g, final_margin](int, const Vec& x_t) {
      const Vec target = axpy(x_t, 1.0, grabbed.chaser_offset);
      return stamp(make_quadratic(grabbed.curvature, target, set, final_margin), game_g, set,
                   final_margin);
    };
    return Adversary::completely_adaptive(horizon, rule);
  };
  return exp;
}

}  // namespace qoco
