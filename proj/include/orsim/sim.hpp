#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orsim/cbr.hpp"
#include "orsim/criticality.hpp"
#include "orsim/domain.hpp"
#include "orsim/fatigue.hpp"
#include "orsim/infection.hpp"

namespace orsim {

enum class Species { Personal, Material, Infection, Patient, Alert };

inline std::string to_string(Species s) {
  switch (s) {
    case Species::Personal: return "personal";
    case Species::Material: return "material";
    case Species::Infection: return "infection";
    case Species::Patient: return "patient";
    case Species::Alert: return "alert";
  }
  throw Error("bad species value");
}

inline Species species_from_string(const std::string& s) {
  if (s == "personal") return Species::Personal;
  if (s == "material") return Species::Material;
  if (s == "infection") return Species::Infection;
  if (s == "patient") return Species::Patient;
  if (s == "alert") return Species::Alert;
  throw Error("unknown species: \"" + s + "\"");
}

// Static role metadata, not a deliberation engine.
struct RoleDescriptors {
  std::string intention;
  std::string desire;
  std::string belief;

  bool operator==(const RoleDescriptors&) const = default;
};

struct AgentState {
  EntityLabel entity;
  Species species = Species::Personal;
  std::map<AttributeKey, double> attributes;
  RoleDescriptors role;

  std::string experience;       // Personal: junior | senior
  std::string function;         // Material: what the instrument does
  bool infected = false;        // Material
  std::string patient_state;    // Patient
  std::string surgery_type;     // Patient: urgent | non-urgent | complex | non-complex
  std::string infection_type;   // Infection: contaminant | resistant
  std::string scope;            // Infection: local scope label

  // Exponential-law dynamics; set for Personal and Material agents.
  std::optional<FatigueParams> dynamics;
  AttributeKey dynamic_attribute;

  bool operator==(const AgentState&) const = default;
};

struct IndicatorSpec {
  EntityLabel entity;
  AttributeKey attribute;
  double individual_threshold = 0.0;
  double weight = 1.0;

  std::string name() const { return entity + "." + attribute; }

  bool operator==(const IndicatorSpec&) const = default;
};

struct CbrSettings {
  std::int64_t feed_interval = 100;
  double acceptance_threshold = 1.2;
  CategoricalEncoding encoding;
  bool update_maps = true;
  bool auto_solution_on_no_match = true;
  std::string normal_recommendation = "Normal";
  std::string alert_recommendation = "Surveillance";

  bool operator==(const CbrSettings&) const = default;
};

struct SimConfig {
  std::int64_t horizon = 2000;
  std::uint64_t seed = 1;
  std::vector<AgentState> agents;
  InfectionParams infection;
  std::optional<RegionMap2D> map2d;
  std::optional<RegionMap3D> map3d;
  std::vector<IndicatorSpec> indicators;
  double collective_threshold = 0.5;  // theta
  CbrSettings cbr;
  Taxonomy taxonomy = Taxonomy::default_taxonomy();
  AttributeRegistry registry = AttributeRegistry::defaults();
  std::int64_t reference_cycle = 0;  // where batch measures score dispersion

  bool operator==(const SimConfig&) const = default;
};

struct TraceRow {
  std::int64_t cycle = 0;
  std::vector<double> indicator_values;
  std::vector<bool> individual_alerts;
  double collective_score = 0.0;
  bool collective_alert = false;
  std::optional<int> crit_level;  // present when a region map was consulted
  std::optional<std::int64_t> cbr_case_id;
  std::string recommendation;

  bool operator==(const TraceRow&) const = default;
};

struct SimTrace {
  std::vector<std::string> indicator_names;
  LevelScale levels;
  std::vector<TraceRow> rows;

  bool operator==(const SimTrace&) const = default;
};

struct AlertEvent {
  enum class Kind { Individual, Collective };

  std::int64_t cycle = 0;
  Kind kind = Kind::Individual;
  std::string indicator;  // Individual: which one fired
  double score = 0.0;     // Individual: the value; Collective: the score
  std::optional<int> level;
  std::optional<std::string> recommendation;

  bool operator==(const AlertEvent&) const = default;
};

// Weighted mean of scale-normalized indicator values, in [0,1].
inline double collective_risk(const std::vector<IndicatorValue>& values,
                              const std::vector<double>& weights,
                              const AttributeRegistry& registry) {
  if (values.empty()) throw Error("collective risk requires at least one indicator");
  if (weights.size() != values.size()) {
    throw Error("weight count does not match indicator count");
  }
  double wsum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] >= 0)) throw Error("negative indicator weight");
    const AttributeScale& scale = registry.scale_of(values[i].attribute);
    double norm = scale.norm_divisor > 0 ? values[i].value / scale.norm_divisor : 0.0;
    norm = std::clamp(norm, 0.0, 1.0);
    acc += weights[i] * norm;
    wsum += weights[i];
  }
  if (!(wsum > 0)) throw Error("indicator weights must not all be zero");
  return acc / wsum;
}

inline std::vector<std::string> validate_config(const SimConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.horizon <= 0) v.push_back("horizon must be > 0");
  if (cfg.reference_cycle < 0 || cfg.reference_cycle >= cfg.horizon) {
    v.push_back("reference_cycle must lie in [0, horizon)");
  }
  if (!(cfg.collective_threshold >= 0 && cfg.collective_threshold <= 1)) {
    v.push_back("collective_threshold must be in [0,1]");
  }
  if (cfg.cbr.feed_interval < 1) v.push_back("cbr feed_interval must be >= 1");
  if (!(cfg.cbr.acceptance_threshold > 0)) v.push_back("cbr acceptance_threshold must be > 0");
  for (const auto& msg : cfg.cbr.encoding.validate()) v.push_back("cbr encoding: " + msg);
  for (const auto& msg : cfg.infection.validate()) v.push_back("infection: " + msg);
  if (cfg.infection.n_susceptible + cfg.infection.n_infected + cfg.infection.n_resistant <= 0) {
    v.push_back("infection: population is empty");
  }
  if (cfg.taxonomy.empty()) v.push_back("taxonomy is empty");

  int patients = 0;
  int alerts = 0;
  std::map<EntityLabel, int> entity_count;
  for (const auto& a : cfg.agents) {
    const std::string who = "agent \"" + a.entity + "\": ";
    if (a.entity.empty()) {
      v.push_back("agent with empty entity label");
      continue;
    }
    if (++entity_count[a.entity] == 2) v.push_back(who + "duplicate entity label");
    // The alert centralizer never appears in quadruplets, so it alone may
    // live outside the taxonomy.
    if (a.species != Species::Alert &&
        (!cfg.taxonomy.contains(a.entity) || !cfg.taxonomy.is_leaf(a.entity))) {
      v.push_back(who + "entity is not a taxonomy leaf");
    }
    if (a.species == Species::Patient) ++patients;
    if (a.species == Species::Alert) ++alerts;
    if (!a.experience.empty() && a.experience != "junior" && a.experience != "senior") {
      v.push_back(who + "experience must be junior or senior");
    }
    if (!a.surgery_type.empty() && a.surgery_type != "urgent" && a.surgery_type != "non-urgent" &&
        a.surgery_type != "complex" && a.surgery_type != "non-complex") {
      v.push_back(who + "unknown surgery_type");
    }
    if (!a.infection_type.empty() && a.infection_type != "contaminant" &&
        a.infection_type != "resistant") {
      v.push_back(who + "infection type must be contaminant or resistant");
    }
    if (a.dynamics) {
      for (const auto& msg : a.dynamics->validate()) v.push_back(who + msg);
      if (a.dynamic_attribute.empty()) {
        v.push_back(who + "dynamics without a target attribute");
      } else if (!cfg.registry.contains(a.dynamic_attribute)) {
        v.push_back(who + "unknown attribute: \"" + a.dynamic_attribute + "\"");
      }
    }
    for (const auto& [key, value] : a.attributes) {
      if (!cfg.registry.contains(key)) {
        v.push_back(who + "unknown attribute: \"" + key + "\"");
        continue;
      }
      const auto& scale = cfg.registry.scale_of(key);
      if (value < scale.lo || (scale.hi && value > *scale.hi)) {
        v.push_back(who + key + " starts out of scale");
      }
    }
  }
  if (patients > 1) v.push_back("more than one patient agent");
  if (alerts > 1) v.push_back("more than one alert agent");

  if (cfg.indicators.empty()) v.push_back("at least one monitored indicator is required");
  double wsum = 0.0;
  for (const auto& ind : cfg.indicators) {
    const std::string who = "indicator " + ind.name() + ": ";
    if (entity_count.find(ind.entity) == entity_count.end()) {
      v.push_back(who + "references no configured agent");
    }
    if (!cfg.registry.contains(ind.attribute)) v.push_back(who + "unregistered attribute");
    if (!(ind.weight >= 0)) v.push_back(who + "negative weight");
    if (!std::isfinite(ind.individual_threshold)) v.push_back(who + "non-finite threshold");
    wsum += ind.weight;
  }
  if (!cfg.indicators.empty() && !(wsum > 0)) v.push_back("indicator weights must not all be zero");

  auto check_axis = [&](const AxisDef& axis, const IndicatorSpec& ind) {
    const std::string who = "map axis \"" + axis.indicator + "\": ";
    if (axis.indicator != ind.name()) {
      v.push_back(who + "does not match monitored indicator " + ind.name());
    }
    if (!(axis.lo < axis.hi)) {
      v.push_back(who + "empty domain");
      return;
    }
    if (!cfg.registry.contains(ind.attribute)) return;
    const auto& scale = cfg.registry.scale_of(ind.attribute);
    const double top = scale.hi ? *scale.hi : scale.norm_divisor;
    if (axis.lo > scale.lo || axis.hi < top) {
      v.push_back(who + "domain does not cover the attribute scale");
    }
  };
  if (cfg.indicators.size() == 2 && cfg.map2d) {
    check_axis(cfg.map2d->x_axis, cfg.indicators[0]);
    check_axis(cfg.map2d->y_axis, cfg.indicators[1]);
    for (const auto& msg : validate_partition(*cfg.map2d)) v.push_back("map2d: " + msg);
  }
  if (cfg.indicators.size() == 3 && cfg.map3d) {
    for (std::size_t d = 0; d < 3; ++d) check_axis(cfg.map3d->axes[d], cfg.indicators[d]);
    for (const auto& msg : validate_partition(*cfg.map3d)) v.push_back("map3d: " + msg);
  }
  return v;
}

struct SimWorld {
  SimConfig config;
  std::vector<AgentState> agents;
  ParticleWorld infection;
  std::optional<RegionMap2D> map2d;
  std::optional<RegionMap3D> map3d;
  CaseBase casebase;
  std::vector<PendingCase> pending;
  std::vector<AlertEvent> events;
  SimTrace trace;
};

namespace detail {

inline AgentState* agent_by_entity(std::vector<AgentState>& agents, const EntityLabel& entity) {
  for (auto& a : agents) {
    if (a.entity == entity) return &a;
  }
  return nullptr;
}

}  // namespace detail

// The "infection" count attribute normalizes against the run's population,
// and "prevalence" is always available for indicators.
inline void finalize_registry(SimConfig& cfg) {
  const int total =
      cfg.infection.n_susceptible + cfg.infection.n_infected + cfg.infection.n_resistant;
  AttributeScale scale{0.0, std::nullopt, static_cast<double>(total)};
  if (cfg.registry.contains("infection")) {
    scale.lo = cfg.registry.scale_of("infection").lo;
    scale.hi = cfg.registry.scale_of("infection").hi;
  }
  cfg.registry.set("infection", scale);
  if (!cfg.registry.contains("prevalence")) cfg.registry.set("prevalence", {0.0, 1.0, 1.0});
}

inline SimWorld make_world(const SimConfig& config) {
  SimWorld world;
  world.config = config;
  finalize_registry(world.config);

  const auto violations = validate_config(world.config);
  if (!violations.empty()) {
    std::string msg = "invalid config:";
    for (const auto& m : violations) msg += "\n  - " + m;
    throw Error(msg);
  }

  world.agents = world.config.agents;
  world.infection = init_population(world.config.infection, world.config.seed);
  world.map2d = world.config.map2d;
  world.map3d = world.config.map3d;
  world.casebase.acceptance_threshold = world.config.cbr.acceptance_threshold;
  world.casebase.encoding = world.config.cbr.encoding;
  for (const auto& ind : world.config.indicators) {
    world.trace.indicator_names.push_back(ind.name());
  }
  if (world.map2d) {
    world.trace.levels = world.map2d->levels;
  } else if (world.map3d) {
    world.trace.levels = world.map3d->levels;
  }
  return world;
}

// One cycle, in fixed order: dynamics, infection, individual thresholds,
// collective score (+ region map when 2 or 3 indicators are monitored),
// then the CBR feed on feed_interval boundaries.
inline void step(SimWorld& world, std::int64_t cycle) {
  for (auto& a : world.agents) {
    if (a.dynamics) step_fatigue(a.attributes, a.dynamic_attribute, *a.dynamics, cycle);
  }

  step_infection(world.infection);
  const InfectionMetrics metrics = infection_metrics(world.infection);
  for (auto& a : world.agents) {
    if (a.species == Species::Infection) {
      a.attributes["infection"] = static_cast<double>(metrics.infected);
      a.attributes["prevalence"] = metrics.prevalence;
    }
  }

  TraceRow row;
  row.cycle = cycle;
  std::vector<IndicatorValue> snapshot;
  std::vector<double> weights;
  bool any_individual = false;
  for (const auto& ind : world.config.indicators) {
    AgentState* agent = detail::agent_by_entity(world.agents, ind.entity);
    if (agent == nullptr) throw Error("indicator " + ind.name() + " references no agent");
    auto it = agent->attributes.find(ind.attribute);
    if (it == agent->attributes.end()) {
      throw Error("indicator " + ind.name() + " has no value at cycle " + std::to_string(cycle));
    }
    const double value = it->second;
    snapshot.push_back({ind.entity, ind.attribute, value});
    weights.push_back(ind.weight);
    row.indicator_values.push_back(value);
    const bool fired = value >= ind.individual_threshold;
    row.individual_alerts.push_back(fired);
    if (fired) {
      any_individual = true;
      world.events.push_back(
          {cycle, AlertEvent::Kind::Individual, ind.name(), value, std::nullopt, std::nullopt});
    }
  }

  row.collective_score = collective_risk(snapshot, weights, world.config.registry);
  int consulted_max_level = 0;
  if (world.config.indicators.size() == 2 && world.map2d) {
    row.crit_level = classify2d(*world.map2d, row.indicator_values[0], row.indicator_values[1]);
    consulted_max_level = world.map2d->levels.max_level();
  } else if (world.config.indicators.size() == 3 && world.map3d) {
    row.crit_level = classify3d(
        *world.map3d,
        {row.indicator_values[0], row.indicator_values[1], row.indicator_values[2]});
    consulted_max_level = world.map3d->levels.max_level();
  }
  row.collective_alert = row.collective_score >= world.config.collective_threshold ||
                         (row.crit_level.has_value() && *row.crit_level == consulted_max_level);

  if (cycle % world.config.cbr.feed_interval == 0) {
    const Problem target = elaborate(snapshot, cycle);
    const auto candidates = retrieve(target, world.casebase, world.config.taxonomy);
    const ReuseOutcome outcome = reuse(target, candidates, world.casebase, world.config.taxonomy);

    Case c;
    c.problem = target;
    bool retain_it = true;
    switch (outcome.kind) {
      case ReuseOutcome::Kind::Inherited:
        c.solution = outcome.solution;
        c.provenance = Provenance::Auto;
        c.retrieved_from = outcome.source_id;
        c.retrieval_distance = outcome.distance;
        break;
      case ReuseOutcome::Kind::Adapted:
        c.solution = outcome.solution;
        c.provenance = Provenance::Adapted;
        c.adaptation = outcome.path;
        c.retrieved_from = outcome.source_id;
        c.retrieval_distance = outcome.distance;
        break;
      case ReuseOutcome::Kind::NoMatch:
        if (!world.config.cbr.auto_solution_on_no_match) {
          retain_it = false;
          break;
        }
        c.provenance = Provenance::Auto;
        c.solution.state = (any_individual || row.collective_alert) ? AlertState::Alert
                                                                    : AlertState::Normal;
        c.solution.recommendation = c.solution.state == AlertState::Alert
                                        ? world.config.cbr.alert_recommendation
                                        : world.config.cbr.normal_recommendation;
        break;
    }
    if (retain_it) {
      RegionMap2D* m2 =
          world.config.cbr.update_maps && world.map2d.has_value() ? &*world.map2d : nullptr;
      RegionMap3D* m3 =
          world.config.cbr.update_maps && world.map3d.has_value() ? &*world.map3d : nullptr;
      const std::int64_t id = retain(c, world.casebase, m2, m3);
      c.id = id;
      world.pending.push_back({c, false});
      row.cbr_case_id = id;
      row.recommendation = c.solution.recommendation;
    }
  }

  if (row.collective_alert) {
    std::optional<std::string> rec;
    if (!row.recommendation.empty()) rec = row.recommendation;
    world.events.push_back(
        {cycle, AlertEvent::Kind::Collective, "", row.collective_score, row.crit_level, rec});
  }
  world.trace.rows.push_back(std::move(row));
}

struct SimResult {
  SimTrace trace;
  CaseBase casebase;
  std::vector<PendingCase> pending;
  std::vector<AlertEvent> events;
  std::optional<RegionMap2D> map2d;  // post-run, including any promotions
  std::optional<RegionMap3D> map3d;
  std::optional<std::int64_t> first_individual_alert;
  std::optional<std::int64_t> first_collective_alert;
};

inline SimResult run(const SimConfig& config) {
  SimWorld world = make_world(config);
  for (std::int64_t cycle = 0; cycle < world.config.horizon; ++cycle) step(world, cycle);

  SimResult result;
  result.trace = std::move(world.trace);
  result.casebase = std::move(world.casebase);
  result.pending = std::move(world.pending);
  result.events = std::move(world.events);
  result.map2d = std::move(world.map2d);
  result.map3d = std::move(world.map3d);
  for (const auto& e : result.events) {
    if (e.kind == AlertEvent::Kind::Individual && !result.first_individual_alert) {
      result.first_individual_alert = e.cycle;
    }
    if (e.kind == AlertEvent::Kind::Collective && !result.first_collective_alert) {
      result.first_collective_alert = e.cycle;
    }
  }
  return result;
}

struct BatchRun {
  std::uint64_t seed = 0;
  std::optional<std::int64_t> first_collective_alert;
  double score_at_reference = 0.0;

  bool operator==(const BatchRun&) const = default;
};

struct BatchResult {
  std::vector<BatchRun> runs;
  std::int64_t reference_cycle = 0;
  double mean_score = 0.0;
  double stddev_score = 0.0;  // population form, so one run reports 0

  bool operator==(const BatchResult&) const = default;
};

// n_runs independent simulations seeded base_seed .. base_seed+n-1. on_run,
// when set, sees each run's index and full result as it completes.
inline BatchResult batch(const SimConfig& config, int n_runs, std::uint64_t base_seed,
                         const std::function<void(int, const SimResult&)>& on_run = {}) {
  if (n_runs < 1) throw Error("batch requires at least one run");
  BatchResult out;
  out.reference_cycle = config.reference_cycle;
  for (int i = 0; i < n_runs; ++i) {
    SimConfig cfg = config;
    cfg.seed = base_seed + static_cast<std::uint64_t>(i);
    const SimResult res = run(cfg);
    if (on_run) on_run(i, res);
    BatchRun br;
    br.seed = cfg.seed;
    br.first_collective_alert = res.first_collective_alert;
    br.score_at_reference =
        res.trace.rows[static_cast<std::size_t>(cfg.reference_cycle)].collective_score;
    out.runs.push_back(br);
  }
  double mean = 0.0;
  for (const auto& r : out.runs) mean += r.score_at_reference;
  mean /= static_cast<double>(out.runs.size());
  double var = 0.0;
  for (const auto& r : out.runs) {
    const double d = r.score_at_reference - mean;
    var += d * d;
  }
  var /= static_cast<double>(out.runs.size());
  out.mean_score = mean;
  out.stddev_score = std::sqrt(var);
  return out;
}

}  // namespace orsim
