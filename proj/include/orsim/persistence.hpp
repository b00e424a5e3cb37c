#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "orsim/cbr.hpp"
#include "orsim/criticality.hpp"
#include "orsim/domain.hpp"
#include "orsim/sim.hpp"

namespace orsim {

namespace detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<std::string_view> allowed,
                       std::vector<std::string>& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto a : allowed) {
      if (it.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) errs.push_back(path + ": unknown key \"" + it.key() + "\"");
  }
}

inline double get_num(const json& obj, const char* key, double fallback, const std::string& path,
                      std::vector<std::string>& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    errs.push_back(path + "." + key + ": expected a number");
    return fallback;
  }
  return obj[key].get<double>();
}

inline std::int64_t get_int(const json& obj, const char* key, std::int64_t fallback,
                            const std::string& path, std::vector<std::string>& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    errs.push_back(path + "." + key + ": expected an integer");
    return fallback;
  }
  return obj[key].get<std::int64_t>();
}

inline std::string get_str(const json& obj, const char* key, const std::string& fallback,
                           const std::string& path, std::vector<std::string>& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    errs.push_back(path + "." + key + ": expected a string");
    return fallback;
  }
  return obj[key].get<std::string>();
}

inline bool get_bool(const json& obj, const char* key, bool fallback, const std::string& path,
                     std::vector<std::string>& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    errs.push_back(path + "." + key + ": expected a boolean");
    return fallback;
  }
  return obj[key].get<bool>();
}

inline int parse_level(const json& j, const LevelScale& levels, const std::string& path,
                       std::vector<std::string>& errs) {
  if (!j.is_string()) {
    errs.push_back(path + ": expected a level name");
    return 0;
  }
  try {
    return levels.index_of(j.get<std::string>());
  } catch (const Error& e) {
    errs.push_back(path + ": " + e.what());
    return 0;
  }
}

inline AxisDef parse_axis(const json& j, const std::string& path, std::vector<std::string>& errs) {
  AxisDef axis;
  if (!j.is_object()) {
    errs.push_back(path + ": expected an object");
    return axis;
  }
  check_keys(j, path, {"indicator", "lo", "hi"}, errs);
  axis.indicator = get_str(j, "indicator", "", path, errs);
  axis.lo = get_num(j, "lo", 0.0, path, errs);
  axis.hi = get_num(j, "hi", 1.0, path, errs);
  if (axis.indicator.empty()) errs.push_back(path + ".indicator: required");
  return axis;
}

inline LevelScale parse_levels(const json& parent, const std::string& path,
                               std::vector<std::string>& errs) {
  LevelScale levels;
  if (!parent.contains("levels")) return levels;
  const json& j = parent["levels"];
  if (!j.is_array() || j.size() < 2) {
    errs.push_back(path + ".levels: expected an array of at least two level names");
    return levels;
  }
  levels.names.clear();
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) {
      errs.push_back(path + ".levels[" + std::to_string(i) + "]: expected a string");
      levels.names.push_back("");
      continue;
    }
    levels.names.push_back(j[i].get<std::string>());
  }
  return levels;
}

inline RegionMap2D parse_map2d(const json& j, const std::string& path,
                               std::vector<std::string>& errs) {
  RegionMap2D map;
  check_keys(j, path, {"x_axis", "y_axis", "levels", "cells"}, errs);
  map.levels = parse_levels(j, path, errs);
  if (j.contains("x_axis")) map.x_axis = parse_axis(j["x_axis"], path + ".x_axis", errs);
  else errs.push_back(path + ".x_axis: required");
  if (j.contains("y_axis")) map.y_axis = parse_axis(j["y_axis"], path + ".y_axis", errs);
  else errs.push_back(path + ".y_axis: required");
  if (!j.contains("cells") || !j["cells"].is_array()) {
    errs.push_back(path + ".cells: expected an array");
    return map;
  }
  for (std::size_t i = 0; i < j["cells"].size(); ++i) {
    const json& cj = j["cells"][i];
    const std::string cpath = path + ".cells[" + std::to_string(i) + "]";
    Cell2D cell;
    if (!cj.is_object()) {
      errs.push_back(cpath + ": expected an object");
      continue;
    }
    check_keys(cj, cpath, {"x0", "x1", "y0", "y1", "level"}, errs);
    cell.x0 = get_num(cj, "x0", 0.0, cpath, errs);
    cell.x1 = get_num(cj, "x1", 0.0, cpath, errs);
    cell.y0 = get_num(cj, "y0", 0.0, cpath, errs);
    cell.y1 = get_num(cj, "y1", 0.0, cpath, errs);
    if (cj.contains("level")) cell.level = parse_level(cj["level"], map.levels, cpath + ".level", errs);
    else errs.push_back(cpath + ".level: required");
    map.cells.push_back(cell);
  }
  return map;
}

inline RegionMap3D parse_map3d(const json& j, const std::string& path,
                               std::vector<std::string>& errs) {
  RegionMap3D map;
  check_keys(j, path, {"axes", "levels", "default_level", "boxes"}, errs);
  map.levels = parse_levels(j, path, errs);
  if (!j.contains("axes") || !j["axes"].is_array() || j["axes"].size() != 3) {
    errs.push_back(path + ".axes: expected exactly three axes");
  } else {
    for (std::size_t d = 0; d < 3; ++d) {
      map.axes[d] = parse_axis(j["axes"][d], path + ".axes[" + std::to_string(d) + "]", errs);
    }
  }
  if (j.contains("default_level")) {
    map.default_level = parse_level(j["default_level"], map.levels, path + ".default_level", errs);
  }
  if (j.contains("boxes")) {
    if (!j["boxes"].is_array()) {
      errs.push_back(path + ".boxes: expected an array");
      return map;
    }
    for (std::size_t i = 0; i < j["boxes"].size(); ++i) {
      const json& bj = j["boxes"][i];
      const std::string bpath = path + ".boxes[" + std::to_string(i) + "]";
      Box3D box;
      if (!bj.is_object()) {
        errs.push_back(bpath + ": expected an object");
        continue;
      }
      check_keys(bj, bpath, {"lo", "hi", "level"}, errs);
      for (const char* key : {"lo", "hi"}) {
        if (!bj.contains(key) || !bj[key].is_array() || bj[key].size() != 3) {
          errs.push_back(bpath + "." + key + ": expected three numbers");
          continue;
        }
        for (std::size_t d = 0; d < 3; ++d) {
          if (!bj[key][d].is_number()) {
            errs.push_back(bpath + "." + key + ": expected three numbers");
            break;
          }
          (key[0] == 'l' ? box.lo : box.hi)[d] = bj[key][d].get<double>();
        }
      }
      if (bj.contains("level")) box.level = parse_level(bj["level"], map.levels, bpath + ".level", errs);
      else errs.push_back(bpath + ".level: required");
      map.boxes.push_back(box);
    }
  }
  return map;
}

inline FatigueParams parse_dynamics(const json& j, const std::string& path, AttributeKey& attr,
                                    std::vector<std::string>& errs) {
  FatigueParams p;
  check_keys(j, path, {"a", "k", "fatigue_type", "scale_max", "attribute"}, errs);
  p.a = get_num(j, "a", p.a, path, errs);
  p.k = get_num(j, "k", p.k, path, errs);
  p.fatigue_type = get_str(j, "fatigue_type", p.fatigue_type, path, errs);
  p.scale_max = get_num(j, "scale_max", p.scale_max, path, errs);
  attr = get_str(j, "attribute", "fatigue", path, errs);
  return p;
}

inline AgentState parse_agent(const json& j, const std::string& path,
                              std::vector<std::string>& errs) {
  AgentState a;
  check_keys(j, path,
             {"entity", "species", "attributes", "role", "experience", "function", "infected",
              "patient_state", "surgery_type", "infection_type", "scope", "dynamics"},
             errs);
  a.entity = get_str(j, "entity", "", path, errs);
  const std::string species = get_str(j, "species", "personal", path, errs);
  try {
    a.species = species_from_string(species);
  } catch (const Error& e) {
    errs.push_back(path + ".species: " + e.what());
  }
  if (j.contains("attributes")) {
    if (!j["attributes"].is_object()) {
      errs.push_back(path + ".attributes: expected an object");
    } else {
      for (auto it = j["attributes"].begin(); it != j["attributes"].end(); ++it) {
        if (!it.value().is_number()) {
          errs.push_back(path + ".attributes." + it.key() + ": expected a number");
          continue;
        }
        a.attributes[it.key()] = it.value().get<double>();
      }
    }
  }
  if (j.contains("role")) {
    const std::string rpath = path + ".role";
    if (!j["role"].is_object()) {
      errs.push_back(rpath + ": expected an object");
    } else {
      check_keys(j["role"], rpath, {"intention", "desire", "belief"}, errs);
      a.role.intention = get_str(j["role"], "intention", "", rpath, errs);
      a.role.desire = get_str(j["role"], "desire", "", rpath, errs);
      a.role.belief = get_str(j["role"], "belief", "", rpath, errs);
    }
  }
  a.experience = get_str(j, "experience", "", path, errs);
  a.function = get_str(j, "function", "", path, errs);
  a.infected = get_bool(j, "infected", false, path, errs);
  a.patient_state = get_str(j, "patient_state", "", path, errs);
  a.surgery_type = get_str(j, "surgery_type", "", path, errs);
  a.infection_type = get_str(j, "infection_type", "", path, errs);
  a.scope = get_str(j, "scope", "", path, errs);
  if (j.contains("dynamics")) {
    if (!j["dynamics"].is_object()) {
      errs.push_back(path + ".dynamics: expected an object");
    } else {
      a.dynamics = parse_dynamics(j["dynamics"], path + ".dynamics", a.dynamic_attribute, errs);
    }
  }
  return a;
}

}  // namespace detail

// Full schema check: unknown keys, wrong types, and semantic violations are
// all reported together. Parse errors carry nlohmann's byte position.
inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path);
  detail::json doc;
  try {
    doc = detail::json::parse(in);
  } catch (const detail::json::parse_error& e) {
    throw Error("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw Error("config " + path + ": top level must be an object");

  std::vector<std::string> errs;
  SimConfig cfg;
  detail::check_keys(doc, "$",
                     {"horizon", "seed", "reference_cycle", "collective_threshold", "taxonomy",
                      "attributes", "agents", "infection", "indicators", "map2d", "map3d", "cbr"},
                     errs);
  cfg.horizon = detail::get_int(doc, "horizon", cfg.horizon, "$", errs);
  cfg.seed = static_cast<std::uint64_t>(
      detail::get_int(doc, "seed", static_cast<std::int64_t>(cfg.seed), "$", errs));
  cfg.reference_cycle = detail::get_int(doc, "reference_cycle", cfg.reference_cycle, "$", errs);
  cfg.collective_threshold =
      detail::get_num(doc, "collective_threshold", cfg.collective_threshold, "$", errs);

  if (doc.contains("taxonomy")) {
    const detail::json& tj = doc["taxonomy"];
    const std::string tpath = "$.taxonomy";
    if (!tj.is_object()) {
      errs.push_back(tpath + ": expected an object");
    } else {
      detail::check_keys(tj, tpath, {"edges", "class_thresholds"}, errs);
      if (tj.contains("edges")) {
        std::vector<std::pair<std::string, std::string>> edges;
        bool shape_ok = tj["edges"].is_array();
        if (shape_ok) {
          for (const auto& e : tj["edges"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
              shape_ok = false;
              break;
            }
            edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
          }
        }
        if (!shape_ok) {
          errs.push_back(tpath + ".edges: expected an array of [parent, child] string pairs");
        } else {
          try {
            cfg.taxonomy = Taxonomy::from_edges(edges);
          } catch (const Error& e) {
            errs.push_back(tpath + ".edges: " + std::string(e.what()));
          }
        }
      }
      if (tj.contains("class_thresholds")) {
        if (!tj["class_thresholds"].is_object()) {
          errs.push_back(tpath + ".class_thresholds: expected an object");
        } else {
          for (auto it = tj["class_thresholds"].begin(); it != tj["class_thresholds"].end(); ++it) {
            if (!it.value().is_number()) {
              errs.push_back(tpath + ".class_thresholds." + it.key() + ": expected a number");
              continue;
            }
            cfg.taxonomy.class_thresholds[it.key()] = it.value().get<double>();
          }
        }
      }
    }
  }

  if (doc.contains("attributes")) {
    const detail::json& aj = doc["attributes"];
    if (!aj.is_object()) {
      errs.push_back("$.attributes: expected an object");
    } else {
      for (auto it = aj.begin(); it != aj.end(); ++it) {
        const std::string apath = "$.attributes." + it.key();
        if (!it.value().is_object()) {
          errs.push_back(apath + ": expected an object");
          continue;
        }
        detail::check_keys(it.value(), apath, {"lo", "hi", "norm_divisor"}, errs);
        AttributeScale scale;
        scale.lo = detail::get_num(it.value(), "lo", 0.0, apath, errs);
        if (it.value().contains("hi")) scale.hi = detail::get_num(it.value(), "hi", 0.0, apath, errs);
        scale.norm_divisor = detail::get_num(it.value(), "norm_divisor",
                                             scale.hi.value_or(1.0), apath, errs);
        cfg.registry.set(it.key(), scale);
      }
    }
  }

  if (doc.contains("agents")) {
    if (!doc["agents"].is_array()) {
      errs.push_back("$.agents: expected an array");
    } else {
      cfg.agents.clear();
      for (std::size_t i = 0; i < doc["agents"].size(); ++i) {
        const std::string apath = "$.agents[" + std::to_string(i) + "]";
        if (!doc["agents"][i].is_object()) {
          errs.push_back(apath + ": expected an object");
          continue;
        }
        cfg.agents.push_back(detail::parse_agent(doc["agents"][i], apath, errs));
      }
    }
  }

  if (doc.contains("infection")) {
    const detail::json& ij = doc["infection"];
    const std::string ipath = "$.infection";
    if (!ij.is_object()) {
      errs.push_back(ipath + ": expected an object");
    } else {
      detail::check_keys(ij, ipath,
                         {"n_susceptible", "n_infected", "n_resistant", "n_decontaminant",
                          "contact_radius", "p_infect", "p_neutralize", "step_size"},
                         errs);
      auto& p = cfg.infection;
      p.n_susceptible = static_cast<int>(detail::get_int(ij, "n_susceptible", p.n_susceptible, ipath, errs));
      p.n_infected = static_cast<int>(detail::get_int(ij, "n_infected", p.n_infected, ipath, errs));
      p.n_resistant = static_cast<int>(detail::get_int(ij, "n_resistant", p.n_resistant, ipath, errs));
      p.n_decontaminant =
          static_cast<int>(detail::get_int(ij, "n_decontaminant", p.n_decontaminant, ipath, errs));
      p.contact_radius = detail::get_num(ij, "contact_radius", p.contact_radius, ipath, errs);
      p.p_infect = detail::get_num(ij, "p_infect", p.p_infect, ipath, errs);
      p.p_neutralize = detail::get_num(ij, "p_neutralize", p.p_neutralize, ipath, errs);
      p.step_size = detail::get_num(ij, "step_size", p.step_size, ipath, errs);
    }
  }

  if (doc.contains("indicators")) {
    if (!doc["indicators"].is_array()) {
      errs.push_back("$.indicators: expected an array");
    } else {
      for (std::size_t i = 0; i < doc["indicators"].size(); ++i) {
        const detail::json& ij = doc["indicators"][i];
        const std::string ipath = "$.indicators[" + std::to_string(i) + "]";
        if (!ij.is_object()) {
          errs.push_back(ipath + ": expected an object");
          continue;
        }
        detail::check_keys(ij, ipath, {"entity", "attribute", "individual_threshold", "weight"},
                           errs);
        IndicatorSpec spec;
        spec.entity = detail::get_str(ij, "entity", "", ipath, errs);
        spec.attribute = detail::get_str(ij, "attribute", "", ipath, errs);
        spec.individual_threshold =
            detail::get_num(ij, "individual_threshold", 0.0, ipath, errs);
        spec.weight = detail::get_num(ij, "weight", 1.0, ipath, errs);
        if (spec.entity.empty()) errs.push_back(ipath + ".entity: required");
        if (spec.attribute.empty()) errs.push_back(ipath + ".attribute: required");
        cfg.indicators.push_back(spec);
      }
    }
  }

  if (doc.contains("map2d")) {
    if (!doc["map2d"].is_object()) errs.push_back("$.map2d: expected an object");
    else cfg.map2d = detail::parse_map2d(doc["map2d"], "$.map2d", errs);
  }
  if (doc.contains("map3d")) {
    if (!doc["map3d"].is_object()) errs.push_back("$.map3d: expected an object");
    else cfg.map3d = detail::parse_map3d(doc["map3d"], "$.map3d", errs);
  }

  if (doc.contains("cbr")) {
    const detail::json& cj = doc["cbr"];
    const std::string cpath = "$.cbr";
    if (!cj.is_object()) {
      errs.push_back(cpath + ": expected an object");
    } else {
      detail::check_keys(cj, cpath,
                         {"feed_interval", "acceptance_threshold", "encoding", "update_maps",
                          "auto_solution_on_no_match", "normal_recommendation",
                          "alert_recommendation"},
                         errs);
      cfg.cbr.feed_interval = detail::get_int(cj, "feed_interval", cfg.cbr.feed_interval, cpath, errs);
      cfg.cbr.acceptance_threshold =
          detail::get_num(cj, "acceptance_threshold", cfg.cbr.acceptance_threshold, cpath, errs);
      cfg.cbr.update_maps = detail::get_bool(cj, "update_maps", cfg.cbr.update_maps, cpath, errs);
      cfg.cbr.auto_solution_on_no_match = detail::get_bool(
          cj, "auto_solution_on_no_match", cfg.cbr.auto_solution_on_no_match, cpath, errs);
      cfg.cbr.normal_recommendation = detail::get_str(cj, "normal_recommendation",
                                                      cfg.cbr.normal_recommendation, cpath, errs);
      cfg.cbr.alert_recommendation = detail::get_str(cj, "alert_recommendation",
                                                     cfg.cbr.alert_recommendation, cpath, errs);
      if (cj.contains("encoding")) {
        const detail::json& ej = cj["encoding"];
        const std::string epath = cpath + ".encoding";
        if (!ej.is_object()) {
          errs.push_back(epath + ": expected an object");
        } else {
          detail::check_keys(ej, epath, {"policy", "sigma"}, errs);
          const std::string policy = detail::get_str(ej, "policy", "strict", epath, errs);
          try {
            cfg.cbr.encoding.policy = encoding_policy_from_string(policy);
          } catch (const Error& e) {
            errs.push_back(epath + ".policy: " + e.what());
          }
          cfg.cbr.encoding.sigma = detail::get_num(ej, "sigma", cfg.cbr.encoding.sigma, epath, errs);
        }
      }
    }
  }

  if (errs.empty()) {
    finalize_registry(cfg);
    for (const auto& msg : validate_config(cfg)) errs.push_back(msg);
  }
  if (!errs.empty()) {
    std::string msg = "config " + path + ":";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw Error(msg);
  }
  return cfg;
}

namespace detail {

inline ojson quadruplet_to_json(const Quadruplet& q) {
  ojson j;
  j["e"] = q.entity;
  j["a"] = q.attribute;
  j["v"] = q.value;
  j["t"] = q.cycle;
  return j;
}

inline Quadruplet quadruplet_from_json(const json& j) {
  if (!j.is_object()) throw Error("quadruplet: expected an object");
  for (const char* key : {"e", "a", "v", "t"}) {
    if (!j.contains(key)) throw Error(std::string("quadruplet: missing \"") + key + "\"");
  }
  if (!j["e"].is_string() || !j["a"].is_string() || !j["v"].is_number() ||
      !j["t"].is_number_integer()) {
    throw Error("quadruplet: bad field type");
  }
  return {j["e"].get<std::string>(), j["a"].get<std::string>(), j["v"].get<double>(),
          j["t"].get<std::int64_t>()};
}

inline ojson case_to_json(const Case& c) {
  ojson j;
  j["id"] = c.id;
  j["problem"] = ojson::array();
  for (const auto& q : c.problem) j["problem"].push_back(quadruplet_to_json(q));
  j["solution"] = ojson{{"state", to_code(c.solution.state)},
                        {"recommendation", c.solution.recommendation}};
  j["provenance"] = to_string(c.provenance);
  if (!c.adaptation.empty()) {
    j["adaptation"] = ojson::array();
    for (const auto& s : c.adaptation) {
      j["adaptation"].push_back(ojson{{"from", s.from}, {"to", s.to}, {"lca", s.lca}});
    }
  }
  if (c.retrieved_from) j["retrieved_from"] = *c.retrieved_from;
  if (c.retrieval_distance) j["retrieval_distance"] = *c.retrieval_distance;
  return j;
}

inline Case case_from_json(const json& j) {
  if (!j.is_object()) throw Error("case: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "id" && key != "problem" && key != "solution" && key != "provenance" &&
        key != "adaptation" && key != "retrieved_from" && key != "retrieval_distance") {
      throw Error("case: unknown key \"" + key + "\"");
    }
  }
  Case c;
  if (!j.contains("id") || !j["id"].is_number_integer()) throw Error("case: missing integer id");
  c.id = j["id"].get<std::int64_t>();
  if (!j.contains("problem") || !j["problem"].is_array()) {
    throw Error("case: missing problem array");
  }
  for (const auto& qj : j["problem"]) c.problem.push_back(quadruplet_from_json(qj));
  if (!j.contains("solution") || !j["solution"].is_object()) {
    throw Error("case: missing solution object");
  }
  const json& sj = j["solution"];
  if (!sj.contains("state") || !sj["state"].is_string() || !sj.contains("recommendation") ||
      !sj["recommendation"].is_string()) {
    throw Error("case: solution needs state and recommendation strings");
  }
  c.solution.state = alert_state_from_code(sj["state"].get<std::string>());
  c.solution.recommendation = sj["recommendation"].get<std::string>();
  if (!j.contains("provenance") || !j["provenance"].is_string()) {
    throw Error("case: missing provenance");
  }
  c.provenance = provenance_from_string(j["provenance"].get<std::string>());
  if (j.contains("adaptation")) {
    if (!j["adaptation"].is_array()) throw Error("case: adaptation must be an array");
    for (const auto& aj : j["adaptation"]) {
      if (!aj.is_object() || !aj.contains("from") || !aj.contains("to") || !aj.contains("lca") ||
          !aj["from"].is_string() || !aj["to"].is_string() || !aj["lca"].is_string()) {
        throw Error("case: adaptation step needs from/to/lca strings");
      }
      c.adaptation.push_back({aj["from"].get<std::string>(), aj["to"].get<std::string>(),
                              aj["lca"].get<std::string>()});
    }
  }
  if (j.contains("retrieved_from")) {
    if (!j["retrieved_from"].is_number_integer()) {
      throw Error("case: retrieved_from must be an integer");
    }
    c.retrieved_from = j["retrieved_from"].get<std::int64_t>();
  }
  if (j.contains("retrieval_distance")) {
    if (!j["retrieval_distance"].is_number()) {
      throw Error("case: retrieval_distance must be a number");
    }
    c.retrieval_distance = j["retrieval_distance"].get<double>();
  }
  return c;
}

}  // namespace detail

inline constexpr const char* kCasebaseFormat = "orsim-casebase";
inline constexpr const char* kPendingFormat = "orsim-pending";

// One header line, then one case per line; appending case lines keeps the
// file loadable.
inline void save_casebase(const CaseBase& cb, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write case base: " + path);
  detail::ojson header;
  header["format"] = kCasebaseFormat;
  header["next_id"] = cb.next_id;
  header["acceptance_threshold"] = cb.acceptance_threshold;
  header["encoding"] = detail::ojson{{"policy", to_string(cb.encoding.policy)},
                                     {"sigma", cb.encoding.sigma}};
  out << header.dump() << "\n";
  for (const auto& c : cb.cases) out << detail::case_to_json(c).dump() << "\n";
  if (!out) throw Error("write failed: " + path);
}

inline CaseBase load_casebase(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open case base: " + path);
  CaseBase cb;
  std::string line;
  std::size_t lineno = 0;
  std::int64_t max_id = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + " line " + std::to_string(lineno);
    detail::json j;
    try {
      j = detail::json::parse(line);
    } catch (const detail::json::parse_error& e) {
      throw Error(where + ": " + e.what());
    }
    if (lineno == 1) {
      if (!j.is_object() || j.value("format", "") != kCasebaseFormat) {
        throw Error(where + ": expected a " + std::string(kCasebaseFormat) + " header");
      }
      cb.next_id = j.value("next_id", std::int64_t{0});
      cb.acceptance_threshold = j.value("acceptance_threshold", 1.2);
      if (j.contains("encoding") && j["encoding"].is_object()) {
        cb.encoding.policy =
            encoding_policy_from_string(j["encoding"].value("policy", "strict"));
        cb.encoding.sigma = j["encoding"].value("sigma", 0.5);
      }
      continue;
    }
    try {
      cb.cases.push_back(detail::case_from_json(j));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    max_id = std::max(max_id, cb.cases.back().id);
  }
  cb.next_id = std::max(cb.next_id, max_id + 1);
  const auto violations = validate_casebase(cb);
  if (!violations.empty()) throw Error(path + ": " + violations.front());
  return cb;
}

inline void save_pending(const std::vector<PendingCase>& pending, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write pending queue: " + path);
  detail::ojson header;
  header["format"] = kPendingFormat;
  out << header.dump() << "\n";
  for (const auto& p : pending) {
    detail::ojson j;
    j["resolved"] = p.resolved;
    j["case"] = detail::case_to_json(p.c);
    out << j.dump() << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

inline std::vector<PendingCase> load_pending(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pending queue: " + path);
  std::vector<PendingCase> pending;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + " line " + std::to_string(lineno);
    detail::json j;
    try {
      j = detail::json::parse(line);
    } catch (const detail::json::parse_error& e) {
      throw Error(where + ": " + e.what());
    }
    if (lineno == 1) {
      if (!j.is_object() || j.value("format", "") != kPendingFormat) {
        throw Error(where + ": expected a " + std::string(kPendingFormat) + " header");
      }
      continue;
    }
    if (!j.is_object() || !j.contains("case")) throw Error(where + ": expected a pending record");
    PendingCase p;
    p.resolved = j.value("resolved", false);
    try {
      p.c = detail::case_from_json(j["case"]);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    pending.push_back(std::move(p));
  }
  return pending;
}

// Reads the problem out of a single-case JSON file (a full case record or a
// bare {"problem": [...]} object).
inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open case file: " + path);
  detail::json j;
  try {
    j = detail::json::parse(in);
  } catch (const detail::json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("problem") || !j["problem"].is_array()) {
    throw Error(path + ": expected an object with a problem array");
  }
  Problem p;
  for (const auto& qj : j["problem"]) {
    try {
      p.push_back(detail::quadruplet_from_json(qj));
    } catch (const Error& e) {
      throw Error(path + ": " + e.what());
    }
  }
  return p;
}

namespace detail {

inline std::string fmt_f6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace detail

// Fixed column order; fixed 6-decimal notation so identical runs serialize
// byte-identically.
inline void write_trace(const SimTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write trace: " + path);
  out << "cycle";
  for (const auto& name : trace.indicator_names) out << "," << name;
  for (const auto& name : trace.indicator_names) out << ",alert_" << name;
  out << ",collective_score,collective_alert,crit_level,cbr_case_id,recommendation\n";
  for (const auto& row : trace.rows) {
    out << row.cycle;
    for (double v : row.indicator_values) out << "," << detail::fmt_f6(v);
    for (bool b : row.individual_alerts) out << "," << (b ? 1 : 0);
    out << "," << detail::fmt_f6(row.collective_score);
    out << "," << (row.collective_alert ? 1 : 0);
    out << ",";
    if (row.crit_level) out << trace.levels.name_of(*row.crit_level);
    out << ",";
    if (row.cbr_case_id) out << *row.cbr_case_id;
    out << "," << detail::csv_quote(row.recommendation) << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

inline void write_batch_summary(const BatchResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write batch summary: " + path);
  out << "run,seed,first_collective_alert,score_at_cycle_" << result.reference_cycle << "\n";
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& r = result.runs[i];
    out << i << "," << r.seed << ",";
    if (r.first_collective_alert) out << *r.first_collective_alert;
    else out << "none";
    out << "," << detail::fmt_f6(r.score_at_reference) << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace orsim
