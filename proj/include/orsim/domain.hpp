#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace orsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Entity and attribute names are lowercase string tokens. They are checked
// where they enter the system (config load, case validation), not on every
// use.
using EntityLabel = std::string;
using AttributeKey = std::string;

// One observation: attribute A of entity E had value V at cycle t.
// One cycle corresponds to 30 simulated seconds.
struct Quadruplet {
  EntityLabel entity;
  AttributeKey attribute;
  double value = 0.0;
  std::int64_t cycle = 0;

  bool operator==(const Quadruplet&) const = default;
};

using Problem = std::vector<Quadruplet>;

enum class AlertState { Normal, Alert };

// Wire codes: "N" for Normal, "O" for Alert.
inline std::string to_code(AlertState s) { return s == AlertState::Alert ? "O" : "N"; }

inline AlertState alert_state_from_code(const std::string& code) {
  if (code == "O") return AlertState::Alert;
  if (code == "N") return AlertState::Normal;
  throw Error("unknown alert state code: \"" + code + "\"");
}

struct Solution {
  AlertState state = AlertState::Normal;
  std::string recommendation;  // non-empty

  bool operator==(const Solution&) const = default;
};

enum class Provenance { Auto, Adapted, ExpertReviewed };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Auto: return "auto";
    case Provenance::Adapted: return "adapted";
    case Provenance::ExpertReviewed: return "expert_reviewed";
  }
  throw Error("bad provenance value");
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "auto") return Provenance::Auto;
  if (s == "adapted") return Provenance::Adapted;
  if (s == "expert_reviewed") return Provenance::ExpertReviewed;
  throw Error("unknown provenance: \"" + s + "\"");
}

// One entity-label substitution, justified by the class both labels share.
struct AdaptationStep {
  EntityLabel from;
  EntityLabel to;
  std::string lca;

  bool operator==(const AdaptationStep&) const = default;
};

// Ordered rewriting steps from the source problem to the target.
using AdaptationPath = std::vector<AdaptationStep>;

struct Case {
  std::int64_t id = -1;  // assigned by the case base at retain time
  Problem problem;
  Solution solution;
  Provenance provenance = Provenance::Auto;
  AdaptationPath adaptation;  // non-empty iff provenance == Adapted
  std::optional<std::int64_t> retrieved_from;
  std::optional<double> retrieval_distance;

  bool operator==(const Case&) const = default;
};

// Rooted tree of classes; leaves are entity labels, interior nodes are
// classes. Every node except the root has exactly one parent.
class Taxonomy {
 public:
  Taxonomy() = default;

  static Taxonomy from_edges(const std::vector<std::pair<std::string, std::string>>& parent_child) {
    Taxonomy tax;
    for (const auto& [parent, child] : parent_child) {
      if (parent.empty() || child.empty()) throw Error("taxonomy edge with empty node name");
      if (parent == child) throw Error("taxonomy edge \"" + parent + "\" -> itself");
      auto [it, inserted] = tax.parent_.emplace(child, parent);
      if (!inserted) throw Error("taxonomy node \"" + child + "\" has more than one parent");
      tax.children_[parent].push_back(child);
      tax.children_.try_emplace(child);
    }
    std::vector<std::string> roots;
    for (const auto& [node, kids] : tax.children_) {
      (void)kids;
      if (!tax.parent_.contains(node)) roots.push_back(node);
    }
    if (roots.empty()) throw Error("taxonomy has no root (cycle)");
    if (roots.size() > 1) {
      std::string msg = "taxonomy has multiple roots:";
      for (const auto& r : roots) msg += " " + r;
      throw Error(msg);
    }
    tax.root_ = roots.front();
    // A walk from any node must reach the root within |nodes| steps.
    const std::size_t cap = tax.children_.size();
    for (const auto& [node, kids] : tax.children_) {
      (void)kids;
      std::string cur = node;
      std::size_t steps = 0;
      while (cur != tax.root_) {
        cur = tax.parent_.at(cur);
        if (++steps > cap) throw Error("taxonomy contains a cycle at \"" + node + "\"");
      }
    }
    return tax;
  }

  // Entities named in the paper's figures. The patient species collapses to
  // a single leaf under the root.
  static Taxonomy default_taxonomy() {
    return from_edges({{"root", "personal"},
                       {"personal", "surgeon"},
                       {"personal", "nurse"},
                       {"root", "material"},
                       {"material", "bistoury"},
                       {"root", "infection"},
                       {"infection", "staphy"},
                       {"root", "patient"}});
  }

  bool empty() const { return children_.empty(); }
  bool contains(const std::string& name) const { return children_.contains(name); }

  bool is_leaf(const std::string& name) const {
    auto it = children_.find(name);
    return it != children_.end() && it->second.empty();
  }

  const std::string& root() const { return root_; }

  const std::string& parent_of(const std::string& node) const {
    auto it = parent_.find(node);
    if (it == parent_.end()) throw Error("taxonomy: \"" + node + "\" has no parent");
    return it->second;
  }

  bool is_root(const std::string& node) const { return node == root_; }

  // node, parent, ..., root
  std::vector<std::string> ancestors(const std::string& node) const {
    require(node);
    std::vector<std::string> chain{node};
    std::string cur = node;
    while (cur != root_) {
      cur = parent_.at(cur);
      chain.push_back(cur);
    }
    return chain;
  }

  void require(const std::string& label) const {
    if (!contains(label)) throw Error("unknown taxonomy label: \"" + label + "\"");
  }

  // Optional per-class threshold annotations (config-provided); adaptation
  // reports the source class's entry alongside the inherited solution.
  std::map<std::string, double> class_thresholds;

  bool operator==(const Taxonomy& other) const {
    return root_ == other.root_ && parent_ == other.parent_ &&
           class_thresholds == other.class_thresholds;
  }

 private:
  std::string root_;
  std::map<std::string, std::string> parent_;
  std::map<std::string, std::vector<std::string>> children_;
};

// Deepest node that is an ancestor of both labels; a label is an ancestor of
// itself.
inline std::string lowest_common_ancestor(const EntityLabel& a, const EntityLabel& b,
                                          const Taxonomy& tax) {
  tax.require(a);
  tax.require(b);
  const auto chain_a = tax.ancestors(a);
  for (std::string cur = b;; cur = tax.parent_of(cur)) {
    for (const auto& node : chain_a) {
      if (node == cur) return cur;
    }
    if (tax.is_root(cur)) break;
  }
  return tax.root();
}

// Scale bounds for validation plus the divisor used when a value is
// normalized for the collective score. Count attributes leave `hi` unset.
struct AttributeScale {
  double lo = 0.0;
  std::optional<double> hi;
  double norm_divisor = 1.0;

  bool operator==(const AttributeScale&) const = default;
};

class AttributeRegistry {
 public:
  // fatigue 0..5, mat_tiredness 0..3, infection a non-negative count
  // normalized by the particle total (rewritten at config load).
  static AttributeRegistry defaults() {
    AttributeRegistry reg;
    reg.set("fatigue", {0.0, 5.0, 5.0});
    reg.set("mat_tiredness", {0.0, 3.0, 3.0});
    reg.set("infection", {0.0, std::nullopt, 500.0});
    return reg;
  }

  void set(const AttributeKey& name, AttributeScale scale) { scales_[name] = scale; }

  bool contains(const AttributeKey& name) const { return scales_.contains(name); }

  const AttributeScale& scale_of(const AttributeKey& name) const {
    auto it = scales_.find(name);
    if (it == scales_.end()) throw Error("unknown attribute: \"" + name + "\"");
    return it->second;
  }

  const std::map<AttributeKey, AttributeScale>& all() const { return scales_; }

  bool operator==(const AttributeRegistry&) const = default;

 private:
  std::map<AttributeKey, AttributeScale> scales_;
};

namespace detail {

inline std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace detail

// Every invariant violation of the case, as messages; empty means ok.
inline std::vector<std::string> validate_case(const Case& c, const AttributeRegistry& registry,
                                              const Taxonomy& taxonomy) {
  std::vector<std::string> violations;
  if (c.problem.empty()) violations.push_back("empty problem");
  for (const auto& q : c.problem) {
    if (!taxonomy.contains(q.entity) || !taxonomy.is_leaf(q.entity)) {
      violations.push_back("unknown entity: \"" + q.entity + "\"");
    }
    if (!registry.contains(q.attribute)) {
      violations.push_back("unknown attribute: \"" + q.attribute + "\"");
      continue;
    }
    if (!std::isfinite(q.value)) {
      violations.push_back("non-finite value for " + q.attribute);
      continue;
    }
    const auto& scale = registry.scale_of(q.attribute);
    const bool below = q.value < scale.lo;
    const bool above = scale.hi.has_value() && q.value > *scale.hi;
    if (below || above) {
      const std::string hi = scale.hi ? detail::fmt_g(*scale.hi) : "inf";
      violations.push_back(q.attribute + " out of scale [" + detail::fmt_g(scale.lo) + "," + hi +
                           "]");
    }
    if (q.cycle < 0) violations.push_back("negative cycle");
  }
  if (c.solution.recommendation.empty()) violations.push_back("empty recommendation");
  if (c.provenance == Provenance::Adapted && c.adaptation.empty()) {
    violations.push_back("adapted case missing adaptation path");
  }
  return violations;
}

}  // namespace orsim
