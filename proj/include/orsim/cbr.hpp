#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orsim/criticality.hpp"
#include "orsim/domain.hpp"

namespace orsim {

// How the two categorical quadruplet elements (E, A) enter the quotient
// distance. Strict is the reference policy.
struct CategoricalEncoding {
  enum class Policy { Strict, TaxonomyWeighted };

  Policy policy = Policy::Strict;
  double sigma = 0.5;  // quotient for same-parent labels under TaxonomyWeighted

  std::vector<std::string> validate() const {
    std::vector<std::string> v;
    if (!(sigma > 0.0 && sigma < 1.0)) v.push_back("sigma must be strictly between 0 and 1");
    return v;
  }

  bool operator==(const CategoricalEncoding&) const = default;
};

inline std::string to_string(CategoricalEncoding::Policy p) {
  return p == CategoricalEncoding::Policy::Strict ? "strict" : "taxonomy";
}

inline CategoricalEncoding::Policy encoding_policy_from_string(const std::string& s) {
  if (s == "strict") return CategoricalEncoding::Policy::Strict;
  if (s == "taxonomy") return CategoricalEncoding::Policy::TaxonomyWeighted;
  throw Error("unknown encoding policy: \"" + s + "\"");
}

struct CaseBase {
  std::vector<Case> cases;
  std::int64_t next_id = 0;
  double acceptance_threshold = 1.2;
  CategoricalEncoding encoding;

  const Case* find(std::int64_t id) const {
    for (const auto& c : cases) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }

  Case* find(std::int64_t id) {
    return const_cast<Case*>(static_cast<const CaseBase*>(this)->find(id));
  }

  bool operator==(const CaseBase&) const = default;
};

inline std::vector<std::string> validate_casebase(const CaseBase& cb) {
  std::vector<std::string> v;
  if (!(cb.acceptance_threshold > 0)) v.push_back("acceptance threshold must be > 0");
  for (const auto& msg : cb.encoding.validate()) v.push_back(msg);
  std::map<std::int64_t, int> seen;
  for (const auto& c : cb.cases) {
    if (++seen[c.id] == 2) v.push_back("duplicate case id " + std::to_string(c.id));
    if (c.id >= cb.next_id) v.push_back("case id " + std::to_string(c.id) + " >= next_id");
  }
  return v;
}

// A case held for expert review. The case may already sit in the base (the
// engine retains immediately and queues in parallel); id < 0 means it was
// never retained.
struct PendingCase {
  Case c;
  bool resolved = false;

  bool operator==(const PendingCase&) const = default;
};

struct IndicatorValue {
  EntityLabel entity;
  AttributeKey attribute;
  double value = 0.0;

  bool operator==(const IndicatorValue&) const = default;
};

// One quadruplet per monitored indicator, in the given order, all stamped
// with the same cycle.
inline Problem elaborate(const std::vector<IndicatorValue>& snapshot, std::int64_t cycle) {
  if (snapshot.empty()) throw Error("elaborate requires at least one monitored indicator");
  Problem p;
  p.reserve(snapshot.size());
  for (const auto& iv : snapshot) p.push_back({iv.entity, iv.attribute, iv.value, cycle});
  return p;
}

namespace detail {

// min/max quotient; both zero compare as identical, a single zero as
// maximally distant.
inline double numeric_quotient(double x, double y) {
  if (x == y) return 1.0;
  if (x == 0.0 || y == 0.0) return 0.0;
  return x < y ? x / y : y / x;
}

inline double categorical_quotient(const std::string& a, const std::string& b,
                                   const CategoricalEncoding& enc, const Taxonomy& tax) {
  if (a == b) return 1.0;
  if (enc.policy == CategoricalEncoding::Policy::TaxonomyWeighted && tax.contains(a) &&
      tax.contains(b) && !tax.is_root(a) && !tax.is_root(b) &&
      tax.parent_of(a) == tax.parent_of(b)) {
    return enc.sigma;
  }
  return 0.0;
}

}  // namespace detail

// Distance contribution of one (target, source) quadruplet pair:
// sqrt of the summed squared quotient deviations of the four elements.
inline double pair_term(const Quadruplet& c, const Quadruplet& s, const CategoricalEncoding& enc,
                        const Taxonomy& tax) {
  const double ie = detail::categorical_quotient(c.entity, s.entity, enc, tax);
  const double ia = detail::categorical_quotient(c.attribute, s.attribute, enc, tax);
  const double iv = detail::numeric_quotient(c.value, s.value);
  const double it = detail::numeric_quotient(static_cast<double>(c.cycle),
                                             static_cast<double>(s.cycle));
  const double de = 1.0 - ie;
  const double da = 1.0 - ia;
  const double dv = 1.0 - iv;
  const double dt = 1.0 - it;
  return std::sqrt(de * de + da * da + dv * dv + dt * dt);
}

// Mean pair term over all n*n (target, source) quadruplet pairs. Lower is
// more similar. Identical problems short-circuit to exactly 0; the double
// sum itself does not vanish on equal inputs once n > 1, and the identity
// axiom takes precedence.
inline double distance(const Problem& target, const Problem& source,
                       const CategoricalEncoding& enc, const Taxonomy& tax) {
  if (target.empty() || source.empty()) throw Error("distance requires non-empty problems");
  if (target.size() != source.size()) {
    throw Error("quadruplet count mismatch: " + std::to_string(target.size()) + " vs " +
                std::to_string(source.size()));
  }
  if (target == source) return 0.0;
  double sum = 0.0;
  for (const auto& c : target) {
    for (const auto& s : source) sum += pair_term(c, s, enc, tax);
  }
  return sum / (static_cast<double>(target.size()) * static_cast<double>(source.size()));
}

struct RankedCase {
  std::int64_t id = -1;
  double distance = 0.0;

  bool operator==(const RankedCase&) const = default;
};

// Count-filtered candidates, ascending by distance, ties broken by lower id.
inline std::vector<RankedCase> retrieve(const Problem& target, const CaseBase& cb,
                                        const Taxonomy& tax) {
  std::vector<RankedCase> out;
  if (target.empty()) return out;
  for (const auto& c : cb.cases) {
    if (c.problem.size() != target.size()) continue;
    out.push_back({c.id, distance(target, c.problem, cb.encoding, tax)});
  }
  std::sort(out.begin(), out.end(), [](const RankedCase& a, const RankedCase& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
  return out;
}

struct ReuseOutcome {
  enum class Kind { Inherited, Adapted, NoMatch };

  Kind kind = Kind::NoMatch;
  Solution solution;
  AdaptationPath path;                              // Adapted only
  std::int64_t source_id = -1;                      // -1 when NoMatch
  double distance = 0.0;
  std::map<std::string, double> class_thresholds;  // inherited from the LCA class

  bool operator==(const ReuseOutcome&) const = default;
};

// Applies the best candidate when it clears the acceptance threshold.
// Entity labels matching pairwise inherit the solution as-is; labels that
// differ adapt by substitution when every differing pair shares a proper
// (non-root) ancestor class.
inline ReuseOutcome reuse(const Problem& target, const std::vector<RankedCase>& candidates,
                          const CaseBase& cb, const Taxonomy& tax) {
  ReuseOutcome out;
  if (candidates.empty()) return out;
  const RankedCase best = candidates.front();
  if (best.distance > cb.acceptance_threshold) return out;
  const Case* src = cb.find(best.id);
  if (!src) throw Error("candidate case " + std::to_string(best.id) + " not in the base");
  if (src->problem.size() != target.size()) {
    throw Error("candidate case " + std::to_string(best.id) + " bypassed the count filter");
  }

  AdaptationPath path;
  std::map<std::string, double> thresholds;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const EntityLabel& from = src->problem[i].entity;
    const EntityLabel& to = target[i].entity;
    if (from == to) continue;
    if (!tax.contains(from) || !tax.contains(to)) return ReuseOutcome{};
    const std::string lca = lowest_common_ancestor(from, to, tax);
    if (tax.is_root(lca)) return ReuseOutcome{};
    path.push_back({from, to, lca});
    if (auto it = tax.class_thresholds.find(lca); it != tax.class_thresholds.end()) {
      thresholds.emplace(it->first, it->second);
    }
  }
  out.kind = path.empty() ? ReuseOutcome::Kind::Inherited : ReuseOutcome::Kind::Adapted;
  out.solution = src->solution;
  out.path = std::move(path);
  out.source_id = best.id;
  out.distance = best.distance;
  out.class_thresholds = std::move(thresholds);
  return out;
}

struct Verdict {
  enum class Kind { Accept, Edit, Reject };

  Kind kind = Kind::Accept;
  Solution edited;  // Edit only

  bool operator==(const Verdict&) const = default;
};

// Resolves one pending case. Accept and Edit yield an expert-reviewed case;
// Reject yields nothing. A pending case resolves exactly once.
inline std::optional<Case> review(PendingCase& p, const Verdict& verdict) {
  if (p.resolved) throw Error("pending case already resolved");
  p.resolved = true;
  switch (verdict.kind) {
    case Verdict::Kind::Reject: return std::nullopt;
    case Verdict::Kind::Edit: {
      Case c = p.c;
      c.solution = verdict.edited;
      c.provenance = Provenance::ExpertReviewed;
      return c;
    }
    case Verdict::Kind::Accept: {
      Case c = p.c;
      c.provenance = Provenance::ExpertReviewed;
      return c;
    }
  }
  throw Error("bad verdict kind");
}

namespace detail {

inline Cell2D* locate_cell(RegionMap2D& map, double x, double y) {
  if (!(x >= map.x_axis.lo && x <= map.x_axis.hi)) return nullptr;
  if (!(y >= map.y_axis.lo && y <= map.y_axis.hi)) return nullptr;
  for (auto& cell : map.cells) {
    if (map.contains_point(cell, x, y)) return &cell;
  }
  return nullptr;
}

inline Box3D* locate_box(RegionMap3D& map, const std::array<double, 3>& p) {
  for (std::size_t d = 0; d < 3; ++d) {
    if (!(p[d] >= map.axes[d].lo && p[d] <= map.axes[d].hi)) return nullptr;
  }
  for (auto& box : map.boxes) {
    if (map.contains_point(box, p)) return &box;
  }
  return nullptr;
}

}  // namespace detail

// Appends the case under a fresh id. An Alert-state case whose 2- or 3-value
// point lands in a region below the top level promotes that region one step
// (the retained experience sharpens the criticality knowledge). Pass null
// maps to disable promotion.
inline std::int64_t retain(Case c, CaseBase& cb, RegionMap2D* map2 = nullptr,
                           RegionMap3D* map3 = nullptr) {
  c.id = cb.next_id++;
  if (c.solution.state == AlertState::Alert) {
    if (c.problem.size() == 2 && map2 != nullptr) {
      if (Cell2D* cell = detail::locate_cell(*map2, c.problem[0].value, c.problem[1].value)) {
        if (cell->level < map2->levels.max_level()) ++cell->level;
      }
    } else if (c.problem.size() == 3 && map3 != nullptr) {
      const std::array<double, 3> p{c.problem[0].value, c.problem[1].value, c.problem[2].value};
      if (Box3D* box = detail::locate_box(*map3, p)) {
        if (box->level < map3->levels.max_level()) ++box->level;
      }
    }
  }
  cb.cases.push_back(std::move(c));
  return cb.cases.back().id;
}

// Retain guarded by the pending case's once-only contract.
inline std::int64_t retain_pending(PendingCase& p, CaseBase& cb, RegionMap2D* map2 = nullptr,
                                   RegionMap3D* map3 = nullptr) {
  if (p.resolved) throw Error("pending case already resolved");
  p.resolved = true;
  return retain(p.c, cb, map2, map3);
}

// Applies an expert verdict against the base. A pending case the engine
// already retained is amended in place (or removed on Reject); one that was
// never retained enters the base on Accept/Edit.
inline std::string apply_review(CaseBase& cb, PendingCase& p, const Verdict& verdict) {
  const std::int64_t pending_id = p.c.id;
  const std::optional<Case> reviewed = review(p, verdict);
  Case* existing = pending_id >= 0 ? cb.find(pending_id) : nullptr;
  if (!reviewed) {
    if (existing != nullptr) {
      std::erase_if(cb.cases, [&](const Case& c) { return c.id == pending_id; });
      return "rejected, case " + std::to_string(pending_id) + " removed from the base";
    }
    return "rejected, case discarded";
  }
  if (existing != nullptr) {
    existing->solution = reviewed->solution;
    existing->provenance = reviewed->provenance;
    return "case " + std::to_string(pending_id) + " marked expert_reviewed";
  }
  const std::int64_t id = retain(*reviewed, cb);
  return "case " + std::to_string(id) + " retained as expert_reviewed";
}

}  // namespace orsim
