#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "orsim/domain.hpp"

namespace orsim {

// Exponential growth law f(t) = a * e^(k*t), saturating at the attribute's
// scale top. The same law drives personnel tiredness (scale top 5) and
// material efficiency loss (scale top 3).
struct FatigueParams {
  double a = 1.0;      // initial value, f(0)
  double k = 0.001;    // per-cycle growth constant
  std::string fatigue_type = "sleep";
  double scale_max = 5.0;

  std::vector<std::string> validate() const {
    std::vector<std::string> v;
    if (!(a > 0.0)) v.push_back("fatigue a must be > 0");
    if (!(scale_max > 0.0)) v.push_back("fatigue scale_max must be > 0");
    if (a > scale_max) v.push_back("fatigue a must be <= scale_max");
    if (!std::isfinite(a) || !std::isfinite(k) || !std::isfinite(scale_max)) {
      v.push_back("fatigue parameters must be finite");
    }
    return v;
  }

  bool operator==(const FatigueParams&) const = default;
};

// Closed-form evaluation; no per-step error accumulates. Overflow before
// clamping saturates to scale_max.
inline double fatigue_at(const FatigueParams& p, std::int64_t t) {
  if (t < 0) throw Error("fatigue_at: cycle must be non-negative");
  const double v = p.a * std::exp(p.k * static_cast<double>(t));
  if (!std::isfinite(v)) return p.scale_max;
  return std::min(v, p.scale_max);
}

// Writes the law's value for this cycle into an agent's attribute map.
inline void step_fatigue(std::map<AttributeKey, double>& attributes, const AttributeKey& key,
                         const FatigueParams& p, std::int64_t cycle) {
  attributes[key] = fatigue_at(p, cycle);
}

}  // namespace orsim
