#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "orsim/domain.hpp"

namespace orsim {

// Ordered criticality levels, least critical first. The set is
// config-definable; these indices name the default scale.
inline constexpr int kAcceptable = 0;
inline constexpr int kModerate = 1;
inline constexpr int kCritical = 2;

struct LevelScale {
  std::vector<std::string> names{"acceptable", "moderate", "critical"};

  int max_level() const { return static_cast<int>(names.size()) - 1; }

  const std::string& name_of(int level) const {
    if (level < 0 || level > max_level()) throw Error("criticality level out of range");
    return names[static_cast<std::size_t>(level)];
  }

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<int>(i);
    }
    throw Error("unknown criticality level: \"" + name + "\"");
  }

  bool operator==(const LevelScale&) const = default;
};

// Indicator axis with a half-open domain [lo, hi); the value hi itself is
// absorbed by the cells touching it.
struct AxisDef {
  std::string indicator;  // "entity.attribute"
  double lo = 0.0;
  double hi = 1.0;

  bool operator==(const AxisDef&) const = default;
};

namespace detail {

// Low edge closed, high edge open; a cell edge on the domain top absorbs it.
inline bool interval_contains(double lo, double hi, double domain_hi, double v) {
  if (v < lo) return false;
  if (v < hi) return true;
  return v == hi && hi == domain_hi;
}

}  // namespace detail

struct Cell2D {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  int level = kAcceptable;

  bool operator==(const Cell2D&) const = default;
};

// Cells tile the two-axis domain exactly; validate_partition checks that.
struct RegionMap2D {
  AxisDef x_axis;
  AxisDef y_axis;
  std::vector<Cell2D> cells;
  LevelScale levels;

  bool contains_point(const Cell2D& c, double x, double y) const {
    return detail::interval_contains(c.x0, c.x1, x_axis.hi, x) &&
           detail::interval_contains(c.y0, c.y1, y_axis.hi, y);
  }

  bool operator==(const RegionMap2D&) const = default;
};

struct Box3D {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  int level = kCritical;

  bool operator==(const Box3D&) const = default;
};

// Sparse axis-aligned volumes over a three-axis domain; space covered by no
// box classifies as default_level.
struct RegionMap3D {
  std::array<AxisDef, 3> axes;
  std::vector<Box3D> boxes;
  int default_level = kAcceptable;
  LevelScale levels;

  bool contains_point(const Box3D& b, const std::array<double, 3>& p) const {
    for (std::size_t d = 0; d < 3; ++d) {
      if (!detail::interval_contains(b.lo[d], b.hi[d], axes[d].hi, p[d])) return false;
    }
    return true;
  }

  bool operator==(const RegionMap3D&) const = default;
};

namespace detail {

inline void check_domain(const AxisDef& axis, double v) {
  if (!(v >= axis.lo && v <= axis.hi)) {
    throw Error("point outside domain of axis \"" + axis.indicator + "\": " + fmt_g(v) +
                " not in [" + fmt_g(axis.lo) + "," + fmt_g(axis.hi) + "]");
  }
}

}  // namespace detail

inline int classify2d(const RegionMap2D& map, double x, double y) {
  detail::check_domain(map.x_axis, x);
  detail::check_domain(map.y_axis, y);
  for (const auto& cell : map.cells) {
    if (map.contains_point(cell, x, y)) return cell.level;
  }
  throw Error("no cell contains (" + detail::fmt_g(x) + "," + detail::fmt_g(y) +
              "); map is not a partition");
}

inline int classify3d(const RegionMap3D& map, const std::array<double, 3>& p) {
  for (std::size_t d = 0; d < 3; ++d) detail::check_domain(map.axes[d], p[d]);
  for (const auto& box : map.boxes) {
    if (map.contains_point(box, p)) return box.level;
  }
  return map.default_level;
}

namespace detail {

inline std::string rect_str(double x0, double x1, double y0, double y1) {
  return "[" + fmt_g(x0) + "," + fmt_g(x1) + ")x[" + fmt_g(y0) + "," + fmt_g(y1) + ")";
}

}  // namespace detail

// Reports every gap and overlap in the tiling, via coordinate compression:
// each elementary rectangle of the break grid must be covered exactly once.
inline std::vector<std::string> validate_partition(const RegionMap2D& map) {
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    const auto& c = map.cells[i];
    if (!(c.x0 < c.x1 && c.y0 < c.y1)) {
      violations.push_back("cell " + std::to_string(i) + " is degenerate");
    }
    if (c.x0 < map.x_axis.lo || c.x1 > map.x_axis.hi || c.y0 < map.y_axis.lo ||
        c.y1 > map.y_axis.hi) {
      violations.push_back("cell " + std::to_string(i) + " extends outside the domain");
    }
    if (c.level < 0 || c.level > map.levels.max_level()) {
      violations.push_back("cell " + std::to_string(i) + " has an unknown level");
    }
  }
  if (!violations.empty()) return violations;

  std::vector<double> xs{map.x_axis.lo, map.x_axis.hi};
  std::vector<double> ys{map.y_axis.lo, map.y_axis.hi};
  for (const auto& c : map.cells) {
    xs.push_back(c.x0);
    xs.push_back(c.x1);
    ys.push_back(c.y0);
    ys.push_back(c.y1);
  }
  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(xs);
  dedupe(ys);

  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double cx = (xs[i] + xs[i + 1]) / 2;
      const double cy = (ys[j] + ys[j + 1]) / 2;
      std::vector<std::size_t> covering;
      for (std::size_t k = 0; k < map.cells.size(); ++k) {
        const auto& c = map.cells[k];
        if (cx >= c.x0 && cx < c.x1 && cy >= c.y0 && cy < c.y1) covering.push_back(k);
      }
      if (covering.empty()) {
        violations.push_back("gap: " + detail::rect_str(xs[i], xs[i + 1], ys[j], ys[j + 1]) +
                             " is uncovered");
      } else if (covering.size() > 1) {
        std::string msg = "overlap: cells";
        for (auto k : covering) msg += " " + std::to_string(k);
        msg += " all cover " + detail::rect_str(xs[i], xs[i + 1], ys[j], ys[j + 1]);
        violations.push_back(msg);
      }
    }
  }
  return violations;
}

// Boxes must lie inside the domain and be pairwise disjoint; uncovered space
// is legal (default level).
inline std::vector<std::string> validate_partition(const RegionMap3D& map) {
  std::vector<std::string> violations;
  for (std::size_t i = 0; i < map.boxes.size(); ++i) {
    const auto& b = map.boxes[i];
    for (std::size_t d = 0; d < 3; ++d) {
      if (!(b.lo[d] < b.hi[d])) {
        violations.push_back("box " + std::to_string(i) + " is degenerate");
        break;
      }
    }
    for (std::size_t d = 0; d < 3; ++d) {
      if (b.lo[d] < map.axes[d].lo || b.hi[d] > map.axes[d].hi) {
        violations.push_back("box " + std::to_string(i) + " extends outside the domain");
        break;
      }
    }
    if (b.level < 0 || b.level > map.levels.max_level()) {
      violations.push_back("box " + std::to_string(i) + " has an unknown level");
    }
  }
  if (map.default_level < 0 || map.default_level > map.levels.max_level()) {
    violations.push_back("default level is unknown");
  }
  for (std::size_t i = 0; i < map.boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < map.boxes.size(); ++j) {
      bool overlap = true;
      for (std::size_t d = 0; d < 3; ++d) {
        if (map.boxes[i].hi[d] <= map.boxes[j].lo[d] ||
            map.boxes[j].hi[d] <= map.boxes[i].lo[d]) {
          overlap = false;
          break;
        }
      }
      if (overlap) {
        violations.push_back("boxes " + std::to_string(i) + " and " + std::to_string(j) +
                             " overlap");
      }
    }
  }
  return violations;
}

}  // namespace orsim
