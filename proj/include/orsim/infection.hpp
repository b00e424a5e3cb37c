#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "orsim/domain.hpp"
#include "orsim/rng.hpp"

namespace orsim {

enum class ParticleState { Susceptible, Infected, Resistant };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

struct Particle {
  Vec2 pos;
  ParticleState state = ParticleState::Susceptible;
  int id = -1;

  bool operator==(const Particle&) const = default;
};

// Mobile cleaning agent; returns infected particles it touches to
// susceptible, so re-infection stays possible.
struct Decontaminant {
  Vec2 pos;
  int id = -1;

  bool operator==(const Decontaminant&) const = default;
};

struct InfectionParams {
  int n_susceptible = 495;
  int n_infected = 5;
  int n_resistant = 0;
  int n_decontaminant = 0;
  double contact_radius = 0.02;
  double p_infect = 0.2;
  double p_neutralize = 0.5;
  double step_size = 0.01;

  std::vector<std::string> validate() const {
    std::vector<std::string> v;
    if (n_susceptible < 0) v.push_back("n_susceptible must be >= 0");
    if (n_infected < 0) v.push_back("n_infected must be >= 0");
    if (n_resistant < 0) v.push_back("n_resistant must be >= 0");
    if (n_decontaminant < 0) v.push_back("n_decontaminant must be >= 0");
    if (!(contact_radius > 0) || !std::isfinite(contact_radius)) {
      v.push_back("contact_radius must be > 0 and finite");
    }
    if (!(p_infect >= 0 && p_infect <= 1)) v.push_back("p_infect must be in [0,1]");
    if (!(p_neutralize >= 0 && p_neutralize <= 1)) v.push_back("p_neutralize must be in [0,1]");
    if (!(step_size > 0) || !std::isfinite(step_size)) {
      v.push_back("step_size must be > 0 and finite");
    }
    return v;
  }

  bool operator==(const InfectionParams&) const = default;
};

struct StepEvents {
  int infections = 0;
  int neutralizations = 0;

  bool operator==(const StepEvents&) const = default;
};

struct InfectionMetrics {
  int susceptible = 0;
  int infected = 0;
  int resistant = 0;
  int total = 0;
  double prevalence = 0.0;  // infected / total

  bool operator==(const InfectionMetrics&) const = default;
};

struct ParticleWorld {
  std::vector<Particle> particles;
  std::vector<Decontaminant> decontaminants;
  Rng rng;
  InfectionParams params;

  bool operator==(const ParticleWorld&) const = default;
};

namespace detail {

// Reflect into [0,1]; one fold per side suffices for sub-unit steps.
inline double reflect_unit(double v) {
  if (v < 0.0) v = -v;
  if (v > 1.0) v = 2.0 - v;
  return v;
}

inline bool in_contact(const Vec2& a, const Vec2& b, double radius) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= radius * radius;
}

// Uniform bin grid over the unit square for radius-bounded neighbor queries.
// Bin edge >= radius, so contacts only ever span adjacent bins.
class BinGrid {
 public:
  explicit BinGrid(double radius) {
    dim_ = static_cast<int>(std::floor(1.0 / radius));
    if (dim_ < 1) dim_ = 1;
    if (dim_ > 1024) dim_ = 1024;
    bins_.resize(static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_));
  }

  void insert(const Vec2& p, int index) { bins_[bin_of(p)].push_back(index); }

  // Visits candidate indices in the 3x3 bin neighborhood of p.
  template <typename Fn>
  void for_neighbors(const Vec2& p, Fn&& fn) const {
    const int bx = coord(p.x);
    const int by = coord(p.y);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const int x = bx + dx;
        const int y = by + dy;
        if (x < 0 || x >= dim_ || y < 0 || y >= dim_) continue;
        for (int idx : bins_[static_cast<std::size_t>(x) * dim_ + y]) fn(idx);
      }
    }
  }

 private:
  int coord(double v) const {
    int c = static_cast<int>(v * dim_);
    if (c < 0) c = 0;
    if (c >= dim_) c = dim_ - 1;
    return c;
  }

  std::size_t bin_of(const Vec2& p) const {
    return static_cast<std::size_t>(coord(p.x)) * dim_ + coord(p.y);
  }

  int dim_ = 1;
  std::vector<std::vector<int>> bins_;
};

}  // namespace detail

// Positions are drawn susceptible block first, then infected, then resistant,
// then decontaminants; x before y for each. Ids are sequential from 0 within
// each population.
inline ParticleWorld init_population(const InfectionParams& params, std::uint64_t seed) {
  const auto violations = params.validate();
  if (!violations.empty()) throw Error("invalid infection params: " + violations.front());
  const int total = params.n_susceptible + params.n_infected + params.n_resistant;
  if (total <= 0) throw Error("invalid infection params: population is empty");

  ParticleWorld world;
  world.params = params;
  world.rng = Rng(seed);
  world.particles.reserve(static_cast<std::size_t>(total));
  auto spawn = [&world](int count, ParticleState state) {
    for (int i = 0; i < count; ++i) {
      Particle p;
      p.pos.x = world.rng.uniform01();
      p.pos.y = world.rng.uniform01();
      p.state = state;
      p.id = static_cast<int>(world.particles.size());
      world.particles.push_back(p);
    }
  };
  spawn(params.n_susceptible, ParticleState::Susceptible);
  spawn(params.n_infected, ParticleState::Infected);
  spawn(params.n_resistant, ParticleState::Resistant);
  for (int i = 0; i < params.n_decontaminant; ++i) {
    Decontaminant d;
    d.pos.x = world.rng.uniform01();
    d.pos.y = world.rng.uniform01();
    d.id = i;
    world.decontaminants.push_back(d);
  }
  return world;
}

// One synchronous step. Draw order is part of the contract:
//   1. every particle, in index order, draws one heading in [0, 2*pi) and
//      moves step_size along it, reflecting off the walls;
//   2. every decontaminant, in index order, does the same;
//   3. states are snapshotted; susceptible particles in ascending index order
//      draw one bernoulli(p_infect) per snapshot-infected contact until one
//      succeeds;
//   4. snapshot-infected particles in ascending index order draw one
//      bernoulli(p_neutralize) per decontaminant contact until one succeeds.
// New states apply after both passes, so infection and neutralization both
// read the pre-step states.
inline StepEvents step_infection(ParticleWorld& world) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (auto& p : world.particles) {
    const double angle = world.rng.uniform(0.0, two_pi);
    p.pos.x = detail::reflect_unit(p.pos.x + world.params.step_size * std::cos(angle));
    p.pos.y = detail::reflect_unit(p.pos.y + world.params.step_size * std::sin(angle));
  }
  for (auto& d : world.decontaminants) {
    const double angle = world.rng.uniform(0.0, two_pi);
    d.pos.x = detail::reflect_unit(d.pos.x + world.params.step_size * std::cos(angle));
    d.pos.y = detail::reflect_unit(d.pos.y + world.params.step_size * std::sin(angle));
  }

  const double radius = world.params.contact_radius;
  std::vector<ParticleState> next;
  next.reserve(world.particles.size());
  for (const auto& p : world.particles) next.push_back(p.state);

  detail::BinGrid infected_grid(radius);
  for (std::size_t i = 0; i < world.particles.size(); ++i) {
    if (world.particles[i].state == ParticleState::Infected) {
      infected_grid.insert(world.particles[i].pos, static_cast<int>(i));
    }
  }

  StepEvents events;
  for (std::size_t i = 0; i < world.particles.size(); ++i) {
    if (world.particles[i].state != ParticleState::Susceptible) continue;
    std::vector<int> contacts;
    infected_grid.for_neighbors(world.particles[i].pos, [&](int j) {
      if (detail::in_contact(world.particles[i].pos, world.particles[j].pos, radius)) {
        contacts.push_back(j);
      }
    });
    std::sort(contacts.begin(), contacts.end());
    for (int j : contacts) {
      (void)j;
      if (world.rng.bernoulli(world.params.p_infect)) {
        next[i] = ParticleState::Infected;
        ++events.infections;
        break;
      }
    }
  }

  if (!world.decontaminants.empty()) {
    detail::BinGrid decon_grid(radius);
    for (std::size_t i = 0; i < world.decontaminants.size(); ++i) {
      decon_grid.insert(world.decontaminants[i].pos, static_cast<int>(i));
    }
    for (std::size_t i = 0; i < world.particles.size(); ++i) {
      if (world.particles[i].state != ParticleState::Infected) continue;
      std::vector<int> contacts;
      decon_grid.for_neighbors(world.particles[i].pos, [&](int j) {
        if (detail::in_contact(world.particles[i].pos, world.decontaminants[j].pos, radius)) {
          contacts.push_back(j);
        }
      });
      std::sort(contacts.begin(), contacts.end());
      for (int j : contacts) {
        (void)j;
        if (world.rng.bernoulli(world.params.p_neutralize)) {
          next[i] = ParticleState::Susceptible;
          ++events.neutralizations;
          break;
        }
      }
    }
  }

  for (std::size_t i = 0; i < world.particles.size(); ++i) world.particles[i].state = next[i];
  return events;
}

inline InfectionMetrics infection_metrics(const ParticleWorld& world) {
  InfectionMetrics m;
  for (const auto& p : world.particles) {
    switch (p.state) {
      case ParticleState::Susceptible: ++m.susceptible; break;
      case ParticleState::Infected: ++m.infected; break;
      case ParticleState::Resistant: ++m.resistant; break;
    }
  }
  m.total = static_cast<int>(world.particles.size());
  m.prevalence = m.total > 0 ? static_cast<double>(m.infected) / m.total : 0.0;
  return m;
}

}  // namespace orsim
