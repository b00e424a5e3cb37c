#include <gtest/gtest.h>

#include <cstdint>

#include "oracles.hpp"
#include "orsim/infection.hpp"

using namespace orsim;

namespace {

int count_state(const ParticleWorld& w, ParticleState s) {
  int n = 0;
  for (const auto& p : w.particles) {
    if (p.state == s) ++n;
  }
  return n;
}

}  // namespace

TEST(InfectionInit, DefaultCountsAndPrevalence) {
  const InfectionParams params;  // 495 susceptible, 5 infected
  const ParticleWorld w = init_population(params, 1);
  EXPECT_EQ(w.particles.size(), 500u);
  EXPECT_EQ(count_state(w, ParticleState::Susceptible), 495);
  EXPECT_EQ(count_state(w, ParticleState::Infected), 5);
  EXPECT_EQ(count_state(w, ParticleState::Resistant), 0);
  const InfectionMetrics m = infection_metrics(w);
  EXPECT_EQ(m.prevalence, 0.01);
  EXPECT_EQ(m.total, 500);
}

TEST(InfectionInit, PositionsInsideTheArena) {
  const ParticleWorld w = init_population({}, 9);
  for (const auto& p : w.particles) {
    EXPECT_GE(p.pos.x, 0.0);
    EXPECT_LE(p.pos.x, 1.0);
    EXPECT_GE(p.pos.y, 0.0);
    EXPECT_LE(p.pos.y, 1.0);
  }
}

TEST(InfectionInit, SequentialIds) {
  InfectionParams params;
  params.n_decontaminant = 3;
  const ParticleWorld w = init_population(params, 2);
  for (std::size_t i = 0; i < w.particles.size(); ++i) {
    EXPECT_EQ(w.particles[i].id, static_cast<int>(i));
  }
  for (std::size_t i = 0; i < w.decontaminants.size(); ++i) {
    EXPECT_EQ(w.decontaminants[i].id, static_cast<int>(i));
  }
}

TEST(InfectionInit, EmptyPopulationIsAnError) {
  InfectionParams params;
  params.n_susceptible = 0;
  params.n_infected = 0;
  params.n_resistant = 0;
  EXPECT_THROW(init_population(params, 1), Error);
}

TEST(InfectionInit, SameSeedSameWorld) {
  InfectionParams params;
  params.n_decontaminant = 2;
  EXPECT_EQ(init_population(params, 77), init_population(params, 77));
  EXPECT_NE(init_population(params, 77), init_population(params, 78));
}

TEST(InfectionStep, ConservationHolds) {
  ParticleWorld w = init_population({}, 5);
  const int total = static_cast<int>(w.particles.size());
  for (int step = 0; step < 300; ++step) {
    step_infection(w);
    const InfectionMetrics m = infection_metrics(w);
    ASSERT_EQ(m.susceptible + m.infected + m.resistant, total);
  }
}

TEST(InfectionStep, NoSourceNoSpread) {
  InfectionParams params;
  params.n_susceptible = 100;
  params.n_infected = 0;
  ParticleWorld w = init_population(params, 3);
  for (int step = 0; step < 100; ++step) step_infection(w);
  EXPECT_EQ(count_state(w, ParticleState::Infected), 0);
}

TEST(InfectionStep, AllResistantStaysResistant) {
  InfectionParams params;
  params.n_susceptible = 0;
  params.n_infected = 0;
  params.n_resistant = 40;
  params.n_decontaminant = 4;
  ParticleWorld w = init_population(params, 4);
  for (int step = 0; step < 100; ++step) {
    const StepEvents e = step_infection(w);
    EXPECT_EQ(e.infections, 0);
    EXPECT_EQ(e.neutralizations, 0);
  }
  EXPECT_EQ(count_state(w, ParticleState::Resistant), 40);
}

TEST(InfectionStep, NoDecontaminantsMeansMonotoneGrowth) {
  InfectionParams params;
  params.n_susceptible = 80;
  params.n_infected = 20;
  params.p_infect = 1.0;
  params.contact_radius = 0.05;
  ParticleWorld w = init_population(params, 6);
  int prev = count_state(w, ParticleState::Infected);
  for (int step = 0; step < 150; ++step) {
    step_infection(w);
    const int cur = count_state(w, ParticleState::Infected);
    ASSERT_GE(cur, prev);
    prev = cur;
  }
  EXPECT_GT(prev, 20);
}

TEST(InfectionStep, NoContagionMeansMonotoneDecline) {
  InfectionParams params;
  params.n_susceptible = 20;
  params.n_infected = 80;
  params.n_decontaminant = 10;
  params.p_infect = 0.0;
  params.contact_radius = 0.05;
  ParticleWorld w = init_population(params, 7);
  int prev = count_state(w, ParticleState::Infected);
  for (int step = 0; step < 150; ++step) {
    step_infection(w);
    const int cur = count_state(w, ParticleState::Infected);
    ASSERT_LE(cur, prev);
    prev = cur;
  }
  EXPECT_LT(prev, 80);
}

TEST(InfectionStep, EventsMatchStateDeltas) {
  InfectionParams params;
  params.n_susceptible = 60;
  params.n_infected = 30;
  params.n_decontaminant = 6;
  params.contact_radius = 0.06;
  ParticleWorld w = init_population(params, 8);
  for (int step = 0; step < 100; ++step) {
    const int before = count_state(w, ParticleState::Infected);
    const StepEvents e = step_infection(w);
    const int after = count_state(w, ParticleState::Infected);
    ASSERT_EQ(after - before, e.infections - e.neutralizations);
  }
}

TEST(InfectionStep, MatchesBruteForceOracle) {
  InfectionParams params;
  params.n_susceptible = 30;
  params.n_infected = 12;
  params.n_resistant = 4;
  params.n_decontaminant = 4;
  params.contact_radius = 0.06;
  params.p_infect = 0.4;
  params.p_neutralize = 0.5;
  params.step_size = 0.02;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ParticleWorld engine = init_population(params, seed);
    ParticleWorld brute = engine;
    for (int step = 0; step < 25; ++step) {
      const StepEvents a = step_infection(engine);
      const StepEvents b = oracle::step_brute(brute);
      ASSERT_EQ(a, b) << "seed " << seed << " step " << step;
      ASSERT_EQ(engine, brute) << "seed " << seed << " step " << step;
    }
  }
}

TEST(InfectionStep, DeterministicEventSequence) {
  InfectionParams params;
  params.n_susceptible = 50;
  params.n_infected = 10;
  params.n_decontaminant = 3;
  params.contact_radius = 0.05;
  ParticleWorld a = init_population(params, 12);
  ParticleWorld b = init_population(params, 12);
  for (int step = 0; step < 80; ++step) {
    ASSERT_EQ(step_infection(a), step_infection(b));
  }
  EXPECT_EQ(a, b);
}

TEST(InfectionMetrics, HalfInfectedIsHalfPrevalence) {
  InfectionParams params;
  params.n_susceptible = 250;
  params.n_infected = 250;
  const ParticleWorld w = init_population(params, 1);
  EXPECT_EQ(infection_metrics(w).prevalence, 0.5);
}

TEST(InfectionMetrics, AllSusceptibleIsZero) {
  InfectionParams params;
  params.n_susceptible = 10;
  params.n_infected = 0;
  const ParticleWorld w = init_population(params, 1);
  EXPECT_EQ(infection_metrics(w).prevalence, 0.0);
}

TEST(InfectionParamsValidate, CatchesBadValues) {
  InfectionParams params;
  params.n_susceptible = -1;
  EXPECT_FALSE(params.validate().empty());
  params = {};
  params.contact_radius = 0.0;
  EXPECT_FALSE(params.validate().empty());
  params = {};
  params.p_infect = 1.5;
  EXPECT_FALSE(params.validate().empty());
  params = {};
  params.step_size = -0.01;
  EXPECT_FALSE(params.validate().empty());
  EXPECT_TRUE(InfectionParams{}.validate().empty());
}
