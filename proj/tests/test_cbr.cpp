#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "orsim/cbr.hpp"
#include "orsim/criticality.hpp"
#include "orsim/rng.hpp"

using namespace orsim;

namespace {

// Hand-computed double sums for the figure's worked retrieval (strict policy).
constexpr double kDist35 = 1.193801492950997;
constexpr double kDist8 = 1.575615136946950;

Problem paper_target() {
  return {{"surgeon", "fatigue", 2.7, 400}, {"staphy", "infection", 270.0, 400}};
}

Case paper_case(std::int64_t id) {
  Case c;
  c.id = id;
  c.provenance = Provenance::ExpertReviewed;
  switch (id) {
    case 1:
      c.problem = {{"surgeon", "fatigue", 3.2, 700}};
      c.solution = {AlertState::Normal, "Normal"};
      break;
    case 8:
      c.problem = {{"bistoury", "fatigue", 0.9, 1200}, {"nurse", "fatigue", 2.1, 1200}};
      c.solution = {AlertState::Normal, "Normal"};
      break;
    case 35:
      c.problem = {{"nurse", "fatigue", 2.5, 300}, {"staphy", "infection", 280.0, 300}};
      c.solution = {AlertState::Alert, "Pause Pers."};
      break;
    default:
      throw Error("not a figure case");
  }
  return c;
}

CaseBase paper_base() {
  CaseBase cb;
  cb.cases = {paper_case(1), paper_case(8), paper_case(35)};
  cb.next_id = 36;
  return cb;
}

RegionMap2D two_cell_map() {
  RegionMap2D map;
  map.x_axis = {"surgeon.fatigue", 0.0, 5.0};
  map.y_axis = {"staphy.infection", 0.0, 500.0};
  map.cells.push_back({0.0, 2.5, 0.0, 500.0, kAcceptable});
  map.cells.push_back({2.5, 5.0, 0.0, 500.0, kCritical});
  return map;
}

}  // namespace

TEST(Elaborate, OneQuadrupletPerIndicatorInOrder) {
  const Problem p = elaborate({{"nurse", "fatigue", 1.5}}, 1200);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (Quadruplet{"nurse", "fatigue", 1.5, 1200}));

  const Problem two =
      elaborate({{"surgeon", "fatigue", 2.7}, {"staphy", "infection", 270.0}}, 400);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].cycle, 400);
  EXPECT_EQ(two[1].cycle, 400);
  EXPECT_EQ(two[0].entity, "surgeon");
  EXPECT_EQ(two[1].entity, "staphy");
}

TEST(Elaborate, EmptySnapshotThrows) {
  EXPECT_THROW(elaborate({}, 0), Error);
}

TEST(Distance, IdenticalProblemsAreZero) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const Problem p = paper_target();
  EXPECT_EQ(distance(p, p, {}, tax), 0.0);
}

TEST(Distance, WorkedExampleStrict) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const CategoricalEncoding strict;
  const Problem target = paper_target();
  EXPECT_NEAR(distance(target, paper_case(35).problem, strict, tax), kDist35, 1e-9);
  EXPECT_NEAR(distance(target, paper_case(8).problem, strict, tax), kDist8, 1e-9);
}

TEST(Distance, WorkedExamplePairTerms) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const CategoricalEncoding strict;
  const Problem target = paper_target();
  const Problem source = paper_case(35).problem;
  EXPECT_NEAR(pair_term(target[0], source[0], strict, tax), 1.033434549669175, 1e-12);
  EXPECT_NEAR(pair_term(target[0], source[1], strict, tax), 1.744507744439148, 1e-12);
  EXPECT_NEAR(pair_term(target[1], source[0], strict, tax), 1.744725541557615, 1e-12);
  EXPECT_NEAR(pair_term(target[1], source[1], strict, tax), 0.252538136138053, 1e-12);
}

TEST(Distance, WorkedExampleTaxonomyWeighted) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const CategoricalEncoding enc{CategoricalEncoding::Policy::TaxonomyWeighted, 0.5};
  const Problem target = paper_target();
  const double d35 = distance(target, paper_case(35).problem, enc, tax);
  const double d8 = distance(target, paper_case(8).problem, enc, tax);
  EXPECT_NEAR(d35, 1.076418688668751, 1e-9);
  EXPECT_NEAR(d8, 1.485673118839450, 1e-9);
  // the accept/reject decisions hold under both shipped policies
  EXPECT_LT(d35, 1.2);
  EXPECT_GT(d8, 1.2);
}

TEST(Distance, MatchesIndependentOracle) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0.0, 4.0));
    const Problem a = oracle::random_problem(rng, n);
    const Problem b = oracle::random_problem(rng, n);
    const CategoricalEncoding strict;
    const CategoricalEncoding weighted{CategoricalEncoding::Policy::TaxonomyWeighted, 0.5};
    ASSERT_NEAR(distance(a, b, strict, tax), oracle::distance(a, b, false), 1e-12);
    ASSERT_NEAR(distance(a, b, weighted, tax), oracle::distance(a, b, true), 1e-12);
  }
}

TEST(Distance, IdentitySymmetryAndRange) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const CategoricalEncoding enc;
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0.0, 4.0));
    const Problem a = oracle::random_problem(rng, n);
    const Problem b = oracle::random_problem(rng, n);
    ASSERT_EQ(distance(a, a, enc, tax), 0.0);
    const double ab = distance(a, b, enc, tax);
    const double ba = distance(b, a, enc, tax);
    ASSERT_NEAR(ab, ba, 1e-12);
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 2.0);
  }
}

TEST(Distance, RejectsBadShapes) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const Problem two = paper_target();
  const Problem one = {{"nurse", "fatigue", 1.5, 1200}};
  EXPECT_THROW(distance({}, one, {}, tax), Error);
  EXPECT_THROW(distance(one, {}, {}, tax), Error);
  try {
    distance(two, one, {}, tax);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("quadruplet count mismatch: 2 vs 1"),
              std::string::npos);
  }
}

TEST(Retrieve, EmptyBaseGivesNoCandidates) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  EXPECT_TRUE(retrieve(paper_target(), CaseBase{}, tax).empty());
}

TEST(Retrieve, WorkedExampleFiltersAndRanks) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const auto ranked = retrieve(paper_target(), paper_base(), tax);
  ASSERT_EQ(ranked.size(), 2u);  // case 1 dropped by the count filter
  EXPECT_EQ(ranked[0].id, 35);
  EXPECT_EQ(ranked[1].id, 8);
  EXPECT_NEAR(ranked[0].distance, kDist35, 1e-9);
  EXPECT_NEAR(ranked[1].distance, kDist8, 1e-9);
}

TEST(Retrieve, TiesBreakTowardTheLowerId) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  CaseBase cb;
  Case a = paper_case(35);
  a.id = 7;
  Case b = paper_case(35);
  b.id = 3;
  cb.cases = {a, b};
  cb.next_id = 8;
  const auto ranked = retrieve(paper_target(), cb, tax);
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_EQ(ranked[0].id, 3);
  EXPECT_EQ(ranked[1].id, 7);
}

TEST(Retrieve, RankingMatchesBruteForceOracle) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    CaseBase cb;
    const int n_cases = 1 + static_cast<int>(rng.uniform(0.0, 100.0));
    for (int i = 0; i < n_cases; ++i) {
      Case c;
      c.id = cb.next_id++;
      c.problem = oracle::random_problem(rng, 1 + static_cast<std::size_t>(rng.uniform(0.0, 3.0)));
      c.solution = {AlertState::Normal, "Normal"};
      cb.cases.push_back(c);
    }
    const Problem target = oracle::random_problem(rng, 2);
    const auto got = retrieve(target, cb, tax);
    const auto want = oracle::rank(target, cb.cases);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].id, want[i].id) << "trial " << trial << " rank " << i;
      ASSERT_NEAR(got[i].distance, want[i].dist, 1e-12);
    }
  }
}

TEST(Reuse, WorkedExampleAdaptsNurseToSurgeon) {
  Taxonomy tax = Taxonomy::default_taxonomy();
  tax.class_thresholds["personal"] = 4.5;
  const CaseBase cb = paper_base();
  const Problem target = paper_target();
  const auto outcome = reuse(target, retrieve(target, cb, tax), cb, tax);
  EXPECT_EQ(outcome.kind, ReuseOutcome::Kind::Adapted);
  EXPECT_EQ(outcome.solution.state, AlertState::Alert);
  EXPECT_EQ(outcome.solution.recommendation, "Pause Pers.");
  EXPECT_EQ(outcome.source_id, 35);
  ASSERT_EQ(outcome.path.size(), 1u);
  EXPECT_EQ(outcome.path[0].from, "nurse");
  EXPECT_EQ(outcome.path[0].to, "surgeon");
  EXPECT_EQ(outcome.path[0].lca, "personal");
  ASSERT_TRUE(outcome.class_thresholds.contains("personal"));
  EXPECT_EQ(outcome.class_thresholds.at("personal"), 4.5);
}

TEST(Reuse, ThresholdRejectsDistantBest) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  CaseBase cb;
  cb.cases = {paper_case(8)};
  cb.next_id = 9;
  const Problem target = paper_target();
  const auto outcome = reuse(target, retrieve(target, cb, tax), cb, tax);
  EXPECT_EQ(outcome.kind, ReuseOutcome::Kind::NoMatch);
  EXPECT_EQ(outcome.source_id, -1);
}

TEST(Reuse, MatchingEntitiesInheritWithoutPath) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  CaseBase cb;
  Case src = paper_case(35);
  src.problem[0].entity = "surgeon";  // align both entities with the target
  cb.cases = {src};
  cb.next_id = 36;
  const Problem target = paper_target();
  const auto outcome = reuse(target, retrieve(target, cb, tax), cb, tax);
  EXPECT_EQ(outcome.kind, ReuseOutcome::Kind::Inherited);
  EXPECT_TRUE(outcome.path.empty());
  EXPECT_EQ(outcome.solution.recommendation, "Pause Pers.");
}

TEST(Reuse, RootLcaBlocksAdaptation) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  CaseBase cb;
  Case src = paper_case(35);
  src.problem[0].entity = "bistoury";  // bistoury vs surgeon meet only at root
  src.problem[0].value = 2.7;          // keep the distance under tau
  src.problem[0].cycle = 400;
  src.problem[1] = {"staphy", "infection", 270.0, 400};
  cb.cases = {src};
  cb.next_id = 36;
  const Problem target = paper_target();
  const auto ranked = retrieve(target, cb, tax);
  ASSERT_FALSE(ranked.empty());
  ASSERT_LE(ranked[0].distance, cb.acceptance_threshold);
  EXPECT_EQ(reuse(target, ranked, cb, tax).kind, ReuseOutcome::Kind::NoMatch);
}

TEST(Reuse, UnknownLabelBlocksAdaptation) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  CaseBase cb;
  Case src = paper_case(35);
  src.problem[0].entity = "nurse";
  cb.cases = {src};
  cb.next_id = 36;
  Problem target = paper_target();
  target[0].entity = "droid";
  const auto ranked = retrieve(target, cb, tax);
  ASSERT_FALSE(ranked.empty());
  if (ranked[0].distance <= cb.acceptance_threshold) {
    EXPECT_EQ(reuse(target, ranked, cb, tax).kind, ReuseOutcome::Kind::NoMatch);
  }
}

TEST(Reuse, EmptyCandidatesIsNoMatch) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  EXPECT_EQ(reuse(paper_target(), {}, CaseBase{}, tax).kind, ReuseOutcome::Kind::NoMatch);
}

TEST(Reuse, AdaptedPathsAlwaysRecordProperLcas) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    CaseBase cb;
    Case c;
    c.id = cb.next_id++;
    c.problem = oracle::random_problem(rng, 2);
    c.solution = {AlertState::Normal, "Normal"};
    cb.cases.push_back(c);
    const Problem target = oracle::random_problem(rng, 2);
    const auto outcome = reuse(target, retrieve(target, cb, tax), cb, tax);
    if (outcome.kind != ReuseOutcome::Kind::Adapted) continue;
    for (const auto& step : outcome.path) {
      ASSERT_FALSE(tax.is_root(step.lca));
      ASSERT_EQ(lowest_common_ancestor(step.from, step.to, tax), step.lca);
    }
  }
}

TEST(Review, AcceptKeepsSolutionAndMarksReviewed) {
  PendingCase p{paper_case(35), false};
  p.c.provenance = Provenance::Adapted;
  p.c.adaptation = {{"nurse", "surgeon", "personal"}};
  const auto out = review(p, {Verdict::Kind::Accept, {}});
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->provenance, Provenance::ExpertReviewed);
  EXPECT_EQ(out->solution.recommendation, "Pause Pers.");
  EXPECT_TRUE(p.resolved);
}

TEST(Review, EditReplacesTheSolution) {
  PendingCase p{paper_case(35), false};
  const auto out = review(p, {Verdict::Kind::Edit, {AlertState::Normal, "Normal"}});
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->solution.state, AlertState::Normal);
  EXPECT_EQ(out->solution.recommendation, "Normal");
  EXPECT_EQ(out->provenance, Provenance::ExpertReviewed);
}

TEST(Review, RejectDiscards) {
  PendingCase p{paper_case(35), false};
  EXPECT_FALSE(review(p, {Verdict::Kind::Reject, {}}).has_value());
  EXPECT_TRUE(p.resolved);
}

TEST(Review, DoubleResolveThrows) {
  PendingCase p{paper_case(35), false};
  review(p, {Verdict::Kind::Accept, {}});
  EXPECT_THROW(review(p, {Verdict::Kind::Accept, {}}), Error);
}

TEST(Retain, FirstCaseGetsIdZero) {
  CaseBase cb;
  Case c = paper_case(35);
  c.id = -1;
  const std::int64_t id = retain(c, cb);
  EXPECT_EQ(id, 0);
  EXPECT_EQ(cb.cases.size(), 1u);
  EXPECT_EQ(cb.next_id, 1);
  EXPECT_EQ(cb.cases[0].id, 0);
}

TEST(Retain, IdsIncrease) {
  CaseBase cb;
  EXPECT_EQ(retain(paper_case(35), cb), 0);
  EXPECT_EQ(retain(paper_case(8), cb), 1);
  EXPECT_EQ(retain(paper_case(35), cb), 2);
  EXPECT_TRUE(validate_casebase(cb).empty());
}

TEST(Retain, AlertCasePromotesItsCell) {
  CaseBase cb;
  RegionMap2D map = two_cell_map();
  ASSERT_EQ(classify2d(map, 1.0, 100.0), kAcceptable);
  Case c;
  c.problem = {{"surgeon", "fatigue", 1.0, 50}, {"staphy", "infection", 100.0, 50}};
  c.solution = {AlertState::Alert, "Surveillance"};
  retain(c, cb, &map, nullptr);
  EXPECT_EQ(classify2d(map, 1.0, 100.0), kModerate);
  EXPECT_EQ(classify2d(map, 3.0, 100.0), kCritical);  // other cell untouched
}

TEST(Retain, NormalCaseLeavesMapsAlone) {
  CaseBase cb;
  RegionMap2D map = two_cell_map();
  const RegionMap2D before = map;
  Case c;
  c.problem = {{"surgeon", "fatigue", 1.0, 50}, {"staphy", "infection", 100.0, 50}};
  c.solution = {AlertState::Normal, "Normal"};
  retain(c, cb, &map, nullptr);
  EXPECT_EQ(map, before);
}

TEST(Retain, PromotionStopsAtTheTopLevel) {
  CaseBase cb;
  RegionMap2D map = two_cell_map();
  Case c;
  c.problem = {{"surgeon", "fatigue", 4.0, 50}, {"staphy", "infection", 100.0, 50}};
  c.solution = {AlertState::Alert, "Surveillance"};
  retain(c, cb, &map, nullptr);
  EXPECT_EQ(classify2d(map, 4.0, 100.0), kCritical);  // already at max, unchanged
}

TEST(Retain, ThreeQuadrupletAlertPromotesItsBox) {
  CaseBase cb;
  RegionMap3D map;
  map.axes = {AxisDef{"a.x", 0.0, 10.0}, AxisDef{"b.y", 0.0, 10.0}, AxisDef{"c.z", 0.0, 10.0}};
  map.default_level = kAcceptable;
  map.boxes.push_back({{0.0, 0.0, 0.0}, {5.0, 5.0, 5.0}, kAcceptable});
  Case c;
  c.problem = {{"surgeon", "fatigue", 1.0, 9}, {"bistoury", "mat_tiredness", 1.0, 9},
               {"staphy", "infection", 1.0, 9}};
  c.solution = {AlertState::Alert, "Surveillance"};
  retain(c, cb, nullptr, &map);
  EXPECT_EQ(classify3d(map, {1.0, 1.0, 1.0}), kModerate);
  EXPECT_EQ(classify3d(map, {7.0, 7.0, 7.0}), kAcceptable);  // default level untouched
}

TEST(Retain, PointOutsideTheMapPromotesNothing) {
  CaseBase cb;
  RegionMap2D map = two_cell_map();
  const RegionMap2D before = map;
  Case c;
  c.problem = {{"surgeon", "fatigue", 9.0, 50}, {"staphy", "infection", 100.0, 50}};
  c.solution = {AlertState::Alert, "Surveillance"};
  retain(c, cb, &map, nullptr);  // fatigue 9 is off the map; no throw, no change
  EXPECT_EQ(map, before);
  EXPECT_EQ(cb.cases.size(), 1u);
}

TEST(RetainPending, SecondRetainThrows) {
  CaseBase cb;
  PendingCase p{paper_case(35), false};
  retain_pending(p, cb);
  EXPECT_THROW(retain_pending(p, cb), Error);
}

TEST(ApplyReview, RejectRemovesARetainedCase) {
  CaseBase cb;
  Case c = paper_case(35);
  const std::int64_t id = retain(c, cb);
  PendingCase p{cb.cases[0], false};
  ASSERT_EQ(p.c.id, id);
  const std::string msg = apply_review(cb, p, {Verdict::Kind::Reject, {}});
  EXPECT_TRUE(cb.cases.empty());
  EXPECT_NE(msg.find("removed"), std::string::npos);
}

TEST(ApplyReview, EditAmendsARetainedCaseInPlace) {
  CaseBase cb;
  retain(paper_case(35), cb);
  PendingCase p{cb.cases[0], false};
  apply_review(cb, p, {Verdict::Kind::Edit, {AlertState::Normal, "Normal"}});
  ASSERT_EQ(cb.cases.size(), 1u);
  EXPECT_EQ(cb.cases[0].solution.recommendation, "Normal");
  EXPECT_EQ(cb.cases[0].provenance, Provenance::ExpertReviewed);
}

TEST(ApplyReview, AcceptRetainsAnUnretainedCase) {
  CaseBase cb;
  Case c = paper_case(35);
  c.id = -1;
  PendingCase p{c, false};
  apply_review(cb, p, {Verdict::Kind::Accept, {}});
  ASSERT_EQ(cb.cases.size(), 1u);
  EXPECT_EQ(cb.cases[0].provenance, Provenance::ExpertReviewed);
}

TEST(ValidateCasebase, CatchesDuplicateAndOverrunIds) {
  CaseBase cb;
  cb.cases = {paper_case(8), paper_case(8)};
  cb.next_id = 9;
  EXPECT_FALSE(validate_casebase(cb).empty());

  cb.cases = {paper_case(35)};
  cb.next_id = 10;  // 35 >= 10
  EXPECT_FALSE(validate_casebase(cb).empty());

  cb = paper_base();
  EXPECT_TRUE(validate_casebase(cb).empty());
}
