#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "orsim/domain.hpp"

using namespace orsim;

namespace {

bool has_violation(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& msg : v) {
    if (msg.find(needle) != std::string::npos) return true;
  }
  return false;
}

Case make_case(Problem p, AlertState state = AlertState::Normal,
               std::string rec = "Normal") {
  Case c;
  c.problem = std::move(p);
  c.solution = {state, std::move(rec)};
  return c;
}

}  // namespace

TEST(Taxonomy, DefaultShape) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  EXPECT_EQ(tax.root(), "root");
  for (const char* leaf : {"surgeon", "nurse", "bistoury", "staphy", "patient"}) {
    EXPECT_TRUE(tax.contains(leaf)) << leaf;
    EXPECT_TRUE(tax.is_leaf(leaf)) << leaf;
  }
  for (const char* cls : {"personal", "material", "infection"}) {
    EXPECT_TRUE(tax.contains(cls)) << cls;
    EXPECT_FALSE(tax.is_leaf(cls)) << cls;
  }
  EXPECT_EQ(tax.parent_of("surgeon"), "personal");
  EXPECT_EQ(tax.parent_of("nurse"), "personal");
  EXPECT_EQ(tax.parent_of("patient"), "root");
}

TEST(Taxonomy, FromEdgesRejectsBadTrees) {
  EXPECT_THROW(Taxonomy::from_edges({{"a", "b"}, {"c", "b"}}), Error);     // two parents
  EXPECT_THROW(Taxonomy::from_edges({{"a", "b"}, {"c", "d"}}), Error);     // two roots
  EXPECT_THROW(Taxonomy::from_edges({{"a", "a"}}), Error);                 // self edge
  EXPECT_THROW(Taxonomy::from_edges({{"a", "b"}, {"b", "a"}}), Error);     // cycle
  EXPECT_THROW(Taxonomy::from_edges({{"", "b"}}), Error);                  // empty name
}

TEST(Taxonomy, AncestorsChain) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const auto chain = tax.ancestors("surgeon");
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_EQ(chain[0], "surgeon");
  EXPECT_EQ(chain[1], "personal");
  EXPECT_EQ(chain[2], "root");
}

TEST(Lca, IdentityIsTheLabelItself) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  EXPECT_EQ(lowest_common_ancestor("surgeon", "surgeon", tax), "surgeon");
}

TEST(Lca, SurgeonAndNurseMeetAtPersonal) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  EXPECT_EQ(lowest_common_ancestor("surgeon", "nurse", tax), "personal");
}

TEST(Lca, CrossSpeciesMeetOnlyAtRoot) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  EXPECT_EQ(lowest_common_ancestor("surgeon", "staphy", tax), tax.root());
  EXPECT_EQ(lowest_common_ancestor("bistoury", "patient", tax), tax.root());
}

TEST(Lca, UnknownLabelNamesTheLabel) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  try {
    lowest_common_ancestor("surgeon", "ghost", tax);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(Lca, SymmetricOverAllNodePairs) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  const std::vector<std::string> nodes = {"root",     "personal", "surgeon", "nurse",
                                          "material", "bistoury", "infection", "staphy",
                                          "patient"};
  for (const auto& a : nodes) {
    for (const auto& b : nodes) {
      EXPECT_EQ(lowest_common_ancestor(a, b, tax), lowest_common_ancestor(b, a, tax))
          << a << " vs " << b;
    }
  }
}

TEST(Lca, InteriorNodeWithLeaf) {
  const Taxonomy tax = Taxonomy::default_taxonomy();
  EXPECT_EQ(lowest_common_ancestor("personal", "surgeon", tax), "personal");
}

TEST(ValidateCase, CleanCasePasses) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  const Case c = make_case({{"nurse", "fatigue", 1.5, 1200}});
  EXPECT_TRUE(validate_case(c, reg, tax).empty());
}

TEST(ValidateCase, EmptyProblem) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  const Case c = make_case({});
  EXPECT_TRUE(has_violation(validate_case(c, reg, tax), "empty problem"));
}

TEST(ValidateCase, OutOfScaleValue) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  const Case c = make_case({{"nurse", "fatigue", 9.0, 10}});
  EXPECT_TRUE(has_violation(validate_case(c, reg, tax), "fatigue out of scale [0,5]"));
}

TEST(ValidateCase, UnknownEntityAndAttribute) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  const Case c = make_case({{"ghost", "charm", 1.0, 10}});
  const auto v = validate_case(c, reg, tax);
  EXPECT_TRUE(has_violation(v, "unknown entity: \"ghost\""));
  EXPECT_TRUE(has_violation(v, "unknown attribute: \"charm\""));
}

TEST(ValidateCase, InteriorNodeIsNotAValidEntity) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  const Case c = make_case({{"personal", "fatigue", 1.0, 10}});
  EXPECT_TRUE(has_violation(validate_case(c, reg, tax), "unknown entity"));
}

TEST(ValidateCase, NonFiniteValue) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  const Case c = make_case({{"nurse", "fatigue", std::numeric_limits<double>::quiet_NaN(), 10}});
  EXPECT_TRUE(has_violation(validate_case(c, reg, tax), "non-finite value"));
}

TEST(ValidateCase, NegativeCycleAndEmptyRecommendation) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  Case c = make_case({{"nurse", "fatigue", 1.0, -1}});
  c.solution.recommendation.clear();
  const auto v = validate_case(c, reg, tax);
  EXPECT_TRUE(has_violation(v, "negative cycle"));
  EXPECT_TRUE(has_violation(v, "empty recommendation"));
}

TEST(ValidateCase, AdaptedNeedsAPath) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  Case c = make_case({{"nurse", "fatigue", 1.0, 10}});
  c.provenance = Provenance::Adapted;
  EXPECT_TRUE(has_violation(validate_case(c, reg, tax), "missing adaptation path"));
  c.adaptation.push_back({"nurse", "surgeon", "personal"});
  EXPECT_TRUE(validate_case(c, reg, tax).empty());
}

TEST(ValidateCase, InfectionCountHasNoUpperBound) {
  const auto reg = AttributeRegistry::defaults();
  const auto tax = Taxonomy::default_taxonomy();
  const Case c = make_case({{"staphy", "infection", 4200.0, 10}});
  EXPECT_TRUE(validate_case(c, reg, tax).empty());
}

TEST(AlertState, CodesRoundTrip) {
  EXPECT_EQ(to_code(AlertState::Alert), "O");
  EXPECT_EQ(to_code(AlertState::Normal), "N");
  EXPECT_EQ(alert_state_from_code("O"), AlertState::Alert);
  EXPECT_EQ(alert_state_from_code("N"), AlertState::Normal);
  EXPECT_THROW(alert_state_from_code("X"), Error);
}

TEST(Provenance, StringsRoundTrip) {
  for (auto p : {Provenance::Auto, Provenance::Adapted, Provenance::ExpertReviewed}) {
    EXPECT_EQ(provenance_from_string(to_string(p)), p);
  }
  EXPECT_THROW(provenance_from_string("psychic"), Error);
}

TEST(AttributeRegistry, DefaultScales) {
  const auto reg = AttributeRegistry::defaults();
  EXPECT_EQ(reg.scale_of("fatigue").lo, 0.0);
  EXPECT_EQ(reg.scale_of("fatigue").hi, 5.0);
  EXPECT_EQ(reg.scale_of("fatigue").norm_divisor, 5.0);
  EXPECT_EQ(reg.scale_of("mat_tiredness").hi, 3.0);
  EXPECT_FALSE(reg.scale_of("infection").hi.has_value());
  EXPECT_THROW(reg.scale_of("charm"), Error);
}
