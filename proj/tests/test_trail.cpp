#include <gtest/gtest.h>

#include "allsat/trail.hpp"

using namespace allsat;

TEST(Trail, DecisionAndImplication) {
  Trail t(6);
  t.new_level();
  t.assign(Lit(5, true), kNoClause);
  t.assign(Lit(6, true), 4);
  EXPECT_EQ(t.level_of(5), 1u);
  EXPECT_EQ(t.reason(5), kNoClause);
  EXPECT_EQ(t.reason(6), 4u);
  EXPECT_EQ(t.value(Lit(6, true)), Value::True);
  EXPECT_EQ(t.value(Lit(6, false)), Value::False);
  EXPECT_EQ(t.decision_at(1), Lit(5, true));
}

TEST(Trail, RootLevelFact) {
  Trail t(3);
  t.assign(Lit(1, false), 0);
  EXPECT_EQ(t.level_of(1), 0u);
  EXPECT_EQ(t.level(), 0u);
}

TEST(Trail, DoubleAssignmentIsInternalError) {
  Trail t(2);
  t.assign(Lit(1, false), kNoClause);
  EXPECT_THROW(t.assign(Lit(1, true), kNoClause), InternalError);
}

TEST(Trail, CancelTo) {
  Trail t(5);
  t.assign(Lit(1, false), 0);
  for (Var v = 2; v <= 4; ++v) {
    t.new_level();
    t.assign(Lit(v, true), kNoClause);
  }
  t.cancel_to(3);
  EXPECT_EQ(t.size(), 4u);
  t.cancel_to(1);
  EXPECT_EQ(t.level(), 1u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_FALSE(t.assigned(3));
  EXPECT_EQ(t.value(Lit(4, false)), Value::Unassigned);
  t.cancel_to(0);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_TRUE(t.assigned(1));
}

TEST(Trail, SublevelsOpenPerFlip) {
  Trail t(4);
  t.new_level();
  t.assign(Lit(1, false), kNoClause);
  EXPECT_EQ(t.sublevel_of(1), 0u);
  t.open_sublevel();
  t.assign(Lit(2, true), kNoClause);
  t.assign(Lit(3, true), 7);
  EXPECT_EQ(t.sublevel_of(2), 1u);
  EXPECT_EQ(t.sublevel_of(3), 1u);
  t.open_sublevel();
  t.assign(Lit(4, true), kNoClause);
  EXPECT_EQ(t.sublevel_of(4), 2u);
  t.cancel_to(0);
  t.new_level();
  EXPECT_EQ(t.sublevel(), 0u);
}

TEST(Trail, ViewMatchesEntries) {
  Trail t(8);
  for (Var v = 1; v <= 8; ++v) {
    if (v % 3 == 0) t.new_level();
    t.assign(Lit(v, v % 2 == 0), v % 3 == 0 ? kNoClause : v);
    if (v == 6) t.cancel_to(1);
  }
  std::size_t assigned = 0;
  for (Var v = 1; v <= 8; ++v) assigned += t.assigned(v);
  EXPECT_EQ(assigned, t.size());
  for (const auto& e : t.entries()) EXPECT_EQ(t.value(e.lit), Value::True);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_LE(t[i - 1].level, t[i].level);
}
