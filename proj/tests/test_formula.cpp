#include <gtest/gtest.h>

#include <random>

#include "allsat/formula.hpp"
#include "support.hpp"

using namespace allsat;
namespace ts = testing_support;

namespace {

std::vector<std::vector<int>> clauses_of(const CnfFormula& f) { return ts::to_ints(f); }

}  // namespace

TEST(ParseDimacs, CycleFormula) {
  auto f = parse_dimacs("p cnf 3 3\n1 -2 0\n2 -3 0\n3 -1 0\n");
  EXPECT_EQ(f.num_vars, 3u);
  EXPECT_EQ(clauses_of(f), (std::vector<std::vector<int>>{{1, -2}, {2, -3}, {3, -1}}));
}

TEST(ParseDimacs, EmptyFormula) {
  auto f = parse_dimacs("p cnf 1 0\n");
  EXPECT_EQ(f.num_vars, 1u);
  EXPECT_TRUE(f.clauses.empty());
}

TEST(ParseDimacs, DuplicateLiteralRemoved) {
  auto f = parse_dimacs("p cnf 2 1\n1 1 -2 0\n");
  EXPECT_EQ(clauses_of(f), (std::vector<std::vector<int>>{{1, -2}}));
}

TEST(ParseDimacs, TautologyDropped) {
  auto f = parse_dimacs("p cnf 2 2\n1 -1 2 0\n2 0\n");
  EXPECT_EQ(f.tautologies_dropped, 1u);
  EXPECT_EQ(clauses_of(f), (std::vector<std::vector<int>>{{2}}));
}

TEST(ParseDimacs, CommentsAndMultilineClauses) {
  auto f = parse_dimacs("c hello\np cnf 3 2\n1 2\n 3 0 -1\n0\n");
  EXPECT_EQ(clauses_of(f), (std::vector<std::vector<int>>{{1, 2, 3}, {-1}}));
}

TEST(ParseDimacs, EmptyClauseMarksUnsat) {
  auto f = parse_dimacs("p cnf 2 1\n0\n");
  EXPECT_TRUE(f.has_empty_clause);
}

TEST(ParseDimacs, ErrorsCarryLineNumbers) {
  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_dimacs(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("p cnf x 3\n"), 1u);
  EXPECT_EQ(line_of("c c\np cnf 2 1\n1 3 0\n"), 3u);
  EXPECT_EQ(line_of("p cnf 2 1\n1 2\n"), 2u);
  EXPECT_EQ(line_of("1 2 0\n"), 1u);
  EXPECT_EQ(line_of("p cnf 2 1\n1 0\n2 0\n"), 3u);
  EXPECT_EQ(line_of("p cnf 2 2\n1 0\n"), 2u);
  EXPECT_EQ(line_of("p cnf 2 1\n1 a 0\n"), 2u);
  EXPECT_EQ(line_of("p cnf 2 1\np cnf 2 1\n"), 2u);
}

TEST(ParseDimacs, RoundTrip) {
  std::mt19937 rng(3);
  for (int k = 0; k < 50; ++k) {
    auto cnf = ts::random_3cnf(rng, 8, 3.0);
    auto f = make_formula(8, cnf);
    auto g = parse_dimacs(render_dimacs(f));
    EXPECT_EQ(g.num_vars, f.num_vars);
    EXPECT_EQ(clauses_of(g), clauses_of(f));
  }
}

TEST(ApplyOrder, Identity) {
  auto f = make_formula(3, {{1, -2}, {2, -3}});
  auto g = apply_order(f, {1, 2, 3});
  EXPECT_EQ(clauses_of(g), clauses_of(f));
}

TEST(ApplyOrder, Swap) {
  auto f = make_formula(2, {{1, -2}});
  auto g = apply_order(f, {2, 1});
  EXPECT_EQ(clauses_of(g), (std::vector<std::vector<int>>{{2, -1}}));
  EXPECT_EQ(g.external_name(1), 2u);
  EXPECT_EQ(g.external_dimacs(Lit(1, true)), -2);
}

TEST(ApplyOrder, RejectsNonPermutation) {
  auto f = make_formula(3, {{1, 2}});
  EXPECT_THROW(apply_order(f, {1, 1, 2}), std::invalid_argument);
  EXPECT_THROW(apply_order(f, {1, 2}), std::invalid_argument);
  EXPECT_THROW(apply_order(f, {1, 2, 4}), std::invalid_argument);
}

TEST(ApplyOrder, ReadOrderFile) {
  std::istringstream in("3\n1\n\n2\n");
  EXPECT_EQ(read_order(in), (std::vector<Var>{3, 1, 2}));
  std::istringstream bad("1\nx\n");
  EXPECT_THROW(read_order(bad), ParseError);
}

namespace {

// Cut structure straight from the definitions on integer clauses.
struct NaiveCuts {
  std::vector<std::vector<std::uint32_t>> cutsets;
  std::vector<std::vector<Var>> separators;
  std::size_t cutwidth = 0, pathwidth = 0;
};

NaiveCuts naive_cuts(const std::vector<std::vector<int>>& cnf, int n) {
  NaiveCuts c;
  for (int i = 0; i <= n; ++i) {
    std::vector<std::uint32_t> cs;
    std::set<Var> sep;
    for (std::size_t id = 0; id < cnf.size(); ++id) {
      bool low = false, high = false;
      for (int x : cnf[id]) {
        if (std::abs(x) <= i) low = true;
        if (std::abs(x) > i) high = true;
      }
      if (low && high) {
        cs.push_back(static_cast<std::uint32_t>(id));
        for (int x : cnf[id])
          if (std::abs(x) <= i) sep.insert(static_cast<Var>(std::abs(x)));
      }
    }
    c.cutwidth = std::max(c.cutwidth, cs.size());
    c.pathwidth = std::max(c.pathwidth, sep.size());
    c.cutsets.push_back(cs);
    c.separators.emplace_back(sep.begin(), sep.end());
  }
  return c;
}

}  // namespace

TEST(ComputeCuts, SixVariableExample) {
  auto ex = ts::example31();
  auto cs = compute_cuts(make_formula(ex.n, ex.cnf));
  EXPECT_EQ(cs.cutsets[3], (std::vector<std::uint32_t>{1, 2}));  // C2, C3
  EXPECT_EQ(cs.separators[3], (std::vector<Var>{1, 2, 3}));
  EXPECT_EQ(cs.cutsets[2], (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_EQ(cs.cutwidth, 3u);
  EXPECT_TRUE(cs.cutsets[0].empty());
  EXPECT_TRUE(cs.cutsets[6].empty());
  auto naive = naive_cuts(ex.cnf, ex.n);
  EXPECT_EQ(cs.cutsets, naive.cutsets);
  EXPECT_EQ(cs.separators, naive.separators);
}

TEST(ComputeCuts, SingleClause) {
  auto cs = compute_cuts(make_formula(2, {{1, 2}}));
  EXPECT_EQ(cs.cutsets[1], (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(cs.separators[1], (std::vector<Var>{1}));
  EXPECT_EQ(cs.cutwidth, 1u);
  EXPECT_EQ(cs.pathwidth, 1u);
}

TEST(ComputeCuts, ReorderedExampleMatchesDefinition) {
  auto ex = ts::example31();
  auto g = apply_order(make_formula(ex.n, ex.cnf), {5, 3, 1, 4, 2, 6});
  auto cs = compute_cuts(g);
  auto naive = naive_cuts(ts::to_ints(g), ex.n);
  EXPECT_EQ(cs.cutsets, naive.cutsets);
  EXPECT_EQ(cs.separators, naive.separators);
  EXPECT_EQ(cs.cutwidth, naive.cutwidth);
  EXPECT_EQ(cs.pathwidth, naive.pathwidth);
}

TEST(ComputeCuts, RandomFormulasMatchDefinition) {
  std::mt19937 rng(11);
  for (int k = 0; k < 100; ++k) {
    int n = 3 + static_cast<int>(rng() % 10);
    auto cnf = ts::random_3cnf(rng, n, 2.0);
    auto cs = compute_cuts(make_formula(n, cnf));
    auto naive = naive_cuts(cnf, n);
    ASSERT_EQ(cs.cutsets, naive.cutsets);
    ASSERT_EQ(cs.separators, naive.separators);
    ASSERT_EQ(cs.cutwidth, naive.cutwidth);
  }
}
