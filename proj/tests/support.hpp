#pragma once

// Test-side ground truth, deliberately independent of the library: formulas
// are plain integer clause lists and models are evaluated literal by literal.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "allsat/formula.hpp"

namespace testing_support {

using IntCnf = std::vector<std::vector<int>>;

inline bool eval_clause(const std::vector<int>& c, std::uint64_t a) {
  for (int x : c) {
    bool val = (a >> (std::abs(x) - 1)) & 1;
    if ((x > 0) == val) return true;
  }
  return false;
}

inline bool eval(const IntCnf& cnf, std::uint64_t a) {
  for (const auto& c : cnf)
    if (!eval_clause(c, a)) return false;
  return true;
}

// All models, bit k-1 holding x_k, ascending.
inline std::vector<std::uint64_t> brute_models(const IntCnf& cnf, int n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a)
    if (eval(cnf, a)) out.push_back(a);
  return out;
}

inline IntCnf to_ints(const allsat::CnfFormula& f) {
  IntCnf out;
  for (const auto& c : f.clauses) {
    std::vector<int> v;
    for (auto l : c.lits) v.push_back(l.to_dimacs());
    out.push_back(v);
  }
  return out;
}

inline std::vector<int> to_ints(std::span<const allsat::Lit> lits) {
  std::vector<int> v;
  for (auto l : lits) v.push_back(l.to_dimacs());
  return v;
}

// Every model in `models` satisfies `clause`.
inline bool entailed(const std::vector<std::uint64_t>& models, const std::vector<int>& clause) {
  return std::all_of(models.begin(), models.end(), [&](std::uint64_t a) { return eval_clause(clause, a); });
}

inline std::uint64_t bits_of(std::span<const allsat::Lit> total) {
  std::uint64_t a = 0;
  for (auto l : total)
    if (!l.negative()) a |= std::uint64_t{1} << (l.var() - 1);
  return a;
}

// Total assignments over n variables extending `cube`.
inline std::vector<std::uint64_t> expand(std::span<const allsat::Lit> cube, int n) {
  std::uint64_t fixed = 0, val = 0;
  for (auto l : cube) {
    fixed |= std::uint64_t{1} << (l.var() - 1);
    if (!l.negative()) val |= std::uint64_t{1} << (l.var() - 1);
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a)
    if ((a & fixed) == val) out.push_back(a);
  return out;
}

// Uniform random 3-CNF with n variables and round(ratio * n) clauses over
// distinct variables.
inline IntCnf random_3cnf(std::mt19937& rng, int n, double ratio) {
  IntCnf cnf;
  const int m = static_cast<int>(ratio * n + 0.5);
  std::uniform_int_distribution<int> var(1, n), sign(0, 1);
  for (int i = 0; i < m; ++i) {
    std::vector<int> c;
    while (c.size() < 3) {
      int v = var(rng);
      if (std::any_of(c.begin(), c.end(), [v](int x) { return std::abs(x) == v; })) continue;
      c.push_back(sign(rng) ? v : -v);
    }
    cnf.push_back(c);
  }
  return cnf;
}

struct Instance {
  int n;
  IntCnf cnf;
};

// Paper formulas.
inline Instance example31() { return {6, {{1, -3}, {2, 3, 5}, {-1, -3, 4}, {4, -5, 6}, {5, -6}}}; }
inline Instance example41() { return {3, {{1, -2}, {2, -3}, {3, -1}}}; }

// n in [5,15], ratio in [1,5].
inline std::vector<Instance> random_suite(unsigned seed, int count) {
  std::mt19937 rng(seed);
  std::vector<Instance> out;
  std::uniform_int_distribution<int> nd(5, 15);
  std::uniform_real_distribution<double> rd(1.0, 5.0);
  for (int k = 0; k < count; ++k) {
    int n = nd(rng);
    out.push_back({n, random_3cnf(rng, n, rd(rng))});
  }
  return out;
}

}  // namespace testing_support
