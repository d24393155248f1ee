#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "allsat/formula.hpp"

namespace allsat::oracle {

// Brute-force reference enumeration. Models are bit vectors with bit k-1
// holding x_k.
inline constexpr Var kMaxVars = 25;

using ModelSet = std::vector<std::uint64_t>;  // ascending

namespace detail {

struct Masks {
  std::uint64_t pos = 0, neg = 0;
};

inline std::vector<Masks> masks_of(const CnfFormula& f) {
  std::vector<Masks> out;
  out.reserve(f.clauses.size());
  for (const auto& c : f.clauses) {
    Masks m;
    for (Lit l : c.lits) (l.negative() ? m.neg : m.pos) |= std::uint64_t{1} << (l.var() - 1);
    out.push_back(m);
  }
  return out;
}

inline bool satisfies(const std::vector<Masks>& ms, std::uint64_t a) {
  for (const auto& m : ms)
    if (!((a & m.pos) | (~a & m.neg))) return false;
  return true;
}

}  // namespace detail

inline std::uint64_t model_of(std::span<const Lit> total) {
  std::uint64_t a = 0;
  for (Lit l : total)
    if (!l.negative()) a |= std::uint64_t{1} << (l.var() - 1);
  return a;
}

inline bool satisfies(const CnfFormula& f, std::uint64_t a) {
  return detail::satisfies(detail::masks_of(f), a);
}

// Models of f whose assignment agrees with every literal of `prefix`.
inline ModelSet subinstance_models(const CnfFormula& f, std::span<const Lit> prefix) {
  if (f.num_vars > kMaxVars) throw std::invalid_argument("oracle supports at most 25 variables");
  std::uint64_t fix_mask = 0, fix_val = 0;
  for (Lit l : prefix) {
    std::uint64_t b = std::uint64_t{1} << (l.var() - 1);
    fix_mask |= b;
    if (!l.negative()) fix_val |= b;
  }
  ModelSet out;
  if (f.has_empty_clause) return out;
  auto ms = detail::masks_of(f);
  const std::uint64_t total = std::uint64_t{1} << f.num_vars;
  for (std::uint64_t a = 0; a < total; ++a)
    if ((a & fix_mask) == fix_val && detail::satisfies(ms, a)) out.push_back(a);
  return out;
}

inline ModelSet enumerate_all(const CnfFormula& f) { return subinstance_models(f, {}); }

inline std::uint64_t count(const CnfFormula& f) { return enumerate_all(f).size(); }

// True if every model of f satisfies `clause`.
inline bool entails(const CnfFormula& f, std::span<const Lit> clause) {
  std::vector<Lit> refuting;
  for (Lit l : clause) refuting.push_back(~l);
  for (std::size_t i = 0; i < refuting.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (refuting[i] == ~refuting[j]) return true;  // tautology
  return subinstance_models(f, refuting).empty();
}

}  // namespace allsat::oracle
