#pragma once

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "allsat/types.hpp"

namespace allsat {

struct Clause {
  std::vector<Lit> lits;
  std::uint32_t id = 0;
  ClauseOrigin origin = ClauseOrigin::Problem;
};

// A CNF over internal variables 1..num_vars. `order[k]` is the external (DIMACS)
// name of internal variable k; index 0 is unused.
struct CnfFormula {
  Var num_vars = 0;
  std::vector<Clause> clauses;
  std::vector<Var> order;
  std::size_t tautologies_dropped = 0;
  bool has_empty_clause = false;

  Var external_name(Var internal) const { return order.empty() ? internal : order[internal]; }
  int external_dimacs(Lit l) const {
    int v = static_cast<int>(external_name(l.var()));
    return l.negative() ? -v : v;
  }
};

namespace detail {

inline std::vector<Var> identity_order(Var n) {
  std::vector<Var> o(n + 1);
  std::iota(o.begin(), o.end(), Var{0});
  return o;
}

// Drops duplicate literals in place, keeping first occurrences. Returns false if
// the clause contains a complementary pair.
inline bool normalize_clause(std::vector<Lit>& lits) {
  std::vector<Lit> out;
  out.reserve(lits.size());
  for (Lit l : lits) {
    if (std::find(out.begin(), out.end(), ~l) != out.end()) return false;
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  lits = std::move(out);
  return true;
}

}  // namespace detail

// Builds a formula from literal lists; applies the same normalization as the
// DIMACS parser.
inline CnfFormula make_formula(Var num_vars, const std::vector<std::vector<int>>& clauses) {
  CnfFormula f;
  f.num_vars = num_vars;
  f.order = detail::identity_order(num_vars);
  for (const auto& c : clauses) {
    std::vector<Lit> lits;
    for (int x : c) {
      if (x == 0 || static_cast<Var>(std::abs(x)) > num_vars)
        throw std::invalid_argument("literal out of range: " + std::to_string(x));
      lits.push_back(Lit::from_dimacs(x));
    }
    if (!detail::normalize_clause(lits)) {
      ++f.tautologies_dropped;
      continue;
    }
    if (lits.empty()) f.has_empty_clause = true;
    f.clauses.push_back({std::move(lits), static_cast<std::uint32_t>(f.clauses.size()),
                         ClauseOrigin::Problem});
  }
  return f;
}

inline CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula f;
  bool have_header = false;
  std::size_t declared = 0;
  std::size_t seen_clauses = 0;
  std::vector<Lit> current;
  bool open_clause = false;
  std::string line;
  std::size_t lineno = 0;

  auto finish_clause = [&] {
    ++seen_clauses;
    if (!detail::normalize_clause(current)) {
      ++f.tautologies_dropped;
    } else {
      if (current.empty()) f.has_empty_clause = true;
      f.clauses.push_back({current, static_cast<std::uint32_t>(f.clauses.size()),
                           ClauseOrigin::Problem});
    }
    current.clear();
    open_clause = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    std::size_t first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    sv.remove_prefix(first);
    if (sv.front() == 'c') continue;
    if (sv.front() == '%') break;  // SATLIB trailer
    if (sv.front() == 'p') {
      if (have_header) throw ParseError(lineno, "duplicate header");
      std::istringstream hs{std::string(sv)};
      std::string p, fmt;
      long long n = -1, m = -1;
      if (!(hs >> p >> fmt >> n >> m) || p != "p" || fmt != "cnf" || n < 0 || m < 0)
        throw ParseError(lineno, "malformed header");
      std::string extra;
      if (hs >> extra) throw ParseError(lineno, "malformed header");
      f.num_vars = static_cast<Var>(n);
      declared = static_cast<std::size_t>(m);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(lineno, "clause before header");
    std::istringstream ls{std::string(sv)};
    std::string tok;
    while (ls >> tok) {
      long long x = 0;
      try {
        std::size_t pos = 0;
        x = std::stoll(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(lineno, "bad token '" + tok + "'");
      }
      if (x == 0) {
        if (seen_clauses >= declared) throw ParseError(lineno, "more clauses than declared");
        finish_clause();
        continue;
      }
      if (std::llabs(x) > static_cast<long long>(f.num_vars))
        throw ParseError(lineno, "literal out of range: " + tok);
      current.push_back(Lit::from_dimacs(static_cast<int>(x)));
      open_clause = true;
    }
  }
  if (!have_header) throw ParseError(lineno, "missing header");
  if (open_clause) throw ParseError(lineno, "missing clause terminator");
  if (seen_clauses != declared)
    throw ParseError(lineno, "expected " + std::to_string(declared) + " clauses, found " +
                                 std::to_string(seen_clauses));
  f.order = detail::identity_order(f.num_vars);
  return f;
}

inline CnfFormula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

// Writes the formula in internal variable indices.
inline void render_dimacs(const CnfFormula& f, std::ostream& out) {
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (Lit l : c.lits) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

inline std::string render_dimacs(const CnfFormula& f) {
  std::ostringstream os;
  render_dimacs(f, os);
  return os.str();
}

// `perm[k-1]` is the variable (in f's numbering) placed at position k.
inline CnfFormula apply_order(const CnfFormula& f, const std::vector<Var>& perm) {
  if (perm.size() != f.num_vars) throw std::invalid_argument("order length differs from variable count");
  std::vector<Var> position(f.num_vars + 1, 0);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    Var v = perm[k];
    if (v < 1 || v > f.num_vars || position[v] != 0)
      throw std::invalid_argument("order is not a permutation of 1..n");
    position[v] = static_cast<Var>(k + 1);
  }
  CnfFormula g = f;
  for (auto& c : g.clauses)
    for (Lit& l : c.lits) l = Lit(position[l.var()], l.negative());
  for (Var k = 1; k <= f.num_vars; ++k) g.order[k] = f.external_name(perm[k - 1]);
  return g;
}

inline std::vector<Var> read_order(std::istream& in) {
  std::vector<Var> perm;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      long long v = std::stoll(line);
      if (v < 1) throw std::invalid_argument(line);
      perm.push_back(static_cast<Var>(v));
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad variable index '" + line + "'");
    }
  }
  return perm;
}

// Cutsets and separators of the fixed variable order 1..n.
struct CutStructure {
  std::vector<std::vector<std::uint32_t>> cutsets;  // clause ids, sorted
  std::vector<std::vector<Var>> separators;         // variable indices, sorted
  std::size_t cutwidth = 0;
  std::size_t pathwidth = 0;
};

inline CutStructure compute_cuts(const CnfFormula& f) {
  const Var n = f.num_vars;
  CutStructure cs;
  cs.cutsets.assign(n + 1, {});
  cs.separators.assign(n + 1, {});
  for (const auto& c : f.clauses) {
    if (c.lits.empty()) continue;
    Var lo = c.lits.front().var(), hi = lo;
    for (Lit l : c.lits) {
      lo = std::min(lo, l.var());
      hi = std::max(hi, l.var());
    }
    for (Var i = lo; i < hi; ++i) cs.cutsets[i].push_back(c.id);
  }
  for (Var i = 0; i <= n; ++i) {
    auto& sep = cs.separators[i];
    for (auto id : cs.cutsets[i])
      for (Lit l : f.clauses[id].lits)
        if (l.var() <= i) sep.push_back(l.var());
    std::sort(sep.begin(), sep.end());
    sep.erase(std::unique(sep.begin(), sep.end()), sep.end());
    cs.cutwidth = std::max(cs.cutwidth, cs.cutsets[i].size());
    cs.pathwidth = std::max(cs.pathwidth, sep.size());
  }
  return cs;
}

}  // namespace allsat
