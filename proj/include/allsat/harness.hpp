#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "allsat/bddcache.hpp"
#include "allsat/blocking.hpp"
#include "allsat/nonblocking.hpp"
#include "allsat/oracle.hpp"

namespace allsat {

enum class Mode { Blocking, NonBlocking, Bdd, BddBlocking, Oracle };
enum class OutputKind { Count, Cubes, Obdd, Quiet };

inline constexpr int kExitComplete = 0;
inline constexpr int kExitLimit = 10;
inline constexpr int kExitInputError = 20;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  Mode mode = Mode::NonBlocking;
  UipScheme uip = UipScheme::DecisionLevel;
  ResolveStrategy backtrack = ResolveStrategy::BJ;
  bool simplify = false;
  bool continue_search = false;
  CacheMode cache = CacheMode::Cutset;
  std::size_t refresh_threshold = 0;
  std::string dump_dir;
  std::string order_file;
  std::optional<double> time_limit_s;
  std::optional<std::size_t> mem_limit_bytes;
  OutputKind output = OutputKind::Count;

  // Rejects combinations outside the 4 blocking, 8 non-blocking and 4 caching
  // configurations.
  void validate() const {
    const bool blocking = mode == Mode::Blocking;
    const bool nb = mode == Mode::NonBlocking || mode == Mode::Bdd;
    const bool bdd = mode == Mode::Bdd || mode == Mode::BddBlocking;
    if (!blocking && simplify) throw ConfigError("simplify applies to mode=blocking only");
    if (!blocking && continue_search) throw ConfigError("continue applies to mode=blocking only");
    if (!nb && (uip != UipScheme::DecisionLevel || backtrack != ResolveStrategy::BJ))
      throw ConfigError("uip/backtrack apply to non-blocking engines only");
    if (uip == UipScheme::Standard) throw ConfigError("uip must be sublevel or dlevel");
    if (!bdd && (refresh_threshold || cache != CacheMode::Cutset))
      throw ConfigError("cache/refresh apply to bdd modes only");
    if (!bdd && output == OutputKind::Obdd) throw ConfigError("output=obdd needs a bdd mode");
    if (time_limit_s && *time_limit_s < 0) throw ConfigError("time_limit must be >= 0");
  }
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline bool parse_flag(const std::string& v) {
  auto s = lower(v);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw ConfigError("bad boolean '" + v + "'");
}

template <typename T>
T pick(const std::string& key, const std::string& value, const std::map<std::string, T>& table) {
  auto it = table.find(lower(value));
  if (it == table.end()) throw ConfigError("bad value '" + value + "' for " + key);
  return it->second;
}

inline const std::map<std::string, Mode>& mode_names() {
  static const std::map<std::string, Mode> m{{"blocking", Mode::Blocking},
                                             {"nonblocking", Mode::NonBlocking},
                                             {"bdd", Mode::Bdd},
                                             {"bdd-blocking", Mode::BddBlocking},
                                             {"oracle", Mode::Oracle}};
  return m;
}

}  // namespace detail

// Applies one `key=value` setting.
inline void set_option(RunConfig& c, const std::string& key, const std::string& value) {
  using detail::pick;
  const std::string k = detail::lower(key);
  try {
    if (k == "mode")
      c.mode = pick(k, value, detail::mode_names());
    else if (k == "uip")
      c.uip = pick<UipScheme>(k, value, {{"sublevel", UipScheme::Sublevel}, {"dlevel", UipScheme::DecisionLevel}});
    else if (k == "backtrack")
      c.backtrack = pick<ResolveStrategy>(k, value,
                                          {{"bt", ResolveStrategy::BT}, {"bj", ResolveStrategy::BJ},
                                           {"cbj", ResolveStrategy::CBJ}, {"bjcbj", ResolveStrategy::BJCBJ}});
    else if (k == "simplify")
      c.simplify = detail::parse_flag(value);
    else if (k == "continue")
      c.continue_search = detail::parse_flag(value);
    else if (k == "cache")
      c.cache = pick<CacheMode>(k, value, {{"cutset", CacheMode::Cutset}, {"separator", CacheMode::Separator}});
    else if (k == "refresh" || k == "refresh_threshold")
      c.refresh_threshold = std::stoull(value);
    else if (k == "dump_dir")
      c.dump_dir = value;
    else if (k == "order" || k == "order_file")
      c.order_file = value;
    else if (k == "time_limit")
      c.time_limit_s = std::stod(value);
    else if (k == "mem_limit")
      c.mem_limit_bytes = std::stoull(value);
    else if (k == "output")
      c.output = pick<OutputKind>(k, value,
                                  {{"count", OutputKind::Count}, {"cubes", OutputKind::Cubes},
                                   {"obdd", OutputKind::Obdd}, {"quiet", OutputKind::Quiet}});
    else
      throw ConfigError("unknown option '" + key + "'");
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("bad value '" + value + "' for " + key);
  }
}

// Parses "key=value,key=value". A bare word is taken as the mode.
inline RunConfig parse_run_config(std::string_view spec) {
  RunConfig c;
  std::stringstream ss{std::string(spec)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      set_option(c, "mode", item);
    else
      set_option(c, item.substr(0, eq), item.substr(eq + 1));
  }
  c.validate();
  return c;
}

inline std::string describe(const RunConfig& c) {
  static const char* modes[] = {"blocking", "nonblocking", "bdd", "bdd-blocking", "oracle"};
  static const char* bts[] = {"bt", "bj", "cbj", "bjcbj"};
  std::string s = std::string("mode=") + modes[static_cast<int>(c.mode)];
  switch (c.mode) {
    case Mode::Blocking:
      s += std::string(",simplify=") + (c.simplify ? "1" : "0") + ",continue=" + (c.continue_search ? "1" : "0");
      break;
    case Mode::Bdd:
    case Mode::NonBlocking:
      s += std::string(",uip=") + (c.uip == UipScheme::Sublevel ? "sublevel" : "dlevel") +
           ",backtrack=" + bts[static_cast<int>(c.backtrack)];
      if (c.mode == Mode::NonBlocking) break;
      [[fallthrough]];
    case Mode::BddBlocking:
      s += std::string(",cache=") + (c.cache == CacheMode::Cutset ? "cutset" : "separator");
      if (c.refresh_threshold) s += ",refresh=" + std::to_string(c.refresh_threshold);
      break;
    case Mode::Oracle:
      break;
  }
  return s;
}

// The sixteen enumerator configurations: 4 blocking, 8 non-blocking, 4 caching.
inline std::vector<std::pair<std::string, RunConfig>> standard_configs() {
  std::vector<std::pair<std::string, RunConfig>> out;
  for (bool simp : {false, true})
    for (bool cont : {false, true}) {
      RunConfig c;
      c.mode = Mode::Blocking;
      c.simplify = simp;
      c.continue_search = cont;
      out.emplace_back(std::string("blocking") + (simp ? "-simp" : "") + (cont ? "-cont" : ""), c);
    }
  const std::pair<const char*, ResolveStrategy> strategies[] = {
      {"bt", ResolveStrategy::BT}, {"bj", ResolveStrategy::BJ}, {"cbj", ResolveStrategy::CBJ},
      {"bjcbj", ResolveStrategy::BJCBJ}};
  for (auto [uname, uip] : {std::pair{"sublevel", UipScheme::Sublevel}, std::pair{"dlevel", UipScheme::DecisionLevel}})
    for (auto [bname, bt] : strategies) {
      RunConfig c;
      c.mode = Mode::NonBlocking;
      c.uip = uip;
      c.backtrack = bt;
      out.emplace_back(std::string("nonblocking-") + uname + "-" + bname, c);
    }
  for (auto [mname, mode] : {std::pair{"bdd", Mode::Bdd}, std::pair{"bdd-blocking", Mode::BddBlocking}})
    for (auto [cname, cache] : {std::pair{"cutset", CacheMode::Cutset}, std::pair{"separator", CacheMode::Separator}}) {
      RunConfig c;
      c.mode = mode;
      c.cache = cache;
      out.emplace_back(std::string(mname) + "-" + cname, c);
    }
  return out;
}

struct RunStats {
  std::string instance;
  std::string config;
  bool solved = false;
  BigCount solutions = 0;
  double time_s = 0.0;
  std::size_t peak_mem = 0;
  std::uint64_t decisions = 0, conflicts = 0, propagations = 0;
  std::uint64_t cache_hits = 0, cache_misses = 0;
  std::uint64_t obdd_nodes = 0, dumps = 0;
  std::optional<std::uint64_t> oracle_count;
  int exit_code = kExitComplete;
  std::string error;
};

// Everything an enumerator produced, in internal variable numbering.
struct SolveOutput {
  RunStats stats;
  std::vector<std::vector<Lit>> cubes;  // filled when requested
};

namespace detail {

inline void print_cube(std::ostream& out, const CnfFormula& f, std::span<const Lit> cube) {
  for (Lit l : cube) out << f.external_dimacs(l) << ' ';
  out << "0\n";
}

inline std::string env_dump_dir() {
  const char* e = std::getenv("ALLSAT_DUMP_DIR");
  return e ? std::string(e) : std::string();
}

}  // namespace detail

// Runs `cfg` on an already parsed formula. Cubes go to `out` when requested
// by cfg.output; `collect` additionally keeps them in the result.
inline SolveOutput solve_formula(const CnfFormula& f, const RunConfig& cfg, std::ostream* out = nullptr,
                                 const std::string& instance = "instance", bool collect = false) {
  SolveOutput so;
  RunStats& st = so.stats;
  st.instance = instance;
  st.config = describe(cfg);
  Limits limits{cfg.time_limit_s, cfg.mem_limit_bytes};
  const bool print_cubes = out && cfg.output == OutputKind::Cubes;
  CubeSink sink = [&](std::span<const Lit> cube) {
    if (print_cubes) detail::print_cube(*out, f, cube);
    if (collect) so.cubes.emplace_back(cube.begin(), cube.end());
  };

  auto take = [&](const EnumerationResult& r) {
    st.solved = r.complete;
    st.solutions = r.models;
    st.time_s = r.seconds;
    st.peak_mem = r.peak_mem;
    st.decisions = r.stats.decisions;
    st.conflicts = r.stats.conflicts;
    st.propagations = r.stats.propagations;
  };

  switch (cfg.mode) {
    case Mode::Blocking: {
      Hooks h;
      h.on_cube = sink;
      take(enumerate_blocking(f, {cfg.simplify, cfg.continue_search}, h, limits));
      break;
    }
    case Mode::NonBlocking: {
      Hooks h;
      h.on_cube = sink;
      take(enumerate_nonblocking(f, {cfg.uip, cfg.backtrack}, h, limits));
      break;
    }
    case Mode::Bdd:
    case Mode::BddBlocking: {
      RefreshPolicy pol;
      pol.threshold = cfg.refresh_threshold;
      pol.instance = instance;
      pol.retain = print_cubes || collect;
      if (cfg.refresh_threshold) {
        pol.dump_dir = detail::env_dump_dir();
        if (pol.dump_dir.empty()) pol.dump_dir = cfg.dump_dir.empty() ? "." : cfg.dump_dir;
      }
      BddConfig bc;
      bc.mode = cfg.cache;
      bc.nb = {cfg.uip, cfg.backtrack};
      BddResult r = cfg.mode == Mode::Bdd ? enumerate_bdd(f, bc, {}, limits, pol)
                                          : enumerate_bdd_blocking(f, bc, {}, limits, pol);
      take(r);
      st.cache_hits = r.cache_hits;
      st.cache_misses = r.cache_misses;
      st.obdd_nodes = r.diagram.branch_nodes();
      st.dumps = r.parts.size();
      if (print_cubes || collect) {
        for (const auto& p : r.parts) p.diagram->for_each_path(sink);
        r.diagram.for_each_path(sink);
      }
      if (out && cfg.output == OutputKind::Obdd) r.diagram.dump(*out);
      break;
    }
    case Mode::Oracle: {
      Budget budget(limits);
      if (budget.exceeded(0)) {
        st.solved = false;
        break;
      }
      auto models = oracle::enumerate_all(f);
      std::vector<Lit> cube(f.num_vars);
      for (auto m : models) {
        for (Var v = 1; v <= f.num_vars; ++v) cube[v - 1] = Lit(v, !((m >> (v - 1)) & 1));
        sink(cube);
      }
      st.solved = true;
      st.solutions = models.size();
      st.time_s = budget.elapsed_s();
      break;
    }
  }
  st.exit_code = st.solved ? kExitComplete : kExitLimit;
  if (out && cfg.output == OutputKind::Count) *out << to_string(st.solutions) << '\n';
  return so;
}

// Reads, optionally reorders, and solves one DIMACS file. Input problems are
// reported through exit code 20 and RunStats::error rather than thrown.
inline RunStats run_instance(const std::string& path, const RunConfig& cfg, std::ostream* out = nullptr) {
  RunStats st;
  st.instance = std::filesystem::path(path).stem().string();
  st.config = describe(cfg);
  try {
    cfg.validate();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    CnfFormula f = parse_dimacs(in);
    if (!cfg.order_file.empty()) {
      std::ifstream of(cfg.order_file);
      if (!of) throw std::runtime_error("cannot read " + cfg.order_file);
      f = apply_order(f, read_order(of));
    }
    return solve_formula(f, cfg, out, st.instance).stats;
  } catch (const InternalError&) {
    throw;
  } catch (const std::exception& e) {
    st.exit_code = kExitInputError;
    st.error = e.what();
    return st;
  }
}

// --- benchmark suite ------------------------------------------------------

inline std::vector<std::string> histogram_buckets() {
  std::vector<std::string> b{"[0,1e1]"};
  for (int k = 1; k < 14; ++k) b.push_back("(1e" + std::to_string(k) + ",1e" + std::to_string(k + 1) + "]");
  b.push_back("(1e14,inf)");
  return b;
}

// Index into histogram_buckets().
inline std::size_t histogram_bucket(const BigCount& solutions) {
  BigCount bound = 10;
  for (std::size_t k = 0; k < 14; ++k, bound *= 10)
    if (solutions <= bound) return k;
  return 14;
}

struct SuiteResult {
  std::vector<RunStats> rows;
  std::vector<std::string> instances;
};

inline std::vector<std::string> list_instances(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto ext = e.path().extension().string();
    if (ext == ".cnf" || ext == ".dimacs") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Runs every configuration on every instance with a pool of worker threads and
// writes results.csv, cactus.csv and histogram.csv to `out_dir`.
inline SuiteResult run_suite(const std::string& dir,
                             const std::vector<std::pair<std::string, RunConfig>>& configs,
                             const std::string& out_dir, unsigned workers = 0) {
  SuiteResult res;
  res.instances = list_instances(dir);
  struct Task {
    std::size_t inst, cfg;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < res.instances.size(); ++i)
    for (std::size_t c = 0; c < configs.size(); ++c) tasks.push_back({i, c});
  std::vector<std::optional<std::uint64_t>> oracle(res.instances.size());
  std::vector<RunStats> rows(tasks.size());

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t t = next.fetch_add(1);
      if (t >= tasks.size() + res.instances.size()) return;
      if (t >= tasks.size()) {
        // Oracle counts, one job per instance.
        std::size_t i = t - tasks.size();
        try {
          std::ifstream in(res.instances[i]);
          CnfFormula f = parse_dimacs(in);
          if (f.num_vars <= oracle::kMaxVars) oracle[i] = oracle::count(f);
        } catch (const std::exception&) {
        }
        continue;
      }
      const Task& task = tasks[t];
      RunConfig cfg = configs[task.cfg].second;
      cfg.output = OutputKind::Quiet;
      if (cfg.refresh_threshold && cfg.dump_dir.empty())
        cfg.dump_dir = (std::filesystem::path(out_dir) / "dumps" / configs[task.cfg].first).string();
      try {
        rows[t] = run_instance(res.instances[task.inst], cfg);
      } catch (const std::exception& e) {
        rows[t].instance = std::filesystem::path(res.instances[task.inst]).stem().string();
        rows[t].exit_code = kExitInputError;
        rows[t].error = e.what();
      }
      rows[t].config = configs[task.cfg].first;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  for (std::size_t t = 0; t < tasks.size(); ++t) rows[t].oracle_count = oracle[tasks[t].inst];
  res.rows = std::move(rows);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "results.csv");
    csv << "instance,config,solved,solutions,time_s,peak_mem_bytes,decisions,conflicts,propagations,"
           "cache_hits,cache_misses,obdd_nodes,dumps,oracle_count,oracle_match,exit_code,error\n";
    for (const auto& r : res.rows) {
      std::string match;
      if (r.oracle_count && r.solved) match = (r.solutions == *r.oracle_count) ? "yes" : "no";
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      csv << r.instance << ',' << r.config << ',' << (r.solved ? 1 : 0) << ',' << to_string(r.solutions)
          << ',' << r.time_s << ',' << r.peak_mem << ',' << r.decisions << ',' << r.conflicts << ','
          << r.propagations << ',' << r.cache_hits << ',' << r.cache_misses << ',' << r.obdd_nodes
          << ',' << r.dumps << ',' << (r.oracle_count ? std::to_string(*r.oracle_count) : "") << ','
          << match << ',' << r.exit_code << ',' << err << '\n';
    }
  }
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "cactus.csv");
    csv << "config,rank,time_s,instance\n";
    for (const auto& [name, cfg] : configs) {
      std::vector<const RunStats*> solved;
      for (const auto& r : res.rows)
        if (r.config == name && r.solved) solved.push_back(&r);
      std::stable_sort(solved.begin(), solved.end(),
                       [](const RunStats* a, const RunStats* b) { return a->time_s < b->time_s; });
      for (std::size_t k = 0; k < solved.size(); ++k)
        csv << name << ',' << k + 1 << ',' << solved[k]->time_s << ',' << solved[k]->instance << '\n';
    }
  }
  {
    std::ofstream csv(std::filesystem::path(out_dir) / "histogram.csv");
    csv << "config,bucket,solved,all\n";
    const auto buckets = histogram_buckets();
    for (const auto& [name, cfg] : configs) {
      std::vector<std::size_t> solved(buckets.size(), 0), all(buckets.size(), 0);
      for (const auto& r : res.rows) {
        if (r.config != name || r.exit_code == kExitInputError) continue;
        std::size_t b = histogram_bucket(r.solutions);
        ++all[b];
        if (r.solved) ++solved[b];
      }
      for (std::size_t b = 0; b < buckets.size(); ++b)
        csv << name << ',' << buckets[b] << ',' << solved[b] << ',' << all[b] << '\n';
    }
  }
  return res;
}

// Reads "<name> <spec>" lines; '#' starts a comment.
inline std::vector<std::pair<std::string, RunConfig>> read_configs(std::istream& in) {
  std::vector<std::pair<std::string, RunConfig>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string name, spec;
    if (!(ls >> name)) continue;
    if (!(ls >> spec)) throw ParseError(lineno, "missing config spec for '" + name + "'");
    try {
      out.emplace_back(name, parse_run_config(spec));
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

// --- differential verification -------------------------------------------

struct SolverReport {
  bool complete = false;
  BigCount count = 0;
  std::vector<std::vector<Lit>> cubes;
};

using Runner = std::function<SolverReport(const CnfFormula&)>;

inline Runner make_runner(RunConfig cfg) {
  cfg.output = OutputKind::Quiet;
  return [cfg](const CnfFormula& f) {
    SolveOutput so = solve_formula(f, cfg, nullptr, "verify", true);
    return SolverReport{so.stats.solved, so.stats.solutions, std::move(so.cubes)};
  };
}

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
  std::string counterexample_path;
};

namespace detail {

// Problems found in one solver's output against the oracle model set.
inline std::vector<std::string> check_report(const CnfFormula& f, const SolverReport& r,
                                             const oracle::ModelSet& truth, const std::string& label) {
  std::vector<std::string> problems;
  if (!r.complete) {
    problems.push_back(label + ": did not complete");
    return problems;
  }
  if (r.count != truth.size())
    problems.push_back(label + ": count " + to_string(r.count) + " but oracle has " +
                       std::to_string(truth.size()));
  std::vector<std::uint8_t> covered(std::size_t{1} << f.num_vars, 0);
  bool overlap = false, outside = false;
  for (const auto& cube : r.cubes) {
    std::uint64_t fixed = 0, val = 0;
    for (Lit l : cube) {
      fixed |= std::uint64_t{1} << (l.var() - 1);
      if (!l.negative()) val |= std::uint64_t{1} << (l.var() - 1);
    }
    const std::uint64_t free = ~fixed & ((std::uint64_t{1} << f.num_vars) - 1);
    // Iterate over all subsets of the free bits.
    std::uint64_t sub = 0;
    do {
      std::uint64_t a = val | sub;
      if (covered[a]) overlap = true;
      covered[a] = 1;
      if (!std::binary_search(truth.begin(), truth.end(), a)) outside = true;
      sub = (sub - free) & free;
    } while (sub != 0);
  }
  if (overlap) problems.push_back(label + ": cubes overlap or repeat a solution");
  if (outside) problems.push_back(label + ": a cube covers a non-model");
  for (auto m : truth)
    if (!covered[m]) {
      problems.push_back(label + ": a model is missing from the cubes");
      break;
    }
  return problems;
}

inline bool reports_agree(const CnfFormula& f, const Runner& a, const Runner& b) {
  auto truth = oracle::enumerate_all(f);
  return check_report(f, a(f), truth, "a").empty() && check_report(f, b(f), truth, "b").empty();
}

}  // namespace detail

// Runs both solvers and the oracle on `f`. On disagreement the formula is
// shrunk clause by clause while the disagreement persists and written to
// `counterexample_path` (if non-empty).
inline VerifyReport verify_formula(const CnfFormula& f, const Runner& a, const Runner& b,
                                   const std::string& counterexample_path = {}) {
  VerifyReport rep;
  if (f.num_vars > oracle::kMaxVars) throw std::invalid_argument("verify needs at most 25 variables");
  auto truth = oracle::enumerate_all(f);
  SolverReport ra = a(f), rb = b(f);
  for (auto& p : detail::check_report(f, ra, truth, "a")) rep.problems.push_back(std::move(p));
  for (auto& p : detail::check_report(f, rb, truth, "b")) rep.problems.push_back(std::move(p));
  if (ra.complete && rb.complete && ra.count != rb.count)
    rep.problems.push_back("a and b disagree: " + to_string(ra.count) + " vs " + to_string(rb.count));
  rep.ok = rep.problems.empty();
  if (rep.ok || counterexample_path.empty()) return rep;

  CnfFormula g = f;
  for (bool shrunk = true; shrunk;) {
    shrunk = false;
    for (std::size_t k = 0; k < g.clauses.size(); ++k) {
      CnfFormula h = g;
      h.clauses.erase(h.clauses.begin() + static_cast<std::ptrdiff_t>(k));
      for (std::size_t id = 0; id < h.clauses.size(); ++id) h.clauses[id].id = static_cast<std::uint32_t>(id);
      if (!detail::reports_agree(h, a, b)) {
        g = std::move(h);
        shrunk = true;
        break;
      }
    }
  }
  std::ofstream out(counterexample_path);
  render_dimacs(g, out);
  rep.counterexample_path = counterexample_path;
  return rep;
}

inline VerifyReport verify(const std::string& path, const Runner& a, const Runner& b,
                           const std::string& counterexample_path = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return verify_formula(parse_dimacs(in), a, b, counterexample_path);
}

}  // namespace allsat
