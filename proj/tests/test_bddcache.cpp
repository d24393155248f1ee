#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <unistd.h>

#include "allsat/bddcache.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace allsat;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

struct Variant {
  bool blocking;
  CacheMode mode;
  ResolveStrategy strategy;
};

std::vector<Variant> variants() {
  std::vector<Variant> out;
  for (auto m : {CacheMode::Cutset, CacheMode::Separator}) {
    out.push_back({true, m, ResolveStrategy::BJ});
    for (auto s : {ResolveStrategy::BT, ResolveStrategy::BJ, ResolveStrategy::CBJ, ResolveStrategy::BJCBJ})
      out.push_back({false, m, s});
  }
  return out;
}

BddResult run(const CnfFormula& f, const Variant& v, const BddHooks& h = {}, RefreshPolicy p = {},
              Limits lim = {}) {
  BddConfig cfg;
  cfg.mode = v.mode;
  cfg.nb.strategy = v.strategy;
  return v.blocking ? enumerate_bdd_blocking(f, cfg, h, lim, std::move(p))
                    : enumerate_bdd(f, cfg, h, lim, std::move(p));
}

std::set<std::uint64_t> path_models(const Obdd& d) {
  std::set<std::uint64_t> out;
  d.for_each_path([&](std::span<const Lit> c) { out.insert(ts::bits_of(c)); });
  return out;
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("allsat_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(CacheKey, SixVariableGoldens) {
  auto f = make_formula(6, ts::example31().cnf);
  auto cs = compute_cuts(f);
  Kernel k(f, DecisionOrder::Fixed);
  for (int d : {1, -2, 3}) k.decide(Lit::from_dimacs(d));
  auto cut_key = make_cache_key(f, cs, k.trail(), 3, CacheMode::Cutset);
  EXPECT_EQ(cut_key.cut, 3u);
  EXPECT_EQ(cut_key.code, (std::vector<std::uint32_t>{1}));
  auto sep_key = make_cache_key(f, cs, k.trail(), 3, CacheMode::Separator);
  EXPECT_EQ(sep_key.code, (std::vector<std::uint32_t>{1, 3}));
  EXPECT_EQ(make_cache_key(f, cs, k.trail(), kAllAssigned, CacheMode::Cutset), all_assigned_key());
}

TEST(CacheKey, IgnoresVariablesAboveCut) {
  auto f = make_formula(6, ts::example31().cnf);
  auto cs = compute_cuts(f);
  Kernel a(f, DecisionOrder::Fixed), b(f, DecisionOrder::Fixed);
  for (int d : {1, -2, 3, 4}) a.decide(Lit::from_dimacs(d));
  for (int d : {1, -2, 3, -4, 5}) b.decide(Lit::from_dimacs(d));
  for (auto m : {CacheMode::Cutset, CacheMode::Separator})
    EXPECT_EQ(make_cache_key(f, cs, a.trail(), 3, m), make_cache_key(f, cs, b.trail(), 3, m));
}

TEST(CacheKey, EqualKeysMeanEqualSubinstances) {
  std::mt19937 rng(31);
  for (int round = 0; round < 40; ++round) {
    const int n = 6 + static_cast<int>(rng() % 5);
    auto cnf = ts::random_3cnf(rng, n, 1.0 + (rng() % 300) / 100.0);
    auto f = make_formula(n, cnf);
    auto cs = compute_cuts(f);
    for (int cut = 0; cut <= n; ++cut) {
      using Code = std::vector<std::uint32_t>;
      std::map<Code, std::vector<std::uint64_t>> by_cutset, by_separator;
      std::map<Code, Code> sep_to_cut;
      for (std::uint64_t a = 0; a < (std::uint64_t{1} << cut); ++a) {
        std::vector<Lit> prefix;
        for (int v = 1; v <= cut; ++v) prefix.push_back(Lit(v, !((a >> (v - 1)) & 1)));
        // Prefixes falsifying a clause over x_1..x_cut are never cached.
        bool falsified = false;
        for (const auto& c : cnf) {
          bool inside = true, sat = false;
          for (int d : c) {
            inside = inside && std::abs(d) <= cut;
            sat = sat || (std::abs(d) <= cut && prefix[std::abs(d) - 1].to_dimacs() == d);
          }
          falsified = falsified || (inside && !sat);
        }
        if (falsified) continue;
        Kernel k(f, DecisionOrder::Fixed);
        for (Lit l : prefix) k.decide(l);
        auto ck = make_cache_key(f, cs, prefix, CacheMode::Cutset);
        auto sk = make_cache_key(f, cs, prefix, CacheMode::Separator);
        ASSERT_EQ(ck, make_cache_key(f, cs, k.trail(), cut, CacheMode::Cutset));
        ASSERT_EQ(sk, make_cache_key(f, cs, k.trail(), cut, CacheMode::Separator));
        std::vector<std::uint64_t> suffixes;
        for (auto m : ts::expand(prefix, n))
          if (ts::eval(cnf, m)) suffixes.push_back(m >> cut);
        if (auto [it, fresh] = by_cutset.try_emplace(ck.code, suffixes); !fresh) EXPECT_EQ(it->second, suffixes);
        if (auto [it, fresh] = by_separator.try_emplace(sk.code, suffixes); !fresh) EXPECT_EQ(it->second, suffixes);
        // Separator keys refine cutset keys.
        if (auto [it, fresh] = sep_to_cut.try_emplace(sk.code, ck.code); !fresh) EXPECT_EQ(it->second, ck.code);
      }
    }
  }
}

TEST(BddCache, SmallFormulaCounts) {
  auto f31 = make_formula(6, ts::example31().cnf);
  auto f41 = make_formula(3, ts::example41().cnf);
  for (const auto& v : variants()) {
    auto r = run(f31, v);
    EXPECT_TRUE(r.complete);
    EXPECT_EQ(r.models, 22);
    EXPECT_EQ(r.diagram.count_models(), 22);
    EXPECT_EQ(run(f41, v).models, 2);
  }
}

TEST(BddCache, UnsatisfiableIsZero) {
  for (const auto& v : variants()) {
    EXPECT_EQ(run(make_formula(2, {{1}, {-1}}), v).models, 0);
    EXPECT_EQ(run(make_formula(3, {{1, 2}, {-1, 2}, {1, -2}, {-1, -2}}), v).models, 0);
  }
}

TEST(BddCache, HitsAreSound) {
  for (const auto& in : ts::random_suite(808, 50)) {
    auto f = make_formula(in.n, in.cnf);
    for (const auto& v : variants()) {
      BddHooks h;
      h.on_hit = [&](const Obdd& d, std::span<const Lit> prefix, NodeId g) {
        std::size_t want = 0;
        for (auto a : ts::expand(prefix, in.n)) want += ts::eval(in.cnf, a);
        EXPECT_EQ(d.count_from(g, static_cast<Var>(prefix.size())), want);
      };
      run(f, v, h);
    }
  }
}

TEST(BddCache, DiagramPathsAreTheModels) {
  for (const auto& in : ts::random_suite(909, 60)) {
    auto f = make_formula(in.n, in.cnf);
    auto models = ts::brute_models(in.cnf, in.n);
    for (const auto& v : variants()) {
      auto r = run(f, v);
      EXPECT_TRUE(r.complete);
      EXPECT_EQ(r.models, models.size());
      auto got = path_models(r.diagram);
      EXPECT_EQ(std::vector<std::uint64_t>(got.begin(), got.end()), models);
      const Obdd& d = r.diagram;
      for (NodeId id = 2; id < d.branch_nodes() + 2; ++id)
        for (NodeId c : {d.node(id).lo, d.node(id).hi})
          if (!d.is_terminal(c)) EXPECT_EQ(d.node(c).var, d.node(id).var + 1);
      if (!d.is_terminal(d.root())) EXPECT_EQ(d.node(d.root()).var, 1u);
    }
  }
}

TEST(BddCache, RefreshPartitionsTheModels) {
  for (const auto& in : ts::random_suite(1001, 40)) {
    auto f = make_formula(in.n, in.cnf);
    auto models = ts::brute_models(in.cnf, in.n);
    for (const auto& v : variants()) {
      RefreshPolicy p;
      p.threshold = in.n + 1;
      p.retain = true;
      auto r = run(f, v, {}, p);
      EXPECT_EQ(r.models, models.size());
      std::multiset<std::uint64_t> all;
      BigCount sum = r.final_count;
      for (const auto& part : r.parts) {
        ASSERT_TRUE(part.diagram.has_value());
        EXPECT_EQ(part.diagram->count_models(), part.count);
        sum += part.count;
        for (auto a : path_models(*part.diagram)) all.insert(a);
      }
      for (auto a : path_models(r.diagram)) all.insert(a);
      EXPECT_EQ(sum, models.size());
      EXPECT_EQ(std::vector<std::uint64_t>(all.begin(), all.end()), models);
    }
  }
}

TEST(BddCache, ThresholdMustExceedVariableCount) {
  auto f = make_formula(6, ts::example31().cnf);
  RefreshPolicy p;
  p.threshold = 6;
  EXPECT_THROW(run(f, variants()[0], {}, p), std::invalid_argument);
  EXPECT_THROW(run(f, variants()[1], {}, p), std::invalid_argument);
}

TEST(BddCache, DumpsAndManifest) {
  auto dir = scratch_dir("dumps");
  auto in = ts::example31();
  auto f = make_formula(in.n, in.cnf);
  for (const auto& v : {variants()[0], variants()[2]}) {
    fs::remove_all(dir);
    RefreshPolicy p;
    p.threshold = in.n + 1;
    p.dump_dir = dir.string();
    p.instance = "ex";
    auto r = run(f, v, {}, p);
    ASSERT_FALSE(r.parts.empty());
    BigCount sum = r.final_count;
    for (std::size_t k = 0; k < r.parts.size(); ++k) {
      auto expect = dir / ("ex.part" + std::to_string(k + 1) + ".obdd");
      EXPECT_EQ(fs::path(r.parts[k].path), expect);
      std::ifstream is(expect);
      auto d = Obdd::load(is);
      EXPECT_EQ(d.count_models(), r.parts[k].count);
      sum += d.count_models();
    }
    EXPECT_EQ(sum, 22);
    std::ifstream ms(dir / "ex.manifest.json");
    ASSERT_TRUE(ms.good());
    auto j = nlohmann::json::parse(ms);
    EXPECT_EQ(j["total_count"], "22");
    EXPECT_EQ(j["parts"].size(), r.parts.size());
    EXPECT_EQ(j["variable_order"], (std::vector<int>{1, 2, 3, 4, 5, 6}));
    EXPECT_TRUE(j["complete"].get<bool>());
  }
  fs::remove_all(dir);
}

TEST(BddCache, ManifestRecordsOriginalOrder) {
  auto dir = scratch_dir("order");
  auto f = apply_order(make_formula(6, ts::example31().cnf), {5, 3, 1, 4, 2, 6});
  RefreshPolicy p;
  p.dump_dir = dir.string();
  p.instance = "ro";
  auto r = run(f, variants()[1], {}, p);
  EXPECT_EQ(r.models, 22);
  std::ifstream ms(dir / "ro.manifest.json");
  auto j = nlohmann::json::parse(ms);
  EXPECT_EQ(j["variable_order"], (std::vector<int>{5, 3, 1, 4, 2, 6}));
  fs::remove_all(dir);
}

TEST(BddCache, FreeVariablesAreShared) {
  // Clauses touch only x1..x10; the other 40 variables are unconstrained.
  std::mt19937 rng(77);
  auto core = ts::random_3cnf(rng, 10, 2.0);
  auto f = make_formula(50, core);
  BigCount want = pow2(40) * ts::brute_models(core, 10).size();
  for (const auto& v : variants()) {
    auto r = run(f, v);
    EXPECT_TRUE(r.complete);
    EXPECT_EQ(r.models, want);
    EXPECT_LT(r.diagram.branch_nodes(), 5000u);
  }
}

TEST(BddCache, ZeroTimeLimitIsIncomplete) {
  auto f = make_formula(6, ts::example31().cnf);
  Limits lim;
  lim.time_limit_s = 0.0;
  for (const auto& v : variants()) EXPECT_FALSE(run(f, v, {}, {}, lim).complete);
}

TEST(EmissionTrie, Overlaps) {
  detail::EmissionTrie t;
  auto lits = [](std::initializer_list<int> v) {
    std::vector<Lit> out;
    for (int x : v) out.push_back(Lit::from_dimacs(x));
    return out;
  };
  t.add(lits({1, -2}), 0);
  EXPECT_TRUE(t.overlaps(lits({1, -2})));
  EXPECT_TRUE(t.overlaps(lits({1, -2, 3})));
  EXPECT_TRUE(t.overlaps(lits({1})));
  EXPECT_FALSE(t.overlaps(lits({1, 2})));
  EXPECT_FALSE(t.overlaps(lits({-1})));
  t.add(lits({-1, 2, 3}), 1);
  EXPECT_TRUE(t.overlaps(lits({-1})));
  EXPECT_FALSE(t.overlaps(lits({-1}), 1));
  EXPECT_TRUE(t.overlaps(lits({}), 1));
}
