#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "allsat/harness.hpp"

namespace {

// Folds the solve flags into a RunConfig, starting from an optional spec.
allsat::RunConfig build_config(const std::string& spec, const std::vector<std::pair<std::string, std::string>>& kv) {
  allsat::RunConfig c = spec.empty() ? allsat::RunConfig{} : allsat::parse_run_config(spec);
  for (const auto& [k, v] : kv) allsat::set_option(c, k, v);
  c.validate();
  return c;
}

int report_error(const std::string& what) {
  std::cerr << "error: " << what << '\n';
  return allsat::kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"All-solutions SAT enumeration"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Enumerate or count the models of a DIMACS file");
  std::string file, spec, mode, uip, backtrack, cache, order, output, dump_dir;
  bool simplify = false, cont = false;
  std::size_t refresh = 0, mem_limit = 0;
  double time_limit = -1;
  solve->add_option("file", file, "DIMACS CNF file")->required();
  solve->add_option("--config", spec, "key=value,... settings applied before the flags");
  solve->add_option("--mode", mode, "blocking|nonblocking|bdd|bdd-blocking|oracle");
  solve->add_option("--uip", uip, "sublevel|dlevel");
  solve->add_option("--backtrack", backtrack, "bt|bj|cbj|bjcbj");
  solve->add_flag("--simplify", simplify, "simplify blocking clauses");
  solve->add_flag("--continue", cont, "resume from saved decisions after each restart");
  solve->add_option("--cache", cache, "cutset|separator");
  solve->add_option("--refresh-threshold", refresh, "dump and clear the diagram at this size");
  solve->add_option("--dump-dir", dump_dir, "directory for diagram dumps");
  solve->add_option("--order", order, "variable order file, one variable per line");
  solve->add_option("--time-limit", time_limit, "seconds");
  solve->add_option("--mem-limit", mem_limit, "bytes");
  solve->add_option("--output", output, "count|cubes|obdd|quiet");

  // bench
  auto* bench = app.add_subcommand("bench", "Run configurations over a directory of instances");
  std::string bench_dir, configs_file, out_dir = "bench-out";
  unsigned workers = 0;
  bench->add_option("dir", bench_dir, "directory of .cnf files")->required();
  bench->add_option("--configs", configs_file, "file of '<name> <spec>' lines (default: all sixteen)");
  bench->add_option("--out", out_dir, "output directory for CSV files");
  bench->add_option("--jobs", workers, "worker threads (default: hardware concurrency)");

  // verify
  auto* ver = app.add_subcommand("verify", "Differential check of two configurations and the oracle");
  std::string ver_file, cfg_a, cfg_b, cex;
  ver->add_option("file", ver_file, "DIMACS CNF file (at most 25 variables)")->required();
  ver->add_option("--a", cfg_a, "first configuration spec")->required();
  ver->add_option("--b", cfg_b, "second configuration spec")->required();
  ver->add_option("--counterexample", cex, "where to save a minimized failing formula");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      std::vector<std::pair<std::string, std::string>> kv;
      if (!mode.empty()) kv.emplace_back("mode", mode);
      if (!uip.empty()) kv.emplace_back("uip", uip);
      if (!backtrack.empty()) kv.emplace_back("backtrack", backtrack);
      if (simplify) kv.emplace_back("simplify", "1");
      if (cont) kv.emplace_back("continue", "1");
      if (!cache.empty()) kv.emplace_back("cache", cache);
      if (refresh) kv.emplace_back("refresh", std::to_string(refresh));
      if (!dump_dir.empty()) kv.emplace_back("dump_dir", dump_dir);
      if (!order.empty()) kv.emplace_back("order", order);
      if (time_limit >= 0) kv.emplace_back("time_limit", std::to_string(time_limit));
      if (solve->count("--mem-limit")) kv.emplace_back("mem_limit", std::to_string(mem_limit));
      if (!output.empty()) kv.emplace_back("output", output);
      allsat::RunConfig cfg;
      try {
        cfg = build_config(spec, kv);
      } catch (const std::exception& e) {
        return report_error(e.what());
      }
      auto st = allsat::run_instance(file, cfg, &std::cout);
      if (st.exit_code == allsat::kExitInputError) return report_error(st.error);
      if (st.exit_code == allsat::kExitLimit)
        std::cerr << "limit exceeded after " << allsat::to_string(st.solutions) << " solutions\n";
      return st.exit_code;
    }

    if (bench->parsed()) {
      std::vector<std::pair<std::string, allsat::RunConfig>> configs;
      if (configs_file.empty()) {
        configs = allsat::standard_configs();
      } else {
        std::ifstream in(configs_file);
        if (!in) return report_error("cannot read " + configs_file);
        configs = allsat::read_configs(in);
      }
      auto res = allsat::run_suite(bench_dir, configs, out_dir, workers);
      std::size_t solved = 0, mismatches = 0;
      for (const auto& r : res.rows) {
        solved += r.solved;
        if (r.solved && r.oracle_count && r.solutions != *r.oracle_count) ++mismatches;
      }
      std::cout << res.instances.size() << " instances, " << configs.size() << " configs, " << solved
                << " solved runs, " << mismatches << " oracle mismatches\n";
      return mismatches ? 1 : 0;
    }

    if (ver->parsed()) {
      allsat::RunConfig a, b;
      try {
        a = allsat::parse_run_config(cfg_a);
        b = allsat::parse_run_config(cfg_b);
      } catch (const std::exception& e) {
        return report_error(e.what());
      }
      auto rep = allsat::verify(ver_file, allsat::make_runner(a), allsat::make_runner(b), cex);
      if (rep.ok) {
        std::cout << "agree\n";
        return 0;
      }
      for (const auto& p : rep.problems) std::cout << p << '\n';
      if (!rep.counterexample_path.empty()) std::cout << "counterexample: " << rep.counterexample_path << '\n';
      return 1;
    }
  } catch (const allsat::ParseError& e) {
    return report_error(e.what());
  } catch (const std::invalid_argument& e) {
    return report_error(e.what());
  } catch (const std::runtime_error& e) {
    return report_error(e.what());
  }
  return 0;
}
