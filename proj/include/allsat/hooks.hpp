#pragma once

#include <functional>
#include <vector>

#include "allsat/kernel.hpp"

namespace allsat {

// Optional observation points shared by all enumerators.
struct Hooks {
  CubeSink on_cube;
  std::function<void(std::span<const Lit>)> on_blocking_clause;
  // Called right after a clause is learned, before any backtracking, so the
  // trail still shows the conflict state.
  std::function<void(const Kernel&, const Learned&)> on_learned;
  // Literals decided before the heuristic takes over (scripted runs).
  std::vector<Lit> forced_decisions;
};

struct EnumerationResult {
  bool complete = false;
  std::uint64_t cubes = 0;  // emitted cubes (total assignments for non-blocking)
  BigCount models = 0;      // total assignments covered
  KernelStats stats;
  std::size_t peak_mem = 0;
  double seconds = 0.0;
};

inline BigCount pow2(std::size_t k) {
  BigCount r = 1;
  r <<= k;
  return r;
}

}  // namespace allsat
