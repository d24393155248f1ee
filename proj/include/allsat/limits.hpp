#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <optional>

namespace allsat {

struct Limits {
  std::optional<double> time_limit_s;
  std::optional<std::size_t> mem_limit_bytes;
};

// Wall-clock and memory budget. Memory is the caller's own accounting of
// solver-owned structures, not an OS measurement.
class Budget {
 public:
  explicit Budget(Limits limits = {})
      : limits_(limits), start_(std::chrono::steady_clock::now()) {}

  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  // Records `mem_bytes` as a sample and reports whether a limit is exceeded.
  bool exceeded(std::size_t mem_bytes) {
    peak_mem_ = std::max(peak_mem_, mem_bytes);
    if (limits_.mem_limit_bytes && mem_bytes > *limits_.mem_limit_bytes) return true;
    if (limits_.time_limit_s) {
      if (*limits_.time_limit_s <= 0.0) return true;
      if (elapsed_s() > *limits_.time_limit_s) return true;
    }
    return false;
  }

  std::size_t peak_mem() const { return peak_mem_; }

 private:
  Limits limits_;
  std::chrono::steady_clock::time_point start_;
  std::size_t peak_mem_ = 0;
};

}  // namespace allsat
