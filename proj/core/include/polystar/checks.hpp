#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace polystar::checks {

/// Outcome of one acceptance criterion.
struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  ///< measured values against their limits
  double seconds = 0.0;
};

constexpr int kCriteria = 12;

/// Runs criterion `id` (1..kCriteria). Seeded parts use `seed`. Exceptions
/// thrown by the library are caught and reported as a failure.
Result run(int id, std::uint64_t seed = 2024);

/// Runs every criterion in order, calling `on_result` after each one.
std::vector<Result> run_all(std::uint64_t seed = 2024,
                            const std::function<void(const Result&)>& on_result = {});

/// "[PASS] 07 name  detail (1.23 s)"
std::string format(const Result& r);

}  // namespace polystar::checks
