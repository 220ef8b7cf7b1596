// Runs the twelve acceptance criteria and prints one line per criterion.
// Exit status is 0 only if every criterion passes.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "polystar/checks.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 2024;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  int failed = 0;
  polystar::checks::run_all(seed, [&](const polystar::checks::Result& r) {
    std::printf("%s\n", polystar::checks::format(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  std::printf("%d of %d criteria passed\n", polystar::checks::kCriteria - failed,
              polystar::checks::kCriteria);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
