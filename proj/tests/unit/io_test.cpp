#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "polystar/error.hpp"
#include "polystar/io.hpp"
#include "polystar/steady.hpp"

using namespace polystar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("numbers round-trip exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(mant(rng), expo(rng));
    const auto text = io::format_number(x);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == x);
    CHECK(text.find(',') == std::string::npos);
  }
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(-2.0) == "-2");
}

TEST_CASE("CSV layout") {
  const std::vector<io::Column> cols{{"r", "length", {0.0, 0.5}}, {"rho", "", {1.0, 0.25}}};
  const auto text = io::format_csv(cols, {"demo run"});
  CHECK(text ==
        "# demo run\r\n"
        "# r: length\r\n"
        "# rho: dimensionless\r\n"
        "r,rho\r\n"
        "0,1\r\n"
        "0.5,0.25\r\n");

  CHECK(io::csv_field("plain") == "plain");
  CHECK(io::csv_field("a,b") == "\"a,b\"");
  CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(io::csv_field("two\nlines") == "\"two\nlines\"");

  CHECK_THROWS_AS(io::format_csv({}), PreconditionError);
  CHECK_THROWS_AS(io::format_csv({{"a", "", {1.0}}, {"b", "", {1.0, 2.0}}}), PreconditionError);
}

TEST_CASE("atomic writes") {
  const fs::path dir = fs::temp_directory_path() / "polystar_io_test" / "nested";
  fs::remove_all(dir.parent_path());
  const auto file = dir / "out.csv";
  io::write_atomic(file, "first");
  CHECK(slurp(file) == "first");
  io::write_atomic(file, "second");
  CHECK(slurp(file) == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);  // no temporaries left behind

  // A regular file where a directory is needed.
  CHECK_THROWS_AS(io::write_atomic(file / "child.txt", "x"), Error);
  fs::remove_all(dir.parent_path());
}

TEST_CASE("profile columns") {
  steady::ShootOptions o;
  o.interior_cells = 64;
  const auto p = steady::shoot(Eos::polytrope(1.0, 2.0), 1.0, o);
  const auto cols = io::profile_columns(p);
  REQUIRE(cols.size() == 4);
  CHECK(cols[0].name == "r");
  CHECK(cols[1].name == "rho0");
  CHECK(cols[2].name == "V0");
  CHECK(cols[3].name == "m");
  for (const auto& c : cols) CHECK(c.values.size() == p.grid->size());
  CHECK(cols[3].values.front() == 0.0);
  CHECK(cols[3].values.back() == doctest::Approx(p.M).epsilon(1e-6));
  CHECK(io::format_csv(cols) == io::format_csv(io::profile_columns(p)));
}
