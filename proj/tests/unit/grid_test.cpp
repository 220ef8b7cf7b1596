#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "polystar/error.hpp"
#include "polystar/grid.hpp"

using namespace polystar;
using std::numbers::pi;

namespace {

double weighted_sum(std::span<const double> w, const std::vector<double>& f) {
  return std::inner_product(w.begin(), w.end(), f.begin(), 0.0);
}

}  // namespace

TEST_CASE("construction preconditions") {
  CHECK_THROWS_AS(RadialGrid::nodal({0.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(RadialGrid::nodal({0.1, 0.5, 1.0}), PreconditionError);
  CHECK_THROWS_AS(RadialGrid::nodal({0.0, 0.5, 0.5, 1.0}), PreconditionError);
  CHECK_THROWS_AS(RadialGrid::uniform_nodal(-1.0, 10), PreconditionError);
  CHECK_THROWS_AS(RadialGrid::uniform_cells(0.0, 10), PreconditionError);

  auto grid = make_grid(RadialGrid::uniform_nodal(1.0, 8));
  CHECK_THROWS_AS(GridDensity(grid, std::vector<double>(3, 1.0)), PreconditionError);
  std::vector<double> bad(grid->size(), 1.0);
  bad[4] = -1.0;
  CHECK_THROWS_AS(GridDensity(grid, bad), DomainError);
  bad[4] = std::nan("");
  CHECK_THROWS_AS(GridDensity(grid, bad), DomainError);
  CHECK_THROWS_AS(GridDensity::zero(grid).with_mass(1.0), DomainError);
}

TEST_CASE("quadrature weights are exact for polynomials of low degree") {
  const std::vector<RadialGrid> grids{
      RadialGrid::uniform_nodal(2.0, 64), RadialGrid::uniform_nodal(2.0, 63),
      RadialGrid::nodal({0.0, 0.1, 0.35, 0.4, 0.9, 1.3, 2.0}),
      RadialGrid::nodal({0.0, 0.2, 0.3, 0.7, 1.1, 2.0})};
  for (const auto& g : grids) {
    CAPTURE(g.size());
    CHECK(g.r_max() == 2.0);
    const std::vector<double> one(g.size(), 1.0);
    CHECK(weighted_sum(g.volume_weights(), one) == doctest::Approx(4.0 * pi * 8.0 / 3.0).epsilon(1e-12));
    CHECK(weighted_sum(g.line_weights(), one) == doctest::Approx(2.0).epsilon(1e-13));
    std::vector<double> r2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) r2[i] = g.r(i) * g.r(i);
    CHECK(weighted_sum(g.line_weights(), r2) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("cell grids integrate piecewise constants exactly") {
  const auto g = RadialGrid::cells({0.0, 0.3, 0.5, 1.2, 2.0});
  CHECK(g.kind() == GridKind::cell);
  CHECK(g.size() == 4);
  CHECK(g.edges().size() == 5);
  CHECK(g.r(1) == doctest::Approx(0.4));
  std::vector<double> f{1.0, 2.0, 0.0, 5.0};
  const double expect = 4.0 * pi / 3.0 *
                        (1.0 * 0.027 + 2.0 * (0.125 - 0.027) + 5.0 * (8.0 - 1.2 * 1.2 * 1.2));
  CHECK(weighted_sum(g.volume_weights(), f) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("density scaling and renormalization") {
  auto grid = make_grid(RadialGrid::uniform_nodal(1.0, 100));
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 - grid->r(i);
  const GridDensity rho(grid, v);
  CHECK(rho.mass() == doctest::Approx(pi / 3.0).epsilon(1e-12));
  CHECK(rho.scaled(2.0).mass() == doctest::Approx(2.0 * rho.mass()).epsilon(1e-15));
  CHECK(rho.with_mass(3.0).mass() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(rho.scaled(-1.0), DomainError);
}

TEST_CASE("fields extend with the vacuum law") {
  auto grid = make_grid(RadialGrid::uniform_nodal(2.0, 16));
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -1.0;
  const RadialField V(grid, v, FieldKind::potential, 3.0);
  CHECK(V.at(6.0) == doctest::Approx(-0.5));
  const RadialField g(grid, std::vector<double>(grid->size(), 0.0), FieldKind::field, 3.0);
  CHECK(g.at(3.0) == doctest::Approx(3.0 / 9.0));
  CHECK(g.at(1.0) == 0.0);
  CHECK_THROWS_AS(FlowField(grid, std::vector<double>(grid->size(), INFINITY)), DomainError);
}
