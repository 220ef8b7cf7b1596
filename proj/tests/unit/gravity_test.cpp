#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "polystar/error.hpp"
#include "polystar/gravity.hpp"
#include "polystar/grid.hpp"

using namespace polystar;
using std::numbers::pi;

namespace {

// Uniform ball of mass 1 and radius 1 on cells with an edge at r = 1, so
// shell volumes make the source exact.
GridDensity ball_on_cells(std::size_t per_unit, double r_max) {
  auto grid = make_grid(RadialGrid::uniform_cells(r_max, std::size_t(per_unit * r_max)));
  std::vector<double> v(grid->size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (grid->r(i) < 1.0) v[i] = 3.0 / (4.0 * pi);
  return GridDensity(grid, v);
}

// (1 - r^2)^2 on [0, 1]: smooth enough for Simpson to converge at full order.
GridDensity smooth_on_nodes(std::size_t intervals, double r_max, double scale = 1.0) {
  auto grid = make_grid(RadialGrid::uniform_nodal(r_max, intervals));
  std::vector<double> v(grid->size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = grid->r(i);
    if (r < 1.0) v[i] = scale * (1.0 - r * r) * (1.0 - r * r);
  }
  return GridDensity(grid, v);
}

}  // namespace

TEST_CASE("empty source") {
  auto grid = make_grid(RadialGrid::uniform_nodal(2.0, 64));
  const auto zero = GridDensity::zero(grid);
  CHECK(gravity::enclosed_mass(zero).total == 0.0);
  const auto V = gravity::potential_of(zero);
  const auto g = gravity::field_of(zero);
  for (double v : V.values()) CHECK(v == 0.0);
  for (double v : g.values()) CHECK(v == 0.0);
  CHECK(gravity::field_norm_sq(zero, zero) == 0.0);
}

TEST_CASE("uniform ball closed forms") {
  const auto ball = ball_on_cells(1024, 2.0);
  CHECK(ball.mass() == doctest::Approx(1.0).epsilon(1e-13));
  const auto V = gravity::potential_of(ball);
  CHECK(V.at(0.0) == doctest::Approx(-1.5).epsilon(1e-5));
  CHECK(V.at(1.0) == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(V.at(2.0) == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(V.at(20.0) * 20.0 == doctest::Approx(-1.0).epsilon(1e-12));

  const auto g = gravity::field_of(ball);
  for (double r : {0.1, 0.25, 0.5, 0.75}) CHECK(g.at(r) == doctest::Approx(r).epsilon(1e-4));
  CHECK(g.at(1.5) == doctest::Approx(1.0 / 2.25).epsilon(1e-6));

  const auto face = gravity::face_field(ball);
  const auto edges = ball.grid()->edges();
  CHECK(face.g.front() == 0.0);
  for (std::size_t i = 0; i < edges.size(); i += 128) {
    const double r = edges[i];
    const double m = r < 1.0 ? r * r * r : 1.0;
    CHECK(face.mass[i] == doctest::Approx(m).epsilon(1e-12));
  }

  auto zero = GridDensity::zero(ball.grid());
  CHECK(gravity::field_norm_sq(ball, zero) == doctest::Approx(24.0 * pi / 5.0).epsilon(1e-6));

  const auto forms = gravity::potential_energy_forms(ball);
  CHECK(forms.field == doctest::Approx(-0.6).epsilon(1e-6));
  CHECK(forms.pair == doctest::Approx(-0.6).epsilon(1e-6));
  CHECK(forms.potential == doctest::Approx(-0.6).epsilon(1e-6));
}

TEST_CASE("smooth density: mass, central potential, far field") {
  const auto rho = smooth_on_nodes(1024, 2.0);
  CHECK(rho.mass() == doctest::Approx(32.0 * pi / 105.0).epsilon(1e-10));
  const auto V = gravity::potential_of(rho);
  CHECK(V[0] == doctest::Approx(-2.0 * pi / 3.0).epsilon(1e-9));
  CHECK(10.0 * V.at(10.0) == doctest::Approx(-rho.mass()).epsilon(1e-3));
  CHECK(-V.at(5.0) >= rho.mass() / 15.0);

  const auto m = gravity::enclosed_mass(rho);
  CHECK(m.m.front() == 0.0);
  CHECK(m.m.back() == doctest::Approx(m.total).epsilon(1e-14));
  for (std::size_t i = 1; i < m.m.size(); ++i) CHECK(m.m[i] >= m.m[i - 1]);
}

TEST_CASE("field is the derivative of the potential") {
  const auto rho = smooth_on_nodes(4096, 2.0);
  const auto V = gravity::potential_of(rho);
  const auto g = gravity::field_of(rho);
  const auto r = rho.grid()->r();
  const double h = r[1] - r[0];
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i)
    worst = std::max(worst, std::abs((V[i + 1] - V[i - 1]) / (2.0 * h) - g[i]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("property: potential energy forms agree, field norm scales") {
  for (std::size_t n : {256u, 1024u}) {
    const auto rho = smooth_on_nodes(n, 2.0);
    const auto f = gravity::potential_energy_forms(rho);
    CHECK(f.pair == doctest::Approx(f.field).epsilon(1e-6));
    CHECK(f.potential == doctest::Approx(f.field).epsilon(1e-6));
    CHECK(gravity::potential_energy(rho) == f.field);
  }
  const auto a = smooth_on_nodes(512, 2.0);
  const auto zero = GridDensity::zero(a.grid());
  const double base = gravity::field_norm_sq(a, zero);
  CHECK(gravity::field_norm_sq(a.scaled(3.0), zero) == doctest::Approx(9.0 * base).epsilon(1e-12));
  CHECK(gravity::field_norm_sq(a, a) == 0.0);

  const auto b = smooth_on_nodes(512, 2.0, 0.5);
  CHECK(gravity::field_norm_sq(a, b) == doctest::Approx(gravity::field_norm_sq(b, a)).epsilon(1e-12));
}

TEST_CASE("property: potential is nonpositive and non-decreasing") {
  for (double scale : {0.1, 1.0, 7.0}) {
    const auto V = gravity::potential_of(smooth_on_nodes(300, 3.0, scale));
    for (std::size_t i = 0; i < V.values().size(); ++i) {
      CHECK(V[i] <= 0.0);
      if (i > 0) CHECK(V[i] >= V[i - 1]);
    }
  }
}

TEST_CASE("resampling between grids") {
  const auto fine = smooth_on_nodes(1024, 2.0);
  const auto coarse = smooth_on_nodes(256, 2.0);
  CHECK(gravity::field_norm_sq(fine, coarse) <= 1e-8);
  CHECK_THROWS_AS(gravity::field_norm_sq(fine, coarse, false), PreconditionError);
  const auto moved = gravity::on_grid(coarse, fine.grid());
  CHECK(moved.grid()->same_as(*fine.grid()));
  for (double v : moved.values()) CHECK(v >= 0.0);
}
