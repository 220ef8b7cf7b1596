#include <doctest.h>

#include <cmath>
#include <vector>

#include "polystar/energetics.hpp"
#include "polystar/error.hpp"
#include "polystar/steady.hpp"
#include "polystar/varmin.hpp"

using namespace polystar;

namespace {

// Shooting profile on a nodal grid of 512 intervals over [0, 2R], which
// is also the grid the minimizer runs on.
steady::RadialProfile reference(double gamma) {
  steady::ShootOptions o;
  o.interior_cells = 256;
  return steady::shoot(Eos::polytrope(1.0, gamma), 1.0, o);
}

double l1(const GridDensity& a, const std::vector<double>& b) {
  double s = 0.0;
  const auto w = a.grid()->volume_weights();
  for (std::size_t i = 0; i < b.size(); ++i) s += w[i] * std::abs(a[i] - b[i]);
  return s;
}

void check_trace(const varmin::MinimizeTrace& t, double M, double h_floor) {
  for (std::size_t k = 0; k < t.entries.size(); ++k) {
    const auto& e = t.entries[k];
    CHECK(std::abs(e.mass - M) <= 1e-12 * M);
    CHECK(e.hr >= h_floor);
    if (k > 0) CHECK(e.hr <= t.entries[k - 1].hr);
  }
  for (double x : t.final_density.values()) CHECK(x >= 0.0);
}

}  // namespace

TEST_CASE("starting at the minimizer stops at once") {
  const auto p = reference(2.0);
  const double M = p.density().mass();
  const auto t = varmin::minimize_hr(p.eos, M, p.density());
  CHECK(t.converged);
  CHECK(t.entries.size() <= 3);
  const auto k = varmin::kkt_report(p.density(), p.eos);
  CHECK(k.deviation <= 1e-8);
  CHECK(k.E0_hat == doctest::Approx(p.E0).epsilon(1e-8));
  CHECK(k.min_slack >= -1e-14);  // rounding only
}

TEST_CASE("uniform ball descends to the shooting solution") {
  const auto p = reference(2.0);
  const double M = p.density().mass();
  const double h0 = energetics::reduced_energy(p.density(), p.eos);
  const auto ball = varmin::uniform_ball(p.grid, M, p.R_support);
  CHECK(ball.mass() == doctest::Approx(M).epsilon(1e-13));
  CHECK(varmin::kkt_report(ball, p.eos).deviation >= 0.1);

  const auto t = varmin::minimize_hr(p.eos, M, ball);
  CHECK(t.converged);
  CHECK_FALSE(t.stagnated);
  check_trace(t, M, h0 - 1e-6 * std::abs(h0));
  const double hf = t.entries.back().hr;
  CHECK(hf <= h0 + 1e-4 * std::abs(h0));
  CHECK(l1(t.final_density, p.rho0) <= 1e-2 * M);
  CHECK(varmin::kkt_report(t.final_density, p.eos).deviation <= 1e-3);

  // A different start reaches the same energy.
  const auto narrow = varmin::uniform_ball(p.grid, M, 0.6 * p.R_support);
  const auto t2 = varmin::minimize_hr(p.eos, M, narrow);
  CHECK(t2.converged);
  CHECK(t2.entries.back().hr == doctest::Approx(hf).epsilon(2e-4));
}

TEST_CASE("gamma = 5/3 run respects descent and feasibility") {
  const auto p = reference(5.0 / 3.0);
  const double M = p.density().mass();
  const double h0 = energetics::reduced_energy(p.density(), p.eos);
  const auto t = varmin::minimize_hr(p.eos, M, varmin::uniform_ball(p.grid, M, p.R_support));
  CHECK(t.converged);
  check_trace(t, M, h0 - 1e-6 * std::abs(h0));
  CHECK(t.entries.back().hr <= h0 + 1e-4 * std::abs(h0));
}

TEST_CASE("preconditions") {
  const auto p = reference(2.0);
  const auto eos = p.eos;
  const auto init = p.density();
  CHECK_THROWS_AS(varmin::minimize_hr(eos, 0.0, init), DomainError);
  CHECK_THROWS_AS(varmin::minimize_hr(eos, -1.0, init), DomainError);
  CHECK_THROWS_AS(varmin::minimize_hr(eos, 2.0 * init.mass(), init), PreconditionError);

  auto cells = make_grid(RadialGrid::uniform_cells(2.0, 64));
  std::vector<double> v(64, 0.0);
  for (std::size_t i = 0; i < 32; ++i) v[i] = 1.0;
  const GridDensity on_cells(cells, v);
  CHECK_THROWS_AS(varmin::minimize_hr(eos, on_cells.mass(), on_cells), PreconditionError);

  const auto g = varmin::default_grid(3.0, 100);
  CHECK(g->size() == 101);
  CHECK(g->r_max() == 3.0);
}
