#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "polystar/error.hpp"
#include "polystar/hydro1d.hpp"

using namespace polystar;
using namespace polystar::hydro1d;

namespace {

HydroState uniform_slab(std::size_t n, double length, double rho, double u) {
  auto grid = make_grid(RadialGrid::uniform_cells(length, n));
  return HydroState{grid,
                    std::vector<double>(n, rho),
                    std::vector<double>(n, rho * u),
                    0.0,
                    Eos::polytrope(1.0, 2.0),
                    Geometry::slab,
                    1e-12};
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("discrete equilibrium is a fixed point") {
  const auto eq = discrete_equilibrium(Eos::polytrope(1.0, 2.0), 1.0, 256);
  const auto s0 = from_profile(eq);
  CHECK(s0.mass() == doctest::Approx(eq.M).epsilon(1e-12));
  auto s = s0;
  for (int k = 0; k < 5; ++k) {
    s = step(s, cfl_dt(s, 0.4));
    CHECK(max_abs(s.velocity()) <= 1e-10);
  }
  CHECK(std::abs(s.mass() - s0.mass()) <= 1e-12 * s0.mass());

  const auto eq53 = discrete_equilibrium(Eos::polytrope(1.0, 5.0 / 3.0), 1.0, 256);
  const auto t = step(from_profile(eq53), cfl_dt(from_profile(eq53), 0.4));
  CHECK(max_abs(t.velocity()) <= 1e-10);
}

TEST_CASE("uniform static gas without gravity is unchanged") {
  const auto s0 = uniform_slab(64, 1.0, 0.7, 0.0);
  auto s = s0;
  for (int k = 0; k < 10; ++k) s = step(s, cfl_dt(s, 0.5));
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    CHECK(s.rho[i] == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(std::abs(s.mom[i]) <= 1e-14);
  }
}

TEST_CASE("time step bound") {
  // c_s = sqrt(2 rho) for P = rho^2.
  const auto s = uniform_slab(100, 1.0, 0.5, 0.0);
  CHECK(cfl_dt(s, 0.4) == doctest::Approx(0.4 * 0.01 / 1.0).epsilon(1e-14));
  const auto fine = uniform_slab(200, 1.0, 0.5, 0.0);
  CHECK(cfl_dt(fine, 0.4) == doctest::Approx(0.5 * cfl_dt(s, 0.4)).epsilon(1e-14));
  const auto moving = uniform_slab(100, 1.0, 0.5, 3.0);
  CHECK(cfl_dt(moving, 0.4) == doctest::Approx(0.4 * 0.01 / 4.0).epsilon(1e-14));

  CHECK_THROWS_AS(cfl_dt(s, 0.0), PreconditionError);
  CHECK_THROWS_AS(cfl_dt(s, 1.5), PreconditionError);
  auto empty = s;
  empty.rho.clear();
  empty.mom.clear();
  CHECK_THROWS_AS(cfl_dt(empty, 0.4), PreconditionError);
  CHECK_THROWS_AS(step(s, 0.0), PreconditionError);
}

TEST_CASE("non-finite input aborts the step") {
  auto s = uniform_slab(32, 1.0, 1.0, 0.0);
  s.rho[10] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step(s, 1e-3), NumericError);
}

TEST_CASE("perturbations") {
  const auto eq = discrete_equilibrium(Eos::polytrope(1.0, 2.0), 1.0, 256);
  const double M = from_profile(eq).mass();

  // The vacuum floor (1e-15 of the central density) is the only deviation.
  const auto none = perturb(eq, PerturbationKind::density_bump, 0.0);
  CHECK(none.initial_metric.total <= 1e-13);

  double prev = 0.0;
  for (double a : {2e-3, 1e-3}) {
    const auto p = perturb(eq, PerturbationKind::density_bump, a);
    CHECK(p.state.mass() == doctest::Approx(M).epsilon(1e-12));
    CHECK(p.initial_metric.total > 0.0);
    if (prev > 0.0) CHECK(prev / p.initial_metric.total == doctest::Approx(4.0).epsilon(1e-2));
    prev = p.initial_metric.total;
  }

  const auto c = perturb(eq, PerturbationKind::contraction, 1e-3);
  CHECK(c.state.mass() == doctest::Approx(M).epsilon(1e-12));
  const auto k = perturb(eq, PerturbationKind::velocity_kick, 1e-3);
  CHECK(k.initial_metric.kinetic_part > 0.0);
  CHECK(k.initial_metric.d_part <= 1e-13);

  CHECK_THROWS_AS(perturb(eq, PerturbationKind::density_bump, -5.0), DomainError);
  CHECK_THROWS_AS(perturb(eq, PerturbationKind::contraction, -2.0), DomainError);

  for (auto kind : {PerturbationKind::none, PerturbationKind::density_bump,
                    PerturbationKind::velocity_kick, PerturbationKind::contraction})
    CHECK(parse_perturbation(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_perturbation("wobble"), ConfigError);
}

TEST_CASE("short runs: equilibrium stays put, bump stays bounded, mass is conserved") {
  const auto eq = discrete_equilibrium(Eos::polytrope(1.0, 2.0), 1.0, 256);
  const double tc = sound_crossing_time(eq);
  CHECK(tc > 0.0);
  RunOptions opts;
  opts.t_end = 2.0 * tc;
  opts.output_interval = 0.25 * tc;

  const auto still = run(from_profile(eq), eq, opts);
  CHECK_FALSE(still.aborted);
  CHECK(still.max_metric <= 1e-8);
  CHECK(still.mass_drift <= 1e-12);

  const auto bump = perturb(eq, PerturbationKind::density_bump, 1e-3);
  const auto r = run(bump.state, eq, opts);
  CHECK_FALSE(r.aborted);
  CHECK(r.mass_drift <= 1e-12);
  CHECK(r.max_metric_ratio <= 10.0);
  CHECK_FALSE(r.conservation_violated);
  for (std::size_t i = 1; i < r.ledger.size(); ++i) CHECK(r.ledger[i].t > r.ledger[i - 1].t);
  for (const auto& m : r.metrics) {
    CHECK(m.metric.d_part >= 0.0);
    CHECK(m.metric.field_part >= 0.0);
    CHECK(m.metric.kinetic_part >= 0.0);
  }
  CHECK(r.final_state.t == doctest::Approx(opts.t_end).epsilon(1e-12));

  RunOptions strict = opts;
  strict.drift_bound = 1e-15;
  CHECK(run(bump.state, eq, strict).conservation_violated);
}
