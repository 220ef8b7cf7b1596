#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "polystar/error.hpp"
#include "polystar/gravity.hpp"
#include "polystar/steady.hpp"

using namespace polystar;
using std::numbers::pi;

namespace {

const double kMassN1 = std::sqrt(pi / 2.0);

steady::ShootOptions cells(std::size_t n) {
  steady::ShootOptions o;
  o.interior_cells = n;
  return o;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("n = 1 star matches the sinc solution") {
  const auto eos = Eos::polytrope(1.0, 2.0);
  const auto p = steady::shoot(eos, 1.0);
  const double w = std::sqrt(2.0 * pi);
  CHECK(p.R_support == doctest::Approx(pi / w).epsilon(1e-10));
  CHECK(p.M == doctest::Approx(kMassN1).epsilon(1e-9));
  CHECK(p.E0 == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(p.kappa == 1.0);
  double worst = 0.0;
  const auto r = p.grid->r();
  for (std::size_t i = 1; i < r.size() && r[i] < p.R_support; ++i)
    worst = std::max(worst, std::abs(p.z(i) - std::sin(w * r[i]) / (w * r[i])));
  CHECK(worst <= 1e-9);

  const auto p2 = steady::shoot(eos, 2.0);
  CHECK(p2.M == doctest::Approx(2.0 * kMassN1).epsilon(1e-9));
  CHECK(p2.E0 == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(p2.R_support == doctest::Approx(p.R_support).epsilon(1e-10));
}

TEST_CASE("shooting errors") {
  CHECK_THROWS_AS(steady::shoot(Eos::polytrope(1.0, 2.0), 0.0), DomainError);
  CHECK_THROWS_AS(steady::shoot(Eos::polytrope(1.0, 2.0), -1.0), DomainError);
  CHECK_THROWS_AS(steady::shoot(Eos::polytrope(1.0, 1.2), 1.0), InfiniteRadiusError);
}

TEST_CASE("mass matching") {
  const auto eos = Eos::polytrope(1.0, 2.0);
  CHECK(steady::match_mass(eos, kMassN1).kappa == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(steady::match_mass(eos, 2.0 * kMassN1).kappa == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(steady::match_mass(eos, 0.0), DomainError);

  const auto two = Eos::two_power(1.0, 2.0, 0.5, 5.0 / 3.0);
  const auto m = steady::match_mass_detailed(two, 1.0, cells(256));
  CHECK(m.profile.M == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_FALSE(m.scan.empty());
  CHECK_FALSE(m.brackets.empty());
}

TEST_CASE("scaling family") {
  const auto n1 = steady::shoot(Eos::polytrope(1.0, 2.0), 1.0);
  const auto same = steady::scaling_family(n1, 1.0);
  CHECK(max_abs_diff(same.rho0, n1.rho0) <= 1e-15);
  const auto lin = steady::scaling_family(n1, 3.0);
  CHECK(lin.R_support == doctest::Approx(n1.R_support).epsilon(1e-14));
  CHECK(lin.M == doctest::Approx(3.0 * n1.M).epsilon(1e-14));

  const auto eos = Eos::polytrope(1.0, 5.0 / 3.0);
  const auto base = steady::shoot(eos, 0.7);
  const auto scaled = steady::scaling_family(base, 2.0);
  const auto direct = steady::shoot(eos, 1.4);
  CHECK(scaled.R_support == doctest::Approx(direct.R_support).epsilon(1e-8));
  CHECK(scaled.M == doctest::Approx(direct.M).epsilon(1e-8));
  CHECK(scaled.E0 == doctest::Approx(direct.E0).epsilon(1e-8));
  REQUIRE(scaled.rho0.size() == direct.rho0.size());
  CHECK(max_abs_diff(scaled.rho0, direct.rho0) <= 1e-8 * direct.rho0[0]);
  CHECK(max_abs_diff(scaled.V0, direct.V0) <= 1e-8 * std::abs(direct.V0[0]));

  CHECK_THROWS_AS(steady::scaling_family(base, 0.0), DomainError);
  const auto gen = steady::shoot(Eos::two_power(1.0, 2.0, 0.5, 5.0 / 3.0), 1.0, cells(128));
  CHECK_THROWS_AS(steady::scaling_family(gen, 2.0), ConfigError);
}

TEST_CASE("Euler-Lagrange residual") {
  const auto p = steady::shoot(Eos::polytrope(1.0, 2.0), 1.0);
  CHECK(steady::euler_lagrange_residual(p).max() <= 1e-10);

  auto bumped = p;
  for (std::size_t i = 0; i < bumped.V0.size(); ++i)
    if (bumped.rho0[i] > 0.0) bumped.V0[i] += 1e-3;
  CHECK(steady::euler_lagrange_residual(bumped).support == doctest::Approx(1e-3).epsilon(1e-6));

  // Uniform ball with its own potential is not a steady state.
  auto ball = p;
  const double rho_ball = 3.0 * p.M / (4.0 * pi * std::pow(p.R_support, 3));
  for (std::size_t i = 0; i < ball.rho0.size(); ++i)
    ball.rho0[i] = p.grid->r(i) < p.R_support ? rho_ball : 0.0;
  const auto V = gravity::potential_of(ball.density());
  ball.V0.assign(V.values().begin(), V.values().end());
  CHECK(steady::euler_lagrange_residual(ball).max() >= 0.1);
}

TEST_CASE("static Euler residual converges at second order") {
  const auto eos = Eos::polytrope(1.0, 2.0);
  const double coarse = steady::static_euler_residual(steady::shoot(eos, 1.0, cells(1024)));
  const double fine = steady::static_euler_residual(steady::shoot(eos, 1.0, cells(2048)));
  CHECK(fine <= 1e-5);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));

  auto vacuum = steady::shoot(eos, 1.0, cells(64));
  std::fill(vacuum.rho0.begin(), vacuum.rho0.end(), 0.0);
  CHECK(steady::static_euler_residual(vacuum) == 0.0);
}

TEST_CASE("shooting with an explicit source") {
  // g(z) = z_+ / 2 is the n = 1 law with c = 1, written out by hand.
  const auto eos = Eos::polytrope(1.0, 2.0);
  const auto a = steady::shoot_with_source(eos, [](double z) { return z > 0.0 ? 0.5 * z : 0.0; }, 1.0);
  const auto b = steady::shoot(eos, 1.0);
  CHECK(a.M == doctest::Approx(b.M).epsilon(1e-12));
  CHECK(steady::shoot_summary(eos, 1.0).R == doctest::Approx(b.R_support).epsilon(1e-12));
}

TEST_CASE("property: profile invariants across equations of state") {
  const std::vector<std::pair<Eos, double>> cases{
      {Eos::polytrope(1.0, 2.0), 1.0},       {Eos::polytrope(1.0, 5.0 / 3.0), 1.0},
      {Eos::polytrope(0.5, 1.4), 0.3},
      {Eos::two_power(1.0, 2.0, 0.5, 5.0 / 3.0), 1.0}};
  for (const auto& [eos, kappa] : cases) {
    CAPTURE(eos.name());
    CAPTURE(eos.gamma());
    const auto p = steady::shoot(eos, kappa, cells(1024));
    CHECK(p.E0 < 0.0);
    CHECK(p.E0 == doctest::Approx(-p.M / p.R_support).epsilon(1e-12));
    CHECK(p.rho0[0] == doctest::Approx(eos.phi_prime_inv(kappa)).epsilon(1e-12));
    for (std::size_t i = 1; i < p.rho0.size(); ++i) {
      CHECK(p.rho0[i] <= p.rho0[i - 1]);
      CHECK(p.V0[i] >= p.V0[i - 1]);
      const double r = p.grid->r(i);
      if (r >= p.R_support) {
        CHECK(p.rho0[i] == 0.0);
        CHECK(std::abs(p.V0[i] * r + p.M) <= 1e-10 * p.M);
      }
    }
    CHECK(p.density().mass() == doctest::Approx(p.M).epsilon(1e-8));
    const auto V = gravity::potential_of(p.density());
    double worst = 0.0;
    for (std::size_t i = 0; i < p.V0.size(); ++i) worst = std::max(worst, std::abs(V[i] - p.V0[i]));
    CHECK(worst <= 1e-7 * std::abs(p.V0[0]));
    CHECK(steady::euler_lagrange_residual(p).max() <= 1e-10 * kappa);
  }
}

TEST_CASE("n < 1: surface square-root profile limits the quadrature order") {
  // rho0 ~ z^(1/2) at the surface, so Simpson converges at h^1.5 there.
  const auto eos = Eos::polytrope(2.0, 3.0);
  double prev = 0.0;
  for (std::size_t n : {512u, 1024u, 2048u}) {
    const auto p = steady::shoot(eos, 2.5, cells(n));
    const double err = std::abs(p.density().mass() - p.M) / p.M;
    CHECK(err <= 1e-4);
    if (prev > 0.0) CHECK(prev / err >= 2.5);
    prev = err;
  }
}
