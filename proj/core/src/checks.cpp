#include "polystar/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>

#include "polystar/energetics.hpp"
#include "polystar/error.hpp"
#include "polystar/gravity.hpp"
#include "polystar/hydro1d.hpp"
#include "polystar/kinetic.hpp"
#include "polystar/steady.hpp"
#include "polystar/varmin.hpp"

namespace polystar::checks {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Seeded smooth velocity u(r) = sum_j a_j sin(j pi r / r_max).
FlowField random_flow(const GridPtr& grid, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> U(-amplitude, amplitude);
  const double a1 = U(rng), a2 = U(rng), a3 = U(rng);
  const auto r = grid->r();
  std::vector<double> u(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = kPi * r[i] / grid->r_max();
    u[i] = a1 * std::sin(x) + a2 * std::sin(2 * x) + a3 * std::sin(3 * x);
  }
  return FlowField(grid, std::move(u));
}

Result c1_lane_emden() {
  Result res{1, "Lane-Emden n=1 oracle", false, {}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = steady::shoot(Eos::polytrope(1.0, 2.0), 1.0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto r = p.grid->r();
  const double k = std::sqrt(2.0 * kPi);
  double zerr = 0.0;
  for (std::size_t i = 0; i < r.size() && r[i] <= p.R_support; ++i) {
    const double x = k * r[i];
    zerr = std::max(zerr, std::abs(p.z(i) - (x > 0.0 ? std::sin(x) / x : 1.0)));
  }
  const double R_ex = std::sqrt(kPi / 2.0);
  const double dR = std::abs(p.R_support - R_ex);
  const double dM = rel(p.M, R_ex);
  const double dE = std::abs(p.E0 + 1.0);
  res.pass = zerr <= 1e-6 && dR <= 1e-6 && dM <= 1e-6 && dE <= 1e-6 && secs < 1.0;
  res.detail = fmt("max|z-sinc| %.2e, |R-sqrt(pi/2)| %.2e, dM/M %.2e, |E0+1| %.2e, shoot %.3f s",
                   zerr, dR, dM, dE, secs);
  return res;
}

Result c2_negative_infimum() {
  Result res{2, "negative infimum of H_r", false, {}};
  res.pass = true;
  for (double g : {1.4, 5.0 / 3.0, 2.0}) {
    const auto eos = Eos::polytrope(1.0, g);
    const auto p = steady::match_mass(eos, 1.0);
    const double hr = energetics::reduced_energy(p.density(), eos);
    res.pass = res.pass && hr < 0.0;
    res.detail += fmt("%sgamma %.4g: H_r %.6g", res.detail.empty() ? "" : ", ", g, hr);
  }
  return res;
}

Result c3_euler_lagrange() {
  Result res{3, "Euler-Lagrange residual and cutoff slack", false, {}};
  std::vector<std::pair<std::string, steady::RadialProfile>> profiles;
  profiles.emplace_back("gamma 2 kappa 1", steady::shoot(Eos::polytrope(1.0, 2.0), 1.0));
  for (double g : {1.4, 5.0 / 3.0, 2.0}) {
    profiles.emplace_back(fmt("gamma %.4g M 1", g), steady::match_mass(Eos::polytrope(1.0, g), 1.0));
  }
  profiles.emplace_back("two-power M 1",
                        steady::match_mass(Eos::two_power(1.0, 2.0, 0.5, 5.0 / 3.0), 1.0));
  profiles.emplace_back("kinetic k=1",
                        steady::shoot(kinetic::induced_eos(kinetic::KineticAnsatz::polytropic(1.0)), 1.0));
  double worst = 0.0, min_slack = std::numeric_limits<double>::infinity();
  for (const auto& [name, p] : profiles) {
    worst = std::max(worst, steady::euler_lagrange_residual(p).support);
    for (std::size_t i = 0; i < p.rho0.size(); ++i) {
      if (p.rho0[i] == 0.0) min_slack = std::min(min_slack, p.V0[i] - p.E0);
    }
  }
  res.pass = worst <= 1e-8 && min_slack >= 0.0;
  res.detail = fmt("%zu profiles: max support residual %.2e, min off-support slack %.3g",
                   profiles.size(), worst, min_slack);
  return res;
}

double spread(const gravity::PotentialEnergyForms& f) {
  const double lo = std::min({f.pair, f.potential, f.field});
  const double hi = std::max({f.pair, f.potential, f.field});
  return (hi - lo) / std::abs(f.field);
}

Result c4_potential_forms() {
  Result res{4, "potential-energy triple identity", false, {}};
  const auto p = steady::shoot(Eos::polytrope(1.0, 2.0), 1.0);
  const double s_le = spread(gravity::potential_energy_forms(p.density()));
  // Ball of radius 1 ending on a cell edge.
  const auto grid = make_grid(RadialGrid::uniform_cells(2.0, 8192));
  const auto ball = varmin::uniform_ball(grid, 1.0, 1.0);
  const auto fb = gravity::potential_energy_forms(ball);
  const double exact = -3.0 / 5.0;
  const double s_ball = std::max({rel(fb.pair, exact), rel(fb.potential, exact), rel(fb.field, exact)});
  res.pass = s_le <= 1e-6 && s_ball <= 1e-6;
  res.detail = fmt("Lane-Emden spread %.2e; ball max deviation from -3M^2/5R %.2e", s_le, s_ball);
  return res;
}

struct TrialSet {
  steady::RadialProfile profile;
  std::vector<GridDensity> rho;
  std::vector<FlowField> u;
};

TrialSet gamma2_trials(std::uint64_t seed) {
  auto p = steady::shoot(Eos::polytrope(1.0, 2.0), 1.0);
  energetics::TrialOptions opts;
  opts.exterior_fraction = 0.5;
  auto rho = energetics::trial_states(p, 100, seed, opts);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<FlowField> u;
  for (std::size_t i = 0; i < rho.size(); ++i) u.push_back(random_flow(p.grid, rng, 0.3));
  return {std::move(p), std::move(rho), std::move(u)};
}

Result c5_expansion(std::uint64_t seed) {
  Result res{5, "expansion identity", false, {}};
  const auto set = gamma2_trials(seed);
  const double h0 = energetics::reduced_energy(set.profile.density(), set.profile.eos);
  double worst = 0.0;
  for (std::size_t i = 0; i < set.rho.size(); ++i) {
    const double lhs = energetics::total_energy(set.rho[i], set.u[i], set.profile.eos) - h0;
    const double r = energetics::expansion_identity_check(set.rho[i], set.u[i], set.profile);
    worst = std::max(worst, r / (1.0 + std::abs(lhs)));
  }
  res.pass = worst <= 1e-8;
  res.detail = fmt("100 trials: max residual/(1+|LHS|) %.2e", worst);
  return res;
}

Result c6_distance(std::uint64_t seed) {
  Result res{6, "d-functional sign and Bregman case", false, {}};
  const auto set = gamma2_trials(seed);
  const auto& p = set.profile;
  double d_min = std::numeric_limits<double>::infinity(), worst = 0.0;
  std::size_t inside = 0;
  for (const auto& rho : set.rho) {
    d_min = std::min(d_min, energetics::distance_d(rho, p));
    bool in_support = true;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (p.rho0[i] == 0.0 && rho[i] != 0.0) in_support = false;
    }
    if (!in_support) continue;
    ++inside;
    // Phi = c rho^2 / (gamma - 1) with c = 1, gamma = 2.
    const auto q = energetics::quadratic_lower_bound_check(rho, p, 1.0);
    worst = std::max(worst, rel(q.d, q.bound));
  }
  res.pass = d_min >= -1e-10 && inside > 0 && worst <= 1e-10;
  res.detail = fmt("min d %.3e over 100 trials; %zu in-support trials, max |d/(c||drho||^2)-1| %.2e",
                   d_min, inside, worst);
  return res;
}

Result c7_variational() {
  Result res{7, "variational cross-check", false, {}};
  res.pass = true;
  const auto t0 = std::chrono::steady_clock::now();
  for (double g : {2.0, 5.0 / 3.0}) {
    const auto eos = Eos::polytrope(1.0, g);
    const auto ref = steady::match_mass(eos, 1.0, {2048, 2.0});
    const auto grid = varmin::default_grid(2.0 * ref.R_support, 512);
    const auto rho0 = gravity::on_grid(ref.density(), grid).with_mass(1.0);
    const auto tr = varmin::minimize_hr(eos, 1.0, varmin::uniform_ball(grid, 1.0, ref.R_support));
    const double hr0 = energetics::reduced_energy(rho0, eos);
    const double hr = tr.entries.back().hr;
    bool monotone = true;
    for (std::size_t i = 1; i < tr.entries.size(); ++i) {
      monotone = monotone && tr.entries[i].hr <= tr.entries[i - 1].hr;
    }
    const auto w = grid->volume_weights();
    double l1 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) l1 += w[i] * std::abs(tr.final_density[i] - rho0[i]);
    const bool ok = tr.converged && monotone && hr <= hr0 + 1e-4 * std::abs(hr0) && l1 <= 1e-2;
    res.pass = res.pass && ok;
    res.detail += fmt("%sgamma %.4g: %zu iters, H_r %.10g vs %.10g, L1/M %.2e%s",
                      res.detail.empty() ? "" : "; ", g, tr.entries.size() - 1, hr, hr0, l1,
                      monotone ? "" : ", NOT monotone");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = res.pass && secs < 60.0;
  return res;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
  return v;
}

Result c8_reduction() {
  Result res{8, "reduction oracle", false, {}};
  std::vector<double> f{0.0};
  for (double x : log_grid(1e-8, 1e2, 800)) f.push_back(x);
  std::vector<double> lambda;
  for (int i = 0; i < 20; ++i) lambda.push_back(0.05 + 0.1 * i);
  const auto rho = log_grid(1e-3, 1.0, 40);

  std::vector<double> Q;
  for (double x : f) Q.push_back(x * x);
  const auto sq = kinetic::phi_from_q(f, Q, lambda, rho);
  double star_err = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double ex = 16.0 * std::sqrt(2.0) * kPi / 105.0 * std::pow(lambda[i], 3.5);
    star_err = std::max(star_err, rel(sq.phi_star[i], ex));
  }

  double n_err = 0.0;
  for (double k : {0.5, 1.0}) {
    const auto a = kinetic::KineticAnsatz::polytropic(k);
    std::vector<double> Qk;
    for (double x : f) Qk.push_back(a.Q(x));
    n_err = std::max(n_err, std::abs(kinetic::phi_from_q(f, Qk, lambda, rho).index - (k + 1.5)));
  }

  double gh_err = 0.0;
  for (double k : {0.0, 0.5, 1.0}) {
    const auto a = kinetic::KineticAnsatz::polytropic(k, 1.0, 0.0);
    for (double V : {-2.0, -1.0, -0.25}) {
      gh_err = std::max(gh_err, rel(kinetic::g_phi(a, V), kinetic::g_phi_quadrature(a, V)));
      gh_err = std::max(gh_err, rel(kinetic::h_phi(a, V), kinetic::h_phi_quadrature(a, V)));
    }
  }
  res.pass = star_err <= 1e-6 && n_err <= 1e-3 && gh_err <= 1e-6;
  res.detail = fmt("Phi* max rel err %.2e at 20 lambda; max |n_fit-(k+3/2)| %.2e; g/h closed vs quadrature %.2e",
                   star_err, n_err, gh_err);
  return res;
}

Result c9_casimir(std::uint64_t seed) {
  Result res{9, "energy-Casimir consistency", false, {}};
  const auto a = kinetic::KineticAnsatz::polytropic(1.0);
  const auto eos = kinetic::induced_eos(a);
  const auto p = steady::shoot(eos, 1.0, {2048, 2.0});
  const auto f0 = kinetic::lift_minimizer(p, a);
  const double hc = kinetic::casimir_energy(f0, a);
  const double hr = energetics::reduced_energy(p.density(), eos);
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& t : kinetic::isotropic_trials(f0, p, a, 20, seed)) {
    gap = std::min(gap, kinetic::casimir_energy(t, a) - energetics::reduced_energy(t.density(), eos));
  }
  res.pass = rel(hc, hr) <= 1e-4 && gap >= -1e-8;
  res.detail = fmt("H_C(f0) %.10g vs H_r(rho0) %.10g (rel %.2e); min H_C(f)-H_r(rho_f) over 20 trials %.3e",
                   hc, hr, rel(hc, hr), gap);
  return res;
}

Result c10_static_residuals() {
  Result res{10, "TOV and static-Euler residuals", false, {}};
  auto pair = [](const Eos& eos, auto&& residual) {
    const double fine = residual(steady::shoot(eos, 1.0, {2048, 2.0}));
    const double coarse = residual(steady::shoot(eos, 1.0, {1024, 2.0}));
    return std::pair{fine, coarse / fine};
  };
  const auto n1 = pair(Eos::polytrope(1.0, 2.0), steady::static_euler_residual);
  const auto a = kinetic::KineticAnsatz::polytropic(1.0);
  const auto tov = pair(kinetic::induced_eos(a),
                        [&](const steady::RadialProfile& p) { return kinetic::tov_residual(p, a); });
  res.pass = n1.first <= 1e-5 && n1.second >= 3.5 && tov.first <= 1e-5 && tov.second >= 3.5;
  res.detail = fmt("N=2048: static-Euler n=1 %.2e (ratio %.2f), TOV lifted k=1 %.2e (ratio %.2f)",
                   n1.first, n1.second, tov.first, tov.second);
  return res;
}

Result c11_hydro() {
  Result res{11, "hydrodynamic conservation and equilibrium", false, {}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto eos = Eos::polytrope(1.0, 2.0);
  const auto p = hydro1d::discrete_equilibrium(eos, 1.0, 1024);
  const double tsc = hydro1d::sound_crossing_time(p);
  hydro1d::RunOptions opts;
  opts.t_end = 10.0 * tsc;
  opts.output_interval = 0.5 * tsc;

  const auto still = hydro1d::run(hydro1d::from_profile(p), p, opts);
  const auto pert = hydro1d::perturb(p, hydro1d::PerturbationKind::density_bump, 1e-3);
  const auto moved = hydro1d::run(pert.state, p, opts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double mass = std::max(still.mass_drift, moved.mass_drift);
  res.pass = !still.aborted && !moved.aborted && mass <= 1e-12 && still.max_metric <= 1e-8 &&
             moved.max_metric_ratio <= 10.0 && !moved.conservation_violated &&
             moved.energy_drift <= 1e-3 && secs < 120.0;
  res.detail = fmt("mass drift %.2e; unperturbed max metric %.2e; eps=1e-3 metric ratio %.3f, energy "
                   "drift %.2e; %.1f s for 2 runs of 10 crossings",
                   mass, still.max_metric, moved.max_metric_ratio, moved.energy_drift, secs);
  if (moved.conservation_violated) res.detail += "; conservation hypothesis violated";
  return res;
}

Result c12_non_compact() {
  Result res{12, "non-compact detection", false, {}};
  try {
    const auto p = steady::shoot(Eos::polytrope(1.0, 1.2), 1.0);
    res.detail = fmt("shooting returned R = %.6g", p.R_support);
  } catch (const InfiniteRadiusError& e) {
    const std::string msg = e.what();
    res.pass = msg.find("infinite-radius") != std::string::npos;
    res.detail = "gamma 6/5: " + msg;
  }
  return res;
}

}  // namespace

Result run(int id, std::uint64_t seed) {
  static const char* const names[kCriteria] = {
      "Lane-Emden n=1 oracle", "negative infimum of H_r",
      "Euler-Lagrange residual and cutoff slack", "potential-energy triple identity",
      "expansion identity", "d-functional sign and Bregman case",
      "variational cross-check", "reduction oracle",
      "energy-Casimir consistency", "TOV and static-Euler residuals",
      "hydrodynamic conservation and equilibrium", "non-compact detection"};
  if (id < 1 || id > kCriteria) throw PreconditionError("no acceptance criterion " + std::to_string(id));
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    switch (id) {
      case 1: r = c1_lane_emden(); break;
      case 2: r = c2_negative_infimum(); break;
      case 3: r = c3_euler_lagrange(); break;
      case 4: r = c4_potential_forms(); break;
      case 5: r = c5_expansion(seed); break;
      case 6: r = c6_distance(seed); break;
      case 7: r = c7_variational(); break;
      case 8: r = c8_reduction(); break;
      case 9: r = c9_casimir(seed); break;
      case 10: r = c10_static_residuals(); break;
      case 11: r = c11_hydro(); break;
      default: r = c12_non_compact(); break;
    }
  } catch (const std::exception& e) {
    r = Result{id, names[id - 1], false, std::string("error: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<Result> run_all(std::uint64_t seed, const std::function<void(const Result&)>& on_result) {
  std::vector<Result> out;
  for (int id = 1; id <= kCriteria; ++id) {
    out.push_back(run(id, seed));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format(const Result& r) {
  return fmt("[%s] %02d %-42s %s (%.2f s)", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
             r.detail.c_str(), r.seconds);
}

}  // namespace polystar::checks
