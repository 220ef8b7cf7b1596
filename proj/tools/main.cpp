#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/version.hpp>

#include "config.hpp"
#include "polystar/checks.hpp"
#include "polystar/energetics.hpp"
#include "polystar/error.hpp"
#include "polystar/gravity.hpp"
#include "polystar/hydro1d.hpp"
#include "polystar/io.hpp"
#include "polystar/kinetic.hpp"
#include "polystar/steady.hpp"
#include "polystar/varmin.hpp"

#ifndef POLYSTAR_VERSION
#define POLYSTAR_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace polystar::cli {
namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kConservation = 4 };

struct Run {
  Config cfg;
  fs::path out;
  std::uint64_t seed = 0;
  bool quiet = false;
  std::vector<std::string> outputs;

  template <class... A>
  void say(const char* f, A... args) const {
    if (quiet) return;
    if constexpr (sizeof...(A) == 0) {
      std::fputs(f, stdout);
    } else {
      std::printf(f, args...);
    }
    std::fputc('\n', stdout);
  }

  void write(const std::string& name, const std::string& text) {
    io::write_atomic(out / name, text);
    outputs.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void write_csv(const std::string& name, const std::vector<io::Column>& cols,
                 const std::vector<std::string>& comments) {
    write(name, io::format_csv(cols, comments));
  }
};

json eos_json(const Eos& eos) {
  json j{{"name", eos.name()}, {"kind", eos.is_polytrope() ? "polytrope" : "generalized"}};
  if (eos.is_polytrope()) {
    j["c"] = eos.c();
    j["gamma"] = eos.gamma();
    j["n"] = eos.polytropic_index();
  }
  return j;
}

json columns_json(const std::vector<io::Column>& cols) {
  json j = json::array();
  for (const auto& c : cols) j.push_back({{"name", c.name}, {"unit", c.unit}});
  return j;
}

steady::ShootOptions shoot_options(const Section& s) {
  steady::ShootOptions o;
  o.interior_cells = s.count("N", 16);
  o.outer_factor = s.number("outer_factor");
  if (!(o.outer_factor > 1.0)) throw ConfigError("steady.outer_factor must be > 1");
  return o;
}

// ---- steady -----------------------------------------------------------------

int cmd_steady(Run& run) {
  const Eos eos = run.cfg.eos();
  const auto s = run.cfg.section("steady");
  const auto opts = shoot_options(s);
  const auto mass = s.optional_number("mass");
  if (mass && !(*mass > 0.0)) throw ConfigError("steady.mass must be > 0");
  const double kappa = mass ? 0.0 : s.positive("kappa");

  const auto p = mass ? steady::match_mass(eos, *mass, opts) : steady::shoot(eos, kappa, opts);
  const double hr = energetics::reduced_energy(p.density(), eos);
  const auto el = steady::euler_lagrange_residual(p);
  const double se = steady::static_euler_residual(p);

  const auto cols = io::profile_columns(p);
  run.write_csv("profile.csv", cols,
                {"polystar steady profile", "eos: " + eos.name(),
                 "E0 = " + io::format_number(p.E0) + ", R = " + io::format_number(p.R_support) +
                     ", M = " + io::format_number(p.M)});
  run.write_json("profile.json",
                 {{"eos", eos_json(eos)},
                  {"kappa", p.kappa},
                  {"E0", p.E0},
                  {"R", p.R_support},
                  {"M", p.M},
                  {"Hr", hr},
                  {"residuals",
                   {{"euler_lagrange_support", el.support},
                    {"euler_lagrange_exterior", el.exterior},
                    {"static_euler", se}}},
                  {"grid",
                   {{"interior_intervals", opts.interior_cells},
                    {"outer_factor", opts.outer_factor},
                    {"nodes", p.grid->size()}}},
                  {"columns", columns_json(cols)}});
  run.say("M        = %.12g", p.M);
  run.say("E0       = %.12g", p.E0);
  run.say("R        = %.12g", p.R_support);
  run.say("kappa    = %.12g", p.kappa);
  run.say("H_r(rho0) = %.12g", hr);
  run.say("Euler-Lagrange residual = %.3e (support), %.3e (exterior)", el.support, el.exterior);
  run.say("static-Euler residual   = %.3e", se);
  return kOk;
}

// ---- minimize ---------------------------------------------------------------

int cmd_minimize(Run& run) {
  const Eos eos = run.cfg.eos();
  const auto s = run.cfg.section("minimize");
  const double M = s.number("mass");
  if (!(M > 0.0) || !std::isfinite(M)) throw ConfigError("minimize.mass must be a finite number > 0");
  const std::string init = s.string("init");
  if (init != "ball" && init != "profile") {
    throw ConfigError("minimize.init must be \"ball\" or \"profile\", got \"" + init + "\"");
  }
  const std::size_t N = s.count("N", 16);
  const double r_max_factor = s.number("r_max_factor");
  const double ball_factor = s.positive("ball_radius_factor");
  if (!(r_max_factor > 1.0)) throw ConfigError("minimize.r_max_factor must be > 1");
  if (ball_factor > r_max_factor) {
    throw ConfigError("minimize.ball_radius_factor must not exceed r_max_factor");
  }
  varmin::MinimizeOptions opts;
  opts.max_iters = s.count("max_iters", 1);
  opts.threshold = s.positive("threshold");

  // Reference star of the same mass, also the length scale of the grid.
  std::optional<steady::RadialProfile> ref;
  std::string ref_note;
  try {
    ref = steady::match_mass(eos, M, {2048, 2.0});
  } catch (const NumericError& e) {
    ref_note = e.what();
  }
  if (!ref && init == "profile") {
    throw NumericError("init = \"profile\" needs the shooting profile: " + ref_note);
  }
  const double scale = ref ? ref->R_support : 1.0;
  const auto grid = varmin::default_grid(r_max_factor * scale, N);
  std::optional<GridDensity> rho_ref;
  if (ref) rho_ref = gravity::on_grid(ref->density(), grid).with_mass(M);
  const GridDensity start =
      init == "ball" ? varmin::uniform_ball(grid, M, ball_factor * scale) : *rho_ref;

  const auto tr = varmin::minimize_hr(eos, M, start, opts);
  const auto kkt = varmin::kkt_report(tr.final_density, eos);

  std::vector<io::Column> trace(5);
  trace[0] = {"iter", "", {}};
  trace[1] = {"H_r", "energy", {}};
  trace[2] = {"mass", "mass", {}};
  trace[3] = {"kkt_deviation", "length^2/time^2", {}};
  trace[4] = {"step", "length^3 time^2/mass", {}};
  for (const auto& e : tr.entries) {
    trace[0].values.push_back(double(e.iter));
    trace[1].values.push_back(e.hr);
    trace[2].values.push_back(e.mass);
    trace[3].values.push_back(e.kkt_dev);
    trace[4].values.push_back(e.step);
  }
  run.write_csv("trace.csv", trace, {"polystar minimize trace", "eos: " + eos.name()});

  const auto r = grid->r();
  const auto fin = tr.final_density.values();
  std::vector<io::Column> dens{{"r", "length", {r.begin(), r.end()}},
                               {"rho", "mass/length^3", {fin.begin(), fin.end()}}};
  if (rho_ref) {
    const auto v = rho_ref->values();
    dens.push_back({"rho_shoot", "mass/length^3", {v.begin(), v.end()}});
  }
  run.write_csv("density.csv", dens, {"polystar minimize final density", "eos: " + eos.name()});

  const double hr = tr.entries.back().hr;
  json summary{{"eos", eos_json(eos)},
               {"mass", M},
               {"init", init},
               {"status", tr.status},
               {"iterations", tr.entries.size() - 1},
               {"Hr_initial", tr.entries.front().hr},
               {"Hr_final", hr},
               {"kkt", {{"E0_hat", kkt.E0_hat}, {"deviation", kkt.deviation},
                        {"min_slack", kkt.min_slack}, {"support_nodes", kkt.support_nodes}}}};
  run.say("status      = %s after %zu iterations", tr.status.c_str(), tr.entries.size() - 1);
  run.say("H_r(init)   = %.12g", tr.entries.front().hr);
  run.say("H_r(final)  = %.12g", hr);
  run.say("E0 estimate = %.12g (KKT deviation %.3e)", kkt.E0_hat, kkt.deviation);
  if (ref) {
    const double hr_ref = energetics::reduced_energy(*rho_ref, eos);
    const double tol = 1e-4 * std::abs(hr_ref);
    const auto w = grid->volume_weights();
    double l1 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) l1 += w[i] * std::abs(tr.final_density[i] - (*rho_ref)[i]);
    summary["Hr_shoot"] = hr_ref;
    summary["L1_to_shoot"] = l1;
    summary["Hr_final_le_shoot_plus_tol"] = hr <= hr_ref + tol;
    run.say("H_r(shoot)  = %.12g", hr_ref);
    run.say("Hr(final) <= Hr(shoot)+tol: %s (tol %.3e)", hr <= hr_ref + tol ? "yes" : "no", tol);
    run.say("L1 distance to shooting profile = %.3e (%.3e of M)", l1, l1 / M);
  } else {
    summary["shoot_unavailable"] = ref_note;
    run.say("shooting profile unavailable: %s", ref_note.c_str());
  }
  run.write_json("summary.json", summary);
  if (tr.status == "max_iters") {
    std::fprintf(stderr, "polystar minimize: varmin did not converge within %zu iterations\n",
                 opts.max_iters);
    return kNumeric;
  }
  return kOk;
}

// ---- evolve -----------------------------------------------------------------

std::vector<io::Column> state_columns(const hydro1d::HydroState& st) {
  const auto r = st.grid->r();
  return {{"r", "length", {r.begin(), r.end()}},
          {"rho", "mass/length^3", st.rho},
          {"u", "length/time", st.velocity()}};
}

int cmd_evolve(Run& run) {
  const Eos eos = run.cfg.eos();
  const auto s = run.cfg.section("evolve");
  const double kappa = s.positive("kappa");
  const std::size_t cells = s.count("cells", 16);
  const double outer = s.number("outer_factor");
  if (!(outer > 1.0)) throw ConfigError("evolve.outer_factor must be > 1");
  const auto kind = hydro1d::parse_perturbation(s.string("perturbation"));
  const double amplitude = s.number("amplitude");
  if (!std::isfinite(amplitude)) throw ConfigError("evolve.amplitude must be finite");
  const double cfl = s.positive("cfl");
  if (cfl > 1.0) throw ConfigError("evolve.cfl must lie in (0, 1]");
  const double interval = s.positive("output_interval");
  const double drift_bound = s.positive("drift_bound");
  const auto t_end = s.optional_number("t_end");
  if (t_end && !(*t_end > 0.0)) throw ConfigError("evolve.t_end must be > 0");
  const double crossings = s.positive("crossings");

  const auto p = hydro1d::discrete_equilibrium(eos, kappa, cells, outer);
  const double tsc = hydro1d::sound_crossing_time(p);
  const auto pert = hydro1d::perturb(p, kind, amplitude);

  hydro1d::RunOptions opts;
  opts.t_end = t_end ? *t_end : crossings * tsc;
  opts.output_interval = interval * tsc;
  opts.cfl = cfl;
  opts.drift_bound = drift_bound;
  const auto res = hydro1d::run(pert.state, p, opts);

  std::vector<io::Column> ledger{{"t", "time", {}},          {"mass", "mass", {}},
                                 {"energy", "energy", {}},   {"rho_max", "mass/length^3", {}},
                                 {"rho_min", "mass/length^3", {}}, {"outflow", "mass", {}},
                                 {"mass_drift", "", {}},     {"energy_drift", "", {}}};
  for (const auto& e : res.ledger) {
    const double v[] = {e.t, e.mass, e.energy, e.rho_max, e.rho_min, e.outflow, e.mass_drift, e.energy_drift};
    for (std::size_t j = 0; j < ledger.size(); ++j) ledger[j].values.push_back(v[j]);
  }
  const std::vector<std::string> head{"polystar evolve", "eos: " + eos.name(),
                                      "perturbation: " + hydro1d::to_string(kind) + ", amplitude " +
                                          io::format_number(amplitude)};
  run.write_csv("ledger.csv", ledger, head);

  const double m0 = pert.initial_metric.total;
  std::vector<io::Column> metric{{"t", "time", {}},       {"d", "energy", {}},
                                 {"field", "energy", {}}, {"kinetic", "energy", {}},
                                 {"total", "energy", {}}, {"ratio", "", {}}};
  for (const auto& m : res.metrics) {
    const double v[] = {m.t, m.metric.d_part, m.metric.field_part, m.metric.kinetic_part, m.metric.total,
                        m0 > 0.0 ? m.metric.total / m0 : std::nan("")};
    for (std::size_t j = 0; j < metric.size(); ++j) metric[j].values.push_back(v[j]);
  }
  run.write_csv("metric.csv", metric, head);
  run.write_csv("final_state.csv", state_columns(res.final_state), head);

  json summary{{"eos", eos_json(eos)},
               {"kappa", kappa},
               {"cells", cells},
               {"perturbation", hydro1d::to_string(kind)},
               {"amplitude", amplitude},
               {"sound_crossing_time", tsc},
               {"t_end", opts.t_end},
               {"steps", res.steps},
               {"initial_metric", m0},
               {"max_metric", res.max_metric},
               {"mass_drift", res.mass_drift},
               {"energy_drift", res.energy_drift},
               {"conservation_violated", res.conservation_violated},
               {"aborted", res.aborted}};
  if (m0 > 0.0) summary["max_metric_ratio"] = res.max_metric_ratio;

  run.say("sound-crossing time = %.6g, t_end = %.6g, %zu steps", tsc, opts.t_end, res.steps);
  if (m0 > 0.0) {
    run.say("max metric ratio = %.6g (initial metric %.3e)", res.max_metric_ratio, m0);
  } else {
    run.say("max metric ratio = n/a (initial metric 0)");
  }
  run.say("max metric       = %.3e", res.max_metric);
  run.say("mass drift       = %.3e", res.mass_drift);
  run.say("energy drift     = %.3e", res.energy_drift);

  if (res.aborted) {
    run.write_csv("state_dump.csv", state_columns(res.final_state),
                  {"last good state before abort at t = " + io::format_number(res.final_state.t)});
    summary["abort_reason"] = res.abort_reason;
    run.write_json("summary.json", summary);
    std::fprintf(stderr, "polystar evolve: hydro1d numeric error: %s\nstate dump: %s\n",
                 res.abort_reason.c_str(), (run.out / "state_dump.csv").string().c_str());
    return kNumeric;
  }
  run.write_json("summary.json", summary);
  if (res.conservation_violated) {
    std::fprintf(stderr,
                 "polystar evolve: conservation hypothesis violated: energy drift %.3e exceeds %.3e "
                 "(stability untested)\n",
                 res.energy_drift, drift_bound);
    return kConservation;
  }
  return kOk;
}

// ---- reduce -----------------------------------------------------------------

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int cmd_reduce(Run& run) {
  const auto s = run.cfg.section("reduce");
  const double k = s.number("k");
  const double C = s.positive("C");
  const double kappa = s.positive("kappa");
  const std::size_t N = s.count("N", 16);
  const std::size_t trials = s.count("trials", 0);
  const std::size_t f_points = s.count("f_points", 16);
  const auto slices = s.numbers("slice_radii");
  for (double x : slices) {
    if (!(x >= 0.0 && x < 1.0)) throw ConfigError("reduce.slice_radii must lie in [0, 1)");
  }
  auto a = kinetic::KineticAnsatz::polytropic(k == 0.0 ? 0.0 : k, C);
  // k = 0 has no power-law Casimir integrand; only the ansatz integrals are
  // checked. Everything else needs the admissible range.
  if (k != 0.0) kinetic::require_admissible(a);

  json report{{"k", k}, {"C", C}, {"n_expected", k + 1.5}};
  run.say("k = %g, C = %g, expected n = k + 3/2 = %g", k, C, k + 1.5);

  double gh = 0.0;
  for (double V : {-2.0, -1.0, -0.25}) {
    gh = std::max(gh, rel(kinetic::g_phi(a, V), kinetic::g_phi_quadrature(a, V)));
    gh = std::max(gh, rel(kinetic::h_phi(a, V), kinetic::h_phi_quadrature(a, V)));
  }
  report["g_h_closed_vs_quadrature"] = gh;
  run.say("g_phi, h_phi Beta closed forms vs quadrature: max rel diff %.3e", gh);

  // p against rho along the ansatz: slope gamma = 1 + 1/n.
  std::vector<double> rho_s, p_s;
  for (double z : log_grid(1e-3, 1.0, 41)) {
    rho_s.push_back(kinetic::g_phi(a, -z));
    p_s.push_back(kinetic::h_phi(a, -z));
  }
  const auto pf = kinetic::fit_power(rho_s, p_s);
  report["eos_fit"] = {{"gamma", pf.exponent}, {"n", 1.0 / (pf.exponent - 1.0)}, {"c", pf.constant}};
  run.say("induced equation of state p = %.10g rho^%.10g (n = %.10g)", pf.constant, pf.exponent,
          1.0 / (pf.exponent - 1.0));

  if (k == 0.0) {
    report["note"] = "k = 0: Casimir integrand is not a power law; conjugation and lifting skipped";
    run.say("k = 0: conjugation and lifting skipped");
    run.write_json("reduce.json", report);
    return kOk;
  }

  std::vector<double> f{0.0};
  for (double x : log_grid(1e-8, 1e2, f_points)) f.push_back(x);
  std::vector<double> Q;
  for (double x : f) Q.push_back(a.Q(x));
  std::vector<double> lambda;
  for (int i = 0; i < 20; ++i) lambda.push_back(0.05 + 0.1 * i);
  const auto rho_grid = log_grid(1e-3, 1.0, 40);
  const auto red = kinetic::phi_from_q(f, Q, lambda, rho_grid);
  const Eos eos = kinetic::induced_eos(a);
  const double phi_const = eos.c() / (eos.gamma() - 1.0);
  const std::size_t q = rho_grid.size() / 4;
  const auto phi_fit = kinetic::fit_power({rho_grid.begin() + q, rho_grid.end() - q},
                                          {red.phi.begin() + q, red.phi.end() - q});
  report["n_fitted"] = red.index;
  report["phi_exponent"] = red.exponent;
  report["phi_constant_fitted"] = phi_fit.constant;
  report["phi_constant_expected"] = phi_const;
  run.say("n_fitted = %.8f (|n - (k+3/2)| = %.3e)", red.index, std::abs(red.index - (k + 1.5)));
  run.say("Phi constant: fitted %.10g, from g/h %.10g (rel %.3e)", phi_fit.constant, phi_const,
          rel(phi_fit.constant, phi_const));

  const auto p = steady::shoot(eos, kappa, {N, 2.0});
  const auto f0 = kinetic::lift_minimizer(p, a);
  const double hc = kinetic::casimir_energy(f0, a);
  const double hr = energetics::reduced_energy(p.density(), eos);
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& t : kinetic::isotropic_trials(f0, p, a, trials, run.seed)) {
    gap = std::min(gap, kinetic::casimir_energy(t, a) - energetics::reduced_energy(t.density(), eos));
  }
  const double tov = kinetic::tov_residual(p, a);
  report["star"] = {{"kappa", kappa}, {"R", p.R_support}, {"M", p.M}, {"E0", p.E0}};
  report["H_C"] = hc;
  report["H_r"] = hr;
  report["H_C_vs_H_r_rel"] = rel(hc, hr);
  report["tov_residual"] = tov;
  report["trials"] = trials;
  if (trials > 0) report["min_trial_gap"] = gap;
  run.say("H_C(f0) = %.12g, H_r(rho0) = %.12g (rel %.3e)", hc, hr, rel(hc, hr));
  if (trials > 0) run.say("min H_C(f) - H_r(rho_f) over %zu trials = %.3e", trials, gap);
  run.say("TOV residual = %.3e", tov);

  io::Column cr{"r", "length", {}}, cs{"s", "length/time", {}}, cf{"f0", "mass time^3/length^6", {}};
  const auto r = p.grid->r();
  for (double x : slices) {
    std::size_t i = 0;
    while (i + 1 < r.size() && r[i + 1] <= x * p.R_support) ++i;
    for (std::size_t j = 0; j < f0.s[i].size(); ++j) {
      cr.values.push_back(r[i]);
      cs.values.push_back(f0.s[i][j]);
      cf.values.push_back(f0.f[i][j]);
    }
  }
  run.write_csv("f0_slices.csv", {cr, cs, cf},
                {"polystar reduce: lifted minimizer f0(r, s) at fixed radii",
                 "phi(E) = C (E0 - E)_+^k with k = " + io::format_number(k)});
  run.write_json("reduce.json", report);
  return kOk;
}

// ---- check ------------------------------------------------------------------

int cmd_check(Run& run, const std::vector<int>& only) {
  json results = json::array();
  bool all = true;
  auto record = [&](const checks::Result& r) {
    all = all && r.pass;
    if (!run.quiet) std::printf("%s\n", checks::format(r).c_str()), std::fflush(stdout);
    results.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  };
  if (only.empty()) {
    checks::run_all(run.seed, record);
  } else {
    for (int id : only) {
      if (id < 1 || id > checks::kCriteria) throw ConfigError("no criterion " + std::to_string(id));
      record(checks::run(id, run.seed));
    }
  }
  run.write_json("check.json", {{"seed", run.seed}, {"all_pass", all}, {"results", results}});
  return all ? kOk : kNumeric;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const InfiniteRadiusError*>(&e)) return "infinite-radius error";
  if (dynamic_cast<const MassUnreachableError*>(&e)) return "mass-unreachable error";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric error";
  if (dynamic_cast<const ConfigError*>(&e)) return "config error";
  if (dynamic_cast<const DomainError*>(&e)) return "domain error";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition error";
  return "error";
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const PreconditionError*>(&e)) {
    return kConfig;
  }
  return kNumeric;
}

}  // namespace
}  // namespace polystar::cli

int main(int argc, char** argv) {
  using namespace polystar::cli;
  CLI::App app{"polystar: steady stars of the Euler-Poisson system as constrained energy minimizers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::int64_t seed = -1;
  bool quiet = false;
  app.add_option("--config", config_path, "TOML configuration file (default: built-in reference)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides 'out' in the config)");
  app.add_option("--seed", seed, "random seed (overrides 'seed' in the config)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet, "print nothing on success");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"steady", "shoot a steady star; writes profile.csv and profile.json"},
      {"minimize", "projected-gradient minimization of H_r; writes trace.csv, density.csv"},
      {"evolve", "finite-volume evolution of a perturbed star; writes ledger.csv, metric.csv"},
      {"reduce", "kinetic-to-fluid reduction report; writes reduce.json, f0_slices.csv"},
      {"check", "run the full invariant suite; writes check.json"}};
  std::vector<int> only;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "check") sub->add_option("--only", only, "run only these criteria (1-12)")->delimiter(',');
  }
  app.footer(
      "Exit codes: 0 ok, 2 configuration error, 3 numeric failure, 4 conservation hypothesis "
      "violated (evolve).\n\nDefault configuration (reference.toml):\n\n" +
      reference_config());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  const auto t0 = std::chrono::steady_clock::now();
  int code = kOk;
  std::optional<Run> run;
  try {
    Config cfg = Config::load(config_path);
    const fs::path out = out_dir.empty() ? fs::path(cfg.out_dir()) : fs::path(out_dir);
    const std::uint64_t s = seed >= 0 ? std::uint64_t(seed) : cfg.seed();
    run.emplace(Run{std::move(cfg), out, s, quiet, {}});
    if (command == "steady") code = cmd_steady(*run);
    else if (command == "minimize") code = cmd_minimize(*run);
    else if (command == "evolve") code = cmd_evolve(*run);
    else if (command == "reduce") code = cmd_reduce(*run);
    else code = cmd_check(*run, only);
  } catch (const std::exception& e) {
    const std::string module = command == "minimize" ? "varmin"
                               : command == "evolve" ? "hydro1d"
                               : command == "reduce" ? "kinetic"
                                                     : command;
    std::fprintf(stderr, "polystar %s: %s in %s: %s\n", command.c_str(), error_kind(e).c_str(),
                 module.c_str(), e.what());
    code = exit_code(e);
  }

  if (run) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const nlohmann::json prov{{"tool", "polystar"},
                              {"version", POLYSTAR_VERSION},
                              {"command", command},
                              {"config_source", run->cfg.source()},
                              {"config", run->cfg.to_json()},
                              {"seed", run->seed},
                              {"exit_code", code},
                              {"outputs", run->outputs},
                              {"compiler", __VERSION__},
                              {"boost", BOOST_LIB_VERSION},
                              {"wall_time_s", wall}};
    try {
      polystar::io::write_atomic(run->out / "provenance.json", prov.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::fprintf(stderr, "polystar %s: cannot write provenance: %s\n", command.c_str(), e.what());
      if (code == kOk) code = kNumeric;
    }
  }
  return code;
}
