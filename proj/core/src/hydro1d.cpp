#include "polystar/hydro1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "polystar/error.hpp"
#include "polystar/gravity.hpp"
#include "polystar/interp.hpp"

namespace polystar::hydro1d {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Geometry of a cell grid in the units used by the update: cell volumes
// and face areas without the common factor 4 pi (spherical), or plain
// lengths (slab).
struct Metric {
  std::vector<double> vol;
  std::vector<double> area;  // size n + 1
  std::vector<double> dr;
};

Metric metric_of(const RadialGrid& g, Geometry geo) {
  const auto e = g.edges();
  const std::size_t n = g.size();
  Metric m;
  m.vol.resize(n);
  m.dr.resize(n);
  m.area.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = e[i];
    const double b = e[i + 1];
    m.dr[i] = b - a;
    m.vol[i] = geo == Geometry::spherical ? (b * b * b - a * a * a) / 3.0 : b - a;
  }
  for (std::size_t f = 0; f <= n; ++f) m.area[f] = geo == Geometry::spherical ? e[f] * e[f] : 1.0;
  return m;
}

// Potential at centres and faces for the current density, built from the
// face fields exactly as gravity::potential_of does for cell grids.
struct Gravity {
  std::vector<double> v_cell;
  std::vector<double> v_face;  // size n + 1
};

Gravity gravity_of(const RadialGrid& g, const std::vector<double>& rho) {
  const auto e = g.edges();
  const auto r = g.r();
  const std::size_t n = rho.size();
  std::vector<double> gf(n + 1, 0.0);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = e[i];
    const double b = e[i + 1];
    m += kFourPi / 3.0 * (b * b * b - a * a * a) * rho[i];
    gf[i + 1] = m / (b * b);
  }
  Gravity out;
  out.v_cell.resize(n);
  out.v_face.resize(n + 1);
  out.v_cell[n - 1] = -m / e[n] - gf[n] * (e[n] - r[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) out.v_cell[i] = out.v_cell[i + 1] - gf[i + 1] * (r[i + 1] - r[i]);
  out.v_face[0] = out.v_cell[0];
  for (std::size_t f = 1; f <= n; ++f) out.v_face[f] = out.v_cell[f - 1] + gf[f] * (e[f] - r[f - 1]);
  return out;
}

struct Rates {
  std::vector<double> drho;
  std::vector<double> dmom;
  double outflow_rate = 0.0;  // mass per unit time through the outer face
};

struct FaceState {
  double rho;
  double u;
};

class Scheme {
 public:
  Scheme(const HydroState& s, const SolverOptions& opts)
      : s_(s), opts_(opts), grid_(*s.grid), geo_(metric_of(grid_, s.geometry)) {}

  Rates rates(const std::vector<double>& rho, const std::vector<double>& mom, double dt) const {
    const std::size_t n = rho.size();
    const auto r = grid_.r();
    const auto e = grid_.edges();
    const Eos& eos = s_.eos;
    const bool gravity = s_.geometry == Geometry::spherical;
    const double vac = opts_.vacuum_factor * s_.rho_floor;

    std::vector<double> v_cell(n, 0.0);
    std::vector<double> v_face(n + 1, 0.0);
    if (gravity) {
      Gravity gr = gravity_of(grid_, rho);
      v_cell = std::move(gr.v_cell);
      v_face = std::move(gr.v_face);
    }

    std::vector<char> vacuum(n);
    std::vector<double> u(n), E(n);
    for (std::size_t i = 0; i < n; ++i) {
      vacuum[i] = rho[i] <= vac;
      u[i] = vacuum[i] ? 0.0 : mom[i] / rho[i];
      E[i] = eos.phi_prime(rho[i]) + v_cell[i];
    }

    // Limited slopes of the equilibrium variable E = Phi'(rho) + V and of u.
    std::vector<double> sE(n, 0.0), su(n, 0.0);
    if (opts_.second_order) {
      for (std::size_t i = 0; i < n; ++i) {
        if (vacuum[i]) continue;
        const bool has_left = i > 0;
        const bool has_right = i + 1 < n;
        if ((has_left && vacuum[i - 1]) || (has_right && vacuum[i + 1])) continue;
        // Mirror ghost at the centre, zero-gradient ghost at the outer edge.
        const double dl = has_left ? r[i] - r[i - 1] : 2.0 * r[i];
        const double dr = has_right ? r[i + 1] - r[i] : 1.0;
        const double El = has_left ? E[i - 1] : E[i];
        const double Er = has_right ? E[i + 1] : E[i];
        const double ul = has_left ? u[i - 1] : -u[i];
        const double ur = has_right ? u[i + 1] : u[i];
        sE[i] = minmod((E[i] - El) / dl, (Er - E[i]) / dr);
        su[i] = minmod((u[i] - ul) / dl, (ur - u[i]) / dr);
      }
    }

    auto reconstruct = [&](std::size_t i, std::size_t f) -> FaceState {
      if (vacuum[i]) return {rho[i], 0.0};
      const double dx = e[f] - r[i];
      const double z = E[i] + sE[i] * dx - v_face[f];
      return {eos.phi_prime_inv(z), u[i] + su[i] * dx};
    };

    std::vector<double> f_mass(n + 1, 0.0), f_mom(n + 1, 0.0), p_face(n + 1, 0.0);
    for (std::size_t f = 0; f <= n; ++f) {
      FaceState L, R;
      if (f == 0) {
        R = reconstruct(0, 0);
        L = {R.rho, -R.u};
      } else if (f == n) {
        L = reconstruct(n - 1, n);
        R = {L.rho, std::max(L.u, 0.0)};
      } else {
        L = reconstruct(f - 1, f);
        R = reconstruct(f, f);
      }
      const double pL = eos.pressure(L.rho);
      const double pR = eos.pressure(R.rho);
      p_face[f] = 0.5 * (pL + pR);
      if (vacuum_pair(L, R, vac)) continue;
      const double a = std::max(std::abs(L.u) + eos.sound_speed(L.rho),
                                std::abs(R.u) + eos.sound_speed(R.rho));
      f_mass[f] = 0.5 * (L.rho * L.u + R.rho * R.u) - 0.5 * a * (R.rho - L.rho);
      f_mom[f] = 0.5 * (L.rho * L.u * L.u + R.rho * R.u * R.u) - 0.5 * a * (R.rho * R.u - L.rho * L.u);
    }
    f_mass[0] = 0.0;  // reflecting centre
    f_mom[0] = 0.0;
    if (f_mass[n] < 0.0) {
      f_mass[n] = 0.0;  // no inflow from beyond the grid
      f_mom[n] = std::max(f_mom[n], 0.0);
    }

    // Positivity: a cell may not export more mass in this stage than it
    // holds above the floor. Scaling the donor's outgoing fluxes keeps the
    // update conservative.
    std::vector<double> theta(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double out_rate = geo_.area[i + 1] * std::max(f_mass[i + 1], 0.0) +
                              geo_.area[i] * std::max(-f_mass[i], 0.0);
      const double budget = std::max(rho[i] - s_.rho_floor, 0.0) * geo_.vol[i];
      if (dt * out_rate > budget) theta[i] = budget / (dt * out_rate);
    }
    for (std::size_t f = 1; f <= n; ++f) {
      const std::size_t donor = f == n || f_mass[f] >= 0.0 ? f - 1 : f;
      f_mass[f] *= theta[donor];
      f_mom[f] *= theta[donor];
    }

    Rates out;
    out.drho.resize(n);
    out.dmom.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double aL = geo_.area[i];
      const double aR = geo_.area[i + 1];
      out.drho[i] = -(aR * f_mass[i + 1] - aL * f_mass[i]) / geo_.vol[i];
      double dm = -(aR * f_mom[i + 1] - aL * f_mom[i]) / geo_.vol[i] -
                  (p_face[i + 1] - p_face[i]) / geo_.dr[i];
      if (gravity && !vacuum[i]) {
        // Hydrostatic source: pressure drop across the cell of the
        // equilibrium with the cell's own E, cancelling the pressure term
        // above on a discrete steady state.
        const double p_hi = eos.pressure(eos.phi_prime_inv(E[i] - v_face[i + 1]));
        const double p_lo = eos.pressure(eos.phi_prime_inv(E[i] - v_face[i]));
        dm += (p_hi - p_lo) / geo_.dr[i];
      }
      out.dmom[i] = vacuum[i] ? 0.0 : dm;
    }
    const double outer_area = s_.geometry == Geometry::spherical ? kFourPi * geo_.area[n] : 1.0;
    out.outflow_rate = outer_area * f_mass[n];
    return out;
  }

  const Metric& geometry() const { return geo_; }

 private:
  static bool vacuum_pair(const FaceState& L, const FaceState& R, double vac) {
    return L.rho <= vac && R.rho <= vac && L.u == 0.0 && R.u == 0.0;
  }

  const HydroState& s_;
  SolverOptions opts_;
  const RadialGrid& grid_;
  Metric geo_;
};

// Applies the floor; returns the mass it created.
double apply_floor(HydroState& s, const Metric& geo, double vacuum_factor) {
  const double unit = s.geometry == Geometry::spherical ? kFourPi : 1.0;
  double added = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    if (!std::isfinite(s.rho[i]) || !std::isfinite(s.mom[i])) {
      std::ostringstream msg;
      msg << "non-finite state in cell " << i << " at t = " << s.t;
      throw NumericError(msg.str());
    }
    if (s.rho[i] < s.rho_floor) {
      added += unit * geo.vol[i] * (s.rho_floor - s.rho[i]);
      s.rho[i] = s.rho_floor;
    }
    if (s.rho[i] <= vacuum_factor * s.rho_floor) s.mom[i] = 0.0;
  }
  return added;
}

void require_cells(const RadialGrid& g, const char* what) {
  if (g.kind() != GridKind::cell) throw PreconditionError(std::string(what) + " needs a cell grid");
}

}  // namespace

std::vector<double> HydroState::velocity() const {
  std::vector<double> u(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) u[i] = rho[i] > 0.0 ? mom[i] / rho[i] : 0.0;
  return u;
}

double HydroState::mass() const {
  const Metric geo = metric_of(*grid, geometry);
  const double unit = geometry == Geometry::spherical ? kFourPi : 1.0;
  double m = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) m += unit * geo.vol[i] * rho[i];
  return m;
}

double cfl_dt(const HydroState& s, double cfl) {
  if (s.rho.empty()) throw PreconditionError("cfl_dt: empty state");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw PreconditionError("cfl factor must lie in (0, 1]");
  const auto e = s.grid->edges();
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double u = s.rho[i] > 0.0 ? std::abs(s.mom[i] / s.rho[i]) : 0.0;
    const double speed = u + s.eos.sound_speed(s.rho[i]);
    if (speed > 0.0) dt = std::min(dt, (e[i + 1] - e[i]) / speed);
  }
  if (!std::isfinite(dt)) throw PreconditionError("cfl_dt: state has no signal speed");
  return cfl * dt;
}

HydroState step(const HydroState& s, double dt, const SolverOptions& opts) {
  require_cells(*s.grid, "hydro step");
  if (!(dt > 0.0)) throw PreconditionError("time step must be > 0");
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    if (!std::isfinite(s.rho[i]) || !std::isfinite(s.mom[i]) || s.rho[i] < 0.0) {
      std::ostringstream msg;
      msg << "invalid state in cell " << i << " at t = " << s.t;
      throw NumericError(msg.str());
    }
  }
  const Scheme scheme(s, opts);
  const std::size_t n = s.rho.size();

  const Rates k1 = scheme.rates(s.rho, s.mom, dt);
  HydroState s1 = s;
  for (std::size_t i = 0; i < n; ++i) {
    s1.rho[i] += dt * k1.drho[i];
    s1.mom[i] += dt * k1.dmom[i];
  }
  s1.t = s.t + dt;
  const double added1 = apply_floor(s1, scheme.geometry(), opts.vacuum_factor);

  const Rates k2 = scheme.rates(s1.rho, s1.mom, dt);
  HydroState out = s;
  for (std::size_t i = 0; i < n; ++i) {
    out.rho[i] = 0.5 * (s.rho[i] + s1.rho[i] + dt * k2.drho[i]);
    out.mom[i] = 0.5 * (s.mom[i] + s1.mom[i] + dt * k2.dmom[i]);
  }
  out.t = s.t + dt;
  out.outflow += 0.5 * dt * (k1.outflow_rate + k2.outflow_rate);
  out.floor_added += 0.5 * added1 + apply_floor(out, scheme.geometry(), opts.vacuum_factor);
  return out;
}

steady::RadialProfile discrete_equilibrium(const Eos& eos, double kappa, std::size_t n_cells,
                                           double outer_factor) {
  if (!(kappa > 0.0)) throw DomainError("discrete_equilibrium: kappa must be > 0");
  if (!(outer_factor > 1.0)) throw ConfigError("outer_factor must be > 1");
  const auto K = std::size_t(std::llround(double(n_cells) / outer_factor));
  if (K < 4 || K >= n_cells) throw ConfigError("too few cells for the requested outer_factor");

  // March the enthalpy h = E0 - V outward; returns h extrapolated to face K
  // (negative if the star ends before it).
  auto march = [&](double dr, std::vector<double>* rho_out) {
    double h = kappa;
    double m = 0.0;
    if (rho_out) rho_out->assign(n_cells, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
      if (h <= 0.0) return h - double(K - i);
      const double rho = eos.phi_prime_inv(h);
      if (rho_out) (*rho_out)[i] = rho;
      const double a = double(i) * dr;
      const double b = double(i + 1) * dr;
      m += kFourPi / 3.0 * (b * b * b - a * a * a) * rho;
      const double g = m / (b * b);
      h -= g * (i + 1 < K ? dr : 0.5 * dr);
    }
    return h;
  };

  const double guess = steady::shoot_summary(eos, kappa, {64, 2.0, 2000.0, 1e4}).R / double(K);
  double lo = 0.5 * guess;
  double hi = 2.0 * guess;
  for (int it = 0; it < 60 && march(lo, nullptr) <= 0.0; ++it) lo *= 0.5;
  for (int it = 0; it < 60 && march(hi, nullptr) > 0.0; ++it) hi *= 2.0;
  if (!(march(lo, nullptr) > 0.0) || march(hi, nullptr) > 0.0) {
    throw NumericError("discrete_equilibrium: could not bracket the cell size");
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (march(mid, nullptr) > 0.0 ? lo : hi) = mid;
  }
  const double dr = lo;
  std::vector<double> rho;
  march(dr, &rho);

  std::vector<double> edges(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) edges[i] = double(i) * dr;
  GridPtr grid = make_grid(RadialGrid::cells(std::move(edges)));
  const GridDensity density(grid, rho);
  const RadialField V = gravity::potential_of(density);
  std::vector<double> v(V.values().begin(), V.values().end());
  const double E0 = eos.phi_prime(rho[0]) + v[0];
  const double M = density.mass();
  return steady::RadialProfile{grid, std::move(rho), std::move(v), E0, double(K) * dr, M, kappa, eos};
}

HydroState from_profile(const steady::RadialProfile& p, Geometry geometry) {
  require_cells(*p.grid, "from_profile");
  const double rho_c = *std::max_element(p.rho0.begin(), p.rho0.end());
  HydroState s{p.grid, p.rho0, std::vector<double>(p.rho0.size(), 0.0), 0.0, p.eos, geometry,
               1e-15 * rho_c};
  for (auto& x : s.rho) x = std::max(x, s.rho_floor);
  return s;
}

double sound_crossing_time(const steady::RadialProfile& p) {
  const auto w = p.grid->line_weights();
  double t = 0.0;
  for (std::size_t i = 0; i < p.rho0.size(); ++i) {
    if (p.rho0[i] > 0.0) t += w[i] / p.eos.sound_speed(p.rho0[i]);
  }
  return t;
}

PerturbationKind parse_perturbation(const std::string& name) {
  if (name == "none") return PerturbationKind::none;
  if (name == "density_bump") return PerturbationKind::density_bump;
  if (name == "velocity_kick") return PerturbationKind::velocity_kick;
  if (name == "contraction") return PerturbationKind::contraction;
  throw ConfigError("unknown perturbation kind '" + name +
                    "' (expected none, density_bump, velocity_kick or contraction)");
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::none: return "none";
    case PerturbationKind::density_bump: return "density_bump";
    case PerturbationKind::velocity_kick: return "velocity_kick";
    case PerturbationKind::contraction: return "contraction";
  }
  return "none";
}

Perturbed perturb(const steady::RadialProfile& p, PerturbationKind kind, double A) {
  if (!std::isfinite(A)) throw DomainError("perturbation amplitude must be finite");
  HydroState s = from_profile(p);
  const auto r = p.grid->r();
  const double R = p.R_support;
  const double M = p.density().mass();
  const std::size_t n = r.size();

  std::vector<double> v(p.rho0);
  switch (kind) {
    case PerturbationKind::none:
      break;
    case PerturbationKind::density_bump: {
      const double w = 0.1 * R;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = (r[i] - 0.5 * R) / w;
        v[i] = p.rho0[i] * (1.0 + A * std::exp(-0.5 * x * x));
        if (v[i] < 0.0) throw DomainError("density_bump amplitude makes the density negative");
      }
      break;
    }
    case PerturbationKind::velocity_kick:
      for (std::size_t i = 0; i < n; ++i) {
        if (p.rho0[i] > 0.0) s.mom[i] = s.rho[i] * A * r[i] / R;
      }
      break;
    case PerturbationKind::contraction: {
      const double lambda = 1.0 + A;
      if (!(lambda > 0.0)) throw DomainError("contraction factor 1 + amplitude must be > 0");
      const MonotoneCubic f(r, p.rho0, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = lambda * r[i];
        const double base = x <= r.front() ? p.rho0.front() : f(x);
        v[i] = std::max(0.0, lambda * lambda * lambda * base);
      }
      break;
    }
  }
  if (kind == PerturbationKind::density_bump || kind == PerturbationKind::contraction) {
    const GridDensity d = GridDensity(p.grid, std::move(v)).with_mass(M);
    s.rho.assign(d.values().begin(), d.values().end());
    for (auto& x : s.rho) x = std::max(x, s.rho_floor);
  }
  Perturbed out{s, {}};
  out.initial_metric = energetics::stability_metric(s.density(), s.flow(), p);
  return out;
}

RunResult run(const HydroState& initial, const steady::RadialProfile& reference,
              const RunOptions& opts) {
  require_cells(*initial.grid, "run");
  if (initial.geometry != Geometry::spherical) {
    throw PreconditionError("run monitors gravitational energy and needs spherical geometry");
  }
  if (!(opts.t_end >= initial.t) || !(opts.output_interval > 0.0)) {
    throw ConfigError("run needs t_end >= t0 and output_interval > 0");
  }
  RunResult res{initial, {}, {}, 0, 0.0, 0.0, 0.0, 0.0, false, false, {}};
  const double m0 = initial.mass();
  const double h0 = energetics::total_energy(initial.density(), initial.flow(), initial.eos);
  double metric0 = 0.0;

  auto record = [&](const HydroState& s) {
    const GridDensity d = s.density();
    const FlowField u = s.flow();
    LedgerEntry e;
    e.t = s.t;
    e.mass = s.mass();
    e.energy = energetics::total_energy(d, u, s.eos);
    e.rho_max = *std::max_element(s.rho.begin(), s.rho.end());
    e.rho_min = *std::min_element(s.rho.begin(), s.rho.end());
    e.outflow = s.outflow;
    e.mass_drift = std::abs(e.mass + s.outflow - m0) / m0;
    e.energy_drift = std::abs(e.energy - h0) / std::abs(h0);
    res.ledger.push_back(e);
    res.mass_drift = std::max(res.mass_drift, e.mass_drift);
    res.energy_drift = std::max(res.energy_drift, e.energy_drift);

    const auto m = energetics::stability_metric(d, u, reference);
    res.metrics.push_back({s.t, m});
    if (res.metrics.size() == 1) metric0 = m.total;
    res.max_metric = std::max(res.max_metric, m.total);
    if (metric0 > 0.0) res.max_metric_ratio = std::max(res.max_metric_ratio, m.total / metric0);
  };

  HydroState s = initial;
  record(s);
  double next_out = s.t + opts.output_interval;
  const double eps_t = 1e-12 * std::max(1.0, opts.t_end);
  try {
    while (s.t < opts.t_end - eps_t) {
      if (res.steps >= opts.max_steps) {
        res.aborted = true;
        res.abort_reason = "step limit reached";
        break;
      }
      double dt = cfl_dt(s, opts.cfl);
      dt = std::min({dt, opts.t_end - s.t, next_out - s.t});
      s = step(s, dt, opts.solver);
      ++res.steps;
      if (s.t >= next_out - eps_t) {
        record(s);
        next_out += opts.output_interval;
      }
    }
  } catch (const Error& err) {
    res.aborted = true;
    res.abort_reason = err.what();
  }
  if (res.ledger.back().t != s.t) record(s);
  res.final_state = s;
  res.conservation_violated = res.energy_drift > opts.drift_bound;
  return res;
}

}  // namespace polystar::hydro1d
