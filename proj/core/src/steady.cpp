#include "polystar/steady.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "polystar/error.hpp"

namespace polystar::steady {

namespace {

constexpr double kPi = std::numbers::pi;

struct State {
  double z;
  double w;  // z'
};

// Accepted RK4 nodes of the outward integration.
struct Trajectory {
  std::vector<double> r;
  std::vector<double> z;
  std::vector<double> w;
  double R = 0.0;
  double w_surface = 0.0;
};

class SemilinearRhs {
 public:
  explicit SemilinearRhs(const DensityOfZ& g) : g_(g) {}
  State operator()(double r, const State& y) const {
    return {y.w, -4.0 * kPi * g_(y.z) - 2.0 * y.w / r};
  }
  double accel(double r, double z, double w) const { return -4.0 * kPi * g_(z) - 2.0 * w / r; }

 private:
  const DensityOfZ& g_;
};

State rk4_step(const SemilinearRhs& f, double r, const State& y, double h) {
  const State k1 = f(r, y);
  const State k2 = f(r + 0.5 * h, {y.z + 0.5 * h * k1.z, y.w + 0.5 * h * k1.w});
  const State k3 = f(r + 0.5 * h, {y.z + 0.5 * h * k2.z, y.w + 0.5 * h * k2.w});
  const State k4 = f(r + h, {y.z + h * k3.z, y.w + h * k3.w});
  return {y.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
          y.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w)};
}

// Cubic Hermite interpolation of z on [r0, r1] from values and slopes.
double hermite(double r0, double z0, double w0, double r1, double z1, double w1, double r) {
  const double h = r1 - r0;
  const double t = (r - r0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * z0 + (t3 - 2 * t2 + t) * h * w0 + (-2 * t3 + 3 * t2) * z1 +
         (t3 - t2) * h * w1;
}

Trajectory integrate_outward(const DensityOfZ& g, double kappa, const ShootOptions& opts) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("shoot: central value kappa must be > 0");
  }
  const double g0 = g(kappa);
  if (!(g0 > 0.0)) throw DomainError("shoot: density at the centre must be positive");
  const SemilinearRhs f(g);
  // Length over which z drops by O(kappa) near the centre.
  const double length = std::sqrt(kappa / (4.0 * kPi * g0));
  const double h_base = length / opts.steps_per_length;
  const double r_cap = opts.r_cap_factor * length;

  Trajectory tr;
  // Series start removes the 2/r singularity: z = kappa - (2 pi/3) g r^2.
  double r = length * 1e-6;
  State y{kappa - 2.0 * kPi / 3.0 * g0 * r * r, -4.0 * kPi / 3.0 * g0 * r};
  tr.r.push_back(0.0);
  tr.z.push_back(kappa);
  tr.w.push_back(0.0);
  tr.r.push_back(r);
  tr.z.push_back(y.z);
  tr.w.push_back(y.w);

  while (true) {
    const double h = h_base * std::max(1.0, r / length);
    const State next = rk4_step(f, r, y, h);
    if (!std::isfinite(next.z) || !std::isfinite(next.w)) {
      throw NumericError("shoot: non-finite state at r = " + std::to_string(r));
    }
    if (next.z <= 0.0) {
      // Bisection on the dense output for the zero crossing, then Newton
      // polish with exact RK4 sub-steps from the last accepted node.
      double a = r;
      double b = r + h;
      for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double m = 0.5 * (a + b);
        const double zm = hermite(r, y.z, y.w, r + h, next.z, next.w, m);
        (zm > 0.0 ? a : b) = m;
      }
      double R = 0.5 * (a + b);
      State at_R = rk4_step(f, r, y, R - r);
      for (int it = 0; it < 8; ++it) {
        if (at_R.w >= 0.0) break;
        const double dR = -at_R.z / at_R.w;
        R += dR;
        at_R = rk4_step(f, r, y, R - r);
        if (std::abs(dR) < 1e-15 * R) break;
      }
      tr.R = R;
      tr.w_surface = at_R.w;
      tr.r.push_back(R);
      tr.z.push_back(0.0);
      tr.w.push_back(at_R.w);
      return tr;
    }
    r += h;
    y = next;
    tr.r.push_back(r);
    tr.z.push_back(y.z);
    tr.w.push_back(y.w);
    if (r > r_cap) {
      std::ostringstream msg;
      msg << "infinite-radius: z stays positive up to r = " << r
          << " (equation of state does not give a compactly supported star)";
      throw InfiniteRadiusError(msg.str());
    }
  }
}

double z_at(const Trajectory& tr, double r) {
  if (r <= 0.0) return tr.z.front();
  if (r >= tr.R) return 0.0;
  auto it = std::upper_bound(tr.r.begin(), tr.r.end(), r);
  std::size_t k = std::size_t(it - tr.r.begin()) - 1;
  if (k == 0) {
    // Inside the series start: z = kappa - (2 pi/3) g r^2 to the same order.
    const double r1 = tr.r[1];
    return tr.z[0] + (tr.z[1] - tr.z[0]) * (r / r1) * (r / r1);
  }
  return hermite(tr.r[k], tr.z[k], tr.w[k], tr.r[k + 1], tr.z[k + 1], tr.w[k + 1], r);
}

GridPtr profile_grid(double R, const ShootOptions& opts, std::size_t& interior) {
  interior = std::max<std::size_t>(4, opts.interior_cells + (opts.interior_cells % 2));
  if (!(opts.outer_factor >= 1.0)) throw ConfigError("outer_factor must be >= 1");
  std::size_t exterior =
      std::size_t(std::llround(double(interior) * (opts.outer_factor - 1.0)));
  exterior += exterior % 2;
  const double h = R / double(interior);
  std::vector<double> x(interior + exterior + 1);
  for (std::size_t i = 0; i <= interior; ++i) x[i] = R * double(i) / double(interior);
  for (std::size_t j = 1; j <= exterior; ++j) x[interior + j] = R + double(j) * h;
  return make_grid(RadialGrid::nodal(std::move(x)));
}

RadialProfile sample(const Eos& eos, const DensityOfZ& g, double kappa, const Trajectory& tr,
                     const ShootOptions& opts) {
  std::size_t interior = 0;
  GridPtr grid = profile_grid(tr.R, opts, interior);
  const double M = -tr.R * tr.R * tr.w_surface;
  const double E0 = -M / tr.R;
  const auto r = grid->r();
  std::vector<double> rho(r.size(), 0.0);
  std::vector<double> V(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i < interior) {
      const double z = i == 0 ? kappa : z_at(tr, r[i]);
      rho[i] = g(z);
      V[i] = E0 - z;
    } else if (i == interior) {
      V[i] = E0;
    } else {
      V[i] = -M / r[i];
    }
  }
  return RadialProfile{grid, std::move(rho), std::move(V), E0, tr.R, M, kappa, eos};
}

DensityOfZ eos_source(const Eos& eos) {
  return [&eos](double z) { return eos.phi_prime_inv(z); };
}

}  // namespace

RadialField RadialProfile::potential() const {
  return RadialField(grid, V0, FieldKind::potential, M);
}

RadialProfile shoot_with_source(const Eos& eos, const DensityOfZ& g, double kappa,
                                const ShootOptions& opts) {
  const Trajectory tr = integrate_outward(g, kappa, opts);
  return sample(eos, g, kappa, tr, opts);
}

RadialProfile shoot(const Eos& eos, double kappa, const ShootOptions& opts) {
  return shoot_with_source(eos, eos_source(eos), kappa, opts);
}

ShootSummary shoot_summary(const Eos& eos, double kappa, const ShootOptions& opts) {
  const Trajectory tr = integrate_outward(eos_source(eos), kappa, opts);
  return {kappa, tr.R, -tr.R * tr.R * tr.w_surface};
}

RadialProfile scaling_family(const RadialProfile& profile, double lambda) {
  if (!profile.eos.is_polytrope()) {
    throw ConfigError("scaling_family is only available for polytropic equations of state");
  }
  if (!(lambda > 0.0)) throw DomainError("scaling parameter must be > 0");
  const double n = profile.eos.polytropic_index();
  const double length_scale = std::pow(lambda, -(n - 1.0) / 2.0);
  const double M = profile.M * std::pow(lambda, (3.0 - n) / 2.0);
  const double R = profile.R_support * length_scale;
  const double E0 = profile.E0 * lambda;

  const auto r_old = profile.grid->r();
  std::vector<double> x(r_old.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = r_old[i] * length_scale;
  GridPtr grid = make_grid(RadialGrid::nodal(std::move(x)));
  const auto r = grid->r();
  std::vector<double> rho(r.size(), 0.0);
  std::vector<double> V(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (profile.rho0[i] > 0.0) {
      const double z = lambda * profile.z(i);
      rho[i] = profile.eos.phi_prime_inv(z);
      V[i] = E0 - z;
    } else {
      V[i] = r[i] > 0.0 ? -M / r[i] : E0;
      if (r[i] <= R) V[i] = E0;
    }
  }
  return RadialProfile{grid, std::move(rho), std::move(V), E0, R, M,
                       profile.kappa * lambda, profile.eos};
}

MassMatch match_mass_detailed(const Eos& eos, double M_target, const ShootOptions& opts) {
  if (!(M_target > 0.0) || !std::isfinite(M_target)) {
    throw DomainError("match_mass: target mass must be > 0");
  }
  if (eos.is_polytrope()) {
    const double n = eos.polytropic_index();
    if (!(n < 3.0)) {
      throw MassUnreachableError("match_mass: polytropic index n >= 3 has no mass scaling");
    }
    const RadialProfile base = shoot(eos, 1.0, opts);
    const double lambda = std::pow(M_target / base.M, 2.0 / (3.0 - n));
    RadialProfile p = scaling_family(base, lambda);
    return MassMatch{std::move(p), {}, {}};
  }

  MassMatch out{shoot(eos, 1.0, {64, opts.outer_factor, 400.0, opts.r_cap_factor}), {}, {}};
  // The scan only locates brackets; masses at 400 steps per length agree with
  // the full resolution to ~1e-7 relative.
  ShootOptions scan_opts = opts;
  scan_opts.steps_per_length = std::min(opts.steps_per_length, 400.0);
  for (int j = -16; j <= 16; ++j) {
    const double kappa = std::ldexp(1.0, j);
    MassScanEntry e{kappa, 0.0, false};
    try {
      e.mass = shoot_summary(eos, kappa, scan_opts).M;
      e.ok = true;
    } catch (const NumericError&) {
    }
    out.scan.push_back(e);
  }
  for (std::size_t i = 1; i < out.scan.size(); ++i) {
    const auto& a = out.scan[i - 1];
    const auto& b = out.scan[i];
    if (a.ok && b.ok && (a.mass - M_target) * (b.mass - M_target) <= 0.0) {
      out.brackets.emplace_back(a.kappa, b.kappa);
    }
  }
  if (out.brackets.empty()) {
    std::ostringstream msg;
    msg << "mass unreachable: M_target = " << M_target << " not bracketed; scan (kappa, M):";
    for (const auto& e : out.scan) {
      msg << " (" << e.kappa << ", " << (e.ok ? std::to_string(e.mass) : std::string("fail"))
          << ")";
    }
    throw MassUnreachableError(msg.str());
  }
  // Illinois-modified regula falsi on the smallest bracket.
  double a = out.brackets.front().first;
  double b = out.brackets.front().second;
  double fa = shoot_summary(eos, a, opts).M - M_target;
  double fb = shoot_summary(eos, b, opts).M - M_target;
  if (fa * fb > 0.0) {
    // Target within the scan error of an endpoint: step past it once.
    if (std::abs(fa) < std::abs(fb)) {
      a *= 0.5;
      fa = shoot_summary(eos, a, opts).M - M_target;
    } else {
      b *= 2.0;
      fb = shoot_summary(eos, b, opts).M - M_target;
    }
  }
  double kappa = a;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    kappa = (a * fb - b * fa) / (fb - fa);
    const double fk = shoot_summary(eos, kappa, opts).M - M_target;
    if (std::abs(fk) <= 1e-11 * M_target || std::abs(b - a) <= 1e-14 * b) break;
    if (fk * fb > 0.0) {
      b = kappa;
      fb = fk;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = kappa;
      fa = fk;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  out.profile = shoot(eos, kappa, opts);
  if (std::abs(out.profile.M - M_target) > 1e-8 * M_target) {
    throw NumericError("match_mass: refinement stalled at relative mass error " +
                       std::to_string(std::abs(out.profile.M - M_target) / M_target));
  }
  return out;
}

RadialProfile match_mass(const Eos& eos, double M_target, const ShootOptions& opts) {
  return match_mass_detailed(eos, M_target, opts).profile;
}

ResidualReport euler_lagrange_residual(const RadialProfile& p) {
  ResidualReport rep;
  for (std::size_t i = 0; i < p.rho0.size(); ++i) {
    if (p.rho0[i] > 0.0) {
      rep.support = std::max(rep.support, std::abs(p.eos.phi_prime(p.rho0[i]) + p.V0[i] - p.E0));
    } else {
      rep.exterior = std::max(rep.exterior, std::max(0.0, p.E0 - p.V0[i]));
    }
  }
  return rep;
}

double static_euler_residual(const RadialProfile& p) {
  const auto r = p.grid->r();
  std::vector<double> pr(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) pr[i] = p.eos.pressure(p.rho0[i]);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (!(p.rho0[i] > 0.0)) continue;
    const double dr = r[i + 1] - r[i - 1];
    const double dp = (pr[i + 1] - pr[i - 1]) / dr;
    const double dv = (p.V0[i + 1] - p.V0[i - 1]) / dr;
    worst = std::max(worst, std::abs(dp + p.rho0[i] * dv));
  }
  return worst;
}

}  // namespace polystar::steady
