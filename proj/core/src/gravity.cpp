#include "polystar/gravity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polystar/error.hpp"
#include "polystar/interp.hpp"
#include "polystar/quadrature.hpp"

namespace polystar::gravity {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// Distance between adjacent cell centres across face f (1 <= f <= N); the
// outermost face uses the half cell to R_max.
double face_spacing(const RadialGrid& g, std::size_t f) {
  const auto rc = g.r();
  return f < rc.size() ? rc[f] - rc[f - 1] : g.r_max() - rc.back();
}

}  // namespace

FaceField face_field(const GridDensity& rho) {
  const RadialGrid& g = *rho.grid();
  if (g.kind() != GridKind::cell) throw PreconditionError("face_field needs a cell grid");
  const auto w = g.volume_weights();
  const auto e = g.edges();
  FaceField out;
  out.mass.assign(e.size(), 0.0);
  out.g.assign(e.size(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    out.mass[i + 1] = out.mass[i] + w[i] * rho[i];
    out.g[i + 1] = out.mass[i + 1] / (e[i + 1] * e[i + 1]);
  }
  return out;
}

MassProfile enclosed_mass(const GridDensity& rho) {
  const RadialGrid& g = *rho.grid();
  const auto r = g.r();
  MassProfile out;
  if (g.kind() == GridKind::nodal) {
    std::vector<double> f(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) f[i] = kFourPi * r[i] * r[i] * rho[i];
    out.m = quad::cumulative_simpson(r, f);
    out.total = out.m.back();
  } else {
    const auto faces = face_field(rho);
    const auto e = g.edges();
    out.m.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      out.m[i] = faces.mass[i] + kFourPi / 3.0 * rho[i] * (r[i] * r[i] * r[i] - e[i] * e[i] * e[i]);
    }
    out.total = faces.mass.back();
  }
  return out;
}

RadialField potential_of(const GridDensity& rho) {
  const RadialGrid& g = *rho.grid();
  const auto r = g.r();
  const std::size_t n = r.size();
  std::vector<double> v(n, 0.0);
  double total = 0.0;
  if (g.kind() == GridKind::nodal) {
    const auto mass = enclosed_mass(rho);
    total = mass.total;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = kFourPi * r[i] * rho[i];
    const auto outer = quad::cumulative_simpson(r, f);
    for (std::size_t i = 0; i < n; ++i) {
      const double inner = r[i] > 0.0 ? mass.m[i] / r[i] : 0.0;
      v[i] = -(inner + (outer.back() - outer[i]));
    }
  } else {
    // Piecewise-linear potential between centres with slope m_f/r_f^2; this
    // is the discrete potential the finite-volume gravity source sees.
    const auto faces = face_field(rho);
    total = faces.mass.back();
    v[n - 1] = -total / g.r_max() - faces.g[n] * face_spacing(g, n);
    for (std::size_t i = n - 1; i-- > 0;) v[i] = v[i + 1] - faces.g[i + 1] * face_spacing(g, i + 1);
  }
  return RadialField(rho.grid(), std::move(v), FieldKind::potential, total);
}

RadialField field_of(const GridDensity& rho) {
  const auto r = rho.grid()->r();
  const auto mass = enclosed_mass(rho);
  std::vector<double> gv(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) gv[i] = r[i] > 0.0 ? mass.m[i] / (r[i] * r[i]) : 0.0;
  return RadialField(rho.grid(), std::move(gv), FieldKind::field, mass.total);
}

GridDensity on_grid(const GridDensity& rho, const GridPtr& target) {
  if (rho.grid()->same_as(*target)) return GridDensity(target, {rho.values().begin(), rho.values().end()});
  auto v = resample_monotone(rho.grid()->r(), rho.values(), target->r(), 0.0);
  for (auto& x : v) x = std::max(x, 0.0);
  return GridDensity(target, std::move(v));
}

double field_norm_sq(const GridDensity& a, const GridDensity& b_in, bool allow_resample) {
  if (!a.grid()->same_as(*b_in.grid()) && !allow_resample) {
    throw PreconditionError("field_norm_sq: densities live on different grids");
  }
  const GridDensity b = on_grid(b_in, a.grid());
  const RadialGrid& g = *a.grid();
  double sum = 0.0;
  double dm_total = 0.0;
  if (g.kind() == GridKind::nodal) {
    const auto ma = enclosed_mass(a);
    const auto mb = enclosed_mass(b);
    const auto r = g.r();
    const auto w = g.line_weights();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] == 0.0) continue;
      const double dm = ma.m[i] - mb.m[i];
      sum += w[i] * kFourPi * dm * dm / (r[i] * r[i]);
    }
    dm_total = ma.total - mb.total;
  } else {
    const auto fa = face_field(a);
    const auto fb = face_field(b);
    const auto e = g.edges();
    for (std::size_t f = 1; f < e.size(); ++f) {
      const double dg = fa.g[f] - fb.g[f];
      sum += kFourPi * e[f] * e[f] * dg * dg * face_spacing(g, f);
    }
    dm_total = fa.mass.back() - fb.mass.back();
  }
  return sum + kFourPi * dm_total * dm_total / g.r_max();
}

PotentialEnergyForms potential_energy_forms(const GridDensity& rho) {
  const RadialGrid& g = *rho.grid();
  const auto r = g.r();
  const auto w = g.volume_weights();
  const auto mass = enclosed_mass(rho);
  const auto v = potential_of(rho);
  PotentialEnergyForms out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] > 0.0) out.pair -= w[i] * rho[i] * mass.m[i] / r[i];
    out.potential += 0.5 * w[i] * rho[i] * v[i];
  }
  out.field = -field_norm_sq(rho, GridDensity::zero(rho.grid()), false) / (8.0 * std::numbers::pi);
  return out;
}

double potential_energy(const GridDensity& rho) {
  return -field_norm_sq(rho, GridDensity::zero(rho.grid()), false) / (8.0 * std::numbers::pi);
}

}  // namespace polystar::gravity
