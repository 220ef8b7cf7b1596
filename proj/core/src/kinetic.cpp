#include "polystar/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "polystar/energetics.hpp"
#include "polystar/error.hpp"
#include "polystar/gravity.hpp"
#include "polystar/quadrature.hpp"

namespace polystar::kinetic {

namespace {

constexpr double kPi = std::numbers::pi;
const double kGPrefactor = std::pow(2.0, 2.5) * kPi;
const double kHPrefactor = std::pow(2.0, 3.5) / 3.0 * kPi;

void require_polytropic(const KineticAnsatz& a, const char* what) {
  if (a.kind != KineticAnsatz::Kind::polytropic) {
    throw ConfigError(std::string(what) + " needs the polytropic ansatz");
  }
}

// int_0^1 phi(V + z t) t^p dt by tanh-sinh (endpoint singularities allowed).
double reduced_integral(const KineticAnsatz& a, double V, double z, double p) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double t) { return a.phi(V + z * t) * std::pow(t, p); };
  double err = 0.0;
  const double val = ts.integrate(f, 0.0, 1.0, 1e-13, &err);
  if (!std::isfinite(val)) throw NumericError("phase-space quadrature did not converge");
  return val;
}

// Smooth interpolant of a positive table sampled on a log-uniform grid:
// cubic B-spline of log y against log x, continued as a power law below
// the first sample.
class LogLogSpline {
 public:
  LogLogSpline(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> ly;
    ly.reserve(y.size());
    for (double v : y) {
      if (!(v > 0.0)) throw NumericError("conjugate table must be positive for log interpolation");
      ly.push_back(std::log(v));
    }
    l0_ = std::log(x.front());
    l1_ = std::log(x.back());
    const double h = (l1_ - l0_) / double(x.size() - 1);
    slope0_ = (ly[1] - ly[0]) / h;
    y0_ = ly[0];
    spline_ = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        ly.begin(), ly.end(), l0_, h);
  }
  double operator()(double x) const {
    if (!(x > 0.0)) return 0.0;
    const double l = std::log(x);
    if (l <= l0_) return std::exp(y0_ + slope0_ * (l - l0_));
    return std::exp((*spline_)(std::min(l, l1_)));
  }

 private:
  double l0_ = 0.0;
  double l1_ = 0.0;
  double y0_ = 0.0;
  double slope0_ = 0.0;
  std::shared_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
  v.back() = hi;
  return v;
}

// theta nodes and Simpson weights on [0, pi/2].
struct ThetaRule {
  std::vector<double> sin_t;
  std::vector<double> cos_t;
  std::vector<double> w;
};

ThetaRule theta_rule(std::size_t intervals) {
  intervals += intervals % 2;
  ThetaRule rule;
  const double h = 0.5 * kPi / double(intervals);
  for (std::size_t j = 0; j <= intervals; ++j) {
    const double t = h * double(j);
    rule.sin_t.push_back(std::sin(t));
    rule.cos_t.push_back(j == intervals ? 0.0 : std::cos(t));
    const double simpson = (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    rule.w.push_back(simpson * h / 3.0);
  }
  return rule;
}

PhaseSpace build(const steady::RadialProfile& p, const std::function<double(double)>& psi,
                 std::size_t theta_intervals, std::size_t tail_nodes) {
  const ThetaRule rule = theta_rule(theta_intervals);
  PhaseSpace ps;
  ps.grid = p.grid;
  ps.E0 = p.E0;
  const std::size_t n = p.rho0.size();
  ps.s_cut.resize(n);
  ps.s.resize(n);
  ps.w.resize(n);
  ps.f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = p.E0 - p.V0[i];
    const double sc = lam > 0.0 ? std::sqrt(2.0 * lam) : 0.0;
    ps.s_cut[i] = sc;
    if (sc == 0.0) {
      ps.s[i] = {0.0};
      ps.w[i] = {0.0};
      ps.f[i] = {0.0};
      continue;
    }
    for (std::size_t j = 0; j < rule.sin_t.size(); ++j) {
      const double s = sc * rule.sin_t[j];
      ps.s[i].push_back(s);
      // dv = 4 pi s^2 ds, ds = s_cut cos(theta) dtheta
      ps.w[i].push_back(4.0 * kPi * s * s * sc * rule.cos_t[j] * rule.w[j]);
      ps.f[i].push_back(j + 1 == rule.sin_t.size() ? 0.0 : psi(0.5 * s * s + p.V0[i]));
    }
    for (std::size_t m = 1; m <= tail_nodes; ++m) {
      ps.s[i].push_back(sc * (1.0 + 0.05 * double(m) / double(tail_nodes)));
      ps.w[i].push_back(0.0);
      ps.f[i].push_back(0.0);
    }
  }
  return ps;
}

}  // namespace

KineticAnsatz KineticAnsatz::polytropic(double k, double C, double E0) {
  if (!(k >= 0.0) || !(C > 0.0)) throw ConfigError("polytropic ansatz needs k >= 0 and C > 0");
  KineticAnsatz a;
  a.kind = Kind::polytropic;
  a.k = k;
  a.C = C;
  a.E0 = E0;
  return a;
}

KineticAnsatz KineticAnsatz::general(std::function<double(double)> phi, double E0) {
  if (!phi) throw ConfigError("general ansatz needs a function");
  KineticAnsatz a;
  a.kind = Kind::general;
  a.E0 = E0;
  a.phi_fn = std::move(phi);
  return a;
}

double KineticAnsatz::phi(double E) const {
  if (!(E < E0)) return 0.0;
  if (kind == Kind::general) return phi_fn(E);
  return k == 0.0 ? C : C * std::pow(E0 - E, k);
}

double KineticAnsatz::Q(double f) const {
  require_polytropic(*this, "Q");
  if (!(k > 0.0)) throw ConfigError("Q needs k > 0");
  if (f < 0.0) throw DomainError("Q: negative phase-space density");
  return k / (k + 1.0) * std::pow(C, -1.0 / k) * std::pow(f, 1.0 + 1.0 / k);
}

double KineticAnsatz::Q_star(double mu) const {
  require_polytropic(*this, "Q*");
  return mu > 0.0 ? C * std::pow(mu, k + 1.0) / (k + 1.0) : 0.0;
}

void require_admissible(const KineticAnsatz& a) {
  require_polytropic(a, "kinetic reduction");
  if (!(a.k > 0.0 && a.k < 1.5)) {
    std::ostringstream msg;
    msg << "kinetic exponent k = " << a.k
        << " is not admissible: the reduction needs 0 < k < 3/2 (n = k + 3/2 < 3); k >= 3/2 "
           "belongs to the mass-Casimir variant, which is not supported";
    throw ConfigError(msg.str());
  }
}

double g_phi(const KineticAnsatz& a, double V) {
  if (a.kind == KineticAnsatz::Kind::general) return g_phi_quadrature(a, V);
  const double z = a.E0 - V;
  if (!(z > 0.0)) return 0.0;
  return kGPrefactor * a.C * std::beta(a.k + 1.0, 1.5) * std::pow(z, a.k + 1.5);
}

double h_phi(const KineticAnsatz& a, double V) {
  if (a.kind == KineticAnsatz::Kind::general) return h_phi_quadrature(a, V);
  const double z = a.E0 - V;
  if (!(z > 0.0)) return 0.0;
  return kHPrefactor * a.C * std::beta(a.k + 1.0, 2.5) * std::pow(z, a.k + 2.5);
}

double g_phi_quadrature(const KineticAnsatz& a, double V) {
  const double z = a.E0 - V;
  if (!(z > 0.0)) return 0.0;
  return kGPrefactor * std::pow(z, 1.5) * reduced_integral(a, V, z, 0.5);
}

double h_phi_quadrature(const KineticAnsatz& a, double V) {
  const double z = a.E0 - V;
  if (!(z > 0.0)) return 0.0;
  return kHPrefactor * std::pow(z, 2.5) * reduced_integral(a, V, z, 1.5);
}

Eos induced_eos(const KineticAnsatz& a) {
  require_admissible(a);
  const double n = a.polytropic_index();
  const double A = kGPrefactor * a.C * std::beta(a.k + 1.0, 1.5);
  const double B = kHPrefactor * a.C * std::beta(a.k + 1.0, 2.5);
  const double gamma = 1.0 + 1.0 / n;
  return Eos::polytrope(B / std::pow(A, gamma), gamma);
}

ConjugatePair legendre(std::vector<double> x, std::vector<double> h, std::vector<double> lambda) {
  const std::size_t n = x.size();
  if (n < 3 || h.size() != n) throw PreconditionError("legendre needs at least 3 samples");
  if (x.front() != 0.0) throw PreconditionError("legendre: samples must start at x = 0");
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(x[i] > x[i - 1])) throw PreconditionError("legendre: x must increase");
    scale = std::max(scale, std::abs(h[i]));
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d1 = (h[i] - h[i - 1]) / (x[i] - x[i - 1]);
    const double d2 = (h[i + 1] - h[i]) / (x[i + 1] - x[i]);
    if (d2 < d1 - 1e-9 * (std::abs(d1) + std::abs(d2)) - 1e-14 * scale) {
      std::ostringstream msg;
      msg << "legendre: samples are not convex near x = " << x[i];
      throw DomainError(msg.str());
    }
  }
  for (std::size_t i = 1; i < lambda.size(); ++i) {
    if (!(lambda[i] >= lambda[i - 1])) throw PreconditionError("legendre: lambda must increase");
  }

  ConjugatePair out{x, h, lambda, std::vector<double>(lambda.size()),
                    std::vector<double>(lambda.size())};
  std::size_t j = 0;
  for (std::size_t m = 0; m < lambda.size(); ++m) {
    const double lam = lambda[m];
    while (j + 1 < n && lam * x[j + 1] - h[j + 1] >= lam * x[j] - h[j]) ++j;
    double best_x = x[j];
    double best = lam * x[j] - h[j];
    // Vertex of lambda x - p(x) for the quadratic p through three samples.
    const std::size_t c = std::clamp<std::size_t>(j, 1, n - 2);
    const double d1 = (h[c] - h[c - 1]) / (x[c] - x[c - 1]);
    const double d2 = (h[c + 1] - h[c]) / (x[c + 1] - x[c]);
    const double curv = (d2 - d1) / (x[c + 1] - x[c - 1]);
    if (curv > 0.0) {
      const double slope = d1 + curv * (x[c] - x[c - 1]);
      const double lo = x[j == 0 ? 0 : j - 1];
      const double hi = x[std::min(j + 1, n - 1)];
      // A vertex outside (lo, hi) would only re-evaluate a sample through the
      // fit; the sampled maximum is exact there.
      const double xs = x[c] + (lam - slope) / (2.0 * curv);
      const double dx = xs - x[c];
      const double val = lam * xs - (h[c] + slope * dx + curv * dx * dx);
      if (xs > lo && xs < hi && val > best) {
        best = val;
        best_x = xs;
      }
    }
    out.h_star[m] = best;
    out.argmax[m] = best_x;
  }
  return out;
}

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) throw NumericError("power fit needs two positive samples");
  const double slope = (double(m) * sxy - sx * sy) / (double(m) * sxx - sx * sx);
  return {slope, std::exp((sy - slope * sx) / double(m))};
}

PhiFromQ phi_from_q(const std::vector<double>& f, const std::vector<double>& Q,
                    const std::vector<double>& lambda_grid, const std::vector<double>& rho_grid) {
  if (lambda_grid.empty() || rho_grid.size() < 4) {
    throw PreconditionError("phi_from_q needs lambda samples and at least 4 densities");
  }
  // Largest slope of Q sampled: the conjugate is exact only below it.
  const std::size_t nf = f.size();
  const double mu_top = (Q[nf - 1] - Q[nf - 2]) / (f[nf - 1] - f[nf - 2]);
  const double lam_max = *std::max_element(lambda_grid.begin(), lambda_grid.end());
  if (!(lam_max < mu_top)) {
    throw DomainError("phi_from_q: lambda exceeds the slope range covered by the Q samples");
  }
  const auto mu = logspace(mu_top * 1e-12, mu_top * 0.999, 800);
  const ConjugatePair qs = legendre(f, Q, mu);
  const LogLogSpline q_star(mu, qs.h_star);

  quad::AdaptiveOptions qopts;
  qopts.abs_tol = 0.0;
  qopts.rel_tol = 1e-9;
  qopts.max_depth = 15;
  auto phi_star = [&](double lam) {
    if (!(lam > 0.0)) return 0.0;
    const double top = std::sqrt(2.0 * lam);
    return 4.0 * kPi *
           quad::integrate([&](double s) { return q_star(lam - 0.5 * s * s) * s * s; }, 0.0, top,
                           qopts);
  };

  PhiFromQ out;
  out.lambda = lambda_grid;
  for (double lam : lambda_grid) out.phi_star.push_back(phi_star(lam));

  // Conjugate back on an internal grid that starts at lambda = 0.
  std::vector<double> lam_int{0.0};
  for (double v : logspace(mu_top * 1e-10, mu_top * 0.99, 1200)) lam_int.push_back(v);
  std::vector<double> ps_int;
  ps_int.reserve(lam_int.size());
  for (double v : lam_int) ps_int.push_back(phi_star(v));
  std::vector<double> rho_sorted(rho_grid);
  std::sort(rho_sorted.begin(), rho_sorted.end());
  const ConjugatePair back = legendre(lam_int, ps_int, rho_sorted);
  if (back.argmax.back() >= lam_int.back()) {
    throw DomainError("phi_from_q: density range exceeds what the Q samples support");
  }
  out.rho = rho_sorted;
  out.phi = back.h_star;

  const std::size_t lo = out.rho.size() / 4;
  const std::size_t hi = out.rho.size() - out.rho.size() / 4;
  const PowerFit fit = fit_power({out.rho.begin() + std::ptrdiff_t(lo), out.rho.begin() + std::ptrdiff_t(hi)},
                                 {out.phi.begin() + std::ptrdiff_t(lo), out.phi.begin() + std::ptrdiff_t(hi)});
  out.exponent = fit.exponent;
  out.index = 1.0 / (fit.exponent - 1.0);
  return out;
}

GridDensity PhaseSpace::density() const {
  std::vector<double> rho(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = 0; j < f[i].size(); ++j) rho[i] += w[i][j] * f[i][j];
  }
  return GridDensity(grid, std::move(rho));
}

PhaseSpace lift_minimizer(const steady::RadialProfile& p, const KineticAnsatz& a_in,
                          const LiftOptions& opts) {
  require_admissible(a_in);
  KineticAnsatz a = a_in;
  a.E0 = p.E0;
  PhaseSpace ps = build(p, [&a](double E) { return a.phi(E); }, opts.theta_intervals,
                        opts.tail_nodes);
  const GridDensity rho = ps.density();
  double worst = 0.0;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double ref = p.rho0[i];
    const double err = std::abs(rho[i] - ref);
    const double rel = ref > 0.0 ? err / ref : (err > 0.0 ? 1.0 : 0.0);
    if (rel > worst) {
      worst = rel;
      worst_i = i;
    }
  }
  if (worst > opts.tolerance) {
    std::ostringstream msg;
    msg << "ansatz does not reproduce the profile: at node " << worst_i << " (r = "
        << p.grid->r(worst_i) << ") int f0 dv = " << rho[worst_i] << " but rho0 = "
        << p.rho0[worst_i] << " (relative error " << worst << ")";
    throw PreconditionError(msg.str());
  }
  return ps;
}

PhaseSpace isotropic_state(const PhaseSpace& base, const steady::RadialProfile& p,
                           const std::function<double(double)>& psi) {
  PhaseSpace ps = base;
  for (std::size_t i = 0; i < ps.f.size(); ++i) {
    for (std::size_t j = 0; j < ps.f[i].size(); ++j) {
      const double s = ps.s[i][j];
      ps.f[i][j] = ps.w[i][j] > 0.0 ? psi(0.5 * s * s + p.V0[i]) : 0.0;
    }
  }
  return ps;
}

double casimir_energy(const PhaseSpace& ps, const KineticAnsatz& a) {
  const auto W = ps.grid->volume_weights();
  double casimir = 0.0;
  double kinetic = 0.0;
  for (std::size_t i = 0; i < ps.f.size(); ++i) {
    double c_i = 0.0;
    double k_i = 0.0;
    for (std::size_t j = 0; j < ps.f[i].size(); ++j) {
      const double fij = ps.f[i][j];
      if (fij < 0.0) throw DomainError("phase-space density must be nonnegative");
      if (fij == 0.0) continue;
      c_i += ps.w[i][j] * a.Q(fij);
      k_i += ps.w[i][j] * 0.5 * ps.s[i][j] * ps.s[i][j] * fij;
    }
    casimir += W[i] * c_i;
    kinetic += W[i] * k_i;
  }
  if (!std::isfinite(casimir) || !std::isfinite(kinetic)) {
    throw DomainError("energy-Casimir integrals are not finite");
  }
  return casimir + kinetic + gravity::potential_energy(ps.density());
}

std::vector<PhaseSpace> isotropic_trials(const PhaseSpace& base, const steady::RadialProfile& p,
                                         const KineticAnsatz& a, std::size_t count,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PhaseSpace> out;
  for (std::size_t t = 0; t < count; ++t) {
    const double kt = 0.25 + 2.25 * unit(rng);
    const double ct = a.C * std::exp(std::log(0.3) + std::log(10.0) * unit(rng));
    const double E0 = p.E0;
    out.push_back(isotropic_state(base, p, [=](double E) {
      return E < E0 ? ct * std::pow(E0 - E, kt) : 0.0;
    }));
  }
  return out;
}

double tov_residual(const steady::RadialProfile& p, const KineticAnsatz& a_in) {
  KineticAnsatz a = a_in;
  a.E0 = p.E0;
  const auto r = p.grid->r();
  std::vector<double> pr(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) pr[i] = h_phi(a, p.V0[i]);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (!(p.rho0[i] > 0.0 && p.rho0[i + 1] > 0.0)) continue;
    const double dr = r[i + 1] - r[i];
    const double rho_mid = 0.5 * (p.rho0[i] + p.rho0[i + 1]);
    worst = std::max(worst, std::abs((pr[i + 1] - pr[i]) / dr +
                                     rho_mid * (p.V0[i + 1] - p.V0[i]) / dr));
  }
  return worst;
}

}  // namespace polystar::kinetic
