#include "polystar/grid.hpp"

#include <cmath>
#include <numbers>

#include "polystar/error.hpp"
#include "polystar/interp.hpp"
#include "polystar/quadrature.hpp"

namespace polystar {

namespace {

void require_increasing(const std::vector<double>& x, const char* what) {
  if (x.size() < 3) throw PreconditionError(std::string(what) + ": need at least 3 points");
  if (x.front() != 0.0) throw PreconditionError(std::string(what) + ": must start at r = 0");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1]) || !std::isfinite(x[i])) {
      throw PreconditionError(std::string(what) + ": must be strictly increasing");
    }
  }
}

}  // namespace

RadialGrid RadialGrid::nodal(std::vector<double> nodes) {
  require_increasing(nodes, "radial nodes");
  RadialGrid g;
  g.kind_ = GridKind::nodal;
  g.r_ = std::move(nodes);
  g.finish();
  return g;
}

RadialGrid RadialGrid::uniform_nodal(double r_max, std::size_t intervals) {
  if (!(r_max > 0.0) || intervals < 2) throw PreconditionError("uniform grid needs r_max > 0");
  std::vector<double> x(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) x[i] = r_max * double(i) / double(intervals);
  x.back() = r_max;
  return nodal(std::move(x));
}

RadialGrid RadialGrid::cells(std::vector<double> edges) {
  require_increasing(edges, "cell edges");
  RadialGrid g;
  g.kind_ = GridKind::cell;
  g.edges_ = std::move(edges);
  g.r_.resize(g.edges_.size() - 1);
  for (std::size_t i = 0; i < g.r_.size(); ++i) g.r_[i] = 0.5 * (g.edges_[i] + g.edges_[i + 1]);
  g.finish();
  return g;
}

RadialGrid RadialGrid::uniform_cells(double r_max, std::size_t n_cells) {
  if (!(r_max > 0.0) || n_cells < 2) throw PreconditionError("uniform cells need r_max > 0");
  std::vector<double> e(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) e[i] = r_max * double(i) / double(n_cells);
  e.back() = r_max;
  return cells(std::move(e));
}

void RadialGrid::finish() {
  constexpr double four_pi = 4.0 * std::numbers::pi;
  if (kind_ == GridKind::nodal) {
    r_max_ = r_.back();
    line_weights_ = quad::simpson_weights(r_);
    volume_weights_.resize(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) {
      volume_weights_[i] = line_weights_[i] * four_pi * r_[i] * r_[i];
    }
  } else {
    r_max_ = edges_.back();
    line_weights_.resize(r_.size());
    volume_weights_.resize(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) {
      const double a = edges_[i];
      const double b = edges_[i + 1];
      line_weights_[i] = b - a;
      volume_weights_[i] = four_pi / 3.0 * (b * b * b - a * a * a);
    }
  }
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  return this == &other || (kind_ == other.kind_ && r_ == other.r_ && edges_ == other.edges_);
}

GridDensity::GridDensity(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw PreconditionError("density needs a grid");
  if (values_.size() != grid_->size()) {
    throw PreconditionError("density values do not match grid size");
  }
  const auto w = grid_->volume_weights();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw DomainError("density must be finite and nonnegative (node " + std::to_string(i) +
                        ")");
    }
    mass_ += w[i] * values_[i];
  }
}

GridDensity GridDensity::zero(GridPtr grid) {
  const auto n = grid->size();
  return GridDensity(std::move(grid), std::vector<double>(n, 0.0));
}

GridDensity GridDensity::scaled(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("density scale must be nonnegative");
  std::vector<double> v(values_);
  for (auto& x : v) x *= lambda;
  return GridDensity(grid_, std::move(v));
}

GridDensity GridDensity::with_mass(double target) const {
  if (!(mass_ > 0.0)) throw DomainError("cannot renormalize a density with zero mass");
  return scaled(target / mass_);
}

RadialField::RadialField(GridPtr grid, std::vector<double> values, FieldKind kind,
                         double total_mass)
    : grid_(std::move(grid)), values_(std::move(values)), kind_(kind), mass_(total_mass) {
  if (values_.size() != grid_->size()) throw PreconditionError("field does not match grid");
}

double RadialField::at(double r) const {
  if (r >= grid_->r_max()) {
    return kind_ == FieldKind::potential ? -mass_ / r : mass_ / (r * r);
  }
  const auto x = grid_->r();
  if (r <= x.front()) return values_.front();
  if (r >= x.back()) return values_.back();
  const MonotoneCubic f(x, values_, 0.0);
  return f(r);
}

FlowField::FlowField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw PreconditionError("flow does not match grid");
  for (double u : values_) {
    if (!std::isfinite(u)) throw DomainError("velocity must be finite");
  }
}

FlowField FlowField::zero(GridPtr grid) {
  const auto n = grid->size();
  return FlowField(std::move(grid), std::vector<double>(n, 0.0));
}

}  // namespace polystar
