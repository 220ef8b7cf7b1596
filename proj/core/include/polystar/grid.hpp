#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace polystar {

/// How samples on a RadialGrid are interpreted.
///  - nodal: point values at nodes r_0 = 0 < ... < r_N = R_max, integrated
///    with composite Simpson;
///  - cell:  finite-volume cell averages on [r_{i-1/2}, r_{i+1/2}] with the
///    first edge at 0, integrated by exact shell volumes.
enum class GridKind { nodal, cell };

class RadialGrid {
 public:
  static RadialGrid nodal(std::vector<double> nodes);
  static RadialGrid uniform_nodal(double r_max, std::size_t intervals);
  static RadialGrid cells(std::vector<double> edges);
  static RadialGrid uniform_cells(double r_max, std::size_t n_cells);

  GridKind kind() const { return kind_; }
  std::size_t size() const { return r_.size(); }
  /// Sample locations: nodes, or cell midpoints.
  std::span<const double> r() const { return r_; }
  double r(std::size_t i) const { return r_[i]; }
  /// Cell edges (size()+1 entries); empty for nodal grids.
  std::span<const double> edges() const { return edges_; }
  double r_max() const { return r_max_; }
  /// int f dV ~ sum_i w_i f_i over the ball of radius r_max.
  std::span<const double> volume_weights() const { return volume_weights_; }
  /// int f dr ~ sum_i w_i f_i over [0, r_max].
  std::span<const double> line_weights() const { return line_weights_; }

  bool same_as(const RadialGrid& other) const;

 private:
  RadialGrid() = default;
  void finish();

  GridKind kind_ = GridKind::nodal;
  std::vector<double> r_;
  std::vector<double> edges_;
  double r_max_ = 0.0;
  std::vector<double> volume_weights_;
  std::vector<double> line_weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(RadialGrid grid) {
  return std::make_shared<const RadialGrid>(std::move(grid));
}

/// Nonnegative density on a radial grid (trial state of the variational
/// problem). Mass is computed once on construction.
class GridDensity {
 public:
  GridDensity(GridPtr grid, std::vector<double> values);

  /// Zero density on the grid.
  static GridDensity zero(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double mass() const { return mass_; }

  /// Multiplies by a constant (lambda >= 0).
  GridDensity scaled(double lambda) const;
  /// Rescaled copy with mass exactly `target`.
  GridDensity with_mass(double target) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  double mass_ = 0.0;
};

enum class FieldKind { potential, field };

/// Potential V(r) or radial field V'(r) sampled on a grid, extended beyond
/// r_max by the exterior vacuum solution -M/r or M/r^2.
class RadialField {
 public:
  RadialField(GridPtr grid, std::vector<double> values, FieldKind kind, double total_mass);

  const GridPtr& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  FieldKind kind() const { return kind_; }
  double total_mass() const { return mass_; }

  /// Evaluates anywhere in [0, inf): monotone cubic inside the sampled
  /// range, exterior vacuum law outside.
  double at(double r) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  FieldKind kind_;
  double mass_;
};

/// Radial velocity u(r) on a grid.
class FlowField {
 public:
  FlowField(GridPtr grid, std::vector<double> values);
  static FlowField zero(GridPtr grid);
  const GridPtr& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

}  // namespace polystar
