#include "cfhom/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cfhom/numerics.hpp"

namespace cfhom {

std::vector<double> cell_average(const PerforatedGrid& g, std::span<const double> field) {
  if (field.size() != g.dof_count()) throw std::invalid_argument("field/grid size mismatch");
  if (g.m_cell < 1) throw std::invalid_argument("grid has no cell partition");
  for (int d = 0; d < g.dim; ++d) {
    if (g.shape[d] % g.m_cell != 0) {
      throw std::invalid_argument("grid does not conform to the epsilon lattice");
    }
  }
  const int cells = g.cells_per_axis();
  std::size_t n_cells = 1;
  for (int d = 0; d < g.dim; ++d) n_cells *= static_cast<std::size_t>(cells);
  std::vector<double> sum(n_cells, 0.0);
  for (std::size_t dof = 0; dof < g.dof_count(); ++dof) {
    sum[static_cast<std::size_t>(g.cell_of_voxel(g.voxel_of_dof[dof]))] += field[dof];
  }
  const double factor = g.voxel_volume() / std::pow(g.epsilon, g.dim);
  for (double& s : sum) s *= factor;
  return sum;
}

double sample_field(const PerforatedGrid& box, std::span<const double> field, const Point& x) {
  std::array<int, 3> lo{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int d = 0; d < box.dim; ++d) {
    const double s = x[d] / box.h - 0.5;
    const double clamped = std::clamp(s, 0.0, static_cast<double>(box.shape[d] - 1));
    lo[d] = std::min(static_cast<int>(std::floor(clamped)), std::max(box.shape[d] - 2, 0));
    frac[d] = box.shape[d] > 1 ? clamped - lo[d] : 0.0;
  }
  double value = 0.0;
  const int corners = 1 << box.dim;
  for (int corner = 0; corner < corners; ++corner) {
    double weight = 1.0;
    std::array<int, 3> c = lo;
    for (int d = 0; d < box.dim; ++d) {
      const int bit = (corner >> d) & 1;
      weight *= bit ? frac[d] : 1.0 - frac[d];
      c[d] = std::min(c[d] + bit, box.shape[d] - 1);
    }
    if (weight == 0.0) continue;
    const auto dof = box.dof_of_voxel[static_cast<std::size_t>(box.index(c))];
    value += weight * field[static_cast<std::size_t>(dof)];
  }
  return value;
}

std::vector<double> compare(const Trajectory& micro, const PerforatedGrid& micro_grid,
                            const Trajectory& macro, const PerforatedGrid& macro_grid,
                            double theta, std::span<const int> species) {
  if (micro.snapshots.size() != macro.snapshots.size()) {
    throw std::invalid_argument("micro and macro snapshot counts differ");
  }
  for (std::size_t k = 0; k < micro.snapshots.size(); ++k) {
    const double a = micro.snapshots[k].t;
    const double b = macro.snapshots[k].t;
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
      throw std::invalid_argument("micro and macro snapshot times differ");
    }
  }
  if (micro_grid.dim != macro_grid.dim) throw std::invalid_argument("dimension mismatch");

  const int cells = micro_grid.cells_per_axis();
  const int dim = micro_grid.dim;
  std::vector<Point> centers;
  {
    std::array<int, 3> c{0, 0, 0};
    const int zc = dim == 3 ? cells : 1;
    const int yc = dim >= 2 ? cells : 1;
    for (c[2] = 0; c[2] < zc; ++c[2])
      for (c[1] = 0; c[1] < yc; ++c[1])
        for (c[0] = 0; c[0] < cells; ++c[0]) {
          Point p{0.0, 0.0, 0.0};
          for (int d = 0; d < dim; ++d) p[d] = (c[d] + 0.5) * micro_grid.epsilon;
          centers.push_back(p);
        }
  }
  const double cell_volume = std::pow(micro_grid.epsilon, dim);

  std::vector<double> errors;
  for (int i : species) {
    if (i < 1 || i > micro.n_species || i > macro.n_species) {
      throw std::invalid_argument("requested species outside the truncation");
    }
    CompensatedSum e2;
    for (std::size_t k = 1; k < micro.snapshots.size(); ++k) {
      const double dt = micro.snapshots[k].t - micro.snapshots[k - 1].t;
      const auto coarse = cell_average(micro_grid, micro.species(micro.snapshots[k], i));
      const auto macro_field = macro.species(macro.snapshots[k], i);
      for (std::size_t c = 0; c < coarse.size(); ++c) {
        const double diff = coarse[c] - theta * sample_field(macro_grid, macro_field, centers[c]);
        e2.add(diff * diff * cell_volume * dt);
      }
    }
    errors.push_back(std::sqrt(e2.value()));
  }
  return errors;
}

double duality_diagnostic(const Trajectory& trajectory) { return trajectory.duality; }

bool ConvergenceReport::strictly_decreasing(std::size_t slot) const {
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (!(entries[k].errors[slot] < entries[k - 1].errors[slot])) return false;
  }
  return true;
}

double ConvergenceReport::duality_ratio() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& e : entries) {
    lo = std::min(lo, e.duality);
    hi = std::max(hi, e.duality);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace cfhom
