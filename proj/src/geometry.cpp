#include "cfhom/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>

namespace cfhom {

namespace {

// Integer ratio a/b if it is one to within round-off, otherwise -1.
long conforming_ratio(double a, double b) {
  const double q = a / b;
  const double r = std::round(q);
  if (r < 1.0 || std::abs(q - r) > 1e-9 * r) return -1;
  return static_cast<long>(r);
}

// Is the voxel centre (local index `local` along each axis out of m) strictly
// inside the ball of radius r centred in the cell?
bool inside_ball(const std::array<int, 3>& local, int dim, int m, double r) {
  double dist2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double y = (local[d] + 0.5) / m - 0.5;
    dist2 += y * y;
  }
  return dist2 < r * r;
}

void finalize(PerforatedGrid& g) {
  const auto n = g.voxel_count();
  g.dof_of_voxel.assign(static_cast<std::size_t>(n), -1);
  g.voxel_of_dof.clear();
  for (std::int64_t v = 0; v < n; ++v) {
    if (g.fluid[v]) {
      g.dof_of_voxel[v] = static_cast<std::int64_t>(g.voxel_of_dof.size());
      g.voxel_of_dof.push_back(v);
    }
  }
  g.gamma_faces.clear();
  g.outer_faces.clear();
  for (std::int64_t v : g.voxel_of_dof) {
    const Point c = g.center(v);
    for (int axis = 0; axis < g.dim; ++axis) {
      for (int side : {-1, 1}) {
        const auto nb = g.neighbor(v, axis, side);
        if (nb < 0) {
          g.outer_faces.push_back({v, axis, side});
        } else if (!g.fluid[nb]) {
          GammaFace f;
          f.voxel = v;
          f.axis = axis;
          f.side = side;
          f.center = c;
          f.center[axis] += 0.5 * side * g.h;
          f.hole = g.cell_of_voxel(nb);
          g.gamma_faces.push_back(f);
        }
      }
    }
  }
  g.fluid_volume = static_cast<double>(g.voxel_of_dof.size()) * g.voxel_volume();
  g.gamma_area = static_cast<double>(g.gamma_faces.size()) * g.face_measure();
}

void require_connected(const PerforatedGrid& g) {
  if (g.dof_count() > 0 && count_fluid_components(g) != 1) {
    throw std::invalid_argument("fluid region is not face-connected");
  }
}

void check_hole(int dim, double r, int m_cell) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (!(r >= 0.0 && r < 0.5)) throw std::invalid_argument("hole_radius must lie in [0, 1/2)");
  if (m_cell < 8) throw std::invalid_argument("m_cell must be >= 8");
}

}  // namespace

double PerforatedGrid::voxel_volume() const noexcept { return std::pow(h, dim); }

double PerforatedGrid::face_measure() const noexcept { return std::pow(h, dim - 1); }

Point PerforatedGrid::center(std::int64_t voxel) const noexcept {
  const auto c = coords(voxel);
  Point p{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) p[d] = (c[d] + 0.5) * h;
  return p;
}

std::int64_t PerforatedGrid::neighbor(std::int64_t voxel, int axis, int side) const noexcept {
  auto c = coords(voxel);
  c[axis] += side;
  if (c[axis] < 0 || c[axis] >= shape[axis]) {
    if (topology == Topology::kBounded) return -1;
    c[axis] = (c[axis] + shape[axis]) % shape[axis];
  }
  return index(c);
}

std::int64_t PerforatedGrid::cell_of_voxel(std::int64_t voxel) const noexcept {
  const auto c = coords(voxel);
  const int cells = cells_per_axis();
  std::int64_t id = 0;
  for (int d = dim - 1; d >= 0; --d) id = id * cells + c[d] / m_cell;
  return id;
}

PerforatedGrid build_perforated_grid(const DomainSpec& spec) {
  check_hole(spec.dim, spec.hole_radius, spec.m_cell);
  if (!(spec.L > 0.0)) throw std::invalid_argument("L must be > 0");
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0,1)");
  }
  const long cells = conforming_ratio(spec.L, spec.epsilon);
  if (cells < 1) throw std::invalid_argument("epsilon does not divide L");

  PerforatedGrid g;
  g.dim = spec.dim;
  g.m_cell = spec.m_cell;
  g.epsilon = spec.epsilon;
  g.hole_radius = spec.hole_radius;
  g.h = spec.epsilon / spec.m_cell;
  g.topology = Topology::kBounded;
  const int n = static_cast<int>(cells) * spec.m_cell;
  for (int d = 0; d < spec.dim; ++d) g.shape[d] = n;

  // A cell keeps its hole only if the closed ball lies strictly inside Ω.
  const double r_phys = spec.hole_radius * spec.epsilon;
  auto hole_inside = [&](const std::array<int, 3>& cell) {
    if (spec.hole_radius == 0.0) return false;
    for (int d = 0; d < spec.dim; ++d) {
      const double c = (cell[d] + 0.5) * spec.epsilon;
      if (!(c - r_phys > 0.0 && c + r_phys < spec.L)) return false;
    }
    return true;
  };
  g.hole_count = 0;
  {
    std::array<int, 3> cell{0, 0, 0};
    const int zc = spec.dim == 3 ? static_cast<int>(cells) : 1;
    for (cell[2] = 0; cell[2] < zc; ++cell[2])
      for (cell[1] = 0; cell[1] < cells; ++cell[1])
        for (cell[0] = 0; cell[0] < cells; ++cell[0])
          if (hole_inside(cell)) ++g.hole_count;
  }

  g.fluid.assign(static_cast<std::size_t>(g.voxel_count()), 1);
  for (std::int64_t v = 0; v < g.voxel_count(); ++v) {
    const auto c = g.coords(v);
    std::array<int, 3> cell{0, 0, 0};
    std::array<int, 3> local{0, 0, 0};
    for (int d = 0; d < spec.dim; ++d) {
      cell[d] = c[d] / spec.m_cell;
      local[d] = c[d] % spec.m_cell;
    }
    if (hole_inside(cell) && inside_ball(local, spec.dim, spec.m_cell, spec.hole_radius)) {
      g.fluid[v] = 0;
    }
  }
  finalize(g);
  require_connected(g);
  return g;
}

PerforatedGrid build_reference_cell(int dim, double hole_radius, int m_cell) {
  check_hole(dim, hole_radius, m_cell);
  PerforatedGrid g;
  g.dim = dim;
  g.m_cell = m_cell;
  g.epsilon = 1.0;
  g.hole_radius = hole_radius;
  g.h = 1.0 / m_cell;
  g.topology = Topology::kPeriodic;
  for (int d = 0; d < dim; ++d) g.shape[d] = m_cell;
  g.hole_count = hole_radius > 0.0 ? 1 : 0;
  g.fluid.assign(static_cast<std::size_t>(g.voxel_count()), 1);
  for (std::int64_t v = 0; v < g.voxel_count(); ++v) {
    if (hole_radius > 0.0 && inside_ball(g.coords(v), dim, m_cell, hole_radius)) g.fluid[v] = 0;
  }
  finalize(g);
  require_connected(g);
  return g;
}

PerforatedGrid build_box_grid(int dim, std::array<int, 3> shape, double h, Topology topology) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");
  PerforatedGrid g;
  g.dim = dim;
  g.h = h;
  g.topology = topology;
  for (int d = 0; d < 3; ++d) {
    g.shape[d] = d < dim ? shape[d] : 1;
    if (g.shape[d] < 1) throw std::invalid_argument("box shape entries must be >= 1");
  }
  g.m_cell = g.shape[0];
  g.epsilon = g.shape[0] * h;
  g.fluid.assign(static_cast<std::size_t>(g.voxel_count()), 1);
  finalize(g);
  return g;
}

int count_fluid_components(const PerforatedGrid& g) {
  std::vector<std::uint8_t> seen(g.fluid.size(), 0);
  int components = 0;
  std::queue<std::int64_t> queue;
  for (std::int64_t start : g.voxel_of_dof) {
    if (seen[start]) continue;
    ++components;
    seen[start] = 1;
    queue.push(start);
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop();
      for (int axis = 0; axis < g.dim; ++axis) {
        for (int side : {-1, 1}) {
          const auto nb = g.neighbor(v, axis, side);
          if (nb >= 0 && g.fluid[nb] && !seen[nb]) {
            seen[nb] = 1;
            queue.push(nb);
          }
        }
      }
    }
  }
  return components;
}

std::vector<GammaMeasureEntry> gamma_measure_limit_check(std::span<const DomainSpec> specs) {
  std::vector<GammaMeasureEntry> out;
  for (const auto& spec : specs) {
    if (!out.empty()) {
      const auto& first = specs.front();
      if (spec.dim != first.dim || spec.L != first.L || spec.hole_radius != first.hole_radius ||
          spec.m_cell != first.m_cell) {
        throw std::invalid_argument("gamma measure sequence must share L, dim, r and m_cell");
      }
    }
    const auto grid = build_perforated_grid(spec);
    out.push_back({spec.epsilon, grid.gamma_area, spec.epsilon * grid.gamma_area});
  }
  return out;
}

void write_mask_csv(const PerforatedGrid& g, std::ostream& os) {
  static const char* const kAxes[] = {"x", "y", "z"};
  os << "voxel";
  for (int d = 0; d < g.dim; ++d) os << ',' << kAxes[d];
  os << ",fluid\n";
  char buf[64];
  for (std::int64_t v = 0; v < g.voxel_count(); ++v) {
    os << v;
    const auto p = g.center(v);
    for (int d = 0; d < g.dim; ++d) {
      std::snprintf(buf, sizeof buf, ",%.17g", p[d]);
      os << buf;
    }
    os << ',' << int{g.fluid[v]} << '\n';
  }
}

}  // namespace cfhom
