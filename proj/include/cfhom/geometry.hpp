#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cfhom/numerics.hpp"

namespace cfhom {

/// Ω = [0,L]^dim perforated by balls of radius r·ε centred in every ε-cell.
/// The voxel spacing is h = ε / m_cell.
struct DomainSpec {
  int dim = 2;
  double L = 1.0;
  double epsilon = 0.25;
  double hole_radius = 0.25;  // in cell units, r < 1/2
  int m_cell = 16;
};

enum class Topology { kBounded, kPeriodic };

/// Face between a fluid voxel and a solid voxel. `side` is the direction
/// (+1/-1 along `axis`) pointing from the fluid voxel into the hole.
struct GammaFace {
  std::int64_t voxel = 0;
  int axis = 0;
  int side = 1;
  Point center{};
  std::int64_t hole = 0;  // lattice index of the ε-cell owning the hole
};

/// Fluid voxel face lying on ∂Ω.
struct OuterFace {
  std::int64_t voxel = 0;
  int axis = 0;
  int side = 1;
};

/// Voxel lattice with a fluid mask. Degrees of freedom live on fluid voxels only
/// and are numbered in increasing voxel order.
struct PerforatedGrid {
  int dim = 2;
  std::array<int, 3> shape{1, 1, 1};
  double h = 1.0;
  Topology topology = Topology::kBounded;
  double epsilon = 1.0;  // period of the perforation (1 for a reference cell)
  int m_cell = 1;        // voxels per period along each axis
  double hole_radius = 0.0;
  int hole_count = 0;

  std::vector<std::uint8_t> fluid;           // per voxel
  std::vector<std::int64_t> dof_of_voxel;    // -1 on solid voxels
  std::vector<std::int64_t> voxel_of_dof;
  std::vector<GammaFace> gamma_faces;
  std::vector<OuterFace> outer_faces;
  double fluid_volume = 0.0;
  double gamma_area = 0.0;

  std::int64_t voxel_count() const noexcept {
    return std::int64_t{shape[0]} * shape[1] * shape[2];
  }
  std::size_t dof_count() const noexcept { return voxel_of_dof.size(); }
  double voxel_volume() const noexcept;
  double face_measure() const noexcept;
  /// Total lattice volume, fluid plus solid.
  double box_volume() const noexcept { return static_cast<double>(voxel_count()) * voxel_volume(); }

  std::array<int, 3> coords(std::int64_t voxel) const noexcept {
    return {static_cast<int>(voxel % shape[0]), static_cast<int>((voxel / shape[0]) % shape[1]),
            static_cast<int>(voxel / (std::int64_t{shape[0]} * shape[1]))};
  }
  std::int64_t index(const std::array<int, 3>& c) const noexcept {
    return c[0] + std::int64_t{shape[0]} * (c[1] + std::int64_t{shape[1]} * c[2]);
  }
  Point center(std::int64_t voxel) const noexcept;
  /// Neighbouring voxel across the face (axis, side); -1 outside a bounded lattice.
  std::int64_t neighbor(std::int64_t voxel, int axis, int side) const noexcept;
  /// Lattice index of the ε-cell containing the voxel.
  std::int64_t cell_of_voxel(std::int64_t voxel) const noexcept;
  int cells_per_axis() const noexcept { return shape[0] / m_cell; }
};

/// Throws std::invalid_argument for non-conforming (L, ε, m_cell), r ∉ [0, 1/2),
/// dim ∉ {2, 3}, or a disconnected fluid region.
PerforatedGrid build_perforated_grid(const DomainSpec& spec);

/// One periodic cell Y* = [0,1]^dim minus the centred ball, with wrap-around
/// neighbours and no security zone.
PerforatedGrid build_reference_cell(int dim, double hole_radius, int m_cell);

/// Unperforated lattice; dim may be 1, 2 or 3.
PerforatedGrid build_box_grid(int dim, std::array<int, 3> shape, double h,
                              Topology topology = Topology::kBounded);

/// Number of face-connected fluid components (flood fill).
int count_fluid_components(const PerforatedGrid& grid);

struct GammaMeasureEntry {
  double epsilon = 0.0;
  double gamma_area = 0.0;         // |Γ_ε| in voxel measure
  double scaled_gamma_area = 0.0;  // ε·|Γ_ε|
};

/// ε·|Γ_ε| for each spec. Specs must share Ω, hole radius and m_cell.
std::vector<GammaMeasureEntry> gamma_measure_limit_check(std::span<const DomainSpec> specs);

/// One row per voxel: voxel, x, y[, z], fluid.
void write_mask_csv(const PerforatedGrid& grid, std::ostream& os);

}  // namespace cfhom
