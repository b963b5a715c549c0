#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <sstream>

#include "cfhom/geometry.hpp"

using namespace cfhom;

namespace {

// Fraction of a fine regular point sample of the unit cell lying outside the
// centred ball, i.e. the continuous porosity.
double sampled_porosity(int dim, double r, int samples_per_axis) {
  long outside = 0, total = 0;
  const int n = samples_per_axis;
  const int nz = dim == 3 ? n : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double d2 = std::pow((i + 0.5) / n - 0.5, 2) + std::pow((j + 0.5) / n - 0.5, 2);
        if (dim == 3) d2 += std::pow((k + 0.5) / n - 0.5, 2);
        outside += d2 >= r * r;
        ++total;
      }
  return static_cast<double>(outside) / total;
}

// Solid/fluid face count of the voxelized disk in one 2-D cell, by scanning
// every voxel pair with wrap-around.
long disk_interface_faces(double r, int m) {
  auto solid = [&](int i, int j) {
    i = (i + m) % m;
    j = (j + m) % m;
    const double x = (i + 0.5) / m - 0.5, y = (j + 0.5) / m - 0.5;
    return x * x + y * y < r * r;
  };
  long faces = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      faces += solid(i, j) != solid(i + 1, j);
      faces += solid(i, j) != solid(i, j + 1);
    }
  return faces;
}

}  // namespace

TEST_CASE("unperforated domain") {
  const auto g = build_perforated_grid({2, 1.0, 0.25, 0.0, 16});
  CHECK(g.fluid_volume == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.gamma_faces.empty());
  CHECK(g.hole_count == 0);
  CHECK(g.dof_count() == 64u * 64u);
}

TEST_CASE("porosity against point sampling") {
  SUBCASE("2-D, m_cell=64") {
    const auto cell = build_reference_cell(2, 0.25, 64);
    const double theta = cell.fluid_volume;
    CHECK(std::abs(theta - sampled_porosity(2, 0.25, 2000)) < 0.01 * theta);
    CHECK(std::abs(theta - (1.0 - M_PI / 16.0)) < 0.01 * theta);
  }
  SUBCASE("3-D, m_cell=32") {
    const auto cell = build_reference_cell(3, 0.25, 32);
    const double theta = cell.fluid_volume;
    CHECK(std::abs(theta - sampled_porosity(3, 0.25, 200)) < 0.02 * theta);
  }
  SUBCASE("domain at eps=1/4, m_cell=32 holds 16 holes") {
    const auto g = build_perforated_grid({2, 1.0, 0.25, 0.25, 32});
    CHECK(g.hole_count == 16);
    const auto cell = build_reference_cell(2, 0.25, 32);
    CHECK(g.fluid_volume == doctest::Approx(cell.fluid_volume).epsilon(1e-12));
  }
}

TEST_CASE("hole count by lattice enumeration") {
  for (double r : {0.1, 0.3, 0.45}) {
    const double eps = 0.5;
    const auto g = build_perforated_grid({2, 1.0, eps, r, 16});
    int expected = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double cx = (a + 0.5) * eps, cy = (b + 0.5) * eps, rr = r * eps;
        expected += cx - rr > 0 && cx + rr < 1 && cy - rr > 0 && cy + rr < 1;
      }
    CHECK(g.hole_count == expected);
  }
}

TEST_CASE("boundary faces") {
  const auto g = build_perforated_grid({2, 1.0, 0.25, 0.25, 16});
  const auto cell = build_reference_cell(2, 0.25, 16);
  const long per_cell = disk_interface_faces(0.25, 16);
  CHECK(cell.gamma_faces.size() == static_cast<std::size_t>(per_cell));
  CHECK(g.gamma_faces.size() == static_cast<std::size_t>(16 * per_cell));
  CHECK(g.outer_faces.size() == 4u * 64u);
  for (const auto& f : g.gamma_faces) {
    CHECK(g.fluid[f.voxel] == 1);
    CHECK(g.fluid[g.neighbor(f.voxel, f.axis, f.side)] == 0);
  }
  CHECK(count_fluid_components(g) == 1);
}

TEST_CASE("scaled boundary measure") {
  const std::vector<DomainSpec> specs{{2, 1.0, 0.25, 0.25, 16}, {2, 1.0, 0.125, 0.25, 16},
                                      {2, 1.0, 0.0625, 0.25, 16}};
  const auto entries = gamma_measure_limit_check(specs);
  REQUIRE(entries.size() == 3);
  const double P = disk_interface_faces(0.25, 16) / 16.0;
  for (const auto& e : entries) CHECK(std::abs(e.scaled_gamma_area - P) < 1e-10);

  SUBCASE("voxel perimeter of a disk is 8r") {
    const std::vector<DomainSpec> fine{{2, 1.0, 0.0625, 0.25, 64}};
    const auto e = gamma_measure_limit_check(fine);
    CHECK(std::abs(e[0].scaled_gamma_area - 8 * 0.25) < 0.02 * 2.0);
  }
  SUBCASE("no holes") {
    const std::vector<DomainSpec> none{{2, 1.0, 0.25, 0.0, 16}};
    CHECK(gamma_measure_limit_check(none)[0].scaled_gamma_area == 0.0);
  }
}

TEST_CASE("invalid domains") {
  CHECK_THROWS_AS(build_perforated_grid({2, 1.0, 0.3, 0.25, 16}), std::invalid_argument);
  CHECK_THROWS_AS(build_perforated_grid({2, 1.0, 0.25, 0.5, 16}), std::invalid_argument);
  CHECK_THROWS_AS(build_perforated_grid({2, 1.0, 0.25, 0.25, 4}), std::invalid_argument);
  CHECK_THROWS_AS(build_perforated_grid({4, 1.0, 0.25, 0.25, 16}), std::invalid_argument);
}

TEST_CASE("periodic reference cell wraps around") {
  const auto cell = build_reference_cell(2, 0.0, 8);
  CHECK(cell.neighbor(0, 0, -1) == 7);
  CHECK(cell.neighbor(7, 0, 1) == 0);
  const auto box = build_box_grid(2, {8, 8, 1}, 1.0 / 8);
  CHECK(box.neighbor(0, 0, -1) == -1);
}

TEST_CASE("mask csv") {
  const auto cell = build_reference_cell(2, 0.25, 8);
  std::ostringstream os;
  write_mask_csv(cell, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "voxel,x,y,fluid");
  int rows = 0, fluid = 0;
  while (std::getline(is, line)) {
    ++rows;
    fluid += line.back() == '1';
  }
  CHECK(rows == 64);
  CHECK(fluid == static_cast<int>(cell.dof_count()));
}
