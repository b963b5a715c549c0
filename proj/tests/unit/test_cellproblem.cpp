#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "cfhom/cellproblem.hpp"

using namespace cfhom;

TEST_CASE("no hole gives the identity") {
  for (int dim : {2, 3}) {
    const auto cell = build_reference_cell(dim, 0.0, 8);
    const auto s = solve_cell_problem(cell);
    CHECK(s.theta == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) CHECK(std::abs(s.A[i][j] - (i == j)) < 1e-10);
    for (const auto& w : s.w)
      for (double v : w) CHECK(v == 0.0);
    const std::vector<double> g{0.3, -1.2, 0.5};
    for (double v : corrector_reconstruct(s, std::span<const double>(g.data(), dim))) CHECK(v == 0.0);
  }
}

TEST_CASE("centred disk") {
  std::vector<double> a;
  for (int m : {32, 64, 128}) {
    const auto cell = build_reference_cell(2, 0.25, m);
    const auto s = solve_cell_problem(cell);
    CHECK(std::abs(s.A[0][1]) < 1e-6 * s.A[0][0]);
    CHECK(std::abs(s.A[1][0]) < 1e-6 * s.A[0][0]);
    CHECK(s.A[0][0] == doctest::Approx(s.A[1][1]).epsilon(1e-8));
    CHECK(s.A[0][0] > 0.0);
    CHECK(s.A[0][0] < s.theta);
    a.push_back(s.A[0][0]);
  }
  CHECK(std::abs(a[2] - a[1]) < std::abs(a[1] - a[0]));
}

TEST_CASE("effective coefficient decreases with the hole size") {
  double prev = 1.0;
  for (double r : {0.1, 0.2, 0.3, 0.4}) {
    const auto s = solve_cell_problem(build_reference_cell(2, r, 32));
    CHECK(s.A[0][0] < prev);
    CHECK(s.theta > 1.0 - M_PI / 4.0);
    prev = s.A[0][0];
  }
}

TEST_CASE("energy identities") {
  const auto cell = build_reference_cell(2, 0.25, 32);
  const auto s = solve_cell_problem(cell);
  const std::vector<double> e1{1.0, 0.0}, e2{0.0, 1.0};
  const std::vector<double> zero(cell.dof_count(), 0.0);

  // macro gradient e_1 with its reconstructed corrector recovers A_11
  const auto u1 = corrector_reconstruct(s, e1);
  CHECK(corrector_energy(cell, u1, e1) == doctest::Approx(s.A[0][0]).epsilon(1e-10));
  CHECK(corrector_energy_product(cell, s.w[0], e1, s.w[1], e2) ==
        doctest::Approx(s.A[0][1]).scale(1.0).epsilon(1e-10));
  // without the corrector only fluid-fluid faces normal to e_1 carry energy
  long faces = 0;
  for (auto v : cell.voxel_of_dof) faces += cell.fluid[cell.neighbor(v, 0, 1)];
  CHECK(corrector_energy(cell, zero, e1) ==
        doctest::Approx(faces * cell.voxel_volume()).epsilon(1e-12));

  SUBCASE("Galerkin orthogonality and minimality") {
    std::vector<double> v(cell.dof_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.11 * i) + 0.3 * std::cos(0.7 * i);
    const std::vector<double> nog{0.0, 0.0};
    CHECK(std::abs(corrector_energy_product(cell, s.w[0], e1, v, nog)) < 1e-7);
    std::vector<double> perturbed = s.w[0];
    for (std::size_t i = 0; i < v.size(); ++i) perturbed[i] += 1e-3 * v[i];
    CHECK(corrector_energy(cell, perturbed, e1) > s.A[0][0]);
  }
  SUBCASE("zero macro gradient") {
    const std::vector<double> g0{0.0, 0.0};
    for (double v : corrector_reconstruct(s, g0)) CHECK(v == 0.0);
  }
  SUBCASE("eigenvalue") {
    CHECK(min_eigenvalue(s.A, 2) == doctest::Approx(s.A[0][0]).epsilon(1e-6));
    DiffusionTensor B{};
    B[0][0] = 2.0;
    B[1][1] = 2.0;
    B[0][1] = B[1][0] = 1.0;
    CHECK(min_eigenvalue(B, 2) == doctest::Approx(1.0));
  }
}

TEST_CASE("cell problem preconditions") {
  const auto bounded = build_box_grid(2, {8, 8, 1}, 1.0 / 8);
  CHECK_THROWS_AS(solve_cell_problem(bounded), std::invalid_argument);
}
