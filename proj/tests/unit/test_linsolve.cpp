#include "doctest.h"

#include <random>

#include "cfhom/errors.hpp"
#include "cfhom/linsolve.hpp"
#include "oracles.hpp"

using namespace cfhom;

TEST_CASE("smallest stencils") {
  SUBCASE("single voxel") {
    const auto op = assemble_neumann_laplacian(build_box_grid(1, {1, 1, 1}, 0.5));
    CHECK(op.n == 1);
    CHECK(op.entry(0, 0) == 0.0);
  }
  SUBCASE("two voxel chain") {
    const double h = 0.5;
    const auto op = assemble_neumann_laplacian(build_box_grid(1, {2, 1, 1}, h));
    CHECK(op.entry(0, 0) == 1 / (h * h));
    CHECK(op.entry(0, 1) == -1 / (h * h));
    CHECK(op.entry(1, 0) == -1 / (h * h));
    CHECK(op.entry(1, 1) == 1 / (h * h));
  }
}

TEST_CASE("operator structure on a perforated grid") {
  const auto g = build_perforated_grid({2, 1.0, 0.25, 0.25, 8});
  DiffusionTensor A = identity_tensor();
  A[0][0] = 0.8;
  A[1][1] = 0.6;
  A[0][1] = A[1][0] = 0.1;
  for (const auto& op : {assemble_neumann_laplacian(g), assemble_tensor_diffusion(g, A)}) {
    std::vector<double> ones(op.n, 1.0), y(op.n);
    op.apply(ones, y);
    for (double v : y) CHECK(std::abs(v) < 1e-9);
    std::mt19937_64 rng(3);
    const auto x = oracle::random_state(rng, static_cast<int>(op.n));
    const auto z = oracle::random_state(rng, static_cast<int>(op.n));
    std::vector<double> ax(op.n), az(op.n);
    op.apply(x, ax);
    op.apply(z, az);
    double zax = 0, xaz = 0, xax = 0;
    for (std::size_t i = 0; i < op.n; ++i) {
      zax += z[i] * ax[i];
      xaz += x[i] * az[i];
      xax += x[i] * ax[i];
    }
    CHECK(oracle::rel(zax, xaz) < 1e-12);
    CHECK(xax > 0.0);
  }
}

TEST_CASE("identity tensor reproduces the Laplacian") {
  const auto g = build_perforated_grid({2, 1.0, 0.25, 0.3, 8});
  const auto lap = assemble_neumann_laplacian(g);
  const auto ten = assemble_tensor_diffusion(g, identity_tensor());
  CHECK(lap.row_ptr == ten.row_ptr);
  CHECK(lap.col == ten.col);
  CHECK(lap.val == ten.val);
}

TEST_CASE("solver") {
  const auto g = build_perforated_grid({2, 1.0, 0.5, 0.3, 8});
  const auto op = assemble_neumann_laplacian(g);
  SUBCASE("zero right-hand side") {
    const auto r = solve_spd(op, 1.0, 1.0, std::vector<double>(op.n, 0.0));
    for (double v : r.x) CHECK(v == 0.0);
  }
  SUBCASE("constants pass through I + K") {
    const auto r = solve_spd(op, 1.0, 1.0, std::vector<double>(op.n, 1.0));
    for (double v : r.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("dense oracle on a 50 dof shifted operator") {
    const auto small = build_box_grid(2, {10, 5, 1}, 0.1);
    const auto k = assemble_neumann_laplacian(small);
    REQUIRE(k.n == 50);
    std::mt19937_64 rng(5);
    const auto b = oracle::random_state(rng, 50);
    std::vector<std::vector<double>> M(50, std::vector<double>(50));
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t j = 0; j < 50; ++j) M[i][j] = (i == j ? 0.7 : 0.0) + 0.01 * k.entry(i, j);
    const auto ref = oracle::dense_solve(M, b);
    SolveOptions o;
    o.keep_history = true;
    const auto r = solve_spd(k, 0.7, 0.01, b, o);
    for (std::size_t i = 0; i < 50; ++i) CHECK(r.x[i] == doctest::Approx(ref[i]).epsilon(1e-8));
    CHECK(r.residual < 1e-10);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
  }
  SUBCASE("pure Neumann solve returns the zero-mean solution") {
    std::vector<double> b(op.n);
    for (std::size_t i = 0; i < op.n; ++i) b[i] = std::sin(0.37 * i);
    double mean = 0;
    for (double v : b) mean += v;
    mean /= op.n;
    for (auto& v : b) v -= mean;
    const auto r = solve_spd(op, 0.0, 1.0, b);
    std::vector<double> y(op.n);
    op.apply(r.x, y);
    double xm = 0;
    for (std::size_t i = 0; i < op.n; ++i) {
      CHECK(y[i] == doctest::Approx(b[i]).epsilon(1e-7).scale(1.0));
      xm += r.x[i];
    }
    CHECK(std::abs(xm / op.n) < 1e-12);
  }
  SUBCASE("iteration cap") {
    SolveOptions o;
    o.max_iter = 2;
    std::vector<double> b(op.n);
    for (std::size_t i = 0; i < op.n; ++i) b[i] = std::cos(1.3 * i);
    CHECK_THROWS_AS(solve_spd(op, 1e-3, 1.0, b, o), ConvergenceError);
  }
}
