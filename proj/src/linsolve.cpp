#include "cfhom/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "cfhom/errors.hpp"

namespace cfhom {

namespace {

using Triplets = std::vector<std::vector<std::pair<std::int64_t, double>>>;

SparseOperator compress(Triplets rows) {
  SparseOperator op;
  op.n = rows.size();
  op.row_ptr.assign(op.n + 1, 0);
  op.diag.assign(op.n, 0.0);
  for (std::size_t i = 0; i < op.n; ++i) {
    auto& row = rows[i];
    std::stable_sort(row.begin(), row.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size();) {
      const auto c = row[k].first;
      double v = 0.0;
      for (; k < row.size() && row[k].first == c; ++k) v += row[k].second;
      op.col.push_back(c);
      op.val.push_back(v);
      if (static_cast<std::size_t>(c) == i) op.diag[i] = v;
    }
    op.row_ptr[i + 1] = op.col.size();
  }
  return op;
}

SparseOperator assemble(const PerforatedGrid& g, const DiffusionTensor& A) {
  Triplets rows(g.dof_count());
  const double inv_h2 = 1.0 / (g.h * g.h);
  for (std::size_t dof = 0; dof < g.dof_count(); ++dof) {
    const auto v = g.voxel_of_dof[dof];
    for (int axis = 0; axis < g.dim; ++axis) {
      const double w = A[axis][axis] * inv_h2;
      for (int side : {-1, 1}) {
        const auto nb = g.neighbor(v, axis, side);
        if (nb < 0 || nb == v || !g.fluid[nb]) continue;
        rows[dof].emplace_back(static_cast<std::int64_t>(dof), w);
        rows[dof].emplace_back(g.dof_of_voxel[nb], -w);
      }
    }
  }

  // Cross couplings from 2x2 blocks (v00, v10, v01, v11) in the (p, q) plane.
  const double inv_2h = 0.5 / g.h;
  for (int p = 0; p < g.dim; ++p) {
    for (int q = p + 1; q < g.dim; ++q) {
      const double apq = 0.5 * (A[p][q] + A[q][p]);
      if (apq == 0.0) continue;
      for (std::int64_t v00 : g.voxel_of_dof) {
        const auto v10 = g.neighbor(v00, p, 1);
        const auto v01 = g.neighbor(v00, q, 1);
        if (v10 < 0 || v01 < 0) continue;
        const auto v11 = g.neighbor(v10, q, 1);
        if (v11 < 0 || !g.fluid[v10] || !g.fluid[v01] || !g.fluid[v11]) continue;
        const std::array<std::int64_t, 4> dofs{g.dof_of_voxel[v00], g.dof_of_voxel[v10],
                                               g.dof_of_voxel[v01], g.dof_of_voxel[v11]};
        const std::array<double, 4> gp{-inv_2h, inv_2h, -inv_2h, inv_2h};
        const std::array<double, 4> gq{-inv_2h, -inv_2h, inv_2h, inv_2h};
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            const double w = apq * (gp[a] * gq[b] + gq[a] * gp[b]);
            if (w != 0.0) rows[static_cast<std::size_t>(dofs[a])].emplace_back(dofs[b], w);
          }
        }
      }
    }
  }
  return compress(std::move(rows));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void project_zero_mean(std::span<double> x) {
  if (x.empty()) return;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

}  // namespace

DiffusionTensor identity_tensor() {
  DiffusionTensor A{};
  for (int d = 0; d < 3; ++d) A[d][d] = 1.0;
  return A;
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

double SparseOperator::entry(std::size_t i, std::size_t j) const {
  for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
    if (static_cast<std::size_t>(col[k]) == j) return val[k];
  }
  return 0.0;
}

SparseOperator assemble_neumann_laplacian(const PerforatedGrid& grid) {
  return assemble(grid, identity_tensor());
}

SparseOperator assemble_tensor_diffusion(const PerforatedGrid& grid, const DiffusionTensor& A) {
  return assemble(grid, A);
}

SolveResult solve_spd(const SparseOperator& op, double shift, double scale,
                      std::span<const double> rhs, const SolveOptions& options,
                      std::span<const double> x0) {
  const std::size_t n = op.n;
  const bool singular = shift == 0.0;
  SolveResult result;
  result.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), result.x.begin());

  std::vector<double> b(rhs.begin(), rhs.end());
  if (singular) {
    project_zero_mean(b);
    project_zero_mean(result.x);
  }
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) {
    std::fill(result.x.begin(), result.x.end(), 0.0);
    return result;
  }

  auto apply = [&](std::span<const double> in, std::span<double> out) {
    op.apply(in, out);
    for (std::size_t i = 0; i < n; ++i) out[i] = shift * in[i] + scale * out[i];
  };
  std::vector<double> inv_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = shift + scale * op.diag[i];
    inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
  }
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    if (singular) project_zero_mean(out);
  };

  auto& x = result.x;
  std::vector<double> r(n), z(n), p(n), Az(n), Ap(n), q(n);
  apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  precondition(r, z);
  p = z;
  apply(z, Az);
  Ap = Az;
  double zAz = dot(z, Az);

  double r_norm = std::sqrt(dot(r, r));
  result.residual = r_norm / b_norm;
  if (options.keep_history) result.history.push_back(std::sqrt(std::max(dot(r, z), 0.0)));

  int it = 0;
  while (result.residual > options.tol) {
    if (it >= options.max_iter) {
      std::ostringstream os;
      os << "conjugate residual solver stopped after " << it
         << " iterations at relative residual " << result.residual;
      throw ConvergenceError(os.str(), it, result.residual);
    }
    precondition(Ap, q);
    const double denom = dot(Ap, q);
    if (!(denom > 0.0) || !(zAz > 0.0)) break;
    const double alpha = zAz / denom;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      z[i] -= alpha * q[i];
    }
    apply(z, Az);
    const double zAz_new = dot(z, Az);
    const double beta = zAz_new / zAz;
    zAz = zAz_new;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = z[i] + beta * p[i];
      Ap[i] = Az[i] + beta * Ap[i];
    }
    ++it;
    r_norm = std::sqrt(dot(r, r));
    result.residual = r_norm / b_norm;
    if (options.keep_history) result.history.push_back(std::sqrt(std::max(dot(r, z), 0.0)));
  }
  if (singular) project_zero_mean(x);
  result.iterations = it;
  return result;
}

}  // namespace cfhom
