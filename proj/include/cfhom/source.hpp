#pragma once

#include <vector>

#include "cfhom/geometry.hpp"
#include "cfhom/numerics.hpp"

namespace cfhom {

/// g(t) = Σ_k poly[k] t^k + sin_amplitude · sin(sin_frequency · t)
struct TimeFactor {
  std::vector<double> poly{0.0, 1.0};
  double sin_amplitude = 0.0;
  double sin_frequency = 0.0;

  double operator()(double t) const;
  /// Upper bound of |g| on [0, T].
  double sup_abs(double T) const;
};

/// f(s) = offset + amplitude · sin(wavenumber · s[axis] + phase)
struct WaveFactor {
  double offset = 1.0;
  double amplitude = 0.0;
  int axis = 0;
  double wavenumber = 0.0;
  double phase = 0.0;

  double operator()(const Point& s) const;
  double sup_abs() const;
  /// Y-periodic when the wavenumber is an integer multiple of 2π (or the
  /// amplitude vanishes).
  bool is_cell_periodic() const;
};

/// Separable monomer flux density ψ(t, x, y) = g(t) p(x) q(y) on the hole
/// boundaries; y is the position inside the unit cell.
struct BoundarySource {
  TimeFactor g;
  WaveFactor p{0.0, 1.0, 0, 3.14159265358979323846, 0.0};
  WaveFactor q{};

  double operator()(double t, const Point& x, const Point& y) const {
    return g(t) * p(x) * q(y);
  }
  /// Bound on ‖ψ‖∞ over [0,T] × Ω × Y.
  double sup_norm(double T) const;
  bool vanishes_at_start() const { return g(0.0) == 0.0; }
};

/// ∫_Γ q(y) dσ(y) over the hole boundary of a reference cell, using the voxel
/// face measure and face-centre quadrature.
double boundary_integral(const PerforatedGrid& reference_cell, const WaveFactor& q);

}  // namespace cfhom
