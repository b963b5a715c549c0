#include "cfhom/source.hpp"

#include <cmath>
#include <numbers>

#include "cfhom/numerics.hpp"

namespace cfhom {

double TimeFactor::operator()(double t) const {
  double value = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) value = value * t + *it;
  return value + sin_amplitude * std::sin(sin_frequency * t);
}

double TimeFactor::sup_abs(double T) const {
  double bound = std::abs(sin_amplitude);
  double power = 1.0;
  const double tt = std::abs(T);
  for (double c : poly) {
    bound += std::abs(c) * power;
    power *= tt;
  }
  return bound;
}

double WaveFactor::operator()(const Point& s) const {
  if (amplitude == 0.0) return offset;
  return offset + amplitude * std::sin(wavenumber * s[axis] + phase);
}

double WaveFactor::sup_abs() const { return std::abs(offset) + std::abs(amplitude); }

bool WaveFactor::is_cell_periodic() const {
  if (amplitude == 0.0) return true;
  const double modes = wavenumber / (2.0 * std::numbers::pi);
  return std::abs(modes - std::round(modes)) < 1e-12 * std::max(1.0, std::abs(modes));
}

double BoundarySource::sup_norm(double T) const { return g.sup_abs(T) * p.sup_abs() * q.sup_abs(); }

double boundary_integral(const PerforatedGrid& cell, const WaveFactor& q) {
  CompensatedSum sum;
  for (const auto& f : cell.gamma_faces) sum.add(q(f.center));
  return sum.value() * cell.face_measure();
}

}  // namespace cfhom
