#pragma once

#include <span>
#include <vector>

#include "cfhom/kernels.hpp"

namespace cfhom {

/// Truncated coagulation operator at one point.
struct CoagulationRates {
  std::vector<double> Q;
  /// Mass carried by mergers whose product exceeds n_max; Σ i Q_i = -mass_loss.
  double mass_loss = 0.0;
};

/// Q_i = ½ Σ_{j<i} a(i-j,j) u_{i-j} u_j − Σ_{j≤n} a(i,j) u_i u_j.
/// Throws std::invalid_argument on negative entries or length mismatch.
CoagulationRates eval_coagulation(const KernelSet& kernels, std::span<const double> u);

/// F_i = Σ_{k=i+1}^{n} B(k) β(k,i) u_k − B(i) u_i.
std::vector<double> eval_fragmentation(const KernelSet& kernels, std::span<const double> u);

/// Hot path used by the steppers: writes Q_i + F_i into `rates` and returns the
/// truncation mass loss. `loss_rate` receives Σ_j a(i,j) u_j + B(i), the
/// per-species depletion rate used by the positivity bound. No input checks.
double reaction_rates(const KernelSet& kernels, std::span<const double> u, std::span<double> rates,
                      std::span<double> loss_rate);

/// Both sides of the weak-form identities for the truncated operators:
///   Σ φ_i Q_i = ½ Σ_{i+j≤n} a u_i u_j (φ_{i+j} − φ_i − φ_j) − ½ Σ_{i+j>n} a u_i u_j (φ_i + φ_j)
///   Σ φ_i F_i = Σ_{k≥2} B_k u_k (Σ_{j<k} β_{k,j} φ_j − φ_k)
struct WeakFormSides {
  double coagulation_lhs = 0.0;
  double coagulation_rhs = 0.0;
  double fragmentation_lhs = 0.0;
  double fragmentation_rhs = 0.0;
};

WeakFormSides weak_form_check(const KernelSet& kernels, std::span<const double> u,
                              std::span<const double> phi);

}  // namespace cfhom
