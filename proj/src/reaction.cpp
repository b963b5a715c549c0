#include "cfhom/reaction.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "cfhom/numerics.hpp"

namespace cfhom {

namespace {

void check_state(const KernelSet& k, std::span<const double> u) {
  if (u.size() != static_cast<std::size_t>(k.n_max())) {
    throw std::invalid_argument("concentration vector length " + std::to_string(u.size()) +
                                " != n_max " + std::to_string(k.n_max()));
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0)) {
      throw std::invalid_argument("negative concentration at size " + std::to_string(i + 1));
    }
  }
}

}  // namespace

CoagulationRates eval_coagulation(const KernelSet& k, std::span<const double> u) {
  check_state(k, u);
  const int n = k.n_max();
  CoagulationRates out;
  out.Q.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i <= n; ++i) {
    double gain = 0.0;
    for (int j = 1; j < i; ++j) gain += k.a(i - j, j) * u[i - j - 1] * u[j - 1];
    double loss = 0.0;
    for (int j = 1; j <= n; ++j) loss += k.a(i, j) * u[j - 1];
    out.Q[i - 1] = 0.5 * gain - loss * u[i - 1];
  }
  CompensatedSum lost;
  for (int i = 1; i <= n; ++i) {
    if (u[i - 1] == 0.0) continue;
    for (int j = std::max(1, n + 1 - i); j <= n; ++j) {
      lost.add(0.5 * (i + j) * k.a(i, j) * u[i - 1] * u[j - 1]);
    }
  }
  out.mass_loss = lost.value();
  return out;
}

std::vector<double> eval_fragmentation(const KernelSet& k, std::span<const double> u) {
  check_state(k, u);
  const int n = k.n_max();
  std::vector<double> F(static_cast<std::size_t>(n), 0.0);
  for (int i = 1; i <= n; ++i) {
    double gain = 0.0;
    for (int m = i + 1; m <= n; ++m) gain += k.B(m) * k.beta(m, i) * u[m - 1];
    F[i - 1] = gain - k.B(i) * u[i - 1];
  }
  return F;
}

double reaction_rates(const KernelSet& k, std::span<const double> u, std::span<double> rates,
                      std::span<double> loss_rate) {
  const int n = k.n_max();
  const auto B = k.B_table();
  CompensatedSum lost;
  for (int i = 1; i <= n; ++i) {
    const double ui = u[i - 1];
    const auto a_i = k.a_row(i);
    double depletion = 0.0;
    for (int j = 0; j < n; ++j) depletion += a_i[j] * u[j];
    double coag_gain = 0.0;
    for (int j = 1; j < i; ++j) coag_gain += k.a(i - j, j) * u[i - j - 1] * u[j - 1];
    double frag_gain = 0.0;
    for (int m = i + 1; m <= n; ++m) frag_gain += B[m - 1] * k.beta(m, i) * u[m - 1];
    rates[i - 1] = 0.5 * coag_gain - depletion * ui + frag_gain - B[i - 1] * ui;
    loss_rate[i - 1] = depletion + B[i - 1];
    if (ui != 0.0) {
      for (int j = std::max(1, n + 1 - i); j <= n; ++j) {
        lost.add(0.5 * (i + j) * a_i[j - 1] * ui * u[j - 1]);
      }
    }
  }
  return lost.value();
}

WeakFormSides weak_form_check(const KernelSet& k, std::span<const double> u,
                              std::span<const double> phi) {
  check_state(k, u);
  const int n = k.n_max();
  if (phi.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("test function length != n_max");
  }
  WeakFormSides s;

  const auto coag = eval_coagulation(k, u);
  const auto frag = eval_fragmentation(k, u);
  for (int i = 0; i < n; ++i) {
    s.coagulation_lhs += phi[i] * coag.Q[i];
    s.fragmentation_lhs += phi[i] * frag[i];
  }

  double inside = 0.0;
  double outside = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const double w = k.a(i, j) * u[i - 1] * u[j - 1];
      if (i + j <= n) {
        inside += w * (phi[i + j - 1] - phi[i - 1] - phi[j - 1]);
      } else {
        outside += w * (phi[i - 1] + phi[j - 1]);
      }
    }
  }
  s.coagulation_rhs = 0.5 * inside - 0.5 * outside;

  for (int m = 2; m <= n; ++m) {
    double daughters = 0.0;
    for (int j = 1; j < m; ++j) daughters += k.beta(m, j) * phi[j - 1];
    s.fragmentation_rhs += k.B(m) * u[m - 1] * (daughters - phi[m - 1]);
  }
  return s;
}

}  // namespace cfhom
