#include "cfhom/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cfhom/errors.hpp"

namespace cfhom {

namespace {

// Relative slack for inequality checks on computed tables.
constexpr double kSlack = 1e-12;

std::string join_problems(const std::vector<std::string>& problems) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& p : problems) os << "\n  " << p;
  return os.str();
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

KernelSet::KernelSet(int n_max) : n_(n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const auto n = static_cast<std::size_t>(n_max);
  a_.assign(n * n, 0.0);
  B_.assign(n, 0.0);
  beta_.assign(n * n, 0.0);
  gamma_.assign(n, 0.0);
  d_.assign(n, 1.0);
}

void KernelSet::compute_compatibility_constants() {
  for (int m = 1; m <= n_; ++m) {
    double g = 0.0;
    for (int j = m + 1; j <= n_; ++j) {
      const double num = B(j) * beta(j, m);
      if (num == 0.0) continue;
      const double den = a(m, j);
      g = den > 0.0 ? std::max(g, num / den) : std::numeric_limits<double>::infinity();
    }
    set_gamma(m, g);
  }
}

KernelSet build_builtin_kernels(const CoagulationFamily& coagulation,
                                const FragmentationFamily& fragmentation, int n_max,
                                const DiffusionProfile& diffusion) {
  std::vector<std::string> problems;
  if (n_max < 1) problems.push_back("n_max: must be >= 1");
  std::visit(Overloaded{[&](const ConstantCoagulation& c) {
                          if (!(c.a0 > 0.0)) problems.push_back("coagulation.a0: must be > 0");
                        },
                        [&](const SumPowerCoagulation& c) {
                          if (!(c.zeta > 0.0 && c.zeta <= 1.0))
                            problems.push_back("coagulation.zeta: must lie in (0,1]");
                        }},
             coagulation);
  if (const auto* f = std::get_if<BinaryUniformFragmentation>(&fragmentation)) {
    if (!(f->b > 0.0)) problems.push_back("fragmentation.b: must be > 0");
  }
  std::visit(Overloaded{[&](const UniformDiffusion& d) {
                          if (!(d.d0 > 0.0)) problems.push_back("diffusion.d0: must be > 0");
                        },
                        [&](const ListDiffusion& d) {
                          if (n_max >= 1 && d.values.size() != static_cast<std::size_t>(n_max))
                            problems.push_back("diffusion.values: length must equal n_max");
                          for (double v : d.values) {
                            if (!(v > 0.0)) {
                              problems.push_back("diffusion.values: entries must be > 0");
                              break;
                            }
                          }
                        }},
             diffusion);
  if (!problems.empty()) throw ConfigError(std::move(problems));

  KernelSet k(n_max);
  std::visit(Overloaded{[&](const ConstantCoagulation& c) {
                          for (int i = 1; i <= n_max; ++i)
                            for (int j = 1; j <= n_max; ++j) k.set_a(i, j, c.a0);
                          k.zeta = 1.0;
                          k.c_growth = c.a0;
                        },
                        [&](const SumPowerCoagulation& c) {
                          // Evaluated once per unordered pair so the table is bit-symmetric.
                          for (int i = 1; i <= n_max; ++i)
                            for (int j = i; j <= n_max; ++j)
                              k.set_a_symmetric(i, j, std::pow(double(i + j), 1.0 - c.zeta));
                          k.zeta = c.zeta;
                          k.c_growth = 1.0;
                        }},
             coagulation);

  const double b = std::visit(Overloaded{[](const NoFragmentation&) { return 0.0; },
                                         [](const BinaryUniformFragmentation& f) { return f.b; }},
                              fragmentation);
  // The daughter law is stored even without fragmentation so that the
  // daughter-mass identity holds for every i >= 2.
  for (int i = 2; i <= n_max; ++i) {
    k.set_B(i, b * (i - 1));
    for (int j = 1; j < i; ++j) k.set_beta(i, j, 2.0 / (i - 1));
  }

  std::visit(Overloaded{[&](const UniformDiffusion& d) {
                          for (int i = 1; i <= n_max; ++i) k.set_d(i, d.d0);
                          k.d_min = k.d_max = d.d0;
                        },
                        [&](const ListDiffusion& d) {
                          for (int i = 1; i <= n_max; ++i) k.set_d(i, d.values[i - 1]);
                          k.d_min = *std::min_element(d.values.begin(), d.values.end());
                          k.d_max = *std::max_element(d.values.begin(), d.values.end());
                        }},
             diffusion);

  k.compute_compatibility_constants();
  return k;
}

bool ValidationReport::cites(const std::string& constraint_id) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.constraint == constraint_id; });
}

ValidationReport validate_kernels(const KernelSet& k) {
  ValidationReport report;
  const int n = k.n_max();
  auto add = [&](const char* id, std::vector<int> indices, std::string detail) {
    report.violations.push_back({id, std::move(indices), std::move(detail)});
  };

  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (j > i && k.a(i, j) != k.a(j, i)) add(constraint::kSymmetry, {i, j}, "a(i,j) != a(j,i)");
      if (!(k.a(i, j) >= 0.0)) add(constraint::kNonnegativity, {i, j}, "a(i,j) < 0");
      if (j < i && !(k.beta(i, j) >= 0.0)) add(constraint::kNonnegativity, {i, j}, "beta(i,j) < 0");
    }
  }

  if (k.B(1) != 0.0) add(constraint::kMonomerNoBreakup, {1}, "B(1) must be 0");
  for (int i = 2; i <= n; ++i) {
    if (!(k.B(i) >= 0.0)) add(constraint::kNonnegativity, {i}, "B(i) < 0");
  }

  for (int i = 2; i <= n; ++i) {
    double sum = 0.0;
    for (int j = 1; j < i; ++j) sum += j * k.beta(i, j);
    if (!(std::abs(sum - i) <= kSlack * i)) {
      std::ostringstream os;
      os.precision(17);
      os << "sum_j j*beta(i,j) = " << sum << ", expected " << i;
      add(constraint::kDaughterMass, {i}, os.str());
    }
  }

  if (!(k.zeta > 0.0 && k.zeta <= 1.0)) add(constraint::kGrowthBound, {}, "zeta outside (0,1]");
  if (!(k.c_growth > 0.0)) add(constraint::kGrowthBound, {}, "growth constant must be > 0");
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const double bound = k.c_growth * std::pow(double(i + j), 1.0 - k.zeta);
      if (k.a(i, j) > bound * (1.0 + kSlack)) {
        add(constraint::kGrowthBound, {i, j}, "a(i,j) exceeds C (i+j)^(1-zeta)");
      }
    }
  }

  for (int m = 1; m <= n; ++m) {
    if (!(k.gamma(m) >= 0.0) || std::isinf(k.gamma(m))) {
      add(constraint::kFragmentationCompatibility, {m}, "gamma(m) must be finite and >= 0");
      continue;
    }
    for (int j = m + 1; j <= n; ++j) {
      const double lhs = k.B(j) * k.beta(j, m);
      const double rhs = k.gamma(m) * k.a(m, j);
      if (lhs > rhs * (1.0 + kSlack)) {
        add(constraint::kFragmentationCompatibility, {m, j}, "B(j) beta(j,m) > gamma(m) a(m,j)");
      }
    }
  }

  if (!(k.d_min > 0.0) || !(k.d_min <= k.d_max)) {
    add(constraint::kDiffusionBounds, {}, "need 0 < D0 <= D1");
  }
  for (int i = 1; i <= n; ++i) {
    if (!(k.d(i) >= k.d_min && k.d(i) <= k.d_max && k.d(i) > 0.0)) {
      add(constraint::kDiffusionBounds, {i}, "d(i) outside [D0, D1]");
    }
  }
  return report;
}

}  // namespace cfhom
