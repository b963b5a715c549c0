#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cfhom {

// Built-in coefficient families. All of them satisfy the structural
// assumptions checked by validate_kernels.

/// a(i,j) = a0 for all sizes.
struct ConstantCoagulation {
  double a0 = 1.0;
};

/// a(i,j) = (i+j)^(1-zeta).
struct SumPowerCoagulation {
  double zeta = 0.5;
};

using CoagulationFamily = std::variant<ConstantCoagulation, SumPowerCoagulation>;

struct NoFragmentation {};

/// B(i) = b (i-1); a size-i cluster splits into two pieces with uniform size law,
/// beta(i,j) = 2/(i-1) for 1 <= j <= i-1.
struct BinaryUniformFragmentation {
  double b = 1.0;
};

using FragmentationFamily = std::variant<NoFragmentation, BinaryUniformFragmentation>;

struct UniformDiffusion {
  double d0 = 1.0;
};

struct ListDiffusion {
  std::vector<double> values;
};

using DiffusionProfile = std::variant<UniformDiffusion, ListDiffusion>;

/// Dense tables of coagulation, fragmentation and diffusion coefficients for
/// cluster sizes 1..n_max. All public accessors use 1-based cluster sizes.
class KernelSet {
 public:
  explicit KernelSet(int n_max);

  int n_max() const noexcept { return n_; }

  double a(int i, int j) const { return a_[idx(i, j)]; }
  double B(int i) const { return B_[static_cast<std::size_t>(i - 1)]; }
  double beta(int i, int j) const { return beta_[idx(i, j)]; }
  double gamma(int m) const { return gamma_[static_cast<std::size_t>(m - 1)]; }
  double d(int i) const { return d_[static_cast<std::size_t>(i - 1)]; }

  /// Row i of the coagulation table, 0-based over partner sizes.
  std::span<const double> a_row(int i) const {
    return {a_.data() + static_cast<std::size_t>(i - 1) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<const double> B_table() const { return B_; }
  std::span<const double> beta_row(int i) const {
    return {beta_.data() + static_cast<std::size_t>(i - 1) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<const double> diffusion() const { return d_; }

  // Raw setters; they do not maintain any invariant. Use validate_kernels.
  void set_a(int i, int j, double value) { a_[idx(i, j)] = value; }
  void set_a_symmetric(int i, int j, double value) {
    a_[idx(i, j)] = value;
    a_[idx(j, i)] = value;
  }
  void set_B(int i, double value) { B_[static_cast<std::size_t>(i - 1)] = value; }
  void set_beta(int i, int j, double value) { beta_[idx(i, j)] = value; }
  void set_gamma(int m, double value) { gamma_[static_cast<std::size_t>(m - 1)] = value; }
  void set_d(int i, double value) { d_[static_cast<std::size_t>(i - 1)] = value; }

  /// Sets gamma(m) to the smallest constant with B(j) beta(j,m) <= gamma(m) a(m,j)
  /// over all stored j > m (0/0 counts as 0, x/0 as +inf).
  void compute_compatibility_constants();

  double zeta = 1.0;
  double c_growth = 1.0;
  double d_min = 1.0;  // lower diffusion bound D0
  double d_max = 1.0;  // upper diffusion bound D1

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j - 1);
  }

  int n_;
  std::vector<double> a_;
  std::vector<double> B_;
  std::vector<double> beta_;
  std::vector<double> gamma_;
  std::vector<double> d_;
};

KernelSet build_builtin_kernels(const CoagulationFamily& coagulation,
                                const FragmentationFamily& fragmentation, int n_max,
                                const DiffusionProfile& diffusion);

/// Constraint identifiers used in validation reports.
namespace constraint {
inline constexpr const char* kSymmetry = "symmetry";
inline constexpr const char* kNonnegativity = "nonnegativity";
inline constexpr const char* kMonomerNoBreakup = "monomer_no_breakup";
inline constexpr const char* kDaughterMass = "daughter_mass";
inline constexpr const char* kGrowthBound = "growth_bound";
inline constexpr const char* kFragmentationCompatibility = "fragmentation_compatibility";
inline constexpr const char* kDiffusionBounds = "diffusion_bounds";
}  // namespace constraint

struct Violation {
  std::string constraint;
  std::vector<int> indices;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool cites(const std::string& constraint_id) const;
};

/// Checks every structural constraint over the stored index range. Never throws.
ValidationReport validate_kernels(const KernelSet& kernels);

}  // namespace cfhom
