#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfhom/geometry.hpp"
#include "cfhom/kernels.hpp"
#include "cfhom/source.hpp"
#include "cfhom/stepper.hpp"

namespace cfhom {

inline constexpr int kSchemaVersion = 1;

struct KernelConfig {
  int n_max = 32;
  std::string coagulation = "constant";  // constant | sum_power
  double a0 = 1.0;
  double zeta = 0.5;
  std::string fragmentation = "binary_uniform";  // none | binary_uniform
  double b = 0.5;
  std::string diffusion = "uniform";  // uniform | list
  double d0 = 1.0;
  std::vector<double> d_values;
};

struct ZeroDConfig {
  int n_max = 200;
  double N0 = 1.0;
  double T = 10.0;
  double dt = 0.002;
  int record_stride = 10;
};

struct OutputConfig {
  std::string dir = "out";
  bool snapshots = true;
  bool mask_csv = false;
  bool corrector_csv = false;
};

/// Fully materialized run configuration.
struct RunConfig {
  int schema_version = kSchemaVersion;

  int dim = 2;
  double L = 1.0;
  double epsilon = 0.125;
  std::vector<double> epsilons{0.25, 0.125, 0.0625};
  double hole_radius = 0.25;
  int m_cell = 16;
  double h_macro = 1.0 / 128.0;

  KernelConfig kernels;
  double U1 = 0.1;
  BoundarySource psi;
  int q_mode = 0;  // q wavenumber is 2π·q_mode

  double T = 0.5;
  double dt = 0.01;
  int snapshot_stride = 10;

  double tol = 1e-10;
  int max_iter = 20000;
  double audit_tol = 1e-8;

  std::vector<int> species{1, 2, 3, 4};
  ZeroDConfig zerod;
  OutputConfig output;
  std::uint64_t seed = 0;
};

/// Parses and validates; throws ConfigError listing every offending key.
RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

KernelSet make_kernels(const KernelConfig& config);
DomainSpec make_domain(const RunConfig& config, double epsilon);
RunControls make_controls(const RunConfig& config, int threads = 1);

}  // namespace cfhom
