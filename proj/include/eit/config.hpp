// config.hpp - flat key=value run configuration (TOML-compatible subset)
#ifndef EIT_CONFIG_HPP
#define EIT_CONFIG_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "eit/holeburn.hpp"
#include "eit/integrator.hpp"
#include "eit/params.hpp"
#include "eit/profile.hpp"

namespace eit {

enum class RunMode { Spectrum, SweepWidth, SweepVisibility, Holeburn, Analyze };

std::string to_string(RunMode m);

struct ProfileSpec {
  ProfileKind kind = ProfileKind::Lorentzian;
  double fwhm = 0.0;          // point mass when 0 (analytic kinds)
  std::string table_path;     // tabulated kind only

  BroadeningProfile build() const;
};

struct RunConfig {
  RunMode mode = RunMode::Spectrum;

  RateParams rates;
  ProfileSpec optical;
  ProfileSpec spin;

  DetuningGrid grid;
  bool grid_given = false;
  QuadratureConfig quad;
  bool force_numeric = false;

  double optical_depth = 0.0;     // 0 = no transmission outputs
  double depth_threshold = 0.05;  // dip-resolution threshold

  // sweep modes
  std::vector<double> sweep_values;        // omega/sigma_opt or omega^2/(so*ss)
  std::vector<ProfileKind> optical_shapes;
  std::vector<ProfileKind> spin_shapes;
  int sweep_grid_count = 0;     // 0 -> mode default
  double sweep_span_widths = 0.0;  // half-span in units of expected width; 0 -> default

  // holeburn mode
  LevelStructure levels;
  double target_class = 0.0;
  double trench_halfwidth = 0.0;
  double feature_fwhm = 0.0;
  double kernel_fwhm = 0.0;  // 0 -> gamma31
  BurnOptions burn;
  double profile_step = 0.0;

  // analyze mode
  std::string input_path;
  std::string analysis = "both";  // dip | saturated | both

  std::string output_dir = "runs";

  int planned_runs() const;
  std::string echo() const;  // resolved key=value dump, deterministic order
};

RunConfig load_config(const std::string& path);

// FNV-1a hash of the raw config bytes; names the per-run output directory.
std::string config_hash(const std::string& raw_bytes);

}  // namespace eit

#endif  // EIT_CONFIG_HPP
