#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpmem/forward.hpp"
#include "gpmem/kernel.hpp"
#include "gpmem/laplace.hpp"

namespace gpmem {

enum class Command { Forward, Response, Invert, Uniqueness, NonSobolev, SpeedCheck, Validate };

std::string command_name(Command c);

/// Every default tolerance in one place; the manifest records the version.
struct ToleranceTable {
  static constexpr const char* version = "gpmem-defaults-1";
  /// Truncation-error gate for R^T samples in finite-data inversion.
  double gate = 1e-6;
  /// Error level of k(t) that bounds T_reliable.
  double k = 1e-3;
  /// Relative response misfit for the re-simulation check.
  double consistency = 1e-3;
  /// Residual floor of the K0 probe check.
  double k0 = 1e-10;
  /// Quiet level, relative to |f|_inf, for the finite-speed probes.
  double speed = 1e-6;
  /// Uniqueness threshold = factor * self error, floored.
  double threshold_factor = 10.0;
  double threshold_floor = 1e-12;
};

struct TimeGrid {
  double T = 5.0;
  double dt = 5e-3;
};

struct SpaceGrid {
  int nx = 600;
  /// 0 lets the solver choose.
  double x_max = 0.0;
  /// Positions written by `forward` (Laplace method) and probed by `speedcheck`.
  std::vector<double> probes{0.5, 1.0, 2.0};
};

struct FrequencySpec {
  double z_min = 1.0;
  double z_max = 50.0;
  int n_radii = 10;
  std::vector<double> slopes{0.0, 0.5};
};

struct InvertSpec {
  /// Response CSV; empty means a synthetic record built from the kernel.
  std::filesystem::path record;
  double T_obs = 20.0;
  double k_dt = 0.05;
  double k_horizon = 0.0;
  bool consistency_check = true;
};

struct UniquenessSpec {
  double T = 2.0;
  double delta = 2.0;
  double coeff = 1.0;
};

struct NonSobolevSpec {
  int n_max = 16;
  /// xi_n = n^-p.
  double p = 4.0;
  /// Modes checked against the residue sum.
  std::vector<int> modes{1, 4, 9, 16};
  /// Modes whose fitted growth rate is checked.
  std::vector<int> growth_modes{4, 9, 16};
  std::vector<int> n_max_values{8, 16, 32};
  /// Each mode stops earlier, where sqrt(n/2) t reaches growth_guard.
  double t_max = 30.0;
  double growth_guard = 10.0;
  double t_step = 0.01;
  double t_probe = 1.0;
};

struct RunConfig {
  Command command = Command::Forward;
  MemoryKernel kernel = MemoryKernel::constant(1.0);
  Geometry geometry;
  BoundaryControl control = BoundaryControl::ramp();
  /// "laplace" or "timedomain" for forward and response.
  std::string method = "timedomain";
  TimeGrid time;
  SpaceGrid space;
  FrequencySpec frequency;
  ContourSpec contour = Talbot{};
  bool contour_given = false;
  ToleranceTable tolerances;
  InvertSpec invert;
  UniquenessSpec uniqueness;
  NonSobolevSpec nonsobolev;
  std::filesystem::path output_dir = "out";
  /// Source text, kept for the manifest.
  std::string text;
};

/// Parses the sectioned key = value format. Relative file names resolve
/// against `base_dir`. Syntax errors and unknown keys raise ParseError with
/// the line; semantic problems are collected and raised together as one
/// ValidationError. A command given on the command line replaces [run] command.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".",
                            std::optional<Command> command = std::nullopt);

/// Reads and parses a file (IoError if unreadable).
RunConfig parse_config(const std::filesystem::path& path, std::optional<Command> command = std::nullopt);

/// "forward" -> Command::Forward etc.; nothing for unknown names.
std::optional<Command> command_from_name(const std::string& name);

/// 64-bit FNV-1a of the config text, as 16 hex digits.
std::string config_hash(const std::string& text);

}  // namespace gpmem
