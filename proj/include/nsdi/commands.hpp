#pragma once

// Command implementations behind the `nsdi` executable. Each command returns
// its file contents instead of writing them, so the executable only handles
// argument parsing and I/O.

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsdi/xsec_data.hpp"

namespace nsdi::cli {

/// Built-in names: "he" and "ne" (binding energies built in, curves read from
/// he.csv/heplus.csv or ne.csv/neplus.csv in the data directory), "toy"
/// (I_A = 1 Eh, I_B = 2 Eh, sigma = 1 a.u. everywhere above threshold) and
/// "custom" (paths and binding energies all required). Explicit paths or
/// energies override the built-in ones.
struct AtomSelector {
  std::string name = "toy";
  std::string data_dir;  // empty: NSDI_DATA_DIR
  std::string sigma_outer_path;
  std::string sigma_inner_path;
  std::optional<double> binding_outer_ev;
  std::optional<double> binding_inner_ev;
  double threshold_tolerance = kDefaultThresholdTolerance;
};

AtomModel resolve_atom(const AtomSelector& selector);

struct CommandOutput {
  std::string csv;
  std::optional<std::string> svg;
  std::vector<std::string> warnings;
  int exit_code = 0;
};

struct ValidateReport {
  bool ok = false;
  std::string text;
};

/// Parses and checks a cross-section table; never throws for bad data.
ValidateReport cmd_validate(const std::filesystem::path& path);

struct TotalConfig {
  AtomSelector atom;
  double omega_min_ev = 0.0;
  double omega_max_ev = 0.0;
  double omega_step_ev = 0.5;
  bool svg = false;
};

/// Photon energies min, min + step, ... up to max (inclusive within 1e-9 step).
std::vector<double> photon_grid_ev(double min_ev, double max_ev, double step_ev);

CommandOutput cmd_total(const TotalConfig& config);

struct SdcsConfig {
  AtomSelector atom;
  double omega_ev = 0.0;
  int points = 201;
  bool svg = false;
};

CommandOutput cmd_sdcs(const SdcsConfig& config);

struct TdseConfig {
  AtomSelector atom;
  double omega_ev = 0.0;
  double e0_au = 1e-3;
  int cycles = 20;
  int grid_outer = 120;
  int grid_inner = 120;
  std::optional<double> dt_au;
  bool svg = false;
};

CommandOutput cmd_tdse(const TdseConfig& config);

struct ComparisonRow {
  double omega;
  bool in_window;
  std::optional<double> first;
  std::optional<double> second;
  std::optional<double> rel_deviation;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  double max_deviation = 0.0;
};

using TotalPath = std::function<double(double omega)>;

/// Evaluates two total-cross-section routes at each photon energy. Points
/// outside the window are flagged and left out of the statistics. The
/// relative deviation is |second - first| / |first|.
Comparison compare_paths(std::span<const double> omegas, const AtomModel& atom, const TotalPath& first,
                         const TotalPath& second);

struct CompareConfig {
  TdseConfig tdse;  // omega_ev unused
  std::vector<double> omegas_ev;
  double tolerance = 0.05;
};

/// Closed-form totals against propagation. exit_code is 3 when the largest
/// deviation exceeds the tolerance.
CommandOutput cmd_compare(const CompareConfig& config);

}  // namespace nsdi::cli
