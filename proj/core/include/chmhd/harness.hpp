#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chmhd/diagnostics.hpp"
#include "chmhd/schemes.hpp"

namespace chmhd {

enum class Experiment { mms, spinodal, boussinesq };

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

/// Flat key-value configuration. Lines are `key = value`; `[section]`
/// headers prefix later keys with `section.`; `#` starts a comment.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(std::istream& is);
/// Throws ConfigError naming the path when the file cannot be read.
ConfigMap load_config(const std::string& path);

struct RunConfig {
  Experiment experiment = Experiment::mms;
  GridSpec grid{64, 64};
  ModelParams params;
  SchemeConfig scheme;
  /// Spinodal only.
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  /// Steps between snapshots; 0 writes none.
  int snapshot_every = 0;
  /// Overrides T / dt when positive.
  int steps = 0;

  // mms
  std::vector<int> mms_levels{8, 16, 32, 64};
  /// Fixed dt for every level; when unset dt = h^2.
  std::optional<double> mms_dt;

  // spinodal
  double phi_mean = -0.05;
  double noise = 0.001;

  // boussinesq
  double rho1 = 1.0;
  double rho2 = 9.0;
  double gravity = 10.0;
  bool lorentz = true;
  std::vector<double> snapshot_times{0.01, 0.5, 1.0, 2.0, 3.0};
  double bubble_radius = 0.25;
  double bubble_x = 0.5;
  double bubble_y = 0.3;

  /// Defaults of each experiment.
  static RunConfig defaults(Experiment e);
  /// Overwrites fields from `map`; unknown keys throw ConfigError.
  void apply(const ConfigMap& map);
  void validate() const;
  int step_count() const;
};

/// Fills the noisy spinodal initial phase: phi_mean plus noise times
/// uniform [-1, 1) samples with their sample mean removed. Samples come
/// from mt19937_64 in row-major cell order, mapped as (x >> 11) * 2^-53.
Field spinodal_initial_phase(const GridSpec& grid, double phi_mean, double noise, std::uint64_t seed);

/// Circular bubble tanh((r0 - r) / (sqrt(2) eps)), +1 inside.
Field bubble_phase(const GridSpec& grid, double x0, double y0, double r0, double eps);

/// Centre of mass of (1 + phi) / 2.
std::pair<double, double> centroid(const Field& phi);

/// Energy law over a series, checked from `e0` onwards.
struct EnergyCheck {
  bool nonincreasing = true;
  long worst_step = -1;
  double worst_rel_increase = 0.0;
};
EnergyCheck check_energy(double e0, const DiagnosticsRecord& rec, double rel_tol);

struct RunOutcome {
  bool ok = true;
  std::string error;
};

struct MmsLevel {
  int n = 0;
  double dt = 0.0;
  ErrorNorms errors;
  DiagnosticsRecord record;
  /// Largest div_inf over the pressure-solver threshold of the same step.
  double worst_div_ratio = 0.0;
};

struct MmsResult : RunOutcome {
  std::vector<MmsLevel> levels;
  std::vector<RateRow> table;
};

/// One manufactured-solution run on an n x n grid to time T.
MmsLevel run_mms_level(const RunConfig& cfg, int n, double dt, double T);
MmsResult run_mms(const RunConfig& cfg, std::ostream* log = nullptr);

struct SpinodalResult : RunOutcome {
  EnergyReport initial_energy;
  double initial_mass = 0.0;
  DiagnosticsRecord record;
  double worst_div_ratio = 0.0;
  std::vector<std::string> warnings;
};

SpinodalResult run_spinodal(const RunConfig& cfg, std::ostream* log = nullptr);

struct CentroidSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct BoussinesqResult : RunOutcome {
  DiagnosticsRecord record;
  double initial_mass = 0.0;
  std::vector<CentroidSample> centroids;
  double worst_div_ratio = 0.0;
  std::vector<std::string> warnings;
};

BoussinesqResult run_boussinesq(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace chmhd
