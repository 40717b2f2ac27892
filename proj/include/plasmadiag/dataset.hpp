#pragma once

// Experiment runs on disk and the power-versus-illuminance characterization fitted
// from them.

#include "plasmadiag/acquisition.hpp"
#include "plasmadiag/calibration.hpp"
#include "plasmadiag/json_io.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace plasmadiag::dataset {

using acquisition::PowerSample;
using acquisition::RowDiagnostic;

// Descriptive only; nothing is derived from these values.
struct ExperimentMeta {
  std::optional<double> ballast_ohms;
  std::optional<double> supply_max_volts;
  std::optional<double> ignition_threshold_volts;
  std::optional<double> gap_mm;
  std::string notes;

  void validate() const;
  // 120 kOhm ballast, 10 kV supply, ignition near 4.5 kV, ~5 mm gap.
  static ExperimentMeta needle_to_plate();
};

struct ExperimentRun {
  std::vector<PowerSample> samples;
  ExperimentMeta meta;

  // Timestamps must be non-decreasing.
  void validate() const;
};

// Where a logical column lives in a foreign CSV and the factor that converts it to
// the canonical unit (ms, V, A, lux).
struct ColumnSpec {
  std::string column;
  double scale = 1.0;
};

struct SchemaMap {
  ColumnSpec t_ms{"t_ms"};
  ColumnSpec v_volts{"v_volts"};
  ColumnSpec i_amps{"i_amps"};
  ColumnSpec lux{"lux"}; // optional in the file

  // {"v_volts": {"column": "U_kV", "unit": "kV"}, "i_amps": {"column": "I", "scale": 1e-3}, ...}
  // Unmentioned entries keep their defaults.
  static SchemaMap from_json(const io::Json& doc);
};

// Conversion factor from `unit` to the canonical unit of `logical` column
// ("t_ms", "v_volts", "i_amps", "lux"). SchemaError for unknown pairs.
double unit_scale(std::string_view logical, std::string_view unit);

struct LoadOptions {
  SchemaMap schema;
  bool strict = false;
  ExperimentMeta meta;
};

struct LoadedRun {
  ExperimentRun run;
  std::vector<RowDiagnostic> diagnostics;
};

LoadedRun parse_run(std::istream& in, const LoadOptions& options = {});
LoadedRun load_run(const std::filesystem::path& path, const LoadOptions& options = {});
// Engineering CSV (t_ms,v_volts,i_amps,p_watts,lux), written atomically.
void save_run(const ExperimentRun& run, const std::filesystem::path& path);

struct CharacterizeOptions {
  bool trim = false;
  bool filter_ignition = true;
  double ignition_i_min = acquisition::kDefaultIgnitionCurrent;
  std::size_t ignition_sustain = acquisition::kDefaultIgnitionSustain;
};

struct Characterization {
  calibration::CalibrationCurve curve; // kind PlasmaPower; fitted_range == input_range
  calibration::Residuals fit_stats;
  calibration::InputRange input_range;
  std::size_t trimmed_count = 0;

  bool operator==(const Characterization&) const = default;
};

struct CharacterizationReport {
  Characterization result;
  std::optional<double> ignition_t_ms;
  std::size_t post_ignition_samples = 0; // with p > 0 and lux > 0
  std::size_t fitted_samples = 0;
  bool trim_rejected = false;
};

CharacterizationReport characterize_report(const ExperimentRun& run, const CharacterizeOptions& options = {});
Characterization characterize(const ExperimentRun& run, const CharacterizeOptions& options = {});

struct SignalStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0; // 1/(N-1); 0 for a single value
  std::size_t count = 0;
};

struct RunStats {
  SignalStats v_volts;
  SignalStats i_amps;
  SignalStats p_watts;
  std::optional<SignalStats> lux; // absent when no sample carries lux
};

RunStats summary_stats(const ExperimentRun& run);

// {curve:{kind,a0..a3}, rmse_log, max_abs_log, input_range:[lo,hi], trimmed_count}
io::Json characterization_to_json(const Characterization& c);
Characterization characterization_from_json(const io::Json& doc);
void save_characterization(const Characterization& c, const std::filesystem::path& path);
Characterization load_characterization(const std::filesystem::path& path);

} // namespace plasmadiag::dataset
