#include "plasmadiag/dataset.hpp"

#include "plasmadiag/csv.hpp"
#include "plasmadiag/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace plasmadiag::dataset {

using calibration::CalibrationSample;

namespace {

void require_positive(const std::optional<double>& value, const char* name) {
  if (value && (!(*value > 0.0) || !std::isfinite(*value)))
    throw DomainError(fmt::format("{} must be positive, got {}", name, *value));
}

struct UnitEntry {
  std::string_view logical;
  std::string_view unit;
  double scale;
};

constexpr UnitEntry kUnits[] = {
    {"t_ms", "ms", 1.0},     {"t_ms", "s", 1e3},       {"t_ms", "us", 1e-3},   {"t_ms", "min", 6e4},
    {"v_volts", "V", 1.0},   {"v_volts", "kV", 1e3},   {"v_volts", "mV", 1e-3},
    {"i_amps", "A", 1.0},    {"i_amps", "mA", 1e-3},   {"i_amps", "uA", 1e-6},
    {"lux", "lux", 1.0},     {"lux", "lx", 1.0},       {"lux", "klux", 1e3},
};

ColumnSpec column_from_json(std::string_view logical, const io::Json& entry, ColumnSpec spec) {
  if (entry.is_string()) {
    spec.column = entry.get<std::string>();
    return spec;
  }
  if (!entry.is_object())
    throw SchemaError(fmt::format("schema entry '{}' must be a string or object", logical));
  if (const auto col = entry.find("column"); col != entry.end()) {
    if (!col->is_string())
      throw SchemaError(fmt::format("schema entry '{}': column must be a string", logical));
    spec.column = col->get<std::string>();
  }
  const bool has_unit = entry.contains("unit");
  const bool has_scale = entry.contains("scale");
  if (has_unit && has_scale)
    throw SchemaError(fmt::format("schema entry '{}': give either unit or scale, not both", logical));
  if (has_unit) {
    if (!entry["unit"].is_string())
      throw SchemaError(fmt::format("schema entry '{}': unit must be a string", logical));
    spec.scale = unit_scale(logical, entry["unit"].get<std::string>());
  }
  if (has_scale)
    spec.scale = io::require_number(entry, "scale");
  return spec;
}

SignalStats stats_of(const std::vector<double>& values) {
  SignalStats s;
  s.count = values.size();
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double x : values)
    sum += x;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double x : values)
      sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

} // namespace

void ExperimentMeta::validate() const {
  require_positive(ballast_ohms, "ballast_ohms");
  require_positive(supply_max_volts, "supply_max_volts");
  require_positive(ignition_threshold_volts, "ignition_threshold_volts");
  require_positive(gap_mm, "gap_mm");
}

ExperimentMeta ExperimentMeta::needle_to_plate() {
  return {120e3, 10e3, 4.5e3, 5.0, "needle-to-plate DC discharge in open air"};
}

void ExperimentRun::validate() const {
  meta.validate();
  for (std::size_t k = 1; k < samples.size(); ++k)
    if (samples[k].t_ms < samples[k - 1].t_ms)
      throw SchemaError(fmt::format("timestamps decrease at sample {} ({} ms after {} ms)", k, samples[k].t_ms,
                                    samples[k - 1].t_ms));
}

double unit_scale(std::string_view logical, std::string_view unit) {
  bool known_column = false;
  for (const auto& entry : kUnits) {
    if (entry.logical != logical)
      continue;
    known_column = true;
    if (entry.unit == unit)
      return entry.scale;
  }
  if (!known_column)
    throw SchemaError(fmt::format("unknown logical column '{}'", logical));
  throw SchemaError(fmt::format("unit '{}' is not valid for column '{}'", unit, logical));
}

SchemaMap SchemaMap::from_json(const io::Json& doc) {
  if (!doc.is_object())
    throw SchemaError("schema map must be a JSON object");
  SchemaMap map;
  for (const auto& [key, entry] : doc.items()) {
    if (key == "t_ms")
      map.t_ms = column_from_json(key, entry, map.t_ms);
    else if (key == "v_volts")
      map.v_volts = column_from_json(key, entry, map.v_volts);
    else if (key == "i_amps")
      map.i_amps = column_from_json(key, entry, map.i_amps);
    else if (key == "lux")
      map.lux = column_from_json(key, entry, map.lux);
    else
      throw SchemaError(fmt::format("unknown schema entry '{}'", key));
  }
  return map;
}

LoadedRun parse_run(std::istream& in, const LoadOptions& options) {
  LoadedRun loaded;
  loaded.run.meta = options.meta;
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) {
    loaded.run.validate();
    return loaded;
  }

  const auto& schema = options.schema;
  auto require = [&](const ColumnSpec& spec, const char* logical) {
    const auto col = csv::find_column(header->fields, spec.column);
    if (!col)
      throw SchemaError(fmt::format("missing column '{}' (for {})", spec.column, logical));
    return *col;
  };
  const std::size_t col_t = require(schema.t_ms, "t_ms");
  const std::size_t col_v = require(schema.v_volts, "v_volts");
  const std::size_t col_i = require(schema.i_amps, "i_amps");
  const auto col_lux = csv::find_column(header->fields, schema.lux.column);

  auto number = [](const csv::Row& row, std::size_t col, const ColumnSpec& spec) {
    if (col >= row.fields.size())
      throw ParseError(row.line, fmt::format("missing {} field", spec.column));
    const auto value = csv::parse_number(row.fields[col]);
    if (!value)
      throw ParseError(row.line, fmt::format("{}: '{}' is not a number", spec.column, row.fields[col]));
    return *value * spec.scale;
  };

  while (auto row = reader.next()) {
    try {
      PowerSample s;
      s.t_ms = number(*row, col_t, schema.t_ms);
      s.v_volts = number(*row, col_v, schema.v_volts);
      s.i_amps = number(*row, col_i, schema.i_amps);
      s.p_watts = acquisition::instantaneous_power(s.v_volts, s.i_amps);
      if (col_lux && *col_lux < row->fields.size() && !row->fields[*col_lux].empty())
        s.lux = number(*row, *col_lux, schema.lux);
      loaded.run.samples.push_back(s);
    } catch (const ParseError& e) {
      if (options.strict)
        throw;
      loaded.diagnostics.push_back({e.line(), e.what()});
    }
  }
  loaded.run.validate();
  return loaded;
}

LoadedRun load_run(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in)
    throw IoError(fmt::format("cannot open '{}'", path.string()));
  return parse_run(in, options);
}

void save_run(const ExperimentRun& run, const std::filesystem::path& path) {
  std::ostringstream out;
  acquisition::write_samples_csv(out, run.samples);
  io::write_file_atomic(path, out.str());
}

CharacterizationReport characterize_report(const ExperimentRun& run, const CharacterizeOptions& options) {
  run.validate();
  CharacterizationReport report;

  std::size_t first = 0;
  if (options.filter_ignition) {
    const auto k = acquisition::ignition_index(run.samples, options.ignition_i_min, options.ignition_sustain);
    if (!k)
      throw FitError("no sustained ignition found in run");
    first = *k;
    report.ignition_t_ms = run.samples[first].t_ms;
  }

  std::vector<CalibrationSample> points;
  for (std::size_t k = first; k < run.samples.size(); ++k) {
    const auto& s = run.samples[k];
    if (s.p_watts > 0.0 && std::isfinite(s.p_watts) && s.lux && *s.lux > 0.0 && std::isfinite(*s.lux))
      points.push_back({s.p_watts, *s.lux});
  }
  report.post_ignition_samples = points.size();
  if (points.size() < 4)
    throw FitError(fmt::format("characterization needs at least 4 post-ignition samples with p > 0 and lux > 0, "
                               "got {}",
                               points.size()));

  calibration::FitOptions fit_options;
  fit_options.kind = calibration::InputKind::PlasmaPower;
  fit_options.trim = options.trim;
  const auto fit = calibration::fit_log_cubic(points, fit_options);

  Characterization& c = report.result;
  c.curve = fit.curve;
  c.fit_stats = calibration::fit_residuals(c.curve, fit.kept);
  const auto [lo, hi] = std::minmax_element(fit.kept.begin(), fit.kept.end(),
                                            [](const auto& a, const auto& b) { return a.input < b.input; });
  c.input_range = {lo->input, hi->input};
  c.curve.fitted_range = c.input_range;
  c.trimmed_count = fit.trimmed_count;
  report.fitted_samples = fit.kept.size();
  report.trim_rejected = fit.trim_rejected;
  return report;
}

Characterization characterize(const ExperimentRun& run, const CharacterizeOptions& options) {
  return characterize_report(run, options).result;
}

RunStats summary_stats(const ExperimentRun& run) {
  if (run.samples.empty())
    throw DomainError("summary statistics need a non-empty run");
  std::vector<double> v, i, p, lux;
  for (const auto& s : run.samples) {
    v.push_back(s.v_volts);
    i.push_back(s.i_amps);
    p.push_back(s.p_watts);
    if (s.lux)
      lux.push_back(*s.lux);
  }
  RunStats stats{stats_of(v), stats_of(i), stats_of(p), std::nullopt};
  if (!lux.empty())
    stats.lux = stats_of(lux);
  return stats;
}

io::Json characterization_to_json(const Characterization& c) {
  auto curve = c.curve;
  curve.fitted_range.reset();
  io::Json doc;
  doc["curve"] = io::curve_to_json(curve);
  doc["rmse_log"] = c.fit_stats.rmse_log;
  doc["max_abs_log"] = c.fit_stats.max_abs_log;
  doc["input_range"] = io::Json::array({c.input_range.lo, c.input_range.hi});
  doc["trimmed_count"] = c.trimmed_count;
  return doc;
}

Characterization characterization_from_json(const io::Json& doc) {
  if (!doc.is_object())
    throw SchemaError("characterization must be a JSON object");
  const auto curve = doc.find("curve");
  if (curve == doc.end())
    throw SchemaError("missing field 'curve'");

  Characterization c;
  c.curve = io::curve_from_json(*curve);
  c.fit_stats.rmse_log = io::require_number(doc, "rmse_log");
  c.fit_stats.max_abs_log = io::require_number(doc, "max_abs_log");

  const auto range = doc.find("input_range");
  if (range == doc.end() || !range->is_array() || range->size() != 2 || !(*range)[0].is_number() ||
      !(*range)[1].is_number())
    throw SchemaError("input_range must be [lo, hi]");
  c.input_range = {(*range)[0].get<double>(), (*range)[1].get<double>()};
  if (!(c.input_range.lo > 0.0) || !(c.input_range.hi >= c.input_range.lo))
    throw SchemaError("input_range must be positive and ordered");
  c.curve.fitted_range = c.input_range;

  const auto trimmed = doc.find("trimmed_count");
  if (trimmed == doc.end() || !trimmed->is_number_unsigned())
    throw SchemaError("trimmed_count must be a non-negative integer");
  c.trimmed_count = trimmed->get<std::size_t>();
  return c;
}

void save_characterization(const Characterization& c, const std::filesystem::path& path) {
  io::write_file_atomic(path, io::to_text(characterization_to_json(c)));
}

Characterization load_characterization(const std::filesystem::path& path) {
  return characterization_from_json(io::read_json_file(path));
}

} // namespace plasmadiag::dataset
