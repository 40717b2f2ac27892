#include "cli.hpp"

#include "plasmadiag/acquisition.hpp"
#include "plasmadiag/calibration.hpp"
#include "plasmadiag/csv.hpp"
#include "plasmadiag/dataset.hpp"
#include "plasmadiag/errors.hpp"
#include "plasmadiag/json_io.hpp"
#include "plasmadiag/probe_network.hpp"
#include "plasmadiag/svg_plot.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace plasmadiag::cli {

namespace {

using io::Json;

// Significant digits for JSON printed to stdout; files use the lossless default.
constexpr int kConsoleDigits = 12;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void print(std::ostream& out, const Json& doc) { out << io::to_text(doc, 2, kConsoleDigits); }

bool has_suffix(const std::string& path, std::string_view suffix) {
  return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  std::vector<double> out;
  if (!(lo > 0.0) || !(hi > lo)) {
    out.push_back(lo);
    return out;
  }
  for (std::size_t k = 0; k < points; ++k)
    out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(k) /
                                              static_cast<double>(points - 1)));
  return out;
}

// ---------------------------------------------------------------------------
// probe

struct NetworkFlags {
  std::size_t n = 5;
  double r1 = 10e6;
  double c1 = 15e-12;
  double r0 = 52.8e3;
  double c0 = 3e-9;
};

void add_network_flags(CLI::App* app, NetworkFlags& f) {
  app->add_option("--n", f.n, "Number of ladder stages")->capture_default_str();
  app->add_option("--r1", f.r1, "Ladder stage resistance [ohm]")->capture_default_str();
  app->add_option("--c1", f.c1, "Ladder stage capacitance [F]")->capture_default_str();
  app->add_option("--r0", f.r0, "Base resistance [ohm]")->capture_default_str();
  app->add_option("--c0", f.c0, "Base capacitance [F]")->capture_default_str();
}

probe::ProbeNetwork build_network(const NetworkFlags& f) {
  return probe::ProbeNetwork::uniform({f.r0, f.c0}, f.n, {f.r1, f.c1});
}

Json network_json(const probe::ProbeNetwork& net) {
  Json doc;
  doc["n"] = net.stage_count();
  doc["r0_ohms"] = net.base().resistance;
  doc["c0_farads"] = net.base().capacitance;
  if (net.stage_count() > 0) {
    doc["r1_ohms"] = net.ladder().front().resistance;
    doc["c1_farads"] = net.ladder().front().capacitance;
  }
  return doc;
}

int cmd_probe_analyze(const NetworkFlags& flags, double tol, std::ostream& out) {
  const auto net = build_network(flags);
  Json doc = network_json(net);
  const double ratio = probe::dc_attenuation(net);
  doc["dc_attenuation"] = ratio;
  doc["attenuation_inverse"] = 1.0 / ratio;
  if (net.stage_count() > 0 && net.is_uniform()) {
    const double exact = probe::compensation_capacitor(net);
    doc["compensation_capacitor_farads"] = exact;
    doc["c0_relative_error"] = exact > 0.0 ? (net.base().capacitance - exact) / exact : 0.0;
    doc["tolerance"] = tol;
    doc["compensated"] = probe::is_compensated(net, tol);
  } else {
    doc["compensation_capacitor_farads"] = nullptr;
    doc["compensated"] = nullptr;
  }
  print(out, doc);
  return kSuccess;
}

int cmd_probe_design(double ratio, const NetworkFlags& flags, std::ostream& out) {
  const auto net = probe::design_probe(ratio, flags.n, flags.r1, flags.c1);
  Json doc = network_json(net);
  doc["dc_attenuation"] = probe::dc_attenuation(net);
  doc["attenuation_inverse"] = 1.0 / probe::dc_attenuation(net);
  print(out, doc);
  return kSuccess;
}

std::string bode_svg(const std::vector<probe::ComplexResponse>& sweep) {
  svg::Series mag{"|G|", {}, {}, svg::Series::Style::Line, "#1f4e9c"};
  svg::Series phase{"phase", {}, {}, svg::Series::Style::Line, "#b3301b"};
  for (const auto& r : sweep) {
    mag.x.push_back(r.frequency_hz);
    mag.y.push_back(r.magnitude_db());
    phase.x.push_back(r.frequency_hz);
    phase.y.push_back(r.phase_rad() * 180.0 / 3.14159265358979323846);
  }
  std::vector<svg::Panel> panels{
      {"Probe magnitude response", {"frequency [Hz]", svg::Scale::Log}, {"magnitude [dB]", svg::Scale::Linear}, {mag}},
      {"Probe phase response", {"frequency [Hz]", svg::Scale::Log}, {"phase [deg]", svg::Scale::Linear}, {phase}},
  };
  return svg::render(panels);
}

int cmd_probe_bode(const NetworkFlags& flags, double fmin, double fmax, std::size_t points,
                   const std::string& spacing, const std::string& out_path, std::ostream& out) {
  probe::Spacing grid;
  if (spacing == "log")
    grid = probe::Spacing::Log;
  else if (spacing == "linear")
    grid = probe::Spacing::Linear;
  else
    throw UsageError(fmt::format("--spacing must be log or linear, got '{}'", spacing));

  const auto sweep = probe::bode_sweep(build_network(flags), fmin, fmax, points, grid);

  if (out_path.empty()) {
    probe::write_bode_csv(out, sweep);
    return kSuccess;
  }
  if (has_suffix(out_path, ".svg")) {
    io::write_file_atomic(out_path, bode_svg(sweep));
  } else if (has_suffix(out_path, ".csv")) {
    std::ostringstream csv_text;
    probe::write_bode_csv(csv_text, sweep);
    io::write_file_atomic(out_path, csv_text.str());
  } else {
    throw UsageError("--out must end in .csv or .svg");
  }

  double lo = sweep.front().magnitude(), hi = lo, max_phase = 0.0;
  for (const auto& r : sweep) {
    lo = std::min(lo, r.magnitude());
    hi = std::max(hi, r.magnitude());
    max_phase = std::max(max_phase, std::abs(r.phase_rad()));
  }
  Json doc;
  doc["points"] = sweep.size();
  doc["magnitude_min"] = lo;
  doc["magnitude_max"] = hi;
  doc["magnitude_spread_ratio"] = hi / lo;
  doc["max_abs_phase_rad"] = max_phase;
  doc["written"] = out_path;
  print(out, doc);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// cal

struct CurveFlags {
  CLI::Option* file = nullptr;
  CLI::Option* a[4] = {nullptr, nullptr, nullptr, nullptr};
  std::string path;
  double values[4] = {0.0, 0.0, 0.0, 0.0};
  std::string kind = "voltage";
};

void add_curve_flags(CLI::App* app, CurveFlags& f) {
  f.file = app->add_option("--curve", f.path, "Curve JSON file");
  for (int k = 0; k < 4; ++k)
    f.a[k] = app->add_option(fmt::format("--a{}", k), f.values[k], fmt::format("Coefficient a{}", k));
  app->add_option("--kind", f.kind, "Curve input kind (voltage|power)")->capture_default_str();
}

calibration::CalibrationCurve resolve_curve(const CurveFlags& f) {
  int given = 0;
  for (auto* opt : f.a)
    given += opt->count() > 0 ? 1 : 0;
  if (f.file->count() > 0) {
    if (given > 0)
      throw UsageError("give either --curve or --a0..--a3, not both");
    return io::curve_from_json(io::read_json_file(f.path));
  }
  if (given != 4)
    throw UsageError("a curve needs --curve FILE or all of --a0 --a1 --a2 --a3");
  calibration::InputKind kind;
  try {
    kind = calibration::parse_input_kind(f.kind);
  } catch (const SchemaError& e) {
    throw UsageError(e.what());
  }
  return calibration::CalibrationCurve::from_coefficients(std::span<const double, 4>(f.values), kind);
}

std::string input_field(const calibration::CalibrationCurve& curve) {
  return fmt::format("input_{}", calibration::input_unit(curve.kind));
}

void flag_extrapolation(const calibration::CalibrationCurve& curve, double input, Json& doc, std::ostream& err) {
  if (!curve.fitted_range)
    return;
  const bool outside = !curve.fitted_range->contains(input);
  doc["extrapolated"] = outside;
  if (outside)
    err << fmt::format("warning: input {} lies outside the fitted range [{}, {}]\n", input, curve.fitted_range->lo,
                       curve.fitted_range->hi);
}

int cmd_cal_eval(const CurveFlags& flags, double input, std::ostream& out, std::ostream& err) {
  const auto curve = resolve_curve(flags);
  Json doc;
  doc["kind"] = std::string(calibration::to_string(curve.kind));
  doc[input_field(curve)] = input;
  doc["lux"] = calibration::lux_from_input(curve, input);
  flag_extrapolation(curve, input, doc, err);
  print(out, doc);
  return kSuccess;
}

int cmd_cal_invert(const CurveFlags& flags, double lux, std::ostream& out, std::ostream& err) {
  const auto curve = resolve_curve(flags);
  const double input = calibration::input_from_lux(curve, lux);
  Json doc;
  doc["kind"] = std::string(calibration::to_string(curve.kind));
  doc["lux"] = lux;
  doc[input_field(curve)] = input;
  doc["direction"] =
      calibration::monotonicity(curve).direction == calibration::Direction::Increasing ? "increasing" : "decreasing";
  flag_extrapolation(curve, input, doc, err);
  print(out, doc);
  return kSuccess;
}

std::vector<calibration::CalibrationSample> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError(fmt::format("cannot open '{}'", path));
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header)
    return {};
  const auto col_in = csv::find_column(header->fields, "input");
  const auto col_lux = csv::find_column(header->fields, "lux");
  if (!col_in || !col_lux)
    throw SchemaError("sample file header must contain input,lux");
  std::vector<calibration::CalibrationSample> samples;
  while (auto row = reader.next()) {
    auto get = [&](std::size_t col, const char* name) {
      const auto value = col < row->fields.size() ? csv::parse_number(row->fields[col]) : std::nullopt;
      if (!value)
        throw ParseError(row->line, fmt::format("bad {} value", name));
      return *value;
    };
    samples.push_back({get(*col_in, "input"), get(*col_lux, "lux")});
  }
  return samples;
}

svg::Panel loglog_panel(const std::string& title, const std::string& x_label,
                        const std::vector<calibration::CalibrationSample>& measured,
                        const calibration::CalibrationCurve& curve, double lo, double hi) {
  svg::Series dots{"measured", {}, {}, svg::Series::Style::Points, "#222222"};
  for (const auto& s : measured) {
    dots.x.push_back(s.input);
    dots.y.push_back(s.lux);
  }
  svg::Series fit{"cubic fit (log-log)", {}, {}, svg::Series::Style::Line, "#1f4e9c"};
  for (double x : log_grid(lo, hi, 200)) {
    fit.x.push_back(x);
    fit.y.push_back(calibration::lux_from_input(curve, x));
  }
  return {title, {x_label, svg::Scale::Log}, {"illuminance [lux]", svg::Scale::Log}, {dots, fit}};
}

int cmd_cal_fit(const std::string& in_path, const std::string& out_path, const std::string& kind_text, bool trim,
                const std::string& plot_path, std::ostream& out) {
  if (!plot_path.empty() && !has_suffix(plot_path, ".svg"))
    throw UsageError("--plot must end in .svg");
  calibration::FitOptions options;
  try {
    options.kind = calibration::parse_input_kind(kind_text);
  } catch (const SchemaError& e) {
    throw UsageError(e.what());
  }
  options.trim = trim;
  const auto samples = read_samples(in_path);
  const auto report = calibration::fit_log_cubic(samples, options);
  const auto residuals = calibration::fit_residuals(report.curve, report.kept);

  if (!out_path.empty())
    io::write_file_atomic(out_path, io::to_text(io::curve_to_json(report.curve)));
  if (!plot_path.empty()) {
    const auto& range = *report.curve.fitted_range;
    const std::string x_label = options.kind == calibration::InputKind::SensorVoltage ? "sensor voltage [V]"
                                                                                       : "plasma power [W]";
    io::write_file_atomic(plot_path, svg::render({loglog_panel("Calibration fit", x_label, samples, report.curve,
                                                               range.lo, range.hi)}));
  }

  Json doc;
  doc["curve"] = io::curve_to_json(report.curve);
  doc["rmse_log"] = residuals.rmse_log;
  doc["max_abs_log"] = residuals.max_abs_log;
  doc["sample_count"] = samples.size();
  doc["trimmed_count"] = report.trimmed_count;
  if (report.trim_rejected)
    doc["trim_rejected"] = true;
  print(out, doc);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// acq

struct ConfigFlags {
  std::string path;
  acquisition::ChannelConfig values;
  CLI::Option* probe_ratio = nullptr;
  CLI::Option* shunt_ohms = nullptr;
  CLI::Option* offset_volts = nullptr;
  CLI::Option* adc_bits = nullptr;
  CLI::Option* adc_fullscale = nullptr;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--config", f.path, "Channel config JSON");
  f.probe_ratio = app->add_option("--probe-ratio", f.values.probe_ratio, "HV probe Vo/Vi");
  f.shunt_ohms = app->add_option("--shunt-ohms", f.values.shunt_ohms, "Shunt resistance [ohm]");
  f.offset_volts = app->add_option("--offset-volts", f.values.offset_volts, "DC offset added to the shunt signal [V]");
  f.adc_bits = app->add_option("--adc-bits", f.values.adc_bits, "ADC resolution [bits]");
  f.adc_fullscale = app->add_option("--adc-fullscale-volts", f.values.adc_fullscale_volts, "ADC full scale [V]");
}

// Flags override the config file, which overrides the built-in defaults.
acquisition::ChannelConfig resolve_config(const ConfigFlags& f) {
  acquisition::ChannelConfig cfg;
  if (!f.path.empty())
    cfg = io::config_from_json(io::read_json_file(f.path));
  if (f.probe_ratio->count())
    cfg.probe_ratio = f.values.probe_ratio;
  if (f.shunt_ohms->count())
    cfg.shunt_ohms = f.values.shunt_ohms;
  if (f.offset_volts->count())
    cfg.offset_volts = f.values.offset_volts;
  if (f.adc_bits->count())
    cfg.adc_bits = f.values.adc_bits;
  if (f.adc_fullscale->count())
    cfg.adc_fullscale_volts = f.values.adc_fullscale_volts;
  cfg.validate();
  return cfg;
}

int cmd_acq_power(double v, double i, std::ostream& out) {
  Json doc;
  doc["v_volts"] = v;
  doc["i_amps"] = i;
  doc["p_watts"] = acquisition::instantaneous_power(v, i);
  print(out, doc);
  return kSuccess;
}

int cmd_acq_replay(const std::string& in_path, const ConfigFlags& config_flags, const std::string& curve_path,
                   const std::string& out_path, bool strict, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve_config(config_flags);
  std::optional<calibration::CalibrationCurve> curve;
  if (!curve_path.empty())
    curve = io::curve_from_json(io::read_json_file(curve_path));

  const auto result = acquisition::replay_file(in_path, cfg, curve ? &*curve : nullptr, strict);
  for (const auto& d : result.diagnostics)
    err << "skipped " << d.message << '\n';

  std::ostringstream csv_text;
  acquisition::write_samples_csv(csv_text, result.samples);
  if (out_path.empty()) {
    out << csv_text.str();
    return kSuccess;
  }
  io::write_file_atomic(out_path, csv_text.str());
  Json doc;
  doc["samples"] = result.samples.size();
  doc["skipped_rows"] = result.diagnostics.size();
  doc["written"] = out_path;
  print(out, doc);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// characterize

struct CharacterizeFlags {
  std::string in_path;
  std::string out_path;
  std::string plot_path;
  std::string schema_path;
  bool trim = false;
  bool no_ignition_filter = false;
  bool strict = false;
  double i_min = acquisition::kDefaultIgnitionCurrent;
};

int cmd_characterize(const CharacterizeFlags& f, std::ostream& out, std::ostream& err) {
  if (!f.plot_path.empty() && !has_suffix(f.plot_path, ".svg"))
    throw UsageError("--plot must end in .svg");
  dataset::LoadOptions load;
  load.strict = f.strict;
  if (!f.schema_path.empty())
    load.schema = dataset::SchemaMap::from_json(io::read_json_file(f.schema_path));
  const auto loaded = dataset::load_run(f.in_path, load);
  for (const auto& d : loaded.diagnostics)
    err << "skipped " << d.message << '\n';

  dataset::CharacterizeOptions options;
  options.trim = f.trim;
  options.filter_ignition = !f.no_ignition_filter;
  options.ignition_i_min = f.i_min;
  const auto report = dataset::characterize_report(loaded.run, options);
  const auto& c = report.result;
  if (report.trim_rejected)
    err << "warning: trim pass would discard too many samples; kept the untrimmed fit\n";

  if (!f.out_path.empty())
    dataset::save_characterization(c, f.out_path);
  if (!f.plot_path.empty()) {
    std::vector<calibration::CalibrationSample> measured;
    const auto first = options.filter_ignition
                           ? acquisition::ignition_index(loaded.run.samples, options.ignition_i_min).value_or(0)
                           : std::size_t{0};
    for (std::size_t k = first; k < loaded.run.samples.size(); ++k) {
      const auto& s = loaded.run.samples[k];
      if (s.p_watts > 0.0 && s.lux && *s.lux > 0.0)
        measured.push_back({s.p_watts, *s.lux});
    }
    io::write_file_atomic(f.plot_path, svg::render({loglog_panel("Plasma power versus illuminance",
                                                                 "plasma power [W]", measured, c.curve,
                                                                 c.input_range.lo, c.input_range.hi)}));
  }

  Json doc = dataset::characterization_to_json(c);
  doc["fitted_samples"] = report.fitted_samples;
  if (report.ignition_t_ms)
    doc["ignition_t_ms"] = *report.ignition_t_ms;
  else
    doc["ignition_t_ms"] = nullptr;
  doc["trim_rejected"] = report.trim_rejected;
  print(out, doc);
  return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-cost plasma diagnostics: HV probe design, LDR calibration, power acquisition", "plasmadiag"};
  app.require_subcommand(1);

  // probe
  auto* probe_cmd = app.add_subcommand("probe", "Compensated RC-ladder probe analysis and design");
  probe_cmd->require_subcommand(1);

  NetworkFlags analyze_net;
  double tol = 0.10;
  auto* analyze = probe_cmd->add_subcommand("analyze", "Attenuation and compensation of a uniform ladder");
  add_network_flags(analyze, analyze_net);
  analyze->add_option("--tol", tol, "Relative tolerance for the compensation verdict")->capture_default_str();

  NetworkFlags design_net;
  double ratio = 0.0;
  auto* design = probe_cmd->add_subcommand("design", "Synthesize an exactly compensated ladder");
  design->add_option("--ratio", ratio, "Target Vo/Vi in (0, 1)")->required();
  design->add_option("--n", design_net.n, "Number of ladder stages")->capture_default_str();
  design->add_option("--r1", design_net.r1, "Ladder stage resistance [ohm]")->capture_default_str();
  design->add_option("--c1", design_net.c1, "Ladder stage capacitance [F]")->capture_default_str();

  NetworkFlags bode_net;
  double fmin = 1.0, fmax = 1e7;
  std::size_t points = 200;
  std::string spacing = "log", bode_out;
  auto* bode = probe_cmd->add_subcommand("bode", "Frequency sweep as CSV or SVG");
  add_network_flags(bode, bode_net);
  bode->add_option("--fmin", fmin, "Lowest frequency [Hz]")->capture_default_str();
  bode->add_option("--fmax", fmax, "Highest frequency [Hz]")->capture_default_str();
  bode->add_option("--points", points, "Number of grid points")->capture_default_str();
  bode->add_option("--spacing", spacing, "Grid spacing (log|linear)")->capture_default_str();
  bode->add_option("--out", bode_out, "Output file (.csv or .svg); CSV to stdout when omitted");

  // cal
  auto* cal_cmd = app.add_subcommand("cal", "Log-cubic illuminance calibration");
  cal_cmd->require_subcommand(1);

  std::string fit_in, fit_out, fit_kind = "voltage", fit_plot;
  bool fit_trim = false;
  auto* fit = cal_cmd->add_subcommand("fit", "Fit a curve to input,lux samples");
  fit->add_option("--in", fit_in, "Sample CSV with header input,lux")->required();
  fit->add_option("--out", fit_out, "Curve JSON to write");
  fit->add_option("--kind", fit_kind, "Input kind (voltage|power)")->capture_default_str();
  fit->add_flag("--trim", fit_trim, "Drop residuals above 3x rmse and refit once");
  fit->add_option("--plot", fit_plot, "SVG chart of samples and fit");

  CurveFlags eval_curve;
  double eval_input = 0.0;
  auto* eval = cal_cmd->add_subcommand("eval", "Illuminance for a sensor voltage or plasma power");
  add_curve_flags(eval, eval_curve);
  eval->add_option("--input", eval_input, "Input value [V or W]")->required();

  CurveFlags invert_curve;
  double invert_lux = 0.0;
  auto* invert = cal_cmd->add_subcommand("invert", "Input that produces a given illuminance");
  add_curve_flags(invert, invert_curve);
  invert->add_option("--lux", invert_lux, "Illuminance [lux]")->required();

  // acq
  auto* acq_cmd = app.add_subcommand("acq", "Acquisition pipeline");
  acq_cmd->require_subcommand(1);

  double power_v = 0.0, power_i = 0.0;
  auto* power = acq_cmd->add_subcommand("power", "Instantaneous power p = v i");
  power->add_option("--v", power_v, "Needle voltage [V]")->required();
  power->add_option("--i", power_i, "Discharge current [A]")->required();

  ConfigFlags replay_cfg;
  std::string replay_in, replay_out, replay_curve;
  bool replay_strict = false;
  auto* replay = acq_cmd->add_subcommand("replay", "Convert a recorded frame CSV to engineering units");
  replay->add_option("--in", replay_in, "Frame CSV (raw or engineering header)")->required();
  replay->add_option("--out", replay_out, "Output CSV; stdout when omitted");
  replay->add_option("--curve", replay_curve, "LDR calibration curve JSON");
  replay->add_flag("--strict", replay_strict, "Abort on the first malformed row");
  add_config_flags(replay, replay_cfg);

  // characterize
  CharacterizeFlags char_flags;
  auto* characterize = app.add_subcommand("characterize", "Fit plasma power versus illuminance");
  characterize->add_option("--in", char_flags.in_path, "Engineering run CSV")->required();
  characterize->add_option("--out", char_flags.out_path, "Characterization JSON to write");
  characterize->add_option("--plot", char_flags.plot_path, "SVG scatter and fitted curve");
  characterize->add_option("--schema", char_flags.schema_path, "Column mapping JSON for foreign layouts");
  characterize->add_flag("--trim", char_flags.trim, "Drop residuals above 3x rmse and refit once");
  characterize->add_flag("--no-ignition-filter", char_flags.no_ignition_filter, "Keep samples before ignition");
  characterize->add_option("--i-min", char_flags.i_min, "Ignition current threshold [A]")->capture_default_str();
  characterize->add_flag("--strict", char_flags.strict, "Abort on the first malformed row");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("plasmadiag");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage)
    argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsageError;
  }

  try {
    if (analyze->parsed())
      return cmd_probe_analyze(analyze_net, tol, out);
    if (design->parsed())
      return cmd_probe_design(ratio, design_net, out);
    if (bode->parsed())
      return cmd_probe_bode(bode_net, fmin, fmax, points, spacing, bode_out, out);
    if (fit->parsed())
      return cmd_cal_fit(fit_in, fit_out, fit_kind, fit_trim, fit_plot, out);
    if (eval->parsed())
      return cmd_cal_eval(eval_curve, eval_input, out, err);
    if (invert->parsed())
      return cmd_cal_invert(invert_curve, invert_lux, out, err);
    if (power->parsed())
      return cmd_acq_power(power_v, power_i, out);
    if (replay->parsed())
      return cmd_acq_replay(replay_in, replay_cfg, replay_curve, replay_out, replay_strict, out, err);
    if (characterize->parsed())
      return cmd_characterize(char_flags, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  err << "usage error: no command given\n";
  return kUsageError;
}

} // namespace plasmadiag::cli
