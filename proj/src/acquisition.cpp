#include "plasmadiag/acquisition.hpp"

#include "plasmadiag/csv.hpp"
#include "plasmadiag/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>

namespace plasmadiag::acquisition {

using calibration::CalibrationCurve;

void ChannelConfig::validate() const {
  if (!(probe_ratio > 0.0 && probe_ratio < 1.0))
    throw DomainError(fmt::format("probe_ratio must lie in (0, 1), got {}", probe_ratio));
  if (!(shunt_ohms > 0.0) || !std::isfinite(shunt_ohms))
    throw DomainError(fmt::format("shunt_ohms must be positive, got {}", shunt_ohms));
  if (!std::isfinite(offset_volts))
    throw DomainError("offset_volts must be finite");
  if (adc_bits < 8 || adc_bits > 24)
    throw DomainError(fmt::format("adc_bits must lie in [8, 24], got {}", adc_bits));
  if (!(adc_fullscale_volts > 0.0) || !std::isfinite(adc_fullscale_volts))
    throw DomainError(fmt::format("adc_fullscale_volts must be positive, got {}", adc_fullscale_volts));
}

double counts_to_volts(const ChannelConfig& cfg, std::int64_t raw) {
  if (raw < 0 || raw > cfg.max_count())
    throw DomainError(fmt::format("count {} outside [0, {}]", raw, cfg.max_count()));
  return static_cast<double>(raw) * cfg.adc_fullscale_volts / static_cast<double>(cfg.max_count());
}

double needle_voltage(const ChannelConfig& cfg, double probe_out_volts) { return probe_out_volts / cfg.probe_ratio; }

double offset_sum(double v1, double v2) { return v1 + v2; }

double shunt_current(const ChannelConfig& cfg, double v3_volts) {
  return (v3_volts - cfg.offset_volts) / cfg.shunt_ohms;
}

double instantaneous_power(double v_volts, double i_amps) { return v_volts * i_amps; }

namespace {

double channel_volts(const ChannelConfig& cfg, std::int64_t raw, const char* channel) {
  try {
    return counts_to_volts(cfg, raw);
  } catch (const DomainError& e) {
    throw DomainError(fmt::format("{}: {}", channel, e.what()));
  }
}

} // namespace

PowerSample process_frame(const ChannelConfig& cfg, const AdcFrame& frame, const CalibrationCurve* ldr_curve) {
  PowerSample out;
  out.t_ms = frame.t_ms;
  out.v_volts = needle_voltage(cfg, channel_volts(cfg, frame.raw_hv, "raw_hv"));
  out.i_amps = shunt_current(cfg, channel_volts(cfg, frame.raw_shunt, "raw_shunt"));
  out.p_watts = instantaneous_power(out.v_volts, out.i_amps);
  if (frame.raw_ldr && ldr_curve) {
    const double ldr_volts = channel_volts(cfg, *frame.raw_ldr, "raw_ldr");
    try {
      out.lux = calibration::lux_from_input(*ldr_curve, calibration::InputKind::SensorVoltage, ldr_volts);
    } catch (const Error& e) {
      throw DomainError(fmt::format("raw_ldr: {}", e.what()));
    }
  }
  return out;
}

struct FrameStream::Impl {
  csv::Reader reader;
  ChannelConfig cfg;
  const CalibrationCurve* curve;
  bool strict;
  std::optional<RecordMode> mode;
  std::vector<RowDiagnostic> diagnostics;

  // Column indices; optional ones may be absent from the header.
  std::size_t col_t = 0, col_a = 0, col_b = 0;
  std::optional<std::size_t> col_c;

  Impl(std::istream& in, ChannelConfig c, const CalibrationCurve* k, bool s)
      : reader(in), cfg(c), curve(k), strict(s) {
    cfg.validate();
    if (curve && curve->kind != calibration::InputKind::SensorVoltage)
      throw PreconditionError("LDR curve must take sensor voltage as input");
    read_header();
  }

  void read_header() {
    const auto header = reader.next();
    if (!header)
      return;
    const auto& h = header->fields;
    const auto t = csv::find_column(h, "t_ms");
    if (!t)
      throw SchemaError("frame header lacks t_ms column");
    col_t = *t;
    if (auto hv = csv::find_column(h, "raw_hv"), sh = csv::find_column(h, "raw_shunt"); hv && sh) {
      mode = RecordMode::Raw;
      col_a = *hv;
      col_b = *sh;
      col_c = csv::find_column(h, "raw_ldr");
    } else if (auto v = csv::find_column(h, "v_volts"), i = csv::find_column(h, "i_amps"); v && i) {
      mode = RecordMode::Engineering;
      col_a = *v;
      col_b = *i;
      col_c = csv::find_column(h, "lux");
    } else {
      throw SchemaError("frame header matches neither t_ms,raw_hv,raw_shunt,raw_ldr nor t_ms,v_volts,i_amps,lux");
    }
  }

  static const std::string* field(const csv::Row& row, std::size_t col) {
    return col < row.fields.size() ? &row.fields[col] : nullptr;
  }

  double number(const csv::Row& row, std::size_t col, const char* name) const {
    const auto* text = field(row, col);
    if (!text)
      throw ParseError(row.line, fmt::format("missing {} field", name));
    const auto value = csv::parse_number(*text);
    if (!value)
      throw ParseError(row.line, fmt::format("{}: '{}' is not a number", name, *text));
    return *value;
  }

  std::int64_t count(const csv::Row& row, std::size_t col, const char* name) const {
    const double value = number(row, col, name);
    if (value != std::floor(value) || std::abs(value) > 9.0e15)
      throw ParseError(row.line, fmt::format("{}: {} is not an integer count", name, value));
    return static_cast<std::int64_t>(value);
  }

  bool has_value(const csv::Row& row, std::optional<std::size_t> col) const {
    if (!col)
      return false;
    const auto* text = field(row, *col);
    return text && !text->empty();
  }

  PowerSample convert(const csv::Row& row) const {
    if (*mode == RecordMode::Raw) {
      AdcFrame frame;
      frame.t_ms = number(row, col_t, "t_ms");
      frame.raw_hv = count(row, col_a, "raw_hv");
      frame.raw_shunt = count(row, col_b, "raw_shunt");
      if (has_value(row, col_c))
        frame.raw_ldr = count(row, *col_c, "raw_ldr");
      try {
        return process_frame(cfg, frame, curve);
      } catch (const DomainError& e) {
        throw ParseError(row.line, e.what());
      }
    }
    PowerSample s;
    s.t_ms = number(row, col_t, "t_ms");
    s.v_volts = number(row, col_a, "v_volts");
    s.i_amps = number(row, col_b, "i_amps");
    s.p_watts = instantaneous_power(s.v_volts, s.i_amps);
    if (has_value(row, col_c))
      s.lux = number(row, *col_c, "lux");
    return s;
  }
};

FrameStream::FrameStream(std::istream& in, ChannelConfig cfg, const CalibrationCurve* ldr_curve, bool strict)
    : impl_(std::make_unique<Impl>(in, cfg, ldr_curve, strict)) {}

FrameStream::~FrameStream() = default;

std::optional<RecordMode> FrameStream::mode() const { return impl_->mode; }

const std::vector<RowDiagnostic>& FrameStream::diagnostics() const noexcept { return impl_->diagnostics; }

std::optional<PowerSample> FrameStream::next() {
  if (!impl_->mode)
    return std::nullopt;
  while (auto row = impl_->reader.next()) {
    try {
      return impl_->convert(*row);
    } catch (const ParseError& e) {
      if (impl_->strict)
        throw;
      impl_->diagnostics.push_back({e.line(), e.what()});
    }
  }
  return std::nullopt;
}

ReplayResult replay_stream(std::istream& in, const ChannelConfig& cfg, const CalibrationCurve* ldr_curve,
                           bool strict) {
  FrameStream stream(in, cfg, ldr_curve, strict);
  ReplayResult result;
  while (auto sample = stream.next())
    result.samples.push_back(*sample);
  result.diagnostics = stream.diagnostics();
  return result;
}

ReplayResult replay_file(const std::filesystem::path& path, const ChannelConfig& cfg,
                         const CalibrationCurve* ldr_curve, bool strict) {
  std::ifstream in(path);
  if (!in)
    throw IoError(fmt::format("cannot open '{}'", path.string()));
  return replay_stream(in, cfg, ldr_curve, strict);
}

void write_samples_csv(std::ostream& out, std::span<const PowerSample> samples) {
  out << "t_ms,v_volts,i_amps,p_watts,lux\n";
  for (const auto& s : samples) {
    out << csv::format_number(s.t_ms) << ',' << csv::format_number(s.v_volts) << ','
        << csv::format_number(s.i_amps) << ',' << csv::format_number(s.p_watts) << ',';
    if (s.lux)
      out << csv::format_number(*s.lux);
    out << '\n';
  }
}

std::optional<std::size_t> ignition_index(std::span<const PowerSample> samples, double i_min, std::size_t sustain) {
  if (!(i_min > 0.0))
    throw DomainError(fmt::format("ignition current threshold must be positive, got {}", i_min));
  if (sustain == 0)
    throw DomainError("ignition sustain count must be at least 1");
  std::size_t run = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    run = std::abs(samples[k].i_amps) >= i_min ? run + 1 : 0;
    if (run == sustain)
      return k + 1 - sustain;
  }
  return std::nullopt;
}

std::optional<double> detect_ignition(std::span<const PowerSample> samples, double i_min, std::size_t sustain) {
  if (auto k = ignition_index(samples, i_min, sustain))
    return samples[*k].t_ms;
  return std::nullopt;
}

} // namespace plasmadiag::acquisition
