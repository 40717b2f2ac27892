#pragma once

// Raw ADC frames -> engineering units. The needle voltage comes through the RC
// divider, the discharge current through a shunt whose drop is lifted by a fixed
// DC offset so the unipolar ADC can see negative values (v3 = vS + offset).

#include "plasmadiag/calibration.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace plasmadiag::acquisition {

// DC attenuation of the n = 5, 10 MOhm / 52.8 kOhm divider.
inline constexpr double kDefaultProbeRatio = 52.8e3 / (5 * 10e6 + 52.8e3);

struct ChannelConfig {
  double probe_ratio = kDefaultProbeRatio; // Vo/Vi of the HV probe
  double shunt_ohms = 23.0;
  double offset_volts = 1.25;
  int adc_bits = 12;
  double adc_fullscale_volts = 3.3;

  void validate() const;
  std::int64_t max_count() const noexcept { return (std::int64_t{1} << adc_bits) - 1; }
};

struct AdcFrame {
  double t_ms = 0.0;
  std::int64_t raw_hv = 0;
  std::int64_t raw_shunt = 0;
  std::optional<std::int64_t> raw_ldr;
};

struct PowerSample {
  double t_ms = 0.0;
  double v_volts = 0.0;
  double i_amps = 0.0;
  double p_watts = 0.0;
  std::optional<double> lux;
};

// raw * fullscale / (2^bits - 1).
double counts_to_volts(const ChannelConfig& cfg, std::int64_t raw);
double needle_voltage(const ChannelConfig& cfg, double probe_out_volts);
double offset_sum(double v1, double v2);
// Signed: (v3 - offset) / shunt. Positive when v3 sits above the offset.
double shunt_current(const ChannelConfig& cfg, double v3_volts);
double instantaneous_power(double v_volts, double i_amps);

// Errors name the failing channel (raw_hv, raw_shunt, raw_ldr).
PowerSample process_frame(const ChannelConfig& cfg, const AdcFrame& frame,
                          const calibration::CalibrationCurve* ldr_curve = nullptr);

enum class RecordMode {
  Raw,        // t_ms,raw_hv,raw_shunt[,raw_ldr]
  Engineering // t_ms,v_volts,i_amps[,p_watts][,lux]
};

struct RowDiagnostic {
  std::size_t line = 0;
  std::string message;
};

// Sequential reader over a frame CSV; the mode is chosen from the header.
class FrameStream {
public:
  FrameStream(std::istream& in, ChannelConfig cfg, const calibration::CalibrationCurve* ldr_curve = nullptr,
              bool strict = false);
  ~FrameStream();
  FrameStream(const FrameStream&) = delete;
  FrameStream& operator=(const FrameStream&) = delete;

  // nullopt for an empty source.
  std::optional<RecordMode> mode() const;

  // Next converted record. Malformed rows are recorded and skipped, or in strict
  // mode raise ParseError.
  std::optional<PowerSample> next();

  const std::vector<RowDiagnostic>& diagnostics() const noexcept;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ReplayResult {
  std::vector<PowerSample> samples;
  std::vector<RowDiagnostic> diagnostics;
};

ReplayResult replay_stream(std::istream& in, const ChannelConfig& cfg,
                           const calibration::CalibrationCurve* ldr_curve = nullptr, bool strict = false);
// Throws IoError when the file cannot be opened.
ReplayResult replay_file(const std::filesystem::path& path, const ChannelConfig& cfg,
                         const calibration::CalibrationCurve* ldr_curve = nullptr, bool strict = false);

// t_ms,v_volts,i_amps,p_watts,lux (lux left empty when absent).
void write_samples_csv(std::ostream& out, std::span<const PowerSample> samples);

inline constexpr double kDefaultIgnitionCurrent = 1e-3;
inline constexpr std::size_t kDefaultIgnitionSustain = 3;

// Index of the first sample that starts a run of `sustain` consecutive samples with
// |i| >= i_min.
std::optional<std::size_t> ignition_index(std::span<const PowerSample> samples, double i_min,
                                          std::size_t sustain = kDefaultIgnitionSustain);
std::optional<double> detect_ignition(std::span<const PowerSample> samples, double i_min,
                                      std::size_t sustain = kDefaultIgnitionSustain);

} // namespace plasmadiag::acquisition
