#pragma once

// Log-domain cubic calibration curves: ln(lux) = a3 u^3 + a2 u^2 + a1 u + a0 with
// u = ln(input). The same form maps LDR sensor voltage to illuminance and plasma
// power to plasma brightness.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace plasmadiag::calibration {

enum class InputKind { SensorVoltage, PlasmaPower };

// "voltage" / "power"; parse also accepts "sensor_voltage" / "plasma_power".
std::string_view to_string(InputKind kind) noexcept;
InputKind parse_input_kind(std::string_view text);
// "volts" / "watts", used in unit-bearing field names.
std::string_view input_unit(InputKind kind) noexcept;

struct InputRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  bool operator==(const InputRange&) const = default;
};

struct CalibrationCurve {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  InputKind kind = InputKind::SensorVoltage;
  // Span of the samples the curve was fitted on, when known. Evaluation outside it
  // is extrapolation.
  std::optional<InputRange> fitted_range;

  std::array<double, 4> coefficients() const noexcept { return {a0, a1, a2, a3}; }
  static CalibrationCurve from_coefficients(std::span<const double, 4> a, InputKind kind);
  // Throws DomainError if any coefficient is not finite.
  void validate() const;

  bool operator==(const CalibrationCurve&) const = default;
};

// Published coefficient sets: LDR voltage -> lux and plasma power -> lux.
CalibrationCurve ldr_voltage_curve();
CalibrationCurve plasma_power_curve();

struct CalibrationSample {
  double input = 0.0; // volts or watts, > 0
  double lux = 0.0;   // > 0
};

enum class Direction { Increasing, Decreasing };

struct Monotonicity {
  bool monotone = false;
  Direction direction = Direction::Increasing;
};

// Horner evaluation in the log domain (x = ln input).
double eval_log_poly(const CalibrationCurve& curve, double x);

double lux_from_input(const CalibrationCurve& curve, double input);
// As above, but rejects a curve whose input kind differs from `kind`.
double lux_from_input(const CalibrationCurve& curve, InputKind kind, double input);

// Inverse of lux_from_input for monotone curves.
double input_from_lux(const CalibrationCurve& curve, double lux);

// The derivative 3 a3 u^2 + 2 a2 u + a1 must not change sign over the real line:
//   a3 != 0: discriminant 4 a2^2 - 12 a3 a1 <= 0, direction sign(a3)
//   a3 == 0, a2 != 0: never monotone (parabola)
//   a3 == a2 == 0: monotone iff a1 != 0, direction sign(a1)
// A zero discriminant leaves one stationary point, which still gives a bijection.
Monotonicity monotonicity(const CalibrationCurve& curve) noexcept;
bool is_monotone(const CalibrationCurve& curve) noexcept;

struct FitOptions {
  InputKind kind = InputKind::SensorVoltage;
  // Drop samples whose |log residual| exceeds 3 x rmse and refit once.
  bool trim = false;
  // Largest fraction of samples the trim pass may discard; beyond it the untrimmed
  // fit is kept.
  double max_trim_fraction = 0.2;
};

struct FitReport {
  CalibrationCurve curve;
  std::size_t trimmed_count = 0;
  // Trim would have discarded more than max_trim_fraction; the untrimmed fit was kept.
  bool trim_rejected = false;
  std::vector<CalibrationSample> kept;
};

// Least squares of ln(lux) against ln(input) on {1, u, u^2, u^3}, via QR.
CalibrationCurve fit_log_cubic(std::span<const CalibrationSample> samples,
                               InputKind kind = InputKind::SensorVoltage);
FitReport fit_log_cubic(std::span<const CalibrationSample> samples, const FitOptions& options);

struct Residuals {
  double rmse_log = 0.0;
  double max_abs_log = 0.0;

  bool operator==(const Residuals&) const = default;
};

Residuals fit_residuals(const CalibrationCurve& curve, std::span<const CalibrationSample> samples);

} // namespace plasmadiag::calibration
