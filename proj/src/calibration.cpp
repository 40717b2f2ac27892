#include "plasmadiag/calibration.hpp"

#include "plasmadiag/errors.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace plasmadiag::calibration {

namespace {

constexpr double kRootTolerance = 1e-12;
constexpr double kLogSearchLimit = 700.0;

double derivative(const CalibrationCurve& c, double u) { return (3.0 * c.a3 * u + 2.0 * c.a2) * u + c.a1; }

void validate_sample(const CalibrationSample& s) {
  if (!(s.input > 0.0) || !std::isfinite(s.input) || !(s.lux > 0.0) || !std::isfinite(s.lux))
    throw DomainError(fmt::format("calibration sample needs positive finite input and lux, got ({}, {})",
                                  s.input, s.lux));
}

} // namespace

std::string_view to_string(InputKind kind) noexcept {
  return kind == InputKind::SensorVoltage ? "voltage" : "power";
}

std::string_view input_unit(InputKind kind) noexcept {
  return kind == InputKind::SensorVoltage ? "volts" : "watts";
}

InputKind parse_input_kind(std::string_view text) {
  if (text == "voltage" || text == "sensor_voltage")
    return InputKind::SensorVoltage;
  if (text == "power" || text == "plasma_power")
    return InputKind::PlasmaPower;
  throw SchemaError(fmt::format("unknown input kind '{}' (expected voltage or power)", text));
}

CalibrationCurve CalibrationCurve::from_coefficients(std::span<const double, 4> a, InputKind kind) {
  CalibrationCurve c{a[0], a[1], a[2], a[3], kind, std::nullopt};
  c.validate();
  return c;
}

void CalibrationCurve::validate() const {
  for (double a : coefficients())
    if (!std::isfinite(a))
      throw DomainError("calibration coefficients must be finite");
}

CalibrationCurve ldr_voltage_curve() {
  return {2.533317, 1.960146, 2.118486, 2.101649, InputKind::SensorVoltage, std::nullopt};
}

CalibrationCurve plasma_power_curve() {
  return {-11.413655, 12.323756, -3.966212, 0.454388, InputKind::PlasmaPower, std::nullopt};
}

double eval_log_poly(const CalibrationCurve& c, double x) { return ((c.a3 * x + c.a2) * x + c.a1) * x + c.a0; }

double lux_from_input(const CalibrationCurve& curve, double input) {
  if (!(input > 0.0) || !std::isfinite(input))
    throw DomainError(fmt::format("calibration input must be positive and finite, got {}", input));
  return std::exp(eval_log_poly(curve, std::log(input)));
}

double lux_from_input(const CalibrationCurve& curve, InputKind kind, double input) {
  if (curve.kind != kind)
    throw PreconditionError(fmt::format("curve expects {} input, got {}", to_string(curve.kind), to_string(kind)));
  return lux_from_input(curve, input);
}

Monotonicity monotonicity(const CalibrationCurve& c) noexcept {
  if (c.a3 != 0.0) {
    const double disc = 4.0 * c.a2 * c.a2 - 12.0 * c.a3 * c.a1;
    return {disc <= 0.0, c.a3 > 0.0 ? Direction::Increasing : Direction::Decreasing};
  }
  if (c.a2 != 0.0)
    return {false, Direction::Increasing};
  return {c.a1 != 0.0, c.a1 >= 0.0 ? Direction::Increasing : Direction::Decreasing};
}

bool is_monotone(const CalibrationCurve& curve) noexcept { return monotonicity(curve).monotone; }

double input_from_lux(const CalibrationCurve& curve, double lux) {
  if (!(lux > 0.0) || !std::isfinite(lux))
    throw DomainError(fmt::format("illuminance must be positive and finite, got {}", lux));
  if (!is_monotone(curve))
    throw PreconditionError("curve is not monotone and cannot be inverted");

  const double target = std::log(lux);
  auto residual = [&](double u) { return eval_log_poly(curve, u) - target; };

  double u = std::clamp(target, -kLogSearchLimit, kLogSearchLimit);
  double fu = residual(u);
  if (fu == 0.0)
    return std::exp(u);

  // Bracket by doubling the half-width around the seed.
  double lo = u, hi = u;
  double flo = fu, fhi = fu;
  for (double h = 1.0; std::signbit(flo) == std::signbit(fhi); h *= 2.0) {
    if (lo <= -kLogSearchLimit && hi >= kLogSearchLimit)
      throw RangeError(fmt::format("no inverse for {} lux within ln(input) in [-700, 700]", lux));
    lo = std::max(u - h, -kLogSearchLimit);
    hi = std::min(u + h, kLogSearchLimit);
    flo = residual(lo);
    fhi = residual(hi);
  }

  // Newton, falling back to bisection whenever the step leaves the bracket.
  for (int iter = 0; iter < 500; ++iter) {
    if (fu == 0.0)
      break;
    if (std::signbit(fu) == std::signbit(flo)) {
      lo = u;
      flo = fu;
    } else {
      hi = u;
      fhi = fu;
    }
    const double slope = derivative(curve, u);
    double next = slope != 0.0 ? u - fu / slope : lo - 1.0;
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    const double step = next - u;
    u = next;
    fu = residual(u);
    if (std::abs(step) <= kRootTolerance || hi - lo <= kRootTolerance)
      break;
  }
  return std::exp(u);
}

CalibrationCurve fit_log_cubic(std::span<const CalibrationSample> samples, InputKind kind) {
  for (const auto& s : samples)
    validate_sample(s);

  std::set<double> distinct;
  for (const auto& s : samples)
    distinct.insert(s.input);
  if (distinct.size() < 4)
    throw FitError(fmt::format("cubic fit needs at least 4 distinct inputs, got {}", distinct.size()));

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixX4d design(n, 4);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = std::log(samples[static_cast<std::size_t>(i)].input);
    design(i, 0) = 1.0;
    design(i, 1) = u;
    design(i, 2) = u * u;
    design(i, 3) = u * u * u;
    target(i) = std::log(samples[static_cast<std::size_t>(i)].lux);
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixX4d> qr(design);
  if (qr.rank() < 4)
    throw FitError("design matrix is rank deficient");
  const Eigen::Vector4d a = qr.solve(target);

  CalibrationCurve curve{a(0), a(1), a(2), a(3), kind, std::nullopt};
  curve.validate();
  curve.fitted_range = InputRange{*distinct.begin(), *distinct.rbegin()};
  return curve;
}

FitReport fit_log_cubic(std::span<const CalibrationSample> samples, const FitOptions& options) {
  FitReport report;
  report.curve = fit_log_cubic(samples, options.kind);
  report.kept.assign(samples.begin(), samples.end());
  if (!options.trim)
    return report;

  const double rmse = fit_residuals(report.curve, samples).rmse_log;
  std::vector<CalibrationSample> kept;
  for (const auto& s : samples)
    if (std::abs(std::log(s.lux) - eval_log_poly(report.curve, std::log(s.input))) <= 3.0 * rmse)
      kept.push_back(s);

  const std::size_t dropped = samples.size() - kept.size();
  if (dropped == 0)
    return report;
  if (static_cast<double>(dropped) > options.max_trim_fraction * static_cast<double>(samples.size())) {
    report.trim_rejected = true;
    return report;
  }
  try {
    report.curve = fit_log_cubic(kept, options.kind);
  } catch (const FitError&) {
    report.trim_rejected = true;
    return report;
  }
  report.trimmed_count = dropped;
  report.kept = std::move(kept);
  return report;
}

Residuals fit_residuals(const CalibrationCurve& curve, std::span<const CalibrationSample> samples) {
  if (samples.empty())
    throw DomainError("residuals need at least one sample");
  double sum_sq = 0.0;
  double max_abs = 0.0;
  for (const auto& s : samples) {
    validate_sample(s);
    const double r = std::log(s.lux) - eval_log_poly(curve, std::log(s.input));
    sum_sq += r * r;
    max_abs = std::max(max_abs, std::abs(r));
  }
  return {std::sqrt(sum_sq / static_cast<double>(samples.size())), max_abs};
}

} // namespace plasmadiag::calibration
