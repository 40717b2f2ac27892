#include "plasmadiag/probe_network.hpp"

#include "plasmadiag/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace plasmadiag::probe {

namespace {

// Stages whose time constants agree to this relative tolerance share one
// (1 + tau s) factor. Wide enough to absorb rounding in C0 = C1 R1 / R0.
constexpr double kTimeConstantMerge = 1e-13;

bool nearly_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

using Poly = std::vector<double>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] += a[i] * b[j];
  return out;
}

void add_into(Poly& acc, const Poly& p) {
  if (acc.size() < p.size())
    acc.resize(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    acc[i] += p[i];
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0.0)
    p.pop_back();
}

template <typename T>
T horner(const Poly& p, T x) {
  T acc{0.0};
  for (auto it = p.rbegin(); it != p.rend(); ++it)
    acc = acc * x + *it;
  return acc;
}

struct TimeConstantGroup {
  double tau;
  double resistance; // sum of R over stages sharing tau
};

} // namespace

void RCStage::validate() const {
  if (!(resistance > 0.0) || !std::isfinite(resistance))
    throw DomainError(fmt::format("stage resistance must be positive and finite, got {}", resistance));
  if (!(capacitance >= 0.0) || !std::isfinite(capacitance))
    throw DomainError(fmt::format("stage capacitance must be non-negative and finite, got {}", capacitance));
}

ProbeNetwork::ProbeNetwork(RCStage base, std::vector<RCStage> ladder)
    : base_(base), ladder_(std::move(ladder)) {
  base_.validate();
  for (const auto& stage : ladder_)
    stage.validate();
}

ProbeNetwork ProbeNetwork::uniform(RCStage base, std::size_t n, RCStage ladder_stage) {
  return ProbeNetwork(base, std::vector<RCStage>(n, ladder_stage));
}

bool ProbeNetwork::is_uniform() const noexcept {
  for (const auto& stage : ladder_) {
    if (!nearly_equal(stage.resistance, ladder_.front().resistance, kUniformityTolerance) ||
        !nearly_equal(stage.capacitance, ladder_.front().capacitance, kUniformityTolerance))
      return false;
  }
  return true;
}

ProbeNetwork ProbeNetwork::with_stage_added(RCStage stage) const {
  auto ladder = ladder_;
  ladder.push_back(stage);
  return ProbeNetwork(base_, std::move(ladder));
}

Complex RationalTransferFunction::evaluate(Complex s) const {
  const Complex den = horner(denominator, s);
  if (den == Complex{0.0, 0.0})
    throw SingularityError("transfer function evaluated at a pole");
  return horner(numerator, s) / den;
}

double RationalTransferFunction::evaluate_real(double s) const {
  const double den = horner(denominator, s);
  if (den == 0.0)
    throw SingularityError("transfer function evaluated at a pole");
  return horner(numerator, s) / den;
}

double ComplexResponse::phase_rad() const {
  const double phase = std::arg(gain);
  return phase <= -std::numbers::pi ? std::numbers::pi : phase;
}

double ComplexResponse::magnitude_db() const { return 20.0 * std::log10(magnitude()); }

Complex stage_impedance(const RCStage& stage, Complex s) {
  stage.validate();
  if (stage.capacitance == 0.0)
    return {stage.resistance, 0.0};
  const Complex rcs = stage.time_constant() * s;
  const Complex den = 1.0 + rcs;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(den) <= 4.0 * eps * (1.0 + std::abs(rcs)))
    throw SingularityError(fmt::format("stage impedance pole at s = {}{:+}j", s.real(), s.imag()));
  return stage.resistance / den;
}

RationalTransferFunction transfer_function(const ProbeNetwork& net) {
  std::vector<TimeConstantGroup> groups;
  auto assign = [&groups](const RCStage& stage) -> std::size_t {
    const double tau = stage.time_constant();
    for (std::size_t k = 0; k < groups.size(); ++k) {
      if (nearly_equal(groups[k].tau, tau, kTimeConstantMerge)) {
        groups[k].resistance += stage.resistance;
        return k;
      }
    }
    groups.push_back({tau, stage.resistance});
    return groups.size() - 1;
  };

  const std::size_t base_group = assign(net.base());
  for (const auto& stage : net.ladder())
    assign(stage);

  auto factor = [&groups](std::size_t k) -> Poly { return {1.0, groups[k].tau}; };

  // Z0 / sum Zi = R0 prod_{k != base}(1 + tau_k s) / sum_k Rk prod_{m != k}(1 + tau_m s)
  Poly numerator{net.base().resistance};
  for (std::size_t k = 0; k < groups.size(); ++k)
    if (k != base_group)
      numerator = multiply(numerator, factor(k));

  Poly denominator{0.0};
  for (std::size_t k = 0; k < groups.size(); ++k) {
    Poly term{groups[k].resistance};
    for (std::size_t m = 0; m < groups.size(); ++m)
      if (m != k)
        term = multiply(term, factor(m));
    add_into(denominator, term);
  }

  // The constant term is the total resistance; recompute it in stage order so
  // the DC value matches dc_attenuation bit for bit.
  double total = net.base().resistance;
  for (const auto& stage : net.ladder())
    total += stage.resistance;
  denominator[0] = total;

  for (auto& c : numerator)
    c /= total;
  for (auto& c : denominator)
    c /= total;
  denominator[0] = 1.0;

  trim(numerator);
  trim(denominator);
  return {std::move(numerator), std::move(denominator)};
}

ComplexResponse frequency_response(const RationalTransferFunction& tf, double frequency_hz) {
  if (!(frequency_hz >= 0.0) || !std::isfinite(frequency_hz))
    throw DomainError(fmt::format("frequency must be finite and >= 0, got {}", frequency_hz));
  if (frequency_hz == 0.0)
    return {0.0, Complex{tf.evaluate_real(0.0), 0.0}};
  const Complex s{0.0, 2.0 * std::numbers::pi * frequency_hz};
  return {frequency_hz, tf.evaluate(s)};
}

ComplexResponse frequency_response(const ProbeNetwork& net, double frequency_hz) {
  return frequency_response(transfer_function(net), frequency_hz);
}

double dc_attenuation(const ProbeNetwork& net) {
  double total = net.base().resistance;
  for (const auto& stage : net.ladder())
    total += stage.resistance;
  return net.base().resistance / total;
}

double compensation_capacitor(const ProbeNetwork& net) {
  if (net.stage_count() == 0)
    throw PreconditionError("compensation needs at least one ladder stage");
  if (!net.is_uniform())
    throw PreconditionError("compensation capacitor is defined for uniform ladders only");
  const RCStage& first = net.ladder().front();
  return first.capacitance * first.resistance / net.base().resistance;
}

bool is_compensated(const ProbeNetwork& net, double rel_tol) {
  if (!(rel_tol >= 0.0))
    throw DomainError(fmt::format("tolerance must be >= 0, got {}", rel_tol));
  const double exact = compensation_capacitor(net);
  return std::abs(net.base().capacitance - exact) <= rel_tol * exact;
}

ProbeNetwork design_probe(double target_ratio, std::size_t n, double ladder_resistance,
                          double ladder_capacitance) {
  if (!(target_ratio > 0.0 && target_ratio < 1.0))
    throw DomainError(fmt::format("target ratio must lie in (0, 1), got {}", target_ratio));
  if (n == 0)
    throw DomainError("design needs at least one ladder stage");
  const RCStage stage{ladder_resistance, ladder_capacitance};
  stage.validate();

  const double r0 = static_cast<double>(n) * ladder_resistance * target_ratio / (1.0 - target_ratio);
  const double c0 = ladder_capacitance * ladder_resistance / r0;
  return ProbeNetwork::uniform({r0, c0}, n, stage);
}

std::vector<ComplexResponse> bode_sweep(const ProbeNetwork& net, double f_min, double f_max,
                                        std::size_t points, Spacing spacing) {
  if (!(f_min > 0.0) || !(f_max > f_min) || !std::isfinite(f_max))
    throw DomainError(fmt::format("sweep needs 0 < f_min < f_max, got [{}, {}]", f_min, f_max));
  if (points < 2)
    throw DomainError("sweep needs at least two points");

  const auto tf = transfer_function(net);
  std::vector<ComplexResponse> out;
  out.reserve(points);
  const double last = static_cast<double>(points - 1);
  const double log_lo = std::log(f_min);
  const double log_hi = std::log(f_max);
  for (std::size_t i = 0; i < points; ++i) {
    double f;
    if (i == 0)
      f = f_min;
    else if (i + 1 == points)
      f = f_max;
    else if (spacing == Spacing::Log)
      f = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / last);
    else
      f = f_min + (f_max - f_min) * static_cast<double>(i) / last;
    out.push_back(frequency_response(tf, f));
  }
  return out;
}

void write_bode_csv(std::ostream& out, const std::vector<ComplexResponse>& sweep) {
  out << "frequency_hz,magnitude,phase_rad,magnitude_db\n";
  for (const auto& r : sweep)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", r.frequency_hz, r.magnitude(),
                       r.phase_rad(), r.magnitude_db());
}

} // namespace plasmadiag::probe
