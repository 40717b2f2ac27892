#pragma once

// Analysis and design of the compensated RC-ladder high-voltage divider.
//
// The divider is a base stage (R0 || C0) at the output terminal in series with
// n ladder stages (Ri || Ci). Each stage has impedance Zi(s) = Ri / (1 + Ri Ci s)
// and the output/input transfer function is G(s) = Z0(s) / sum_i Zi(s).

#include <complex>
#include <iosfwd>
#include <vector>

namespace plasmadiag::probe {

using Complex = std::complex<double>;

struct RCStage {
  double resistance = 0.0;  // ohms, > 0
  double capacitance = 0.0; // farads, >= 0; zero means purely resistive

  // Throws DomainError when the invariants do not hold.
  void validate() const;
  double time_constant() const noexcept { return resistance * capacitance; }
};

class ProbeNetwork {
public:
  ProbeNetwork(RCStage base, std::vector<RCStage> ladder);

  // n identical ladder stages.
  static ProbeNetwork uniform(RCStage base, std::size_t n, RCStage ladder_stage);

  const RCStage& base() const noexcept { return base_; }
  const std::vector<RCStage>& ladder() const noexcept { return ladder_; }
  std::size_t stage_count() const noexcept { return ladder_.size(); }

  // All ladder stages equal in R and C within kUniformityTolerance (relative).
  bool is_uniform() const noexcept;

  ProbeNetwork with_base(RCStage base) const { return ProbeNetwork(base, ladder_); }
  ProbeNetwork with_stage_added(RCStage stage) const;

private:
  RCStage base_;
  std::vector<RCStage> ladder_;
};

inline constexpr double kUniformityTolerance = 1e-9;

// Polynomials are dense, ascending powers of s.
struct RationalTransferFunction {
  std::vector<double> numerator;
  std::vector<double> denominator;

  Complex evaluate(Complex s) const;
  double evaluate_real(double s) const;
  bool is_constant() const noexcept { return numerator.size() <= 1 && denominator.size() <= 1; }
};

struct ComplexResponse {
  double frequency_hz = 0.0;
  Complex gain;

  double magnitude() const { return std::abs(gain); }
  // In (-pi, pi].
  double phase_rad() const;
  double magnitude_db() const;
};

enum class Spacing { Log, Linear };

Complex stage_impedance(const RCStage& stage, Complex s);

// Common factors (stages sharing a time constant) are cancelled symbolically, so an
// exactly compensated uniform ladder yields a degree-0 function. Coefficients are
// normalised so the denominator's constant term is 1.
RationalTransferFunction transfer_function(const ProbeNetwork& net);

ComplexResponse frequency_response(const ProbeNetwork& net, double frequency_hz);
ComplexResponse frequency_response(const RationalTransferFunction& tf, double frequency_hz);

double dc_attenuation(const ProbeNetwork& net);

// C0 that makes a uniform ladder flat: C1 R1 / R0.
double compensation_capacitor(const ProbeNetwork& net);

bool is_compensated(const ProbeNetwork& net, double rel_tol);

ProbeNetwork design_probe(double target_ratio, std::size_t n, double ladder_resistance,
                          double ladder_capacitance);

std::vector<ComplexResponse> bode_sweep(const ProbeNetwork& net, double f_min, double f_max,
                                        std::size_t points, Spacing spacing = Spacing::Log);

// CSV with header frequency_hz,magnitude,phase_rad,magnitude_db.
void write_bode_csv(std::ostream& out, const std::vector<ComplexResponse>& sweep);

} // namespace plasmadiag::probe
