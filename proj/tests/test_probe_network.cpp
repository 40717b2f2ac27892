#include "oracles.hpp"

#include "plasmadiag/errors.hpp"
#include "plasmadiag/probe_network.hpp"

#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

using namespace plasmadiag;
using namespace plasmadiag::probe;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ProbeNetwork published_network(double c0 = 3e-9) { return ProbeNetwork::uniform({52.8e3, c0}, 5, {10e6, 15e-12}); }

double rel_diff(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

ProbeNetwork random_network(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> stages(0, 8);
  std::bernoulli_distribution resistive(0.15);
  auto stage = [&] {
    const double r = oracle::log_uniform(rng, 1e3, 1e7);
    const double c = resistive(rng) ? 0.0 : oracle::log_uniform(rng, 1e-13, 1e-8);
    return RCStage{r, c};
  };
  const RCStage base = stage();
  std::vector<RCStage> ladder;
  for (int k = stages(rng); k > 0; --k)
    ladder.push_back(stage());
  return ProbeNetwork(base, ladder);
}

Complex oracle_gain(const ProbeNetwork& net, double f) {
  std::vector<oracle::Stage> ladder;
  for (const auto& s : net.ladder())
    ladder.push_back({s.resistance, s.capacitance});
  return oracle::divider_gain({net.base().resistance, net.base().capacitance}, ladder, f);
}

} // namespace

TEST_CASE("stage impedance") {
  const RCStage hv{10e6, 15e-12};
  CHECK(stage_impedance(hv, 0.0) == Complex(10e6, 0.0));

  // |R / (1 + j w R C)| with w R C = 2 pi 1e6 * 1.5e-4; frozen from a 40-digit evaluation.
  const Complex z = stage_impedance(hv, Complex(0.0, kTwoPi * 1e6));
  CHECK(std::abs(z) == doctest::Approx(10610.323566958355).epsilon(1e-12));
  CHECK(z.real() == doctest::Approx(11.257896619555188).epsilon(1e-10));
  CHECK(z.imag() == doctest::Approx(-10610.317594460384).epsilon(1e-12));

  const RCStage resistive{52.8e3, 0.0};
  CHECK(stage_impedance(resistive, Complex(0.0, 1e9)) == Complex(52.8e3, 0.0));
  CHECK(stage_impedance(resistive, Complex(-5.0, 3.0)) == Complex(52.8e3, 0.0));

  SUBCASE("pole on the negative real axis") {
    CHECK_THROWS_AS(stage_impedance(hv, Complex(-1.0 / hv.time_constant(), 0.0)), SingularityError);
  }
  SUBCASE("invalid stage") {
    CHECK_THROWS_AS(stage_impedance({0.0, 1e-12}, 0.0), DomainError);
    CHECK_THROWS_AS(stage_impedance({1e3, -1e-12}, 0.0), DomainError);
  }
}

TEST_CASE("stage impedance magnitude is non-increasing in frequency") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const RCStage s{oracle::log_uniform(rng, 1e2, 1e8), oracle::log_uniform(rng, 1e-13, 1e-6)};
    double previous = std::abs(stage_impedance(s, 0.0));
    for (double f = 1.0; f < 1e9; f *= 3.7) {
      const double mag = std::abs(stage_impedance(s, Complex(0.0, kTwoPi * f)));
      CHECK(mag <= previous);
      previous = mag;
    }
    const RCStage r{s.resistance, 0.0};
    CHECK(std::abs(stage_impedance(r, Complex(0.0, kTwoPi * 1e8))) == s.resistance);
  }
}

TEST_CASE("network construction validates stages") {
  CHECK_THROWS_AS(ProbeNetwork({-1.0, 0.0}, {}), DomainError);
  CHECK_THROWS_AS(ProbeNetwork({1.0, 0.0}, {{1.0, std::nan("")}}), DomainError);
  CHECK(published_network().is_uniform());
  CHECK_FALSE(ProbeNetwork({1.0, 0.0}, {{1.0, 0.0}, {1.0 + 1e-6, 0.0}}).is_uniform());
  CHECK(ProbeNetwork({1.0, 0.0}, {{1.0, 0.0}, {1.0 + 1e-12, 0.0}}).is_uniform());
}

TEST_CASE("transfer function") {
  SUBCASE("base stage only is unity") {
    const auto tf = transfer_function(ProbeNetwork({52.8e3, 3e-9}, {}));
    CHECK(tf.is_constant());
    CHECK(tf.evaluate(Complex(0.0, 1e5)) == Complex(1.0, 0.0));
  }
  SUBCASE("published network at DC") {
    const auto tf = transfer_function(published_network());
    CHECK(tf.evaluate_real(0.0) == doctest::Approx(52.8e3 / 50.0528e6).epsilon(1e-12));
    CHECK(tf.evaluate_real(0.0) == doctest::Approx(1.054886e-3).epsilon(1e-6));
  }
  SUBCASE("exactly compensated uniform ladder is constant") {
    const auto net = published_network(15e-12 * 10e6 / 52.8e3);
    const auto tf = transfer_function(net);
    CHECK(tf.is_constant());
    CHECK(tf.numerator.at(0) == doctest::Approx(52.8e3 / (5 * 10e6 + 52.8e3)).epsilon(1e-15));
  }
  SUBCASE("common time constants cancel") {
    // Two distinct time constants leave a first-order function.
    const auto tf = transfer_function(published_network());
    CHECK(tf.numerator.size() == 2);
    CHECK(tf.denominator.size() == 2);
    CHECK(tf.denominator[0] == 1.0);
  }
  SUBCASE("purely resistive ladder") {
    const auto tf = transfer_function(ProbeNetwork({1e3, 0.0}, {{2e3, 0.0}, {3e3, 0.0}}));
    CHECK(tf.is_constant());
    CHECK(tf.evaluate_real(0.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  }
}

TEST_CASE("transfer function agrees with direct complex evaluation") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> log_f(0.0, 8.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto net = random_network(rng);
    const auto tf = transfer_function(net);
    const double f = std::pow(10.0, log_f(rng));
    const Complex expected = oracle_gain(net, f);
    const double err = rel_diff(frequency_response(tf, f).gain, expected);
    worst = std::max(worst, err);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("frequency response") {
  SUBCASE("exactly compensated network is flat at 1 MHz") {
    const auto net = published_network(compensation_capacitor(published_network()));
    const auto r = frequency_response(net, 1e6);
    CHECK(r.magnitude() == doctest::Approx(dc_attenuation(net)).epsilon(1e-15));
    CHECK(r.phase_rad() == 0.0);
  }
  SUBCASE("n = 0 passes through") {
    const auto r = frequency_response(ProbeNetwork({1e4, 1e-9}, {}), 12345.0);
    CHECK(r.gain == Complex(1.0, 0.0));
  }
  SUBCASE("off-the-shelf 3 nF at 1 MHz") {
    // Frozen from a 40-digit evaluation of Z0 / sum Zi.
    const auto r = frequency_response(published_network(), 1e6);
    CHECK(r.magnitude() == doctest::Approx(0.00099900105700450718).epsilon(1e-10));
    CHECK(r.phase_rad() == doctest::Approx(-5.6210628396370617e-5).epsilon(1e-8));
  }
  SUBCASE("DC limit equals dc_attenuation exactly") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const auto net = random_network(rng);
      const auto r = frequency_response(net, 0.0);
      CHECK(r.gain.real() == dc_attenuation(net));
      CHECK(r.gain.imag() == 0.0);
    }
  }
  SUBCASE("negative frequency rejected") { CHECK_THROWS_AS(frequency_response(published_network(), -1.0), DomainError); }
  SUBCASE("phase stays in (-pi, pi]") {
    const ComplexResponse r{1.0, Complex(-1.0, -0.0)};
    CHECK(r.phase_rad() == doctest::Approx(std::numbers::pi));
  }
}

TEST_CASE("dc attenuation") {
  CHECK(dc_attenuation(published_network()) == doctest::Approx(52.8e3 / 50052.8e3).epsilon(1e-15));
  CHECK(dc_attenuation(ProbeNetwork({5.0, 0.0}, {})) == 1.0);
  CHECK(dc_attenuation(ProbeNetwork({1e3, 0.0}, {{1e3, 0.0}})) == 0.5);

  SUBCASE("adding a stage strictly decreases the ratio") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
      const auto net = random_network(rng);
      const auto bigger = net.with_stage_added({oracle::log_uniform(rng, 1.0, 1e7), 0.0});
      CHECK(dc_attenuation(bigger) < dc_attenuation(net));
    }
  }
}

TEST_CASE("compensation capacitor") {
  CHECK(compensation_capacitor(published_network()) == doctest::Approx(2.840909090909091e-9).epsilon(1e-14));
  CHECK(compensation_capacitor(ProbeNetwork::uniform({1e3, 0.0}, 3, {1e3, 1e-9})) == doctest::Approx(1e-9));
  CHECK(compensation_capacitor(ProbeNetwork::uniform({1e3, 0.0}, 3, {1e3, 0.0})) == 0.0);

  CHECK_THROWS_AS(compensation_capacitor(ProbeNetwork({1e3, 0.0}, {{1e3, 1e-9}, {2e3, 1e-9}})), PreconditionError);
  CHECK_THROWS_AS(compensation_capacitor(ProbeNetwork({1e3, 0.0}, {})), PreconditionError);
}

TEST_CASE("is_compensated") {
  CHECK(is_compensated(published_network(), 0.10));
  CHECK_FALSE(is_compensated(published_network(), 0.01));
  CHECK(is_compensated(published_network(2.840909090909091e-9), 1e-12));
  CHECK_THROWS_AS(is_compensated(ProbeNetwork({1e3, 0.0}, {{1e3, 1e-9}, {1e3, 2e-9}}), 0.1), PreconditionError);
}

TEST_CASE("design_probe") {
  SUBCASE("1000:1 with the published ladder") {
    const auto net = design_probe(1.0 / 1000.0, 5, 10e6, 15e-12);
    CHECK(net.base().resistance == doctest::Approx(50050.05005005005).epsilon(1e-13));
    CHECK(net.base().capacitance == doctest::Approx(2.997e-9).epsilon(1e-13));
    CHECK(dc_attenuation(net) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(is_compensated(net, 1e-12));
  }
  SUBCASE("symmetric resistive divider") {
    const auto net = design_probe(0.5, 1, 1e3, 0.0);
    CHECK(net.base().resistance == doctest::Approx(1e3));
    CHECK(net.base().capacitance == 0.0);
  }
  SUBCASE("round trip over random targets") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ratio(1e-6, 0.999);
    std::uniform_int_distribution<int> stages(1, 12);
    for (int trial = 0; trial < 500; ++trial) {
      const double k = ratio(rng);
      const auto net = design_probe(k, static_cast<std::size_t>(stages(rng)), oracle::log_uniform(rng, 1e3, 1e8),
                                    oracle::log_uniform(rng, 1e-13, 1e-9));
      CHECK(std::abs(dc_attenuation(net) - k) <= 1e-12 * k);
      CHECK(net.is_uniform());
    }
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(design_probe(1.0, 5, 1e7, 1e-12), DomainError);
    CHECK_THROWS_AS(design_probe(0.0, 5, 1e7, 1e-12), DomainError);
    CHECK_THROWS_AS(design_probe(-0.2, 5, 1e7, 1e-12), DomainError);
    CHECK_THROWS_AS(design_probe(0.1, 0, 1e7, 1e-12), DomainError);
    CHECK_THROWS_AS(design_probe(0.1, 2, -1.0, 1e-12), DomainError);
  }
}

TEST_CASE("compensated networks are flat") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> ratio(1e-4, 0.9);
  std::uniform_int_distribution<int> stages(1, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const auto designed = design_probe(ratio(rng), static_cast<std::size_t>(stages(rng)),
                                       oracle::log_uniform(rng, 1e3, 1e8), oracle::log_uniform(rng, 1e-13, 1e-9));
    const auto sweep = bode_sweep(designed, 1.0, 1e7, 200, Spacing::Log);
    const double ref = sweep.front().magnitude();
    for (const auto& r : sweep) {
      CHECK(std::abs(r.magnitude() - ref) <= 1e-9 * ref);
      CHECK(std::abs(r.phase_rad()) <= 1e-9);
    }
  }
}

TEST_CASE("bode sweep") {
  SUBCASE("two points are the endpoints") {
    const auto sweep = bode_sweep(published_network(), 10.0, 1e6, 2);
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[0].frequency_hz == 10.0);
    CHECK(sweep[1].frequency_hz == 1e6);
  }
  SUBCASE("linear grid") {
    const auto sweep = bode_sweep(published_network(), 1.0, 5.0, 5, Spacing::Linear);
    REQUIRE(sweep.size() == 5);
    CHECK(sweep[2].frequency_hz == doctest::Approx(3.0));
  }
  SUBCASE("published network spread 1 Hz - 10 MHz") {
    // max/min magnitude frozen from a 40-digit sweep of Z0 / sum Zi.
    const auto sweep = bode_sweep(published_network(), 1.0, 1e7, 200);
    double lo = sweep.front().magnitude(), hi = lo;
    for (const auto& r : sweep) {
      lo = std::min(lo, r.magnitude());
      hi = std::max(hi, r.magnitude());
      CHECK(rel_diff(r.gain, oracle_gain(published_network(), r.frequency_hz)) <= 1e-12);
    }
    CHECK(hi / lo == doctest::Approx(1.0559408718310288).epsilon(1e-9));
  }
  SUBCASE("invalid grids") {
    CHECK_THROWS_AS(bode_sweep(published_network(), 0.0, 10.0, 5), DomainError);
    CHECK_THROWS_AS(bode_sweep(published_network(), 10.0, 10.0, 5), DomainError);
    CHECK_THROWS_AS(bode_sweep(published_network(), 1.0, 10.0, 1), DomainError);
  }
  SUBCASE("csv columns") {
    std::ostringstream out;
    write_bode_csv(out, bode_sweep(ProbeNetwork({1.0, 0.0}, {}), 1.0, 10.0, 2));
    CHECK(out.str() == "frequency_hz,magnitude,phase_rad,magnitude_db\n1,1,0,0\n10,1,0,0\n");
  }
}
