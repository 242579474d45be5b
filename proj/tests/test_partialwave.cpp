#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "tunnelchrono/constants.hpp"
#include "tunnelchrono/numerics.hpp"
#include "tunnelchrono/partialwave.hpp"

using namespace tunnelchrono;

namespace {

// Standard textbook s-wave expression for an attractive square well,
// independent of the library's matching route.
double textbook_s_wave_tan(const partialwave::SphericalWell& w, double e) {
  const double k = wavenumber(e);
  const double kp = wavenumber(e - w.strength);
  const double a = w.radius;
  return (k * std::tan(kp * a) - kp * std::tan(k * a)) /
         (kp + k * std::tan(kp * a) * std::tan(k * a));
}

}  // namespace

TEST_SUITE("partialwave") {

TEST_CASE("zero strength gives zero phase shift, delay and lifetime") {
  const partialwave::SphericalWell free_well{0.0, 5.0};
  for (int l = 0; l <= 4; ++l) {
    CHECK(partialwave::phase_shift(free_well, l, 1.0) == 0.0);
    CHECK(partialwave::wigner_delay(free_well, l, 1.0) == 0.0);
  }
  CHECK(partialwave::smith_lifetime(free_well, 2.5) == 0.0);
}

TEST_CASE("s-wave phase shift matches the textbook closed form") {
  const partialwave::SphericalWell well{-2.0, 5.0};
  for (double e : {0.11, 0.43, 0.97, 1.9, 3.7}) {
    const double delta = partialwave::phase_shift(well, 0, e);
    const double expected_tan = textbook_s_wave_tan(well, e);
    CHECK(std::tan(delta) == doctest::Approx(expected_tan).epsilon(1e-8));
  }
}

TEST_CASE("strong spherical barrier approaches the hard-sphere limit") {
  // the finite-barrier correction is arctan(k/kappa) ~ sqrt(E/strength); at
  // strength = 100 E that is 0.1 rad, so k a must exceed ~10 rad for 1%
  const double e = 0.4;
  const partialwave::SphericalWell wall{100.0 * e, 50.0};
  const double delta = partialwave::phase_shift(wall, 0, e);
  const double hard = -wavenumber(e) * wall.radius;
  const double diff = std::remainder(delta - hard, std::numbers::pi);
  CHECK(std::abs(diff) < 0.01 * std::abs(hard));
}

TEST_CASE("phase shifts fade at high energy") {
  const partialwave::SphericalWell weak{-0.5, 1.2};
  const double e = 50.0 * std::abs(weak.strength);
  for (int l = 0; l <= 4; ++l) {
    const double delta = std::remainder(partialwave::phase_shift(weak, l, e), std::numbers::pi);
    CHECK(std::abs(delta) < 0.05);
  }
}

TEST_CASE("wigner delay integrates back to the phase difference") {
  const partialwave::SphericalWell well{-1.5, 4.0};
  for (int l : {0, 1}) {
    const double e1 = 0.4, e2 = 1.3;
    const double integral = numerics::integrate(
        [&](double e) { return partialwave::wigner_delay(well, l, e) / kHbar; }, e1, e2, 1e-8);
    const double diff = partialwave::phase_shift(well, l, e2) - partialwave::phase_shift(well, l, e1);
    CHECK(integral == doctest::Approx(diff).epsilon(1e-5));
  }
}

TEST_CASE("wigner delay agrees with a 10x finer finite difference") {
  const partialwave::SphericalWell well{-1.5, 4.0};
  const double e = 0.8;
  const double delay = partialwave::wigner_delay(well, 0, e);
  const double h = 1e-5 * e;
  const double fine = kHbar *
                      (partialwave::phase_shift(well, 0, e + h) -
                       partialwave::phase_shift(well, 0, e - h)) /
                      (2.0 * h);
  CHECK(delay == doctest::Approx(fine).epsilon(1e-5));
}

TEST_CASE("smith lifetime is exactly twice the s-wave wigner delay") {
  const partialwave::SphericalWell well{-2.0, 5.0};
  for (double e : {0.3, 0.9, 2.2}) {
    CHECK(partialwave::smith_lifetime(well, e) ==
          doctest::Approx(2.0 * partialwave::wigner_delay(well, 0, e)).epsilon(1e-14));
  }
}

TEST_CASE("centrifugally confined resonance follows the Breit-Wigner shape") {
  // The well depth/radius put a quasi-bound l = 2 state well below the top
  // of the centrifugal barrier (roughly 2.1 eV here), giving a sharp
  // resonance near 0.30 eV with Gamma ~ 0.04 eV. The plain square well has
  // no sharp s-wave resonance, so the lifetime oracle lives here.
  const partialwave::SphericalWell well{-8.0, 3.0};
  const int l = 2;

  // locate the delay peak by scanning, then polishing
  double e_peak = 0.0, peak = -1.0;
  for (int i = 0; i < 400; ++i) {
    const double e = 0.05 + (0.6 - 0.05) * i / 399.0;
    const double d = partialwave::wigner_delay(well, l, e);
    if (d > peak) {
      peak = d;
      e_peak = e;
    }
  }
  CHECK(peak > 10.0);  // sharp: far above the potential-free crossing scale
  REQUIRE(peak > 0.0);
  for (int refine = 0; refine < 40; ++refine) {
    const double step = 0.002 * std::pow(0.8, refine);
    for (double e : {e_peak - step, e_peak + step}) {
      const double d = partialwave::wigner_delay(well, l, e);
      if (d > peak) {
        peak = d;
        e_peak = e;
      }
    }
  }

  // Breit-Wigner fit of delta_l(E) around the peak:
  //   delta(E) = bg0 + bg1 (E - E_r) + atan((E - E_r)/(Gamma/2))
  const double gamma_guess = 2.0 * kHbar / peak;
  std::vector<numerics::FitPoint> data;
  for (int i = -30; i <= 30; ++i) {
    const double e = e_peak + 3.0 * gamma_guess * i / 30.0;
    if (e <= 0.0) continue;
    data.push_back({e, partialwave::phase_shift(well, l, e), 1.0});
  }
  auto model = [](const Eigen::VectorXd& p, double e) {
    return p[2] + p[3] * (e - p[0]) + std::atan((e - p[0]) / (0.5 * p[1]));
  };
  Eigen::VectorXd start(4);
  start << e_peak, gamma_guess, partialwave::phase_shift(well, l, e_peak) - 0.5 * std::numbers::pi,
      0.0;
  const auto fit = numerics::fit_curve(model, start, data);
  REQUIRE(fit.converged);
  const double gamma = fit.params[1];
  CHECK(fit.params[0] == doctest::Approx(e_peak).epsilon(0.05));
  // peak height ~ 2 hbar / Gamma on top of a smooth background
  CHECK(peak == doctest::Approx(2.0 * kHbar / gamma).epsilon(0.10));
}

TEST_CASE("find_root pins box levels of the s-wave level equation") {
  // k R + delta_0(k) = n pi, solved with the generic root finder and
  // verified by substitution
  const partialwave::SphericalWell well{-2.0, 5.0};
  const double box = 500.0;
  auto theta = [&](double k) {
    const double e = (kHbar * k) * (kHbar * k) / (2.0 * kElectronMass);
    return k * box + partialwave::phase_shift(well, 0, e);
  };
  const double k_lo = wavenumber(1.0);
  const double k_hi = k_lo + 1.5 * std::numbers::pi / box;
  const int n = static_cast<int>(std::floor(theta(k_lo) / std::numbers::pi)) + 1;
  const double k_n = numerics::find_root(
      [&](double k) { return theta(k) - n * std::numbers::pi; }, k_lo, k_hi, 1e-12);
  CHECK(k_n > k_lo);
  CHECK(k_n < k_hi);
  CHECK(std::abs(theta(k_n) - n * std::numbers::pi) < 1e-7);
}

TEST_CASE("beth_uhlenbeck_check is exactly balanced for zero strength") {
  const partialwave::SphericalWell free_well{0.0, 5.0};
  const auto result = partialwave::beth_uhlenbeck_check(free_well, 1.0, 1.0, 500.0, 4);
  CHECK(std::abs(result.smooth_states_per_ev) < 1e-12);
  CHECK(std::abs(result.counted_states_per_ev) < 1e-12);
}

TEST_CASE("beth_uhlenbeck_check matches level counting for an attractive well") {
  const partialwave::SphericalWell well{-2.0, 5.0};
  const auto result = partialwave::beth_uhlenbeck_check(well, 1.0, 0.35, 500.0, 4);
  REQUIRE(std::abs(result.smooth_states_per_ev) > 1e-3);
  const double gap = std::abs(result.smooth_states_per_ev - result.counted_states_per_ev) /
                     std::abs(result.smooth_states_per_ev);
  CHECK(gap < 0.02);

  // twice the box with half the window: the discrepancy bound halves
  const auto larger = partialwave::beth_uhlenbeck_check(well, 1.0, 0.175, 1000.0, 4);
  const double gap_large = std::abs(larger.smooth_states_per_ev - larger.counted_states_per_ev) /
                           std::abs(larger.smooth_states_per_ev);
  CHECK(gap_large < 0.01);
}

TEST_CASE("beth_uhlenbeck_check validates box size and level count") {
  const partialwave::SphericalWell well{-2.0, 5.0};
  CHECK_THROWS_AS(partialwave::beth_uhlenbeck_check(well, 1.0, 1.0, 60.0, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(partialwave::beth_uhlenbeck_check(well, 1.0, 1e-4, 500.0, 4),
                  partialwave::LevelCountError);
}

TEST_CASE("partial-wave cap and input validation") {
  const partialwave::SphericalWell well{-2.0, 5.0};
  CHECK_THROWS_AS(partialwave::phase_shift(well, partialwave::kMaxPartialWave + 1, 1.0),
                  partialwave::PartialWaveCapError);
  CHECK_THROWS_AS(partialwave::phase_shift(well, 0, -1.0), std::invalid_argument);
  // interior-wavenumber degeneracy on a barrier: E == strength
  CHECK_THROWS_AS(partialwave::phase_shift({2.0, 5.0}, 0, 2.0), std::domain_error);
  CHECK_THROWS_AS(partialwave::phase_shift({1.0, -3.0}, 0, 1.0), std::invalid_argument);
}

TEST_CASE("DOS CSV round-trips") {
  const partialwave::SphericalWell well{-2.0, 5.0};
  const auto result = partialwave::beth_uhlenbeck_check(well, 1.0, 0.5, 500.0, 2);
  std::ostringstream out;
  partialwave::write_dos_csv(out, result);
  std::istringstream in(out.str());
  const auto back = partialwave::read_dos_csv(in, result.box_radius, result.l_max);
  CHECK(back.energy == doctest::Approx(result.energy).epsilon(1e-11));
  CHECK(back.smooth_states_per_ev ==
        doctest::Approx(result.smooth_states_per_ev).epsilon(1e-10));
  CHECK(back.counted_states_per_ev ==
        doctest::Approx(result.counted_states_per_ev).epsilon(1e-10));
}

}  // TEST_SUITE
