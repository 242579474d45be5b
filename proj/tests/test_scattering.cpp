#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "rectangular_reference.hpp"
#include "tunnelchrono/constants.hpp"
#include "tunnelchrono/numerics.hpp"
#include "tunnelchrono/potential.hpp"
#include "tunnelchrono/scattering.hpp"

using namespace tunnelchrono;

namespace {

potential::PotentialProfile random_profile(std::mt19937& rng, int max_segments = 4) {
  std::uniform_int_distribution<int> count(1, max_segments);
  std::uniform_real_distribution<double> height(-2.0, 5.0);
  std::uniform_real_distribution<double> width(0.5, 30.0);
  std::vector<potential::Segment> segments;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) segments.push_back({width(rng), height(rng)});
  return potential::PotentialProfile(std::move(segments));
}

double safe_energy(const potential::PotentialProfile& p, std::mt19937& rng) {
  std::uniform_real_distribution<double> energy(0.05, 6.0);
  for (;;) {
    const double e = energy(rng);
    bool clean = true;
    for (const auto& seg : p.segments()) {
      if (std::abs(e - seg.height) < 1e-6) clean = false;
    }
    if (clean) return e;
  }
}

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("free region transmits perfectly") {
  const auto p = potential::rectangular(0.0, 17.0);
  const auto sol = scattering::solve(p, 1.3);
  CHECK(std::abs(sol.t) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(sol.r) < 1e-13);
  // arg t = k L in the across-the-barrier convention
  const double expected_phase = wavenumber(1.3) * 17.0;
  const double wrapped = std::remainder(std::arg(sol.t) - expected_phase, 2.0 * M_PI);
  CHECK(std::abs(wrapped) < 1e-10);
}

TEST_CASE("potential step reflection amplitude is (k1-k2)/(k1+k2)") {
  // One segment at the right asymptotic level: the only discontinuity is the
  // entrance step.
  const double vs = 0.6;
  const double e = 1.4;
  const auto p = potential::PotentialProfile({{8.0, vs}}, 0.0, vs);
  const auto sol = scattering::solve(p, e);
  const double k1 = wavenumber(e);
  const double k2 = wavenumber(e - vs);
  CHECK(sol.r.real() == doctest::Approx((k1 - k2) / (k1 + k2)).epsilon(1e-12));
  CHECK(std::abs(sol.r.imag()) < 1e-12);
  // two-sided unitarity with distinct levels
  const double unitarity = std::norm(sol.r) + (k2 / k1) * std::norm(sol.t);
  CHECK(unitarity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rectangular barrier matches the closed form to 1e-10 up to kappa s = 30") {
  const double v0 = 1.8;
  for (double e : {0.2, 0.9, 1.5}) {
    const double kap = wavenumber(v0 - e);
    for (double kappa_s : {0.5, 3.0, 10.0, 20.0, 30.0}) {
      const double s = kappa_s / kap;
      const auto sol = scattering::solve(potential::rectangular(v0, s), e);
      const auto ref = rectref::amplitudes(v0, s, e);
      CHECK(std::abs(sol.t) == doctest::Approx(std::abs(ref.t)).epsilon(1e-10));
      CHECK(std::abs(sol.r) == doctest::Approx(std::abs(ref.r)).epsilon(1e-10));
      const double dphase = std::remainder(std::arg(sol.t) - std::arg(ref.t), 2.0 * M_PI);
      CHECK(std::abs(dphase) < 1e-10);
    }
  }
}

TEST_CASE("above-barrier rectangular case matches the closed form") {
  const double v0 = 0.7, s = 9.0;
  for (double e : {0.8, 1.4, 3.3}) {
    const auto sol = scattering::solve(potential::rectangular(v0, s), e);
    const auto ref = rectref::amplitudes(v0, s, e);
    CHECK(std::abs(sol.t - ref.t) < 1e-11);
    CHECK(std::abs(sol.r - ref.r) < 1e-11);
  }
}

TEST_CASE("unitarity across 1000 random profiles") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_profile(rng);
    const double e = safe_energy(p, rng);
    const auto sol = scattering::solve(p, e);
    const double unitarity = std::norm(sol.r) + (sol.k_right / sol.k_left) * std::norm(sol.t);
    CHECK(std::abs(unitarity - 1.0) < 1e-12);
  }
}

TEST_CASE("wavefunction and derivative are continuous at every interface") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_profile(rng, 5);
    const double e = safe_energy(p, rng);
    const auto sol = scattering::solve(p, e);
    double x = p.entrance();
    std::vector<double> interfaces{x};
    for (const auto& seg : p.segments()) interfaces.push_back(x += seg.width);
    for (double xi : interfaces) {
      const auto below = scattering::wavefunction(sol, p, xi - 1e-12);
      const auto above = scattering::wavefunction(sol, p, xi + 1e-12);
      const auto dbelow = scattering::wavefunction_derivative(sol, p, xi - 1e-12);
      const auto dabove = scattering::wavefunction_derivative(sol, p, xi + 1e-12);
      CHECK(std::abs(below - above) < 1e-10);
      CHECK(std::abs(dbelow - dabove) < 1e-9);
    }
  }
}

TEST_CASE("reciprocity: reversing the segment order leaves t unchanged") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_profile(rng, 5);
    const double e = safe_energy(p, rng);
    auto reversed_segments = p.segments();
    std::reverse(reversed_segments.begin(), reversed_segments.end());
    const potential::PotentialProfile mirrored(std::move(reversed_segments));
    const auto sol = scattering::solve(p, e);
    const auto mirror_sol = scattering::solve(mirrored, e);
    CHECK(std::abs(sol.t - mirror_sol.t) < 1e-12 * std::max(1.0, std::abs(sol.t)));
  }
}

TEST_CASE("density_integral equals the free length for zero potential") {
  const auto p = potential::rectangular(0.0, 23.0);
  const auto sol = scattering::solve(p, 0.8);
  CHECK(scattering::density_integral(sol, p) == doctest::Approx(23.0).epsilon(1e-12));
}

TEST_CASE("density_integral matches the rectangular closed-form dwell numerator") {
  const double v0 = 1.8, s = 20.8, e = 0.9;
  const auto p = potential::rectangular(v0, s);
  const auto sol = scattering::solve(p, e);
  const double numerator = scattering::density_integral(sol, p);
  const double expected = rectref::dwell_time(v0, s, e) * scattering::incident_flux(sol);
  CHECK(numerator == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("density_integral agrees with adaptive quadrature of |Psi|^2") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    std::uniform_real_distribution<double> height(-1.0, 3.0);
    std::uniform_real_distribution<double> width(1.0, 12.0);
    const potential::PotentialProfile p(
        {{width(rng), height(rng)}, {width(rng), height(rng)}, {width(rng), height(rng)}});
    const double e = safe_energy(p, rng);
    const auto sol = scattering::solve(p, e);
    const double exact = scattering::density_integral(sol, p);
    const double quad = numerics::integrate(
        [&](double x) { return std::norm(scattering::wavefunction(sol, p, x)); }, p.entrance(),
        p.exit(), 1e-11);
    CHECK(quad == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("incident flux follows hbar k / m") {
  const auto p = potential::rectangular(1.0, 5.0);
  const auto one_ev = scattering::solve(p, 0.99999);
  // reference values at E = 1 eV: k = 0.5123 1/A, j = 5.931 A/fs
  const auto exact = scattering::solve(potential::rectangular(3.0, 5.0), 1.0);
  CHECK(exact.k_left == doctest::Approx(0.51232).epsilon(1e-4));
  CHECK(scattering::incident_flux(exact) == doctest::Approx(5.9309).epsilon(1e-4));
  const auto doubled = scattering::solve(potential::rectangular(3.0, 5.0), 2.0);
  CHECK(scattering::incident_flux(doubled) / scattering::incident_flux(exact) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(scattering::incident_flux(one_ev) > 0.0);
}

TEST_CASE("discretized smooth bump transmission self-converges") {
  auto bump = [](double x) { return 1.6 * std::exp(-x * x / 18.0); };
  const double e = 0.75;
  auto transmission = [&](int n) {
    const auto p = potential::discretize(bump, -15.0, 15.0, n);
    return std::norm(scattering::solve(p, e).t);
  };
  const double coarse = transmission(512);
  const double fine = transmission(1024);
  CHECK(std::abs(fine - coarse) < 1e-6);
}

TEST_CASE("error paths: closed channels, degenerate heights, mismatched pairs") {
  const auto p = potential::rectangular(1.0, 4.0);
  CHECK_THROWS_AS(scattering::solve(p, -0.2), scattering::ClosedChannelError);
  CHECK_THROWS_AS(scattering::solve(p, 1.0), scattering::DegenerateSegmentError);
  const auto biased = potential::PotentialProfile({{4.0, 1.0}}, 0.0, 0.5);
  CHECK_THROWS_AS(scattering::solve(biased, 0.3), scattering::ClosedChannelError);

  const auto sol = scattering::solve(p, 0.6);
  const auto other = potential::rectangular(1.0, 5.0);
  CHECK_THROWS_AS(scattering::density_integral(sol, other), scattering::MismatchError);
}

}  // TEST_SUITE
