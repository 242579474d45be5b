#include "tunnelchrono/times.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <istream>
#include <numbers>
#include <ostream>

#include "tunnelchrono/constants.hpp"
#include "tunnelchrono/csvio.hpp"
#include "tunnelchrono/numerics.hpp"
#include "tunnelchrono/scattering.hpp"

namespace tunnelchrono::times {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_equal_levels(const potential::PotentialProfile& p) {
  if (std::abs(p.left_level() - p.right_level()) > 1e-12) {
    throw std::invalid_argument("times: requires equal asymptotic levels");
  }
}

double energy_step(double energy_ev) { return 1e-4 * std::max(energy_ev, 0.1); }

double barrier_step(const potential::PotentialProfile& p) {
  return 1e-4 * std::max(p.max_height(), 0.1);
}

// Richardson central difference of a phase-valued function, with 2*pi
// unwrapping across the five-point stencil. Throws if the phase still swings
// faster than pi/2 between neighbouring stencil points.
double phase_stencil(const std::function<double(double)>& phase, double x, double h) {
  std::array<double, 5> at{x - h, x - 0.5 * h, x, x + 0.5 * h, x + h};
  std::array<double, 5> value{};
  for (std::size_t i = 0; i < at.size(); ++i) {
    value[i] = phase(at[i]);
    if (!std::isfinite(value[i])) {
      throw numerics::EvaluationError("phase derivative: non-finite phase");
    }
    if (i > 0) {
      value[i] += kTwoPi * std::round((value[i - 1] - value[i]) / kTwoPi);
      if (std::abs(value[i] - value[i - 1]) > 0.5 * std::numbers::pi) {
        throw PhaseUnwrapError("phase varies too fast across the differentiation stencil");
      }
    }
  }
  const double coarse = (value[4] - value[0]) / (2.0 * h);
  const double fine = (value[3] - value[1]) / h;
  return (4.0 * fine - coarse) / 3.0;
}

// Starts from the module's default step and halves it until two successive
// Richardson estimates agree; narrow transmission resonances (group delays of
// picoseconds) need far smaller stencils than smooth energies. A stencil the
// unwrapper rejects as too coarse is likewise retried at half the step.
double phase_derivative(const std::function<double(double)>& phase, double x, double h) {
  double prev = 0.0;
  bool have_prev = false;
  for (int refine = 0; refine <= 14; ++refine) {
    double next;
    try {
      next = phase_stencil(phase, x, h);
    } catch (const PhaseUnwrapError&) {
      if (refine == 14) throw;
      h *= 0.5;
      have_prev = false;
      continue;
    }
    if (have_prev && std::abs(next - prev) <= 1e-7 * std::max(std::abs(next), 1e-3)) {
      return next;
    }
    prev = next;
    have_prev = true;
    h *= 0.5;
  }
  return prev;
}

double transmission_phase(const potential::PotentialProfile& p, double energy_ev) {
  return std::arg(scattering::solve(p, energy_ev).t);
}

double transmission_log_mag(const potential::PotentialProfile& p, double energy_ev) {
  return std::log(std::abs(scattering::solve(p, energy_ev).t));
}

}  // namespace

double dwell_time(const potential::PotentialProfile& p, double energy_ev) {
  require_equal_levels(p);
  const auto sol = scattering::solve(p, energy_ev);
  return scattering::density_integral(sol, p) / scattering::incident_flux(sol);
}

double phase_time(const potential::PotentialProfile& p, double energy_ev) {
  require_equal_levels(p);
  return kHbar * phase_derivative([&](double e) { return transmission_phase(p, e); },
                                  energy_ev, energy_step(energy_ev));
}

double self_interference_time(const potential::PotentialProfile& p, double energy_ev) {
  require_equal_levels(p);
  const auto sol = scattering::solve(p, energy_ev);
  // -hbar (Im r / k) dk/dE with dk/dE = m/(hbar^2 k)
  return -kElectronMass * sol.r.imag() / (kHbar * sol.k_left * sol.k_left);
}

double buettiker_landauer_time(const potential::PotentialProfile& p, double energy_ev) {
  require_equal_levels(p);
  return -kHbar * numerics::derivative(
                      [&](double dv) {
                        return transmission_log_mag(potential::shift_barrier(p, dv), energy_ev);
                      },
                      0.0, barrier_step(p));
}

double pollak_miller_time(const potential::PotentialProfile& p, double energy_ev) {
  require_equal_levels(p);
  return kHbar * numerics::derivative([&](double e) { return transmission_log_mag(p, e); },
                                      energy_ev, energy_step(energy_ev));
}

double larmor_time_y(const potential::PotentialProfile& p, double energy_ev) {
  require_equal_levels(p);
  return -kHbar * phase_derivative(
                      [&](double dv) {
                        return transmission_phase(potential::shift_barrier(p, dv), energy_ev);
                      },
                      0.0, barrier_step(p));
}

#ifndef NDEBUG
namespace {

bool mirror_symmetric(const potential::PotentialProfile& p) {
  const auto& segs = p.segments();
  for (std::size_t i = 0, j = segs.size(); i < j--; ++i) {
    if (std::abs(segs[i].width - segs[j].width) > 1e-12 ||
        std::abs(segs[i].height - segs[j].height) > 1e-12) {
      return false;
    }
  }
  return true;
}

}  // namespace
#endif

TimeSuite time_suite(const potential::PotentialProfile& p, double energy_ev) {
  TimeSuite suite;
  suite.energy = energy_ev;
  suite.tau_dwell = dwell_time(p, energy_ev);
  suite.tau_phase = phase_time(p, energy_ev);
  suite.tau_interference = self_interference_time(p, energy_ev);
  suite.tau_bl = buettiker_landauer_time(p, energy_ev);
  suite.tau_pm = pollak_miller_time(p, energy_ev);
  suite.tau_larmor_y = larmor_time_y(p, energy_ev);
#ifndef NDEBUG
  // The phase/dwell/interference identity holds for mirror-symmetric
  // profiles, where the reflection and transmission phases share an energy
  // derivative.
  if (mirror_symmetric(p)) {
    const double residual =
        std::abs(suite.tau_phase - suite.tau_dwell - suite.tau_interference);
    if (residual > 1e-5 * std::max(std::abs(suite.tau_phase), 0.01)) {
      throw std::logic_error("time_suite: phase/dwell identity violated");
    }
  }
#endif
  return suite;
}

std::vector<HartmanRow> hartman_sweep(double v0_ev, double energy_ev,
                                      std::span<const double> widths) {
  if (!(energy_ev > 0.0) || !(energy_ev < v0_ev)) {
    throw std::invalid_argument("hartman_sweep: requires 0 < E < V0");
  }
  std::vector<HartmanRow> rows;
  rows.reserve(widths.size());
  for (double w : widths) {
    const auto barrier = potential::rectangular(v0_ev, w);
    rows.push_back({w, phase_time(barrier, energy_ev), dwell_time(barrier, energy_ev)});
  }
  return rows;
}

namespace {
const char* kSweepHeader =
    "energy_ev,tau_phase_fs,tau_dwell_fs,tau_interference_fs,tau_bl_fs,tau_pm_fs,tau_larmor_fs";
const char* kHartmanHeader = "width_angstrom,tau_phase_fs,tau_dwell_fs";
}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const TimeSuite> rows) {
  out << kSweepHeader << '\n';
  for (const TimeSuite& s : rows) {
    csvio::write_row(out, {s.energy, s.tau_phase, s.tau_dwell, s.tau_interference, s.tau_bl,
                           s.tau_pm, s.tau_larmor_y});
  }
}

std::vector<TimeSuite> read_sweep_csv(std::istream& in) {
  std::vector<TimeSuite> out;
  for (const auto& row : csvio::read_numeric_csv(in, kSweepHeader, 7)) {
    out.push_back({row[0], row[1], row[2], row[3], row[4], row[5], row[6]});
  }
  return out;
}

void write_hartman_csv(std::ostream& out, std::span<const HartmanRow> rows) {
  out << kHartmanHeader << '\n';
  for (const HartmanRow& r : rows) csvio::write_row(out, {r.width, r.tau_phase, r.tau_dwell});
}

std::vector<HartmanRow> read_hartman_csv(std::istream& in) {
  std::vector<HartmanRow> out;
  for (const auto& row : csvio::read_numeric_csv(in, kHartmanHeader, 3)) {
    out.push_back({row[0], row[1], row[2]});
  }
  return out;
}

}  // namespace tunnelchrono::times
