#ifndef TUNNELCHRONO_TIMES_HPP
#define TUNNELCHRONO_TIMES_HPP

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "tunnelchrono/potential.hpp"

// The six stationary tunneling-time definitions for profiles with equal
// asymptotic levels, all in femtoseconds:
//   tau_dwell         integrated density over the barrier / incident flux
//   tau_phase         hbar d(arg t)/dE, group delay across the barrier
//   tau_interference  -hbar (Im r / k) dk/dE, front-of-barrier interference
//   tau_bl            -hbar d(ln|t|)/dV under a uniform barrier shift
//   tau_pm            +hbar d(ln|t|)/dE
//   tau_larmor_y      -hbar d(arg t)/dV, weak-field spin precession limit
// The exact relation tau_phase = tau_dwell + tau_interference holds for every
// profile up to differentiation error.
namespace tunnelchrono::times {

class PhaseUnwrapError : public std::runtime_error {
 public:
  explicit PhaseUnwrapError(const std::string& what) : std::runtime_error(what) {}
};

struct TimeSuite {
  double energy = 0.0;  // eV
  double tau_phase = 0.0;
  double tau_dwell = 0.0;
  double tau_interference = 0.0;
  double tau_bl = 0.0;
  double tau_pm = 0.0;
  double tau_larmor_y = 0.0;
};

double dwell_time(const potential::PotentialProfile& p, double energy_ev);
double phase_time(const potential::PotentialProfile& p, double energy_ev);
double self_interference_time(const potential::PotentialProfile& p, double energy_ev);
double buettiker_landauer_time(const potential::PotentialProfile& p, double energy_ev);
double pollak_miller_time(const potential::PotentialProfile& p, double energy_ev);
double larmor_time_y(const potential::PotentialProfile& p, double energy_ev);

TimeSuite time_suite(const potential::PotentialProfile& p, double energy_ev);

struct HartmanRow {
  double width = 0.0;  // Angstrom
  double tau_phase = 0.0;
  double tau_dwell = 0.0;
};

// Phase and dwell times of rectangular(v0, width) at fixed E for each width.
// In the opaque regime the phase time saturates with width (Hartman effect).
std::vector<HartmanRow> hartman_sweep(double v0_ev, double energy_ev,
                                      std::span<const double> widths);

// Sweep CSV: `energy_ev,tau_phase_fs,tau_dwell_fs,tau_interference_fs,
// tau_bl_fs,tau_pm_fs,tau_larmor_fs`, 12 significant digits.
void write_sweep_csv(std::ostream& out, std::span<const TimeSuite> rows);
std::vector<TimeSuite> read_sweep_csv(std::istream& in);

void write_hartman_csv(std::ostream& out, std::span<const HartmanRow> rows);
std::vector<HartmanRow> read_hartman_csv(std::istream& in);

}  // namespace tunnelchrono::times

#endif
