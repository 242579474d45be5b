#ifndef TUNNELCHRONO_PARTIALWAVE_HPP
#define TUNNELCHRONO_PARTIALWAVE_HPP

#include <iosfwd>
#include <stdexcept>

// Partial-wave scattering off a spherical square well or barrier: phase
// shifts, Wigner delay, the single-channel Smith lifetime, and a
// box-quantization cross-check of the density-of-states relation
//   sum_l [n_l(E) - n_l^0(E)] = sum_l (2l+1)/pi d(delta_l)/dE.
namespace tunnelchrono::partialwave {

inline constexpr int kMaxPartialWave = 25;

class PartialWaveCapError : public std::invalid_argument {
 public:
  explicit PartialWaveCapError(const std::string& what) : std::invalid_argument(what) {}
};

class LevelCountError : public std::invalid_argument {
 public:
  explicit LevelCountError(const std::string& what) : std::invalid_argument(what) {}
};

struct SphericalWell {
  double strength = 0.0;  // eV; negative = attractive well, positive = barrier
  double radius = 0.0;    // Angstrom, > 0
};

// delta_l(E) in radians, continuous in E by branch tracking from just above
// threshold (no Levinson bound-state offset is applied; the value near E -> 0
// starts on the principal branch of the matching formula).
double phase_shift(const SphericalWell& w, int l, double energy_ev);

// hbar d(delta_l)/dE, femtoseconds.
double wigner_delay(const SphericalWell& w, int l, double energy_ev);

// Single-channel lifetime 2 hbar d(delta_0)/dE in the positive-lifetime
// convention, femtoseconds.
double smith_lifetime(const SphericalWell& w, double energy_ev);

struct DosComparison {
  double energy = 0.0;  // eV, start of the counting window
  // sum_l (2l+1)/pi d(delta_l)/dE averaged over the window [E, E+dE], the
  // same window the counted side integrates
  double smooth_states_per_ev = 0.0;
  double counted_states_per_ev = 0.0;  // box-quantization level-count difference / dE
  double box_radius = 0.0;             // Angstrom
  int l_max = 0;
};

// Compares the phase-shift (smooth) side against brute-force counting of
// hard-wall box levels with and without the well over the window [E, E+dE].
// Requires box_radius >= 20x the well radius and enough free levels in the
// window (>= 30 summed over partial waves) for stable counting.
DosComparison beth_uhlenbeck_check(const SphericalWell& w, double energy_ev, double de,
                                   double box_radius, int l_max);

// CSV: `energy_ev,smooth_states_per_ev,counted_states_per_ev,relative_gap`.
void write_dos_csv(std::ostream& out, const DosComparison& c);
DosComparison read_dos_csv(std::istream& in, double box_radius, int l_max);

}  // namespace tunnelchrono::partialwave

#endif
