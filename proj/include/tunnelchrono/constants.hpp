#ifndef TUNNELCHRONO_CONSTANTS_HPP
#define TUNNELCHRONO_CONSTANTS_HPP

#include <cmath>

// Internal unit system: energies in eV, lengths in Angstrom, times in fs.
// Electron-scale barriers then keep every quantity O(1)-O(100).
namespace tunnelchrono {

inline constexpr double kHbar = 0.6582119569;        // eV fs
inline constexpr double kElectronMass = 0.05685630;  // eV fs^2/A^2 = (m_e c^2)/c^2, c = 2997.92458 A/fs
inline constexpr double kBoltzmann = 8.617333e-5;    // eV/K
inline constexpr double kHbarEvS = 6.582119569e-16;  // eV s, for quantities quoted per second
inline constexpr double kFsToSeconds = 1e-15;

// k = sqrt(2 m E)/hbar for kinetic energy E (eV) above the local potential level.
inline double wavenumber(double kinetic_energy_ev) {
  return std::sqrt(2.0 * kElectronMass * kinetic_energy_ev) / kHbar;
}

// dk/dE = m/(hbar^2 k)
inline double wavenumber_energy_slope(double k) {
  return kElectronMass / (kHbar * kHbar * k);
}

}  // namespace tunnelchrono

#endif
