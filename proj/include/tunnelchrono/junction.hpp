#ifndef TUNNELCHRONO_JUNCTION_HPP
#define TUNNELCHRONO_JUNCTION_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tunnelchrono/numerics.hpp"

// Metal-insulator-metal junction pipeline: Simmons-model tunneling current
// for a rectangular barrier, barrier-parameter fitting from I-V data,
// Einstein-oscillator fitting of the gap's temperature dependence, and the
// electron dwell time extracted from the fitted barrier.
namespace tunnelchrono::junction {

// Bias at or above the barrier height: the high-field (Fowler-Nordheim)
// branch is out of scope.
class RegimeError : public std::domain_error {
 public:
  explicit RegimeError(const std::string& what) : std::domain_error(what) {}
};

struct JunctionModel {
  double width_s = 0.0;       // Angstrom
  double barrier_phi0 = 0.0;  // eV
  double temperature = 0.0;   // K
};

struct IvPoint {
  double voltage = 0.0;          // V
  double current_density = 0.0;  // A/cm^2
  double temperature = 0.0;      // K
};

struct IVDataset {
  std::vector<IvPoint> points;
  std::string source_label;
};

struct GapPoint {
  double temperature = 0.0;  // K
  double gap = 0.0;          // eV
};

struct GapDataset {
  std::vector<GapPoint> points;
};

struct GapModelParams {
  double gap0 = 0.0;        // eV at T = 0
  double coupling_s = 0.0;  // dimensionless
  double omega = 0.0;       // average phonon frequency, 1/s
};

// Intermediate-voltage Simmons current density, A/cm^2, for s in Angstrom
// and phi0 in eV:
//   J = (C1/s^2) [phibar e^{-C2 s sqrt(phibar)} - (phibar+V) e^{-C2 s sqrt(phibar+V)}]
// with phibar = phi0 - V/2, C2 = 2 sqrt(2m)/hbar ~ 1.0246 /(A sqrt(eV)) and
// C1 = e^2 1e16/(2 pi h) ~ 6.166e10 A eV^-1 A^2/cm^2. Odd in V by
// construction; requires |V| < phi0.
double simmons_j(double voltage, double width_s, double phi0);

// Simmons dataset with multiplicative Gaussian noise of relative scale
// noise_rel, deterministic per seed across platforms.
IVDataset synth_iv(const JunctionModel& model, std::span<const double> voltages,
                   double noise_rel, std::uint64_t seed);

struct IvGroupFit {
  double temperature = 0.0;
  JunctionModel model;
  numerics::FitResult fit;
};

// Fits (s, phi0) per temperature group with relative residuals (tunneling
// currents span decades). No constraint ties s across groups; the constant-s
// finding is an empirical outcome, not an input.
std::vector<IvGroupFit> fit_iv(const IVDataset& data, const JunctionModel& initial);

// Einstein-oscillator gap model:
//   E_g(T) = gap0 - S hbar omega [coth(hbar omega/(2 k_B T)) - 1]
double gap_model(double temperature, const GapModelParams& p);

std::pair<GapModelParams, numerics::FitResult> fit_gap(const GapDataset& data,
                                                       const GapModelParams& initial);

// Dwell time of an electron at E = energy_fraction * phi0 in the rectangular
// barrier (phi0, s), in seconds.
double extract_dwell_seconds(const JunctionModel& model, double energy_fraction);

// CSV formats. IV: `voltage_v,current_density_a_per_cm2,temperature_k`;
// gap: `temperature_k,gap_ev`. `#` comments allowed.
IVDataset read_iv_csv(std::istream& in);
void write_iv_csv(std::ostream& out, const IVDataset& data);
GapDataset read_gap_csv(std::istream& in);
void write_gap_csv(std::ostream& out, const GapDataset& data);

}  // namespace tunnelchrono::junction

#endif
