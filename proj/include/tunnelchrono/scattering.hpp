#ifndef TUNNELCHRONO_SCATTERING_HPP
#define TUNNELCHRONO_SCATTERING_HPP

#include <complex>
#include <stdexcept>
#include <vector>

#include "tunnelchrono/potential.hpp"

// Exact transfer-matrix solution of the stationary 1D Schroedinger equation
// on a PotentialProfile. Conventions: unit amplitude incident from the left,
//   x < x1:  e^{i k_l (x-x1)} + r e^{-i k_l (x-x1)}
//   x > x2:  t e^{i k_r (x-x2)}
// so r is referenced at the barrier entrance and arg t is the phase
// accumulated across the barrier.
namespace tunnelchrono::scattering {

class ClosedChannelError : public std::domain_error {
 public:
  explicit ClosedChannelError(const std::string& what) : std::domain_error(what) {}
};

// E coincides with a segment height; the linear-solution segment is not
// implemented, callers perturb E by ~1e-9 eV instead.
class DegenerateSegmentError : public std::domain_error {
 public:
  explicit DegenerateSegmentError(const std::string& what) : std::domain_error(what) {}
};

class MismatchError : public std::invalid_argument {
 public:
  explicit MismatchError(const std::string& what) : std::invalid_argument(what) {}
};

// In-segment wavefunction, local coordinate xi in [0, width] from the
// segment's left edge:
//   open (E > height):       forward e^{+i k xi} + backward e^{-i k xi}
//   evanescent (E < height): forward e^{-kappa xi} + backward e^{-kappa (width-xi)}
// The evanescent pair is referenced from both edges so every stored
// coefficient stays bounded for arbitrarily thick barriers.
struct SegmentWave {
  std::complex<double> forward;
  std::complex<double> backward;
  double wavenumber = 0.0;  // k or kappa, 1/Angstrom
  double width = 0.0;       // Angstrom
  bool evanescent = false;
};

struct ScatteringSolution {
  double energy = 0.0;  // eV
  double k_left = 0.0;  // 1/Angstrom
  double k_right = 0.0;
  std::complex<double> r;
  std::complex<double> t;
  std::vector<SegmentWave> segment_coefficients;
};

ScatteringSolution solve(const potential::PotentialProfile& p, double energy_ev);

// Integral of |Psi|^2 over the barrier region [x1, x2] for unit incident
// amplitude, evaluated segment by segment in closed form. Angstrom.
double density_integral(const ScatteringSolution& sol, const potential::PotentialProfile& p);

// Incident probability current j = hbar k_left / m, Angstrom/fs.
double incident_flux(const ScatteringSolution& sol);

// Psi and dPsi/dx at any x (inside or outside the barrier), reconstructed
// from the stored coefficients.
std::complex<double> wavefunction(const ScatteringSolution& sol,
                                  const potential::PotentialProfile& p, double x);
std::complex<double> wavefunction_derivative(const ScatteringSolution& sol,
                                             const potential::PotentialProfile& p, double x);

}  // namespace tunnelchrono::scattering

#endif
