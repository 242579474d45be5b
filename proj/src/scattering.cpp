#include "tunnelchrono/scattering.hpp"

#include <cmath>
#include <string>

#include "tunnelchrono/constants.hpp"

namespace tunnelchrono::scattering {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};
constexpr double kDegenerateTolEv = 1e-12;

// (Psi, Psi') state with a split-off log magnitude so evanescent growth never
// overflows: actual state = e^{log_scale} * (v0, v1).
struct ScaledState {
  Complex v0, v1;
  double log_scale = 0.0;

  void renormalize() {
    const double m = std::max(std::abs(v0), std::abs(v1));
    if (m > 0.0) {
      v0 /= m;
      v1 /= m;
      log_scale += std::log(m);
    }
  }
};

}  // namespace

ScatteringSolution solve(const potential::PotentialProfile& p, double energy_ev) {
  const double vl = p.left_level();
  const double vr = p.right_level();
  if (!(energy_ev > vl) || !(energy_ev > vr)) {
    throw ClosedChannelError("solve: E = " + std::to_string(energy_ev) +
                             " eV does not open both asymptotic channels");
  }
  const auto& segments = p.segments();
  for (const auto& s : segments) {
    if (std::abs(energy_ev - s.height) <= kDegenerateTolEv) {
      throw DegenerateSegmentError("solve: E coincides with a segment height (" +
                                   std::to_string(s.height) +
                                   " eV); perturb E by ~1e-9 eV");
    }
  }

  ScatteringSolution sol;
  sol.energy = energy_ev;
  sol.k_left = wavenumber(energy_ev - vl);
  sol.k_right = wavenumber(energy_ev - vr);

  const int n = static_cast<int>(segments.size());
  // Backward sweep from the transmitted side with a unit outgoing wave.
  // Growth toward the left tracks the physical solution, so the recursion
  // never cancels; per-segment rescaling keeps everything representable.
  std::vector<ScaledState> right_edge(static_cast<std::size_t>(n));
  ScaledState state{Complex{1.0, 0.0}, kI * sol.k_right, 0.0};
  for (int j = n - 1; j >= 0; --j) {
    right_edge[static_cast<std::size_t>(j)] = state;
    const double w = segments[static_cast<std::size_t>(j)].width;
    const double de = energy_ev - segments[static_cast<std::size_t>(j)].height;
    if (de > 0.0) {
      const double k = wavenumber(de);
      const double c = std::cos(k * w);
      const double s = std::sin(k * w);
      const Complex nv0 = c * state.v0 - (s / k) * state.v1;
      const Complex nv1 = k * s * state.v0 + c * state.v1;
      state.v0 = nv0;
      state.v1 = nv1;
    } else {
      const double kap = wavenumber(-de);
      const double u = std::exp(-kap * w);
      const double ch = 0.5 * (1.0 + u * u);  // e^{-kap w} cosh(kap w)
      const double sh = 0.5 * (1.0 - u * u);  // e^{-kap w} sinh(kap w)
      const Complex nv0 = ch * state.v0 - (sh / kap) * state.v1;
      const Complex nv1 = -kap * sh * state.v0 + ch * state.v1;
      state.v0 = nv0;
      state.v1 = nv1;
      state.log_scale += kap * w;
    }
    state.renormalize();
  }

  // Match to 1 + r, ik_l (1 - r) at the entrance.
  const Complex denom = kI * sol.k_left * state.v0 + state.v1;
  const Complex t_unit = 2.0 * kI * sol.k_left / denom;  // before the e^{-log_scale} factor
  sol.t = t_unit * std::exp(-state.log_scale);
  sol.r = (kI * sol.k_left * state.v0 - state.v1) / denom;

  // Per-segment coefficients for the actual (unit-incidence) solution. The
  // combined exponent stays <= O(1): it is minus the evanescent weight of
  // everything left of the segment.
  sol.segment_coefficients.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const ScaledState& edge = right_edge[static_cast<std::size_t>(j)];
    const double w = segments[static_cast<std::size_t>(j)].width;
    const double de = energy_ev - segments[static_cast<std::size_t>(j)].height;
    SegmentWave& out = sol.segment_coefficients[static_cast<std::size_t>(j)];
    out.width = w;
    const Complex scale = t_unit * std::exp(edge.log_scale - state.log_scale);
    if (de > 0.0) {
      const double k = wavenumber(de);
      const Complex psi = edge.v0;
      const Complex dpsi = edge.v1;
      out.evanescent = false;
      out.wavenumber = k;
      out.forward = scale * std::exp(-kI * (k * w)) * 0.5 * (psi + dpsi / (kI * k));
      out.backward = scale * std::exp(kI * (k * w)) * 0.5 * (psi - dpsi / (kI * k));
    } else {
      const double kap = wavenumber(-de);
      const Complex psi = edge.v0;
      const Complex dpsi = edge.v1;
      out.evanescent = true;
      out.wavenumber = kap;
      // forward multiplies e^{-kap xi}: extract with the e^{+kap w} folded
      // into the exponent so nothing overflows.
      out.forward = t_unit * std::exp(edge.log_scale + kap * w - state.log_scale) * 0.5 *
                    (psi - dpsi / kap);
      out.backward = scale * 0.5 * (psi + dpsi / kap);
    }
  }
  return sol;
}

namespace {

void check_pair(const ScatteringSolution& sol, const potential::PotentialProfile& p) {
  const auto& segments = p.segments();
  if (sol.segment_coefficients.size() != segments.size()) {
    throw MismatchError("solution does not belong to this profile (segment count differs)");
  }
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const auto& cw = sol.segment_coefficients[j];
    const double de = sol.energy - segments[j].height;
    const double expected = wavenumber(std::abs(de));
    const bool evanescent = de < 0.0;
    if (cw.evanescent != evanescent || std::abs(cw.wavenumber - expected) > 1e-9 ||
        std::abs(cw.width - segments[j].width) > 1e-9) {
      throw MismatchError("solution does not belong to this profile (segment mismatch)");
    }
  }
}

}  // namespace

double density_integral(const ScatteringSolution& sol, const potential::PotentialProfile& p) {
  check_pair(sol, p);
  double total = 0.0;
  for (const SegmentWave& cw : sol.segment_coefficients) {
    const double w = cw.width;
    const double a2 = std::norm(cw.forward);
    const double b2 = std::norm(cw.backward);
    const Complex cross = cw.forward * std::conj(cw.backward);
    if (cw.evanescent) {
      const double kap = cw.wavenumber;
      const double u = std::exp(-kap * w);
      // |Psi|^2 = a^2 e^{-2 kap xi} + b^2 e^{-2 kap (w-xi)} + 2 Re(a b*) e^{-kap w}
      total += (a2 + b2) * (1.0 - u * u) / (2.0 * kap) + 2.0 * cross.real() * u * w;
    } else {
      const double k = cw.wavenumber;
      // |Psi|^2 = a^2 + b^2 + 2 Re(a b* e^{2 i k xi})
      const Complex osc = (std::exp(2.0 * kI * (k * w)) - 1.0) / (2.0 * kI * k);
      total += (a2 + b2) * w + 2.0 * (cross * osc).real();
    }
  }
  return total;
}

double incident_flux(const ScatteringSolution& sol) {
  return kHbar * sol.k_left / kElectronMass;
}

namespace {

// Locate x: segment index, or -1 (left region) / n (right region).
int locate(const potential::PotentialProfile& p, double x, double* xi) {
  const auto& segments = p.segments();
  if (x < p.entrance()) {
    *xi = x - p.entrance();
    return -1;
  }
  if (x > p.exit()) {
    *xi = x - p.exit();
    return static_cast<int>(segments.size());
  }
  double left = p.entrance();
  for (std::size_t j = 0; j + 1 < segments.size(); ++j) {
    if (x <= left + segments[j].width) {
      *xi = x - left;
      return static_cast<int>(j);
    }
    left += segments[j].width;
  }
  *xi = x - left;
  return static_cast<int>(segments.size()) - 1;
}

}  // namespace

std::complex<double> wavefunction(const ScatteringSolution& sol,
                                  const potential::PotentialProfile& p, double x) {
  check_pair(sol, p);
  double xi = 0.0;
  const int j = locate(p, x, &xi);
  if (j < 0) {
    return std::exp(kI * (sol.k_left * xi)) + sol.r * std::exp(-kI * (sol.k_left * xi));
  }
  if (j >= static_cast<int>(sol.segment_coefficients.size())) {
    return sol.t * std::exp(kI * (sol.k_right * xi));
  }
  const SegmentWave& cw = sol.segment_coefficients[static_cast<std::size_t>(j)];
  if (cw.evanescent) {
    return cw.forward * std::exp(-cw.wavenumber * xi) +
           cw.backward * std::exp(-cw.wavenumber * (cw.width - xi));
  }
  return cw.forward * std::exp(kI * (cw.wavenumber * xi)) +
         cw.backward * std::exp(-kI * (cw.wavenumber * xi));
}

std::complex<double> wavefunction_derivative(const ScatteringSolution& sol,
                                             const potential::PotentialProfile& p, double x) {
  check_pair(sol, p);
  double xi = 0.0;
  const int j = locate(p, x, &xi);
  if (j < 0) {
    return kI * sol.k_left *
           (std::exp(kI * (sol.k_left * xi)) - sol.r * std::exp(-kI * (sol.k_left * xi)));
  }
  if (j >= static_cast<int>(sol.segment_coefficients.size())) {
    return kI * sol.k_right * sol.t * std::exp(kI * (sol.k_right * xi));
  }
  const SegmentWave& cw = sol.segment_coefficients[static_cast<std::size_t>(j)];
  if (cw.evanescent) {
    return -cw.wavenumber * cw.forward * std::exp(-cw.wavenumber * xi) +
           cw.wavenumber * cw.backward * std::exp(-cw.wavenumber * (cw.width - xi));
  }
  return kI * cw.wavenumber *
         (cw.forward * std::exp(kI * (cw.wavenumber * xi)) -
          cw.backward * std::exp(-kI * (cw.wavenumber * xi)));
}

}  // namespace tunnelchrono::scattering
