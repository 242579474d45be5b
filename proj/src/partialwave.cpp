#include "tunnelchrono/partialwave.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "tunnelchrono/constants.hpp"
#include "tunnelchrono/csvio.hpp"
#include "tunnelchrono/numerics.hpp"

namespace tunnelchrono::partialwave {

namespace {

constexpr double kPi = std::numbers::pi;

double sph_j(int l, double x) { return std::sph_bessel(static_cast<unsigned>(l), x); }
double sph_y(int l, double x) { return std::sph_neumann(static_cast<unsigned>(l), x); }

double sph_j_prime(int l, double x) {
  return l == 0 ? -sph_j(1, x) : sph_j(l - 1, x) - ((l + 1.0) / x) * sph_j(l, x);
}

double sph_y_prime(int l, double x) {
  return l == 0 ? -sph_y(1, x) : sph_y(l - 1, x) - ((l + 1.0) / x) * sph_y(l, x);
}

// i_l'(x)/i_l(x) for the modified spherical Bessel function of the first
// kind, by downward (Miller) recurrence on the unnormalized sequence. Only
// the ratio is needed, so no normalization pass.
double modified_log_derivative(int l, double x) {
  if (x < 1e-4) return l / std::max(x, 1e-300) + x / (2.0 * l + 3.0);
  const int start = l + 25 + static_cast<int>(std::ceil(std::sqrt(40.0 * x)));
  double above = 0.0;    // i_{m+1}
  double cur = 1e-280;   // i_m
  for (int m = start; m >= 0; --m) {
    const double below = above + ((2.0 * m + 1.0) / x) * cur;  // i_{m-1}
    if (m == l) return below / cur - (l + 1.0) / x;
    above = cur;
    cur = below;
    if (std::abs(cur) > 1e260) {
      above *= 1e-260;
      cur *= 1e-260;
    }
  }
  return 0.0;  // unreachable: loop exits at m == l >= 0
}

void validate_well(const SphericalWell& w) {
  if (!(w.radius > 0.0) || !std::isfinite(w.radius) || !std::isfinite(w.strength)) {
    throw std::invalid_argument("SphericalWell: radius must be positive and fields finite");
  }
}

void validate_l(int l) {
  if (l < 0 || l > kMaxPartialWave) {
    throw PartialWaveCapError("partial wave l = " + std::to_string(l) +
                              " outside the supported range [0, " +
                              std::to_string(kMaxPartialWave) + "]");
  }
}

// Matching-formula phase shift on the principal branch (-pi/2, pi/2].
// Energies sitting exactly on the interior degeneracy E == strength are
// nudged; the public entry point rejects them instead.
double raw_phase_shift(const SphericalWell& w, int l, double k) {
  const double a = w.radius;
  const double energy = (kHbar * k) * (kHbar * k) / (2.0 * kElectronMass);
  double de = energy - w.strength;
  if (std::abs(de) <= 1e-12) de = de >= 0.0 ? 2e-12 : -2e-12;

  double u, du;  // interior radial solution (value, r-derivative) at a, any scale
  if (de > 0.0) {
    const double kp = wavenumber(de);
    u = sph_j(l, kp * a);
    du = kp * sph_j_prime(l, kp * a);
  } else {
    const double kap = wavenumber(-de);
    u = 1.0;
    du = kap * modified_log_derivative(l, kap * a);
  }

  const double x = k * a;
  const double num = k * sph_j_prime(l, x) * u - sph_j(l, x) * du;
  const double den = k * sph_y_prime(l, x) * u - sph_y(l, x) * du;
  double delta = std::atan2(num, den);
  if (delta > 0.5 * kPi) delta -= kPi;
  if (delta <= -0.5 * kPi) delta += kPi;
  return delta;
}

// Continue the phase from (k_lo, known value) to k_hi, refining wherever the
// branch-folded formula moves faster than ~pi/8 so mod-pi jumps are tracked.
double advance_phase(const SphericalWell& w, int l, double k_lo, double val_lo, double k_hi,
                     int depth) {
  const double raw = raw_phase_shift(w, l, k_hi);
  const double candidate = raw + kPi * std::round((val_lo - raw) / kPi);
  if (std::abs(candidate - val_lo) <= 0.4 || depth >= 36 || (k_hi - k_lo) <= 1e-12 * k_hi) {
    return candidate;
  }
  const double k_mid = 0.5 * (k_lo + k_hi);
  const double val_mid = advance_phase(w, l, k_lo, val_lo, k_mid, depth + 1);
  return advance_phase(w, l, k_mid, val_mid, k_hi, depth + 1);
}

double phase_shift_at_k(const SphericalWell& w, int l, double k_end) {
  if (w.strength == 0.0) return 0.0;
  const int steps = 400;
  const double k0 = k_end / steps;
  double value = raw_phase_shift(w, l, k0);
  double k = k0;
  for (int i = 2; i <= steps; ++i) {
    const double k_next = k_end * i / steps;
    value = advance_phase(w, l, k, value, k_next, 0);
    k = k_next;
  }
  return value;
}

// d(delta_l)/dE from the raw matching value with mod-pi continuity across the
// five-point stencil only. Branch offsets are constant there, so this equals
// the derivative of the threshold-tracked phase at a fraction of its cost.
double local_phase_derivative(const SphericalWell& w, int l, double energy, double h) {
  double value[5];
  const double at[5] = {energy - h, energy - 0.5 * h, energy, energy + 0.5 * h, energy + h};
  for (int i = 0; i < 5; ++i) {
    value[i] = raw_phase_shift(w, l, wavenumber(at[i]));
    if (i > 0) value[i] += kPi * std::round((value[i - 1] - value[i]) / kPi);
  }
  const double coarse = (value[4] - value[0]) / (2.0 * h);
  const double fine = (value[3] - value[1]) / h;
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

double phase_shift(const SphericalWell& w, int l, double energy_ev) {
  validate_well(w);
  validate_l(l);
  if (!(energy_ev > 0.0)) throw std::invalid_argument("phase_shift: requires E > 0");
  if (std::abs(energy_ev - w.strength) <= 1e-12) {
    throw std::domain_error("phase_shift: E coincides with the well strength; perturb E");
  }
  return phase_shift_at_k(w, l, wavenumber(energy_ev));
}

double wigner_delay(const SphericalWell& w, int l, double energy_ev) {
  validate_well(w);
  validate_l(l);
  if (!(energy_ev > 0.0)) throw std::invalid_argument("wigner_delay: requires E > 0");
  const double scale = 1e-4 * std::max(energy_ev, 0.1);
  return kHbar *
         numerics::derivative([&](double e) { return phase_shift(w, l, e); }, energy_ev, scale);
}

double smith_lifetime(const SphericalWell& w, double energy_ev) {
  return 2.0 * wigner_delay(w, 0, energy_ev);
}

namespace {

// Exterior hard-wall phase: j_l(kR) and cos(delta) j_l - sin(delta) y_l share
// the amplitude-phase form A(k) sin(P(k) + delta), so box levels with and
// without the well are the integer-pi crossings of P and P + delta. For l = 0
// this reduces to kR and kR + delta_0 exactly.
double raw_exterior_phase(int l, double x) { return std::atan2(sph_j(l, x), -sph_y(l, x)); }

struct LevelSpectrum {
  std::vector<double> k;      // enumerated box levels
  std::vector<double> index;  // integer level index n at each k (theta = n pi)
};

// Fractional level index at k_eval by quadratic interpolation through the
// three nearest enumerated levels.
double fractional_index(const LevelSpectrum& s, double k_eval) {
  const std::size_t n = s.k.size();
  if (n < 3) throw LevelCountError("beth_uhlenbeck_check: too few box levels near the window");
  std::size_t hi = static_cast<std::size_t>(
      std::lower_bound(s.k.begin(), s.k.end(), k_eval) - s.k.begin());
  std::size_t lo = hi > 0 ? hi - 1 : 0;
  lo = std::min(lo, n - 3);
  // Neville on points lo, lo+1, lo+2
  const double x0 = s.k[lo], x1 = s.k[lo + 1], x2 = s.k[lo + 2];
  const double y0 = s.index[lo], y1 = s.index[lo + 1], y2 = s.index[lo + 2];
  const double p01 = ((k_eval - x1) * y0 + (x0 - k_eval) * y1) / (x0 - x1);
  const double p12 = ((k_eval - x2) * y1 + (x1 - k_eval) * y2) / (x1 - x2);
  return ((k_eval - x2) * p01 + (x0 - k_eval) * p12) / (x0 - x2);
}

}  // namespace

DosComparison beth_uhlenbeck_check(const SphericalWell& w, double energy_ev, double de,
                                   double box_radius, int l_max) {
  validate_well(w);
  validate_l(l_max);
  if (!(energy_ev > 0.0) || !(de > 0.0)) {
    throw std::invalid_argument("beth_uhlenbeck_check: requires E > 0 and dE > 0");
  }
  if (!(box_radius >= 20.0 * w.radius)) {
    throw std::invalid_argument("beth_uhlenbeck_check: box radius must be >= 20x the well radius");
  }

  DosComparison out;
  out.energy = energy_ev;
  out.box_radius = box_radius;
  out.l_max = l_max;

  // Smooth side averaged over the same window the level count integrates:
  // (1/dE) int_E^{E+dE} sum_l (2l+1)/pi d(delta_l)/dE'. Both sides then
  // estimate the same windowed density and converge together as dE -> 0.
  double smooth = 0.0;
  if (w.strength != 0.0) {
    for (int l = 0; l <= l_max; ++l) {
      const double weight = (2.0 * l + 1.0) / kPi;
      smooth += weight / de *
                numerics::integrate(
                    [&](double e) {
                      return local_phase_derivative(w, l, e, 1e-4 * std::max(e, 0.1));
                    },
                    energy_ev, energy_ev + de, 1e-8);
    }
  }
  out.smooth_states_per_ev = smooth;

  const double k1 = wavenumber(energy_ev);
  const double k2 = wavenumber(energy_ev + de);
  const double spacing = kPi / box_radius;
  const double k_lo = std::max(k1 - 4.0 * spacing, 0.5 * spacing);
  const double k_hi = k2 + 4.0 * spacing;
  const int grid_n = static_cast<int>(std::ceil((k_hi - k_lo) / (spacing / 8.0)));

  double counted_levels = 0.0;
  int free_in_window = 0;

  for (int l = 0; l <= l_max; ++l) {
    // Continuous level phases theta(k) on the scan grid, both spectra.
    std::vector<double> ks(static_cast<std::size_t>(grid_n) + 1);
    std::vector<double> theta_free(ks.size()), theta_int(ks.size());
    double prev_p = 0.0, prev_d = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double k = k_lo + (k_hi - k_lo) * static_cast<double>(i) / grid_n;
      ks[i] = k;
      double p = raw_exterior_phase(l, k * box_radius);
      double d = w.strength == 0.0 ? 0.0 : raw_phase_shift(w, l, k);
      if (i > 0) {
        // The Bessel phase advances by ~R dk per step and carries no sharp
        // structure; the well phase can swing through resonances, so it goes
        // through the same adaptive continuation as phase_shift.
        const double p_est = prev_p + box_radius * (k - ks[i - 1]);
        p += 2.0 * kPi * std::round((p_est - p) / (2.0 * kPi));
        if (w.strength != 0.0) d = advance_phase(w, l, ks[i - 1], prev_d, k, 0);
      }
      prev_p = p;
      prev_d = d;
      theta_free[i] = p;
      theta_int[i] = p + d;
    }

    // theta is strictly increasing (d theta/dk ~ R >> |d delta/dk|), so every
    // integer-pi crossing between grid points brackets exactly one level.
    auto enumerate = [&](const std::vector<double>& theta, bool interacting) {
      LevelSpectrum spec;
      for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        const int n_lo = static_cast<int>(std::floor(theta[i] / kPi));
        const int n_hi = static_cast<int>(std::floor(theta[i + 1] / kPi));
        for (int n = n_lo + 1; n <= n_hi; ++n) {
          auto theta_at = [&](double k) {
            double raw = raw_exterior_phase(l, k * box_radius);
            if (interacting && w.strength != 0.0) raw += raw_phase_shift(w, l, k);
            // local re-branch against the linear estimate between grid anchors
            const double est = theta[i] + (theta[i + 1] - theta[i]) * (k - ks[i]) /
                                              (ks[i + 1] - ks[i]);
            return raw + kPi * std::round((est - raw) / kPi);
          };
          const double root = numerics::find_root(
              [&](double k) { return theta_at(k) - n * kPi; }, ks[i], ks[i + 1], 1e-10);
          spec.k.push_back(root);
          spec.index.push_back(static_cast<double>(n));
        }
      }
      return spec;
    };

    const LevelSpectrum free_spec = enumerate(theta_free, false);
    const LevelSpectrum int_spec = enumerate(theta_int, true);
    for (double k : free_spec.k) {
      if (k >= k1 && k <= k2) ++free_in_window;
    }
    const double dn_int = fractional_index(int_spec, k2) - fractional_index(int_spec, k1);
    const double dn_free = fractional_index(free_spec, k2) - fractional_index(free_spec, k1);
    counted_levels += (2.0 * l + 1.0) * (dn_int - dn_free);
  }

  if (free_in_window < 30) {
    throw LevelCountError("beth_uhlenbeck_check: only " + std::to_string(free_in_window) +
                          " free levels in the window; enlarge dE or the box");
  }
  out.counted_states_per_ev = counted_levels / de;
  return out;
}

namespace {
const char* kDosHeader = "energy_ev,smooth_states_per_ev,counted_states_per_ev,relative_gap";
}

void write_dos_csv(std::ostream& out, const DosComparison& c) {
  out << kDosHeader << '\n';
  const double gap = std::abs(c.smooth_states_per_ev - c.counted_states_per_ev) /
                     std::max(std::abs(c.smooth_states_per_ev), 1e-12);
  csvio::write_row(out, {c.energy, c.smooth_states_per_ev, c.counted_states_per_ev, gap});
}

DosComparison read_dos_csv(std::istream& in, double box_radius, int l_max) {
  const auto rows = csvio::read_numeric_csv(in, kDosHeader, 4);
  if (rows.size() != 1) {
    throw csvio::ParseError(0, "expected exactly one data row in a DOS comparison file");
  }
  DosComparison c;
  c.energy = rows[0][0];
  c.smooth_states_per_ev = rows[0][1];
  c.counted_states_per_ev = rows[0][2];
  c.box_radius = box_radius;
  c.l_max = l_max;
  return c;
}

}  // namespace tunnelchrono::partialwave
