#include "tunnelchrono/junction.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>

#include "tunnelchrono/constants.hpp"
#include "tunnelchrono/csvio.hpp"
#include "tunnelchrono/potential.hpp"
#include "tunnelchrono/times.hpp"

namespace tunnelchrono::junction {

namespace {

// J in A/cm^2 with s in Angstrom and barriers in eV: C1 = e^2 1e16/(2 pi h).
const double kSimmonsC1 =
    1.602176634e-19 * 1.602176634e-19 * 1e16 / (2.0 * std::numbers::pi * 6.62607015e-34);
// 2 sqrt(2m)/hbar in 1/(Angstrom sqrt(eV)); the classic practical value 1.025.
const double kSimmonsC2 = 2.0 * std::sqrt(2.0 * kElectronMass) / kHbar;

// Formula body without the regime guard, used by the fitter so trial
// parameter sets outside the physical regime reject the step instead of
// aborting the fit. NaN signals an unevaluable point.
double simmons_raw(double v, double s, double phi0) {
  const double phibar = phi0 - 0.5 * v;
  if (!(s > 0.0) || !(phibar > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return kSimmonsC1 / (s * s) *
         (phibar * std::exp(-kSimmonsC2 * s * std::sqrt(phibar)) -
          (phibar + v) * std::exp(-kSimmonsC2 * s * std::sqrt(phibar + v)));
}

}  // namespace

double simmons_j(double voltage, double width_s, double phi0) {
  if (!(width_s > 0.0) || !(phi0 > 0.0)) {
    throw std::invalid_argument("simmons_j: requires s > 0 and phi0 > 0");
  }
  if (voltage < 0.0) return -simmons_j(-voltage, width_s, phi0);
  if (voltage >= phi0) {
    throw RegimeError("simmons_j: V >= phi0 is the high-field branch (not implemented)");
  }
  return simmons_raw(voltage, width_s, phi0);
}

IVDataset synth_iv(const JunctionModel& model, std::span<const double> voltages,
                   double noise_rel, std::uint64_t seed) {
  if (!(noise_rel >= 0.0)) throw std::invalid_argument("synth_iv: requires noise_rel >= 0");
  std::mt19937_64 rng(seed);
  // Box-Muller on raw 53-bit uniforms keeps datasets identical across
  // standard libraries.
  auto gaussian = [&rng]() {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };
  IVDataset out;
  out.source_label = "synthetic";
  out.points.reserve(voltages.size());
  for (double v : voltages) {
    const double j = simmons_j(v, model.width_s, model.barrier_phi0);
    out.points.push_back({v, j * (1.0 + noise_rel * gaussian()), model.temperature});
  }
  return out;
}

std::vector<IvGroupFit> fit_iv(const IVDataset& data, const JunctionModel& initial) {
  if (!(initial.width_s > 0.0) || !(initial.barrier_phi0 > 0.0)) {
    throw std::invalid_argument("fit_iv: initial model must have positive s and phi0");
  }
  std::map<double, std::vector<const IvPoint*>> groups;
  for (const IvPoint& pt : data.points) groups[pt.temperature].push_back(&pt);

  std::vector<IvGroupFit> out;
  for (const auto& [temperature, pts] : groups) {
    if (pts.size() < 10) {
      throw std::invalid_argument("fit_iv: need >= 10 points per temperature group (T = " +
                                  std::to_string(temperature) + " K)");
    }
    std::vector<numerics::FitPoint> fit_data;
    fit_data.reserve(pts.size());
    double v_lo = pts.front()->voltage, v_hi = v_lo;
    for (const IvPoint* pt : pts) {
      if (!(std::abs(pt->current_density) > 0.0)) {
        throw std::invalid_argument("fit_iv: zero current density cannot carry relative weight");
      }
      v_lo = std::min(v_lo, pt->voltage);
      v_hi = std::max(v_hi, pt->voltage);
      fit_data.push_back({pt->voltage, pt->current_density, 1.0 / std::abs(pt->current_density)});
    }
    if (!(v_hi > v_lo)) {
      throw numerics::DegenerateFitError("fit_iv: a single voltage cannot identify (s, phi0)");
    }

    auto model_fn = [](const Eigen::VectorXd& q, double v) {
      const double raw = v < 0.0 ? -simmons_raw(-v, q[0], q[1]) : simmons_raw(v, q[0], q[1]);
      return raw;
    };
    Eigen::VectorXd start(2);
    start << initial.width_s, initial.barrier_phi0;
    numerics::FitResult fit = numerics::fit_curve(model_fn, start, fit_data);

    IvGroupFit group;
    group.temperature = temperature;
    group.model = {fit.params[0], fit.params[1], temperature};
    group.fit = std::move(fit);
    out.push_back(std::move(group));
  }
  return out;
}

double gap_model(double temperature, const GapModelParams& p) {
  if (!(temperature > 0.0)) throw std::invalid_argument("gap_model: requires T > 0");
  const double hbar_omega = kHbarEvS * p.omega;  // eV
  const double x = hbar_omega / (2.0 * kBoltzmann * temperature);
  return p.gap0 - p.coupling_s * hbar_omega * (1.0 / std::tanh(x) - 1.0);
}

std::pair<GapModelParams, numerics::FitResult> fit_gap(const GapDataset& data,
                                                       const GapModelParams& initial) {
  if (data.points.size() < 5) throw std::invalid_argument("fit_gap: need >= 5 points");
  double t_lo = data.points.front().temperature, t_hi = t_lo;
  for (const GapPoint& pt : data.points) {
    t_lo = std::min(t_lo, pt.temperature);
    t_hi = std::max(t_hi, pt.temperature);
  }
  if (!(t_hi >= 5.0 * t_lo)) {
    throw std::invalid_argument("fit_gap: temperatures must span at least a factor 5");
  }
  std::vector<numerics::FitPoint> fit_data;
  fit_data.reserve(data.points.size());
  for (const GapPoint& pt : data.points) fit_data.push_back({pt.temperature, pt.gap, 1.0});

  auto model_fn = [](const Eigen::VectorXd& q, double t) {
    return gap_model(t, {q[0], q[1], q[2]});
  };
  Eigen::VectorXd start(3);
  start << initial.gap0, initial.coupling_s, initial.omega;
  numerics::FitResult fit = numerics::fit_curve(model_fn, start, fit_data);
  GapModelParams params{fit.params[0], fit.params[1], fit.params[2]};
  return {params, std::move(fit)};
}

double extract_dwell_seconds(const JunctionModel& model, double energy_fraction) {
  if (!(energy_fraction > 0.0) || !(energy_fraction < 1.0)) {
    throw std::invalid_argument("extract_dwell_seconds: requires 0 < fraction < 1");
  }
  const auto barrier = potential::rectangular(model.barrier_phi0, model.width_s);
  return times::dwell_time(barrier, energy_fraction * model.barrier_phi0) * kFsToSeconds;
}

namespace {
const char* kIvHeader = "voltage_v,current_density_a_per_cm2,temperature_k";
const char* kGapHeader = "temperature_k,gap_ev";
}  // namespace

IVDataset read_iv_csv(std::istream& in) {
  IVDataset out;
  double prev_v = 0.0;
  double prev_t = 0.0;
  bool have_prev = false;
  for (const auto& row : csvio::read_numeric_csv(in, kIvHeader, 3)) {
    const IvPoint pt{row[0], row[1], row[2]};
    if (have_prev && pt.temperature == prev_t && !(pt.voltage > prev_v)) {
      throw std::invalid_argument(
          "iv data: voltages must be strictly increasing within a temperature group");
    }
    prev_v = pt.voltage;
    prev_t = pt.temperature;
    have_prev = true;
    out.points.push_back(pt);
  }
  return out;
}

void write_iv_csv(std::ostream& out, const IVDataset& data) {
  out << kIvHeader << '\n';
  for (const IvPoint& pt : data.points) {
    csvio::write_row(out, {pt.voltage, pt.current_density, pt.temperature});
  }
}

GapDataset read_gap_csv(std::istream& in) {
  GapDataset out;
  double prev_t = 0.0;
  bool have_prev = false;
  for (const auto& row : csvio::read_numeric_csv(in, kGapHeader, 2)) {
    const GapPoint pt{row[0], row[1]};
    if (!(pt.temperature > 0.0)) {
      throw std::invalid_argument("gap data: temperatures must be positive");
    }
    if (have_prev && !(pt.temperature > prev_t)) {
      throw std::invalid_argument("gap data: temperatures must be increasing");
    }
    prev_t = pt.temperature;
    have_prev = true;
    out.points.push_back(pt);
  }
  return out;
}

void write_gap_csv(std::ostream& out, const GapDataset& data) {
  out << kGapHeader << '\n';
  for (const GapPoint& pt : data.points) csvio::write_row(out, {pt.temperature, pt.gap});
}

}  // namespace tunnelchrono::junction
