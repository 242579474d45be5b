#include "tunnelchrono/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "tunnelchrono/constants.hpp"
#include "tunnelchrono/csvio.hpp"
#include "tunnelchrono/junction.hpp"
#include "tunnelchrono/numerics.hpp"
#include "tunnelchrono/partialwave.hpp"
#include "tunnelchrono/potential.hpp"
#include "tunnelchrono/scattering.hpp"
#include "tunnelchrono/times.hpp"

namespace tunnelchrono::cli {

namespace {

struct FlagSpec {
  const char* name;
  bool required;
  const char* help;
};

struct CommandSpec {
  Command command;
  const char* name;
  const char* summary;
  std::vector<FlagSpec> flags;
};

const std::vector<CommandSpec>& command_table() {
  static const std::vector<CommandSpec> table = {
      {Command::kTimes,
       "times",
       "tunneling-time sweep over an energy grid, CSV output",
       {{"barrier", false, "rectangular barrier as HEIGHTev:WIDTHA, e.g. 1.8ev:20.8A"},
        {"profile", false, "path to a profile file (`width_angstrom height_ev` lines)"},
        {"emin", true, "first grid energy in eV (suffix ev optional)"},
        {"emax", true, "last grid energy in eV"},
        {"n", true, "number of grid points"},
        {"out", true, "output CSV path"}}},
      {Command::kHartman,
       "hartman",
       "phase/dwell times of a barrier family vs width (Hartman saturation)",
       {{"v0", true, "barrier height in eV"},
        {"e", true, "incident energy in eV"},
        {"widths", true, "comma-separated widths, e.g. 10.4A,20.8A,41.6A"},
        {"out", true, "output CSV path"}}},
      {Command::kFitIv,
       "fit-iv",
       "fit Simmons barrier parameters (s, phi0) per temperature group",
       {{"in", true, "input IV CSV"},
        {"out", true, "plain-text fit report path"},
        {"initial-s", false, "initial barrier width (default 15A)"},
        {"initial-phi0", false, "initial barrier height (default 2ev)"},
        {"params-csv", false, "per-temperature parameter CSV (default <out>.params.csv)"}}},
      {Command::kExtractDwell,
       "extract-dwell",
       "dwell time of the fitted junction barrier at a mid-barrier energy",
       {{"s", true, "barrier width"},
        {"phi0", true, "barrier height"},
        {"fraction", false, "energy as a fraction of phi0 (default 0.5)"},
        {"t", false, "junction temperature label (default 300K)"},
        {"out", true, "report path"}}},
      {Command::kFitGap,
       "fit-gap",
       "fit the Einstein-oscillator gap model E_g(T)",
       {{"in", true, "input gap CSV"},
        {"out", true, "plain-text fit report path"},
        {"initial-gap0", false, "initial zero-temperature gap (default 2ev)"},
        {"initial-coupling", false, "initial dimensionless coupling (default 1)"},
        {"initial-omega", false, "initial phonon frequency in 1/s (default 2e13)"}}},
      {Command::kBuCheck,
       "bu-check",
       "density-of-states check: phase-shift sum vs box-level counting",
       {{"strength", true, "well strength in eV (negative = attractive)"},
        {"radius", true, "well radius"},
        {"e", true, "window start energy"},
        {"de", true, "window width in eV"},
        {"box", true, "box radius (>= 20x well radius)"},
        {"lmax", true, "largest partial wave"},
        {"out", true, "output CSV path"}}},
      {Command::kSynthIv,
       "synth-iv",
       "generate a synthetic Simmons IV dataset",
       {{"s", true, "barrier width"},
        {"phi0", true, "barrier height"},
        {"t", true, "temperature label"},
        {"vmax", true, "largest bias voltage in V"},
        {"n", true, "number of voltage points"},
        {"noise", true, "relative noise level"},
        {"seed", true, "RNG seed"},
        {"out", true, "output IV CSV path"}}},
  };
  return table;
}

std::string padded(const std::string& name, std::size_t width) {
  return name + std::string(name.size() < width ? width - name.size() : 1, ' ');
}

std::string usage_text() {
  std::ostringstream out;
  out << "usage: tunnel_chrono <command> [--flag value ...]\n\ncommands:\n";
  for (const CommandSpec& c : command_table()) {
    out << "  " << padded(c.name, 15) << c.summary << "\n";
  }
  out << "\n`tunnel_chrono <command> --help` lists the command's flags.\n";
  return out.str();
}

std::string command_help(const CommandSpec& spec) {
  std::ostringstream out;
  out << "usage: tunnel_chrono " << spec.name << " [flags]\n" << spec.summary << "\n\nflags:\n";
  for (const FlagSpec& f : spec.flags) {
    out << "  --" << padded(f.name, 14) << (f.required ? "(required) " : "") << f.help << "\n";
  }
  return out.str();
}

const CommandSpec* find_command(const std::string& name) {
  for (const CommandSpec& c : command_table()) {
    if (name == c.name) return &c;
  }
  return nullptr;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

double parse_plain_number(const std::string& text, const std::string& flag) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
    throw UsageError("--" + flag + ": not a number: '" + text + "'");
  }
  return v;
}

// Quantity flags carry their unit as a suffix (`ev`, `A` for Angstrom, `K`);
// a bare number is read in that same unit.
double parse_quantity(const std::string& text, const char* suffix, const std::string& flag) {
  std::string body = text;
  if (ends_with(text, suffix)) body = text.substr(0, text.size() - std::string(suffix).size());
  return parse_plain_number(body, flag);
}

long parse_integer(const std::string& text, const std::string& flag) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    throw UsageError("--" + flag + ": not an integer: '" + text + "'");
  }
  return v;
}

}  // namespace

RunConfig parse_args(std::span<const std::string> args) {
  if (args.empty()) throw UsageError(usage_text());
  if (args[0] == "--help" || args[0] == "-h") throw HelpRequested{usage_text()};
  const CommandSpec* spec = find_command(args[0]);
  if (spec == nullptr) throw UsageError("unknown command '" + args[0] + "'\n\n" + usage_text());

  std::map<std::string, std::string> params;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg == "--help" || arg == "-h") throw HelpRequested{command_help(*spec)};
    if (arg.rfind("--", 0) != 0 || arg.size() <= 2) {
      throw UsageError("unexpected argument '" + arg + "' (flags look like --name value)");
    }
    const std::string key = arg.substr(2);
    if (params.count(key) != 0) throw UsageError("duplicate flag --" + key);
    if (i + 1 >= args.size()) throw UsageError("--" + key + " is missing its value");
    params[key] = args[++i];
  }

  std::string unknown;
  for (const auto& [key, value] : params) {
    const bool known = std::any_of(spec->flags.begin(), spec->flags.end(),
                                   [&](const FlagSpec& f) { return key == f.name; });
    if (!known) unknown += (unknown.empty() ? "" : ", ") + std::string("--") + key;
  }
  if (!unknown.empty()) throw UsageError("unknown flags for '" + std::string(spec->name) + "': " + unknown);

  for (const FlagSpec& f : spec->flags) {
    if (f.required && params.count(f.name) == 0) {
      throw UsageError("missing required flag --" + std::string(f.name) + "\n\n" + command_help(*spec));
    }
  }
  if (spec->command == Command::kTimes) {
    if (params.count("barrier") + params.count("profile") != 1) {
      throw UsageError("times: exactly one of --barrier or --profile is required");
    }
  }

  RunConfig config;
  config.command = spec->command;
  config.parameters = params;
  if (params.count("in") != 0) config.input_path = params.at("in");
  if (params.count("profile") != 0) config.input_path = params.at("profile");
  config.output_path = params.at("out");
  return config;
}

int worker_count() {
  const char* env = std::getenv("TUNNEL_CHRONO_THREADS");
  if (env != nullptr) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1 && n <= 256) return static_cast<int>(n);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

namespace {

// Order of results never depends on scheduling: workers fill preassigned
// index ranges and the caller consumes them by index.
template <typename Fn>
void parallel_index_loop(int count, Fn&& fn) {
  const int workers = std::min(worker_count(), std::max(count, 1));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string slurp_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string& param(const RunConfig& c, const std::string& key) {
  return c.parameters.at(key);
}

std::string param_or(const RunConfig& c, const std::string& key, const std::string& fallback) {
  const auto it = c.parameters.find(key);
  return it == c.parameters.end() ? fallback : it->second;
}

potential::PotentialProfile barrier_from_spec(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos || !ends_with(text.substr(0, colon), "ev") ||
      text.back() != 'A') {
    throw UsageError("--barrier: expected HEIGHTev:WIDTHA, e.g. 1.8ev:20.8A");
  }
  const double height = parse_quantity(text.substr(0, colon), "ev", "barrier");
  const double width = parse_quantity(text.substr(colon + 1), "A", "barrier");
  return potential::rectangular(height, width);
}

std::vector<double> widths_from_list(const std::string& text) {
  std::vector<double> widths;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string field =
        comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
    widths.push_back(parse_quantity(field, "A", "widths"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (widths.empty()) throw UsageError("--widths: empty list");
  return widths;
}

// Keep grid energies off segment heights; the solver rejects exact hits.
double dodge_degenerate(const potential::PotentialProfile& p, double e) {
  for (int guard = 0; guard < 8; ++guard) {
    bool clean = true;
    for (const auto& seg : p.segments()) {
      if (std::abs(e - seg.height) < 1e-9) clean = false;
    }
    if (clean) return e;
    e += 2e-9 * std::max(1.0, std::abs(e));
  }
  return e;
}

int run_times(const RunConfig& config) {
  const potential::PotentialProfile profile =
      config.parameters.count("barrier") != 0
          ? barrier_from_spec(param(config, "barrier"))
          : [&] {
              std::istringstream in(slurp_input(*config.input_path));
              return potential::read_profile(in);
            }();
  const double emin = parse_quantity(param(config, "emin"), "ev", "emin");
  const double emax = parse_quantity(param(config, "emax"), "ev", "emax");
  const long n = parse_integer(param(config, "n"), "n");
  if (!(emin > std::max(profile.left_level(), profile.right_level()))) {
    throw UsageError("--emin must lie above the asymptotic levels");
  }
  if (!(emax >= emin) || n < 1) throw UsageError("requires emax >= emin and n >= 1");

  std::vector<times::TimeSuite> rows(static_cast<std::size_t>(n));
  parallel_index_loop(static_cast<int>(n), [&](int i) {
    const double e =
        n == 1 ? emin : emin + (emax - emin) * static_cast<double>(i) / static_cast<double>(n - 1);
    rows[static_cast<std::size_t>(i)] = times::time_suite(profile, dodge_degenerate(profile, e));
  });

  std::ostringstream out;
  times::write_sweep_csv(out, rows);
  atomic_write(config.output_path, out.str());
  std::cout << "times: wrote " << rows.size() << " rows to " << config.output_path.string() << "\n";
  return 0;
}

int run_hartman(const RunConfig& config) {
  const double v0 = parse_quantity(param(config, "v0"), "ev", "v0");
  const double e = parse_quantity(param(config, "e"), "ev", "e");
  const std::vector<double> widths = widths_from_list(param(config, "widths"));
  const auto rows = times::hartman_sweep(v0, e, widths);
  std::ostringstream out;
  times::write_hartman_csv(out, rows);
  atomic_write(config.output_path, out.str());
  std::cout << "hartman: wrote " << rows.size() << " rows to " << config.output_path.string()
            << "\n";
  return 0;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

int run_fit_iv(const RunConfig& config) {
  std::istringstream in(slurp_input(*config.input_path));
  const junction::IVDataset data = junction::read_iv_csv(in);
  junction::JunctionModel initial;
  initial.width_s = parse_quantity(param_or(config, "initial-s", "15A"), "A", "initial-s");
  initial.barrier_phi0 =
      parse_quantity(param_or(config, "initial-phi0", "2ev"), "ev", "initial-phi0");
  initial.temperature = 300.0;

  const std::vector<junction::IvGroupFit> groups = junction::fit_iv(data, initial);

  std::ostringstream report;
  bool all_converged = true;
  for (const auto& g : groups) {
    report << "temperature_k=" << csvio::format_field(g.temperature) << "\n"
           << "s_angstrom=" << csvio::format_field(g.model.width_s) << "\n"
           << "phi0_ev=" << csvio::format_field(g.model.barrier_phi0) << "\n"
           << "residual=" << csvio::format_field(g.fit.residual_norm) << "\n"
           << "converged=" << bool_text(g.fit.converged) << "\n\n";
    all_converged = all_converged && g.fit.converged;
  }
  atomic_write(config.output_path, report.str());

  std::ostringstream csv;
  csv << "temperature_k,s_angstrom,phi0_ev,residual,converged\n";
  for (const auto& g : groups) {
    csvio::write_row(csv, {g.temperature, g.model.width_s, g.model.barrier_phi0,
                           g.fit.residual_norm, g.fit.converged ? 1.0 : 0.0});
  }
  const std::filesystem::path csv_path =
      param_or(config, "params-csv", config.output_path.string() + ".params.csv");
  atomic_write(csv_path, csv.str());

  std::cout << "fit-iv: " << groups.size() << " temperature group(s) -> "
            << config.output_path.string() << ", " << csv_path.string() << "\n";
  return all_converged ? 0 : 2;
}

int run_extract_dwell(const RunConfig& config) {
  junction::JunctionModel model;
  model.width_s = parse_quantity(param(config, "s"), "A", "s");
  model.barrier_phi0 = parse_quantity(param(config, "phi0"), "ev", "phi0");
  model.temperature = parse_quantity(param_or(config, "t", "300K"), "K", "t");
  const double fraction = parse_plain_number(param_or(config, "fraction", "0.5"), "fraction");

  const double tau_s = junction::extract_dwell_seconds(model, fraction);
  const double tau_fs = tau_s / kFsToSeconds;

  std::ostringstream report;
  report << "s_angstrom=" << csvio::format_field(model.width_s) << "\n"
         << "phi0_ev=" << csvio::format_field(model.barrier_phi0) << "\n"
         << "energy_ev=" << csvio::format_field(fraction * model.barrier_phi0) << "\n"
         << "tau_dwell_fs=" << csvio::format_field(tau_fs) << "\n"
         << "tau_dwell_s=" << csvio::format_field(tau_s) << "\n";
  atomic_write(config.output_path, report.str());
  std::cout << "extract-dwell: tau_dwell = " << csvio::format_field(tau_fs) << " fs = "
            << csvio::format_field(tau_s) << " s\n";
  return 0;
}

int run_fit_gap(const RunConfig& config) {
  std::istringstream in(slurp_input(*config.input_path));
  const junction::GapDataset data = junction::read_gap_csv(in);
  junction::GapModelParams initial;
  initial.gap0 = parse_quantity(param_or(config, "initial-gap0", "2ev"), "ev", "initial-gap0");
  initial.coupling_s = parse_plain_number(param_or(config, "initial-coupling", "1"), "initial-coupling");
  initial.omega = parse_plain_number(param_or(config, "initial-omega", "2e13"), "initial-omega");

  const auto [params, fit] = junction::fit_gap(data, initial);
  std::ostringstream report;
  report << "gap0_ev=" << csvio::format_field(params.gap0) << "\n"
         << "coupling_s=" << csvio::format_field(params.coupling_s) << "\n"
         << "omega_per_s=" << csvio::format_field(params.omega) << "\n"
         << "residual=" << csvio::format_field(fit.residual_norm) << "\n"
         << "converged=" << bool_text(fit.converged) << "\n";
  atomic_write(config.output_path, report.str());
  std::cout << "fit-gap: omega = " << csvio::format_field(params.omega) << " /s -> "
            << config.output_path.string() << "\n";
  return fit.converged ? 0 : 2;
}

int run_bu_check(const RunConfig& config) {
  partialwave::SphericalWell well;
  well.strength = parse_quantity(param(config, "strength"), "ev", "strength");
  well.radius = parse_quantity(param(config, "radius"), "A", "radius");
  const double e = parse_quantity(param(config, "e"), "ev", "e");
  const double de = parse_quantity(param(config, "de"), "ev", "de");
  const double box = parse_quantity(param(config, "box"), "A", "box");
  const long lmax = parse_integer(param(config, "lmax"), "lmax");

  const auto result = partialwave::beth_uhlenbeck_check(well, e, de, box, static_cast<int>(lmax));
  std::ostringstream out;
  partialwave::write_dos_csv(out, result);
  atomic_write(config.output_path, out.str());
  std::cout << "bu-check: smooth = " << csvio::format_field(result.smooth_states_per_ev)
            << " states/eV, counted = " << csvio::format_field(result.counted_states_per_ev)
            << " states/eV -> " << config.output_path.string() << "\n";
  return 0;
}

int run_synth_iv(const RunConfig& config) {
  junction::JunctionModel model;
  model.width_s = parse_quantity(param(config, "s"), "A", "s");
  model.barrier_phi0 = parse_quantity(param(config, "phi0"), "ev", "phi0");
  model.temperature = parse_quantity(param(config, "t"), "K", "t");
  const double vmax = parse_plain_number(param(config, "vmax"), "vmax");
  const long n = parse_integer(param(config, "n"), "n");
  const double noise = parse_plain_number(param(config, "noise"), "noise");
  const long seed = parse_integer(param(config, "seed"), "seed");
  if (n < 1 || !(vmax > 0.0)) throw UsageError("synth-iv: requires n >= 1 and vmax > 0");

  std::vector<double> voltages(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    voltages[static_cast<std::size_t>(i)] =
        vmax * static_cast<double>(i + 1) / static_cast<double>(n);
  }
  const junction::IVDataset data =
      junction::synth_iv(model, voltages, noise, static_cast<std::uint64_t>(seed));
  std::ostringstream out;
  junction::write_iv_csv(out, data);
  atomic_write(config.output_path, out.str());
  std::cout << "synth-iv: wrote " << data.points.size() << " rows to "
            << config.output_path.string() << "\n";
  return 0;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    switch (config.command) {
      case Command::kTimes:
        return run_times(config);
      case Command::kHartman:
        return run_hartman(config);
      case Command::kFitIv:
        return run_fit_iv(config);
      case Command::kExtractDwell:
        return run_extract_dwell(config);
      case Command::kFitGap:
        return run_fit_gap(config);
      case Command::kBuCheck:
        return run_bu_check(config);
      case Command::kSynthIv:
        return run_synth_iv(config);
    }
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const csvio::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 1 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    const RunConfig config = parse_args(args);
    return run(config);
  } catch (const HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

}  // namespace tunnelchrono::cli
