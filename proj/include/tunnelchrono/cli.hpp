#ifndef TUNNELCHRONO_CLI_HPP
#define TUNNELCHRONO_CLI_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

// Command-line front end. The only module with I/O side effects: parses
// flags, runs sweeps and fits, writes CSV tables and plain-text reports
// atomically (temp file + rename). Identical config + inputs + seed produce
// byte-identical outputs.
namespace tunnelchrono::cli {

enum class Command { kTimes, kHartman, kFitIv, kExtractDwell, kFitGap, kBuCheck, kSynthIv };

struct RunConfig {
  Command command = Command::kTimes;
  std::optional<std::filesystem::path> input_path;
  std::filesystem::path output_path;
  std::map<std::string, std::string> parameters;
};

class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown by parse_args for --help; the caller prints the text and exits 0.
struct HelpRequested {
  std::string text;
};

// Deterministic parse of `<command> --flag value ...`. Duplicate flags,
// unknown flags and missing required flags raise UsageError.
RunConfig parse_args(std::span<const std::string> args);

// Dispatches the command. Returns the process exit status: 0 success,
// 1 validation error, 2 numerical failure.
int run(const RunConfig& config);

// parse_args + run with error reporting on stderr; returns the exit status.
int main_entry(int argc, char** argv);

// Worker count for embarrassingly parallel sweeps: TUNNEL_CHRONO_THREADS
// when set, otherwise the hardware concurrency. Output order never depends
// on scheduling.
int worker_count();

}  // namespace tunnelchrono::cli

#endif
