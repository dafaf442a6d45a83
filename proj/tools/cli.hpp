#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crq/flow.hpp"

namespace crq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O errors, failed checks
inline constexpr int kExitTMax = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitBadConfig = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// zero | mode11:<amp> | file:<path> | random:<degree>:<amp>
struct FieldSource {
  enum class Kind { zero, mode11, file, random };
  Kind kind = Kind::zero;
  double amplitude = 0.0;
  int degree = 0;
  std::string path;

  std::string describe() const;
};

/// Throws ConfigError on malformed text.
FieldSource parse_source(std::string_view text);

struct RunSpec {
  int truncation = 6;
  double oversample = 2.0;
  std::string preset;
  std::optional<FieldSource> background;
  std::optional<FieldSource> initial;
  Integrator integrator = Integrator::exact_perp;
  double dt = 1e-3;
  double t_max = 10.0;
  double tol_converge = 1e-8;
  int monitor_stride = 10;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";

  /// Throws ConfigError when a field is out of range or the sources conflict.
  void validate() const;
};

/// Parse "key = value" lines ('#' starts a comment). Throws ConfigError.
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Apply config entries to spec. Unknown keys are rejected.
void apply_config(RunSpec& spec, const std::map<std::string, std::string>& entries);

struct Fields {
  SpectralField w;
  SpectralField lambda0;
};

/// Resolve the background and initial data for spec on space. Throws ConfigError.
Fields resolve_fields(const RunSpec& spec, const SpectralSpace& space);

/// Per (p,q): p,q,-Delta_b,box_b,boxbar_b,P_std as CSV. Operator CSVs go to out_dir when set.
int cmd_spectrum(int truncation, const std::optional<std::filesystem::path>& out_dir, std::ostream& out);

struct CheckOptions {
  int truncation = 8;
  double oversample = 1.0;
  /// Test hook: perturb one entry of the named operator before checking.
  std::string inject_fault;
  std::optional<std::filesystem::path> constants_csv;
};

/// Runs the oracle suite, one line per check. Returns kExitFailure when any check fails.
int cmd_check(const CheckOptions& options, std::ostream& out);

/// Writes trajectory.csv, final_state.csv and summary.json to spec.out_dir.
int cmd_run(const RunSpec& spec, std::ostream& out);

/// Writes derived plotting columns for a trajectory CSV to output (stdout when empty).
int cmd_plotdata(const std::filesystem::path& input, const std::optional<std::filesystem::path>& output,
                 std::ostream& out, std::ostream& err);

/// Full command line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crq::cli
