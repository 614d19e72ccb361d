#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "antic/diagnostics.hpp"
#include "antic/hydro1d.hpp"
#include "antic/integrator.hpp"

namespace antic {

/// Options shared by the config-driven subcommands.
struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool quiet = false;
};

struct MeansCheckOptions {
  std::uint64_t seed = 1;
  long instances = 1000;
  int n_max = 12;
  int d_max = 3;
  double lam_max = 1.0;  // lam drawn from (0, lam_max]
  double cap_max = 4.0;  // Lam drawn from [lam, cap_max]
  std::filesystem::path out_dir = ".";
  std::optional<std::string> summary_name;
  bool quiet = false;
};

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitNumericalError = 3;

/// Outcome of one simulation run, before any files are written. Used by the
/// command wrappers and directly by tests.
struct SimulationResult {
  int exit_code = kExitOk;
  std::vector<DiagnosticsRow> rows;
  std::optional<BlowupRecord> blowup;
  SwarmState final_state;
  std::string csv;           ///< full CSV text (fixed column order)
  std::string summary_json;  ///< summary record as serialized JSON
};

/// Parse a simulation config (JSON text), run it, and render outputs.
/// Throws ConfigError on malformed configs.
SimulationResult run_simulation_config(const std::string& config_text,
                                       std::optional<std::uint64_t> seed_override = {});

/// Round-trip helper: parse + validate a simulation config and serialize it
/// back in canonical form. parse(serialize(parse(text))) == parse(text).
std::string normalize_simulation_config(const std::string& config_text);

int run_simulate(const CliOptions& opt);
int run_sweep(const CliOptions& opt);
int run_polar(const CliOptions& opt);
int run_hydro1d(const CliOptions& opt);
int run_classify(const CliOptions& opt);
int run_means_check(const MeansCheckOptions& opt);

/// CSV column order contract for diagnostics output.
inline constexpr const char* kDiagnosticsCsvHeader =
    "t,E,cal_E,dE,d_cal_E,enstrophy,X,X_tau,Vmax,E_hat";

/// Render one value with 15 significant digits (CSV contract: >= 12).
std::string format_csv_value(double v);

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows);

}  // namespace antic
