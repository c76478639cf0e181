#pragma once

// Command implementations behind the `liecoord` executable. Each returns the
// process exit code and writes diagnostics to `err`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "liecoord/analysis.hpp"
#include "liecoord/scenario.hpp"

namespace liecoord {

enum ExitCode : int {
  kExitOk = 0,
  kExitNotAchieved = 1,  // check: coordination not reached
  kExitUsage = 2,        // validation, I/O and argument errors
  kExitNumeric = 3,      // run aborted on blow-up or non-finite values
};

/// Output directory used when --out is not given: $LIECOORD_OUT_DIR, else "liecoord-out".
std::filesystem::path default_output_dir();

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> h;
  std::optional<double> t_end;
};

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& overrides);

int cmd_run(const std::filesystem::path& scenario, const RunOverrides& overrides,
            const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

struct CheckOptions {
  CoordinationMode mode = CoordinationMode::kTc;
  double tol = 1e-4;
  double window = 0.0;  // <= 0: last 10% of the run
};

/// Coordination report for a run directory, computed from its CSV output.
CoordinationReport check_run_dir(const std::filesystem::path& dir, const CheckOptions& options);

nlohmann::json report_to_json(const CoordinationReport& report, const CheckOptions& options);

/// Writes check_<mode>.json into `dir` and prints it; exit 0 iff achieved.
int cmd_check(const std::filesystem::path& dir, const CheckOptions& options, std::ostream& out,
              std::ostream& err);

/// One axis of a sweep grid, e.g. "h=1e-2,1e-3".
struct GridAxis {
  std::string key;
  std::vector<double> values;
};

/// Parses "key=v1,v2;key=v3". Keys: h, t_end, agents, aux_scale, position_box.
std::vector<GridAxis> parse_grid(const std::string& spec);

/// Parses "a..b" (inclusive) or a comma list.
std::vector<std::uint64_t> parse_seeds(const std::string& spec);

/**
 * Terminal value the sweep uses to decide whether one run reached the
 * controller's target: the disagreement function the controller descends
 * (plus the feasibility costs for underactuated controllers).
 */
double primary_metric(const std::string& controller, const Metrics& m);

struct SweepOptions {
  std::optional<std::string> grid;  // unset: a single point; empty string: no points
  std::vector<std::uint64_t> seeds;  // empty: the scenario seed
  double tol = 1e-6;
  int jobs = 0;  // 0: hardware concurrency
};

struct SweepRow {
  std::vector<double> params;
  int seeds = 0;
  int aborted = 0;
  double mean_v_r = 0, mean_v_l = 0, mean_v_tr = 0, mean_v_tl = 0, max_v_k = 0;
  double fraction = 0;
};

struct SweepTable {
  std::vector<std::string> keys;
  std::vector<SweepRow> rows;
};

SweepTable run_sweep(const ScenarioConfig& base, const SweepOptions& options);
void write_sweep_csv(std::ostream& out, const SweepTable& table);

int cmd_sweep(const std::filesystem::path& scenario, const SweepOptions& options,
              const std::optional<std::filesystem::path>& out_file, std::ostream& out, std::ostream& err);

/// Entry point of the executable.
int cli_main(int argc, char** argv);

}  // namespace liecoord
