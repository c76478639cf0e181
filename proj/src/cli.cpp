#include "liecoord/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "liecoord/trajectory_io.hpp"

namespace liecoord {

namespace fs = std::filesystem;

fs::path default_output_dir() {
  if (const char* env = std::getenv("LIECOORD_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "liecoord-out";
}

void apply_overrides(ScenarioConfig& cfg, const RunOverrides& overrides) {
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.h) cfg.integration.step = *overrides.h;
  if (overrides.t_end) cfg.integration.duration = *overrides.t_end;
  cfg = parse_scenario(to_json(cfg));  // revalidate
}

int cmd_run(const fs::path& scenario, const RunOverrides& overrides, const fs::path& out_dir,
            std::ostream& out, std::ostream& err) {
  try {
    ScenarioConfig cfg = load_scenario(scenario);
    apply_overrides(cfg, overrides);
    return dispatch_group(cfg.group, [&]<LieGroup G>() {
      const Trajectory<G> traj = run_scenario<G>(cfg);
      write_run(out_dir, cfg, traj);
      const auto& m = traj.samples.back().metrics;
      out << "wrote " << out_dir.string() << " (" << traj.samples.size() << " samples, t="
          << format_double(traj.samples.back().t) << ")\n"
          << "terminal V_r=" << format_double(m.v_r) << " V_l=" << format_double(m.v_l)
          << " V_tr=" << format_double(m.v_tr) << " V_tl=" << format_double(m.v_tl)
          << " max V_k=" << format_double(m.max_v_k()) << '\n';
      if (traj.aborted) {
        err << "run aborted: " << traj.abort_reason << '\n';
        return static_cast<int>(kExitNumeric);
      }
      return static_cast<int>(kExitOk);
    });
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

CoordinationReport check_run_dir(const fs::path& dir, const CheckOptions& options) {
  const auto manifest = read_manifest(dir);
  if (!manifest.contains("group") || !manifest.at("group").is_string()) {
    throw UsageError("manifest.json: missing group");
  }
  return dispatch_group(manifest.at("group").get<std::string>(), [&]<LieGroup G>() {
    return check_coordination(read_run_trajectory<G>(dir), options.mode, options.tol, options.window);
  });
}

nlohmann::json report_to_json(const CoordinationReport& r, const CheckOptions& options) {
  return {{"mode", std::string(to_string(options.mode))},
          {"tol", options.tol},
          {"achieved", r.achieved},
          {"drift", r.drift},
          {"left_drift", r.left_drift},
          {"right_drift", r.right_drift},
          {"left_spread", r.left_spread},
          {"right_spread", r.right_spread},
          {"window_start", r.window_start},
          {"window_end", r.window_end},
          {"samples", r.samples}};
}

int cmd_check(const fs::path& dir, const CheckOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto report = check_run_dir(dir, options);
    const std::string text = report_to_json(report, options).dump(2);
    std::ofstream f(dir / ("check_" + std::string(to_string(options.mode)) + ".json"));
    if (!f) throw UsageError("cannot write report into " + dir.string());
    f << text << '\n';
    out << text << '\n';
    return report.achieved ? kExitOk : kExitNotAchieved;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

std::vector<GridAxis> parse_grid(const std::string& spec) {
  static const std::vector<std::string> keys{"h", "t_end", "agents", "aux_scale", "position_box"};
  std::vector<GridAxis> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("grid: expected key=v1,v2 in '" + part + "'");
    GridAxis axis{part.substr(0, eq), {}};
    if (std::find(keys.begin(), keys.end(), axis.key) == keys.end()) {
      throw UsageError("grid: unknown key '" + axis.key + "' (valid: h, t_end, agents, aux_scale, position_box)");
    }
    for (const auto& a : axes) {
      if (a.key == axis.key) throw UsageError("grid: key '" + axis.key + "' given twice");
    }
    std::stringstream vs(part.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) {
      char* stop = nullptr;
      const double x = std::strtod(v.c_str(), &stop);
      if (v.empty() || stop != v.c_str() + v.size()) throw UsageError("grid: bad value '" + v + "'");
      axis.values.push_back(x);
    }
    if (axis.values.empty()) throw UsageError("grid: key '" + axis.key + "' has no values");
    axes.push_back(std::move(axis));
  }
  return axes;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  auto number = [&](const std::string& s) {
    char* stop = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &stop, 10);
    if (s.empty() || s[0] == '-' || stop != s.c_str() + s.size()) {
      throw UsageError("seeds: bad seed '" + s + "'");
    }
    return static_cast<std::uint64_t>(v);
  };
  std::vector<std::uint64_t> out;
  if (const auto dots = spec.find(".."); dots != std::string::npos) {
    const auto a = number(spec.substr(0, dots));
    const auto b = number(spec.substr(dots + 2));
    if (b < a) throw UsageError("seeds: empty range '" + spec + "'");
    for (auto s = a; s <= b; ++s) out.push_back(s);
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  return out;
}

double primary_metric(const std::string& controller, const Metrics& m) {
  if (controller == "ric_consensus") return m.v_r;
  if (controller == "lic_consensus") return m.v_l;
  if (controller == "tc_right_cascade") return m.v_tr;
  if (controller == "tc_left_cascade") return m.v_tl;
  if (controller == "underactuated_lic" || controller == "se3_steering_linear" ||
      controller == "se3_steering_helical") {
    double sum = m.v_tl;
    for (double v : m.v_k) sum += v;
    return sum;
  }
  return m.v_r + m.v_l;  // open loop, combined: total coordination of velocities
}

namespace {

void apply_grid_value(ScenarioConfig& cfg, const std::string& key, double v) {
  if (key == "h") cfg.integration.step = v;
  else if (key == "t_end") cfg.integration.duration = v;
  else if (key == "agents") cfg.agents = static_cast<int>(v);
  else if (key == "aux_scale") cfg.aux_scale = v;
  else if (key == "position_box") cfg.position_box = v;
}

struct JobResult {
  bool aborted = false;
  Metrics metrics;
};

JobResult run_job(ScenarioConfig cfg) {
  // Only the terminal sample matters here.
  cfg.integration.record_every =
      std::max(1L, std::lround(cfg.integration.duration / cfg.integration.step));
  return dispatch_group(cfg.group, [&]<LieGroup G>() {
    const auto traj = run_scenario<G>(cfg);
    return JobResult{traj.aborted, traj.samples.back().metrics};
  });
}

}  // namespace

SweepTable run_sweep(const ScenarioConfig& base, const SweepOptions& options) {
  SweepTable table;
  std::vector<GridAxis> axes;
  std::vector<std::vector<double>> points;
  if (!options.grid) {
    points.emplace_back();
  } else {
    axes = parse_grid(*options.grid);
    if (!axes.empty()) {
      points.emplace_back();
      for (const auto& axis : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& p : points) {
          for (double v : axis.values) {
            auto q = p;
            q.push_back(v);
            next.push_back(std::move(q));
          }
        }
        points = std::move(next);
      }
    }
  }
  for (const auto& a : axes) table.keys.push_back(a.key);
  const auto seeds = options.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : options.seeds;

  // Validate every point up front so errors surface before any work starts.
  std::vector<ScenarioConfig> configs;
  for (const auto& p : points) {
    for (auto seed : seeds) {
      ScenarioConfig cfg = base;
      for (std::size_t i = 0; i < axes.size(); ++i) apply_grid_value(cfg, axes[i].key, p[i]);
      cfg.seed = seed;
      configs.push_back(parse_scenario(to_json(cfg)));
    }
  }

  std::vector<JobResult> results(configs.size());
  std::vector<std::string> failures(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run_job(configs[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = options.jobs > 0 ? static_cast<unsigned>(options.jobs) : hw;
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::min<std::size_t>(jobs, configs.size()); ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) throw UsageError("sweep: run " + std::to_string(i) + " failed: " + failures[i]);
  }

  for (std::size_t p = 0; p < points.size(); ++p) {
    SweepRow row;
    row.params = points[p];
    row.seeds = static_cast<int>(seeds.size());
    int reached = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& r = results[p * seeds.size() + s];
      if (r.aborted) {
        ++row.aborted;
        continue;
      }
      row.mean_v_r += r.metrics.v_r;
      row.mean_v_l += r.metrics.v_l;
      row.mean_v_tr += r.metrics.v_tr;
      row.mean_v_tl += r.metrics.v_tl;
      row.max_v_k = std::max(row.max_v_k, r.metrics.max_v_k());
      if (primary_metric(base.controller, r.metrics) < options.tol) ++reached;
    }
    // Means over completed runs; aborted runs count as not reached.
    if (const int done = row.seeds - row.aborted; done > 0) {
      row.mean_v_r /= done;
      row.mean_v_l /= done;
      row.mean_v_tr /= done;
      row.mean_v_tl /= done;
    }
    row.fraction = static_cast<double>(reached) / row.seeds;
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "point";
  for (const auto& k : table.keys) out << ',' << k;
  out << ",seeds,aborted,mean_V_r,mean_V_l,mean_V_tr,mean_V_tl,max_V_k,fraction\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    out << i;
    for (double p : r.params) out << ',' << format_double(p);
    out << ',' << r.seeds << ',' << r.aborted << ',' << format_double(r.mean_v_r) << ','
        << format_double(r.mean_v_l) << ',' << format_double(r.mean_v_tr) << ',' << format_double(r.mean_v_tl)
        << ',' << format_double(r.max_v_k) << ',' << format_double(r.fraction) << '\n';
  }
}

int cmd_sweep(const fs::path& scenario, const SweepOptions& options, const std::optional<fs::path>& out_file,
              std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig base = load_scenario(scenario);
    const SweepTable table = run_sweep(base, options);
    if (out_file) {
      if (out_file->has_parent_path()) fs::create_directories(out_file->parent_path());
      std::ofstream f(*out_file);
      if (!f) throw UsageError("cannot write " + out_file->string());
      write_sweep_csv(f, table);
    }
    write_sweep_csv(out, table);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Coordination of agents on Lie groups: simulate, check and sweep scenarios"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Simulate a scenario and write trajectory, metrics and manifest");
  std::string run_file;
  RunOverrides overrides;
  std::string run_out;
  run->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  run->add_option("scenario", run_file, "Scenario JSON file")->required();
  run->add_option("--seed", overrides.seed, "Override the scenario seed");
  run->add_option("--h", overrides.h, "Override the step size");
  run->add_option("--t-end", overrides.t_end, "Override the duration");
  run->add_option("--out", run_out, "Output directory (default: $LIECOORD_OUT_DIR or liecoord-out)");

  auto* check = app.add_subcommand("check", "Check coordination on a run directory (exit 0 iff achieved)");
  std::string check_dir;
  std::string mode = "tc";
  CheckOptions check_opts;
  check->add_option("dir", check_dir, "Run output directory")->required();
  check->add_option("--mode", mode, "lic, ric or tc")->check(CLI::IsMember({"lic", "ric", "tc"}));
  check->add_option("--tol", check_opts.tol, "Drift tolerance");
  check->add_option("--window", check_opts.window, "Trailing window in seconds (default: last 10%)");

  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a parameter grid and seed list");
  std::string sweep_file;
  std::optional<std::string> grid;
  std::string seeds;
  std::string sweep_out;
  SweepOptions sweep_opts;
  sweep->add_option("scenario", sweep_file, "Scenario JSON file")->required();
  sweep->add_option("--grid", grid, "Grid such as \"h=1e-2,1e-3;t_end=5,10\"");
  sweep->add_option("--seeds", seeds, "Seeds as a..b or a comma list");
  sweep->add_option("--tol", sweep_opts.tol, "Threshold on the controller's terminal metric");
  sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads (default: hardware concurrency)");
  sweep->add_option("--out", sweep_out, "Also write the table to this CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (*run) {
    return cmd_run(run_file, overrides, run_out.empty() ? default_output_dir() : fs::path(run_out), std::cout,
                   std::cerr);
  }
  if (*check) {
    check_opts.mode = parse_coordination_mode(mode);
    return cmd_check(check_dir, check_opts, std::cout, std::cerr);
  }
  try {
    sweep_opts.grid = grid;
    if (!seeds.empty()) sweep_opts.seeds = parse_seeds(seeds);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return cmd_sweep(sweep_file, sweep_opts, sweep_out.empty() ? std::nullopt : std::optional<fs::path>(sweep_out),
                   std::cout, std::cerr);
}

}  // namespace liecoord
