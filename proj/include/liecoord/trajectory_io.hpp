#pragma once

// Run artifacts: trajectory.csv, metrics.csv and manifest.json. Numbers are
// written with 17 significant digits so doubles round-trip exactly.

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liecoord/groups.hpp"
#include "liecoord/scenario.hpp"
#include "liecoord/simulator.hpp"

namespace liecoord {

inline constexpr int kManifestSchemaVersion = 1;

std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  /// Throws UsageError when the column is missing.
  std::size_t column(const std::string& name) const;
};

/// Reads a numeric CSV with one header line; throws UsageError on malformed input.
CsvTable read_csv(std::istream& in, const std::string& what);

std::vector<std::string> trajectory_header(std::string_view group, int aux_size);

template <LieGroup G>
void write_trajectory_csv(std::ostream& out, const Trajectory<G>& traj) {
  const int m = traj.samples.empty() || traj.samples.front().aux.empty()
                    ? 0
                    : static_cast<int>(traj.samples.front().aux.front().size());
  const auto header = trajectory_header(G::kName, m);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& s : traj.samples) {
    for (std::size_t k = 0; k < s.g.size(); ++k) {
      out << format_double(s.t) << ',' << k;
      const auto p = s.g[k].payload();
      for (int i = 0; i < p.size(); ++i) out << ',' << format_double(static_cast<double>(p(i)));
      for (int i = 0; i < G::kDof; ++i) out << ',' << format_double(static_cast<double>(s.velocity[k](i)));
      for (int i = 0; i < s.aux[k].size(); ++i) out << ',' << format_double(static_cast<double>(s.aux[k](i)));
      out << '\n';
    }
  }
}

template <LieGroup G>
void write_metrics_csv(std::ostream& out, const Trajectory<G>& traj) {
  const std::size_t n = traj.samples.empty() ? 0 : traj.samples.front().g.size();
  out << "t,V_r,V_l,V_tr,V_tl";
  for (std::size_t k = 0; k < n; ++k) out << ",V_k_" << k;
  out << '\n';
  for (const auto& s : traj.samples) {
    const auto& m = s.metrics;
    out << format_double(s.t) << ',' << format_double(m.v_r) << ',' << format_double(m.v_l) << ','
        << format_double(m.v_tr) << ',' << format_double(m.v_tl);
    for (double v : m.v_k) out << ',' << format_double(v);
    out << '\n';
  }
}

/// Rebuilds samples (t, g, velocity, aux) from trajectory.csv.
template <LieGroup G>
Trajectory<G> read_trajectory_csv(std::istream& in) {
  const CsvTable table = read_csv(in, "trajectory.csv");
  const std::size_t first_payload = 2;
  const std::size_t first_xi = first_payload + G::kPayloadSize;
  const std::size_t first_aux = first_xi + G::kDof;
  if (table.header.size() < first_aux || table.header[0] != "t" || table.header[1] != "agent") {
    throw UsageError("trajectory.csv: header does not match group " + std::string(G::kName));
  }
  const int m = static_cast<int>(table.header.size() - first_aux);
  if (table.header != trajectory_header(G::kName, m)) {
    throw UsageError("trajectory.csv: header does not match group " + std::string(G::kName));
  }
  Trajectory<G> traj;
  for (const auto& row : table.rows) {
    const int agent = static_cast<int>(row[1]);
    if (agent == 0) {
      traj.samples.emplace_back();
      traj.samples.back().t = row[0];
    }
    if (traj.samples.empty() || row[0] != traj.samples.back().t ||
        agent != static_cast<int>(traj.samples.back().g.size())) {
      throw UsageError("trajectory.csv: rows are not grouped by time and agent");
    }
    auto& s = traj.samples.back();
    typename G::Payload p;
    for (int i = 0; i < G::kPayloadSize; ++i) p(i) = row[first_payload + i];
    s.g.push_back(G::from_payload(p));
    typename G::Tangent xi;
    for (int i = 0; i < G::kDof; ++i) xi(i) = row[first_xi + i];
    s.velocity.push_back(xi);
    VectorX<typename G::Scalar> aux(m);
    for (int i = 0; i < m; ++i) aux(i) = row[first_aux + i];
    s.aux.push_back(aux);
  }
  for (const auto& s : traj.samples) {
    if (s.g.size() != traj.samples.front().g.size()) {
      throw UsageError("trajectory.csv: agent count changes between samples");
    }
  }
  if (traj.samples.size() >= 2) traj.step = traj.samples[1].t - traj.samples[0].t;
  return traj;
}

nlohmann::json event_to_json(const Event& e);

template <LieGroup G>
nlohmann::json make_manifest(const ScenarioConfig& cfg, const Trajectory<G>& traj) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : traj.events) events.push_back(event_to_json(e));
  return {{"schema_version", kManifestSchemaVersion},
          {"config_hash", config_hash(cfg)},
          {"seed", cfg.seed},
          {"group", cfg.group},
          {"agents", cfg.agents},
          {"controller", cfg.controller},
          {"h", cfg.integration.step},
          {"t_end", cfg.integration.duration},
          {"aux_integrator", std::string(to_string(cfg.integration.aux_integrator))},
          {"samples", traj.samples.size()},
          {"aborted", traj.aborted},
          {"abort_reason", traj.abort_reason},
          {"events", events},
          {"scenario", to_json(cfg)}};
}

/// Writes trajectory.csv, metrics.csv and manifest.json into `dir` (created if needed).
template <LieGroup G>
void write_run(const std::filesystem::path& dir, const ScenarioConfig& cfg, const Trajectory<G>& traj) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw UsageError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("trajectory.csv");
    write_trajectory_csv(f, traj);
  }
  {
    auto f = open("metrics.csv");
    write_metrics_csv(f, traj);
  }
  auto f = open("manifest.json");
  f << make_manifest(cfg, traj).dump(2) << '\n';
}

nlohmann::json read_manifest(const std::filesystem::path& dir);

template <LieGroup G>
Trajectory<G> read_run_trajectory(const std::filesystem::path& dir) {
  std::ifstream in(dir / "trajectory.csv");
  if (!in) throw UsageError("missing " + (dir / "trajectory.csv").string());
  return read_trajectory_csv<G>(in);
}

}  // namespace liecoord
