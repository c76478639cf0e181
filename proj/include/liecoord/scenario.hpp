#pragma once

// Scenario files: JSON with a versioned schema. Unknown keys are rejected and
// every validation error names the offending field.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "liecoord/analysis.hpp"
#include "liecoord/controller.hpp"
#include "liecoord/graph.hpp"
#include "liecoord/groups.hpp"
#include "liecoord/simulator.hpp"
#include "liecoord/steering.hpp"

namespace liecoord {

inline constexpr int kScenarioSchemaVersion = 1;

struct GraphSpec {
  std::string type = "complete";  // complete | empty | chain | ring | path | star | schedule
  bool undirected = true;         // schedule only
  double period = 0.0;            // schedule only
  std::vector<CommGraph::Segment> segments;
};

struct ScenarioConfig {
  std::string group;
  int agents = 0;
  std::uint64_t seed = 0;

  std::string controller = "open_loop";
  bool normalize = true;  // se3_steering_linear only

  // Affine actuation: empty means fully actuated, otherwise the preset name
  // ("se2_steering", "se3_steering") or explicit drift / actuation columns.
  std::string setting_preset;
  std::vector<double> drift;
  std::vector<std::vector<double>> actuation;  // list of columns

  GraphSpec graph;

  std::string positions = "random";  // random | list | tc_configuration
  std::vector<std::vector<double>> position_list;  // payload rows
  double position_box = 1.0;
  std::vector<double> tc_velocity;  // algebra vector for tc_configuration
  std::string aux = "random";       // random | list | common
  std::vector<std::vector<double>> aux_list;
  std::vector<double> aux_common;
  double aux_scale = 1.0;

  SimulationOptions integration;
};

/// Parses and validates; throws UsageError naming the offending field.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Fully resolved scenario (every default spelled out); reparses to the same config.
nlohmann::json to_json(const ScenarioConfig& cfg);

/// FNV-1a 64 of the canonical resolved JSON, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

CommGraph build_graph(const ScenarioConfig& cfg);

/// Controllers accepted in scenario files.
const std::vector<std::string>& controller_names();

namespace detail {

template <LieGroup G>
typename G::Tangent tangent_from(const std::vector<double>& v, const std::string& field) {
  if (static_cast<int>(v.size()) != G::kDof) {
    throw UsageError(field + ": expected " + std::to_string(G::kDof) + " entries for " +
                     std::string(G::kName));
  }
  typename G::Tangent out;
  for (int i = 0; i < G::kDof; ++i) out(i) = v[i];
  return out;
}

template <LieGroup G>
ControlSetting<G> control_setting_for(const ScenarioConfig& cfg) {
  if (cfg.setting_preset == "se2_steering") {
    if constexpr (std::is_same_v<G, SE2d>) return se2_steering_setting<double>();
    throw UsageError("control_setting.preset: se2_steering requires group SE2");
  }
  if (cfg.setting_preset == "se3_steering") {
    if constexpr (std::is_same_v<G, SE3d>) return se3_steering_setting<double>();
    throw UsageError("control_setting.preset: se3_steering requires group SE3");
  }
  if (cfg.drift.empty() && cfg.actuation.empty()) return ControlSetting<G>::fully_actuated();
  ControlSetting<G> cs;
  cs.drift = tangent_from<G>(cfg.drift.empty() ? std::vector<double>(G::kDof, 0.0) : cfg.drift,
                             "control_setting.drift");
  if (cfg.actuation.empty()) throw UsageError("control_setting.actuation: required with a drift");
  cs.actuation.resize(G::kDof, static_cast<int>(cfg.actuation.size()));
  for (std::size_t c = 0; c < cfg.actuation.size(); ++c) {
    cs.actuation.col(static_cast<int>(c)) = tangent_from<G>(cfg.actuation[c], "control_setting.actuation");
  }
  try {
    cs.validate();
  } catch (const UsageError& e) {
    throw UsageError(std::string("control_setting: ") + e.what());
  }
  return cs;
}

}  // namespace detail

template <LieGroup G>
std::unique_ptr<Controller<G>> make_controller(const ScenarioConfig& cfg) {
  const std::string& name = cfg.controller;
  const bool custom_setting = !cfg.setting_preset.empty() || !cfg.drift.empty() || !cfg.actuation.empty();
  auto plain = [&]() {
    if (custom_setting) {
      throw UsageError("control_setting: controller '" + name + "' is fully actuated only");
    }
  };
  if (name == "open_loop") return plain(), std::make_unique<OpenLoop<G>>();
  if (name == "ric_consensus") return plain(), std::make_unique<RicConsensus<G>>();
  if (name == "lic_consensus") return plain(), std::make_unique<LicConsensus<G>>();
  if (name == "combined_velocity_consensus") return plain(), std::make_unique<CombinedVelocityConsensus<G>>();
  if (name == "tc_right_cascade") return plain(), std::make_unique<TcRightCascade<G>>();
  if (name == "tc_left_cascade") return std::make_unique<TcLeftCascade<G>>(detail::control_setting_for<G>(cfg));
  if (name == "underactuated_lic") {
    return std::make_unique<UnderactuatedLic<G>>(detail::control_setting_for<G>(cfg));
  }
  if (name == "se3_steering_linear" || name == "se3_steering_helical") {
    if constexpr (std::is_same_v<G, SE3d>) {
      if (custom_setting && cfg.setting_preset != "se3_steering") {
        throw UsageError("control_setting: steering controllers fix their own setting");
      }
      if (name == "se3_steering_linear") return std::make_unique<Se3SteeringLinear<double>>(cfg.normalize);
      return std::make_unique<Se3SteeringHelical<double>>();
    }
    throw UsageError("controller.type: " + name + " requires group SE3");
  }
  std::string valid;
  for (const auto& n : controller_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw UsageError("controller.type: unknown controller '" + name + "' (valid: " + valid + ")");
}

/// Initial swarm: positions first (agent order), then aux blocks, from one seeded stream.
template <LieGroup G>
SwarmState<G> initial_state(const ScenarioConfig& cfg, const Controller<G>& controller) {
  std::mt19937_64 rng(cfg.seed);
  SwarmState<G> s;
  const int n = cfg.agents;
  if (cfg.positions == "random") {
    for (int k = 0; k < n; ++k) s.g.push_back(G::random(rng, cfg.position_box));
  } else if (cfg.positions == "list") {
    if (static_cast<int>(cfg.position_list.size()) != n) {
      throw UsageError("initial.position_list: expected one entry per agent");
    }
    for (const auto& row : cfg.position_list) {
      if (static_cast<int>(row.size()) != G::kPayloadSize) {
        throw UsageError("initial.position_list: expected " + std::to_string(G::kPayloadSize) +
                         " payload values per agent for " + std::string(G::kName));
      }
      typename G::Payload p;
      for (int i = 0; i < G::kPayloadSize; ++i) p(i) = row[i];
      const G g = G::from_payload(p);
      if (g.manifold_error() > kManifoldTolerance) {
        throw UsageError("initial.position_list: entry violates the manifold constraint");
      }
      s.g.push_back(g);
    }
  } else {  // tc_configuration along the path 0-1-...-(N-1)
    std::vector<std::pair<int, int>> tree;
    for (int k = 0; k + 1 < n; ++k) tree.emplace_back(k, k + 1);
    s.g = generate_tc_configuration<G>(detail::tangent_from<G>(cfg.tc_velocity, "initial.tc_velocity"), n,
                                       tree, rng, cfg.position_box);
  }

  const int m = controller.aux_size();
  auto block = [&](const std::vector<double>& v, const std::string& field) {
    if (static_cast<int>(v.size()) != m) {
      throw UsageError(field + ": controller '" + std::string(controller.name()) + "' expects " +
                       std::to_string(m) + " aux values per agent");
    }
    VectorX<double> a(m);
    for (int i = 0; i < m; ++i) a(i) = v[i];
    return a;
  };
  if (cfg.aux == "random") {
    for (int k = 0; k < n; ++k) s.aux.push_back(controller.sample_aux(rng, cfg.aux_scale));
  } else if (cfg.aux == "list") {
    if (static_cast<int>(cfg.aux_list.size()) != n) throw UsageError("initial.aux_list: expected one entry per agent");
    for (const auto& row : cfg.aux_list) s.aux.push_back(block(row, "initial.aux_list"));
  } else {
    const auto a = block(cfg.aux_common, "initial.aux_common");
    s.aux.assign(n, a);
  }
  return s;
}

template <LieGroup G>
Trajectory<G> run_scenario(const ScenarioConfig& cfg) {
  const auto controller = make_controller<G>(cfg);
  const CommGraph graph = build_graph(cfg);
  return simulate(initial_state<G>(cfg, *controller), *controller, graph, cfg.integration);
}

}  // namespace liecoord
