#include "liecoord/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace liecoord {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      std::string valid;
      for (const auto& a : allowed) valid += (valid.empty() ? "" : ", ") + a;
      throw UsageError((where.empty() ? key : where + "." + key) + ": unknown key (valid: " + valid + ")");
    }
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& field, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(field + ": wrong type");
  }
}

std::vector<double> vec(const json& obj, const std::string& key, const std::string& field) {
  return get<std::vector<double>>(obj, key, field, {});
}

std::vector<std::vector<double>> rows(const json& obj, const std::string& key, const std::string& field) {
  return get<std::vector<std::vector<double>>>(obj, key, field, {});
}

const std::set<std::string> kGraphTypes{"complete", "empty", "chain", "ring", "path", "star", "schedule"};

void require_choice(const std::string& value, const std::set<std::string>& choices, const std::string& field) {
  if (choices.count(value)) return;
  std::string valid;
  for (const auto& c : choices) valid += (valid.empty() ? "" : ", ") + c;
  throw UsageError(field + ": unknown value '" + value + "' (valid: " + valid + ")");
}

}  // namespace

const std::vector<std::string>& controller_names() {
  static const std::vector<std::string> names{
      "open_loop",        "ric_consensus",     "lic_consensus",       "combined_velocity_consensus",
      "tc_right_cascade", "tc_left_cascade",   "underactuated_lic",   "se3_steering_linear",
      "se3_steering_helical"};
  return names;
}

ScenarioConfig parse_scenario(const json& doc) {
  reject_unknown(doc,
                 {"schema_version", "description", "group", "agents", "seed", "controller", "control_setting",
                  "graph", "initial", "integration"},
                 "");
  ScenarioConfig cfg;
  const int version = get<int>(doc, "schema_version", "schema_version", -1);
  if (version != kScenarioSchemaVersion) {
    throw UsageError("schema_version: expected " + std::to_string(kScenarioSchemaVersion));
  }
  cfg.group = get<std::string>(doc, "group", "group", "");
  require_choice(cfg.group, {"SO3", "SE2", "SE3"}, "group");
  cfg.agents = get<int>(doc, "agents", "agents", 0);
  if (cfg.agents < 1) throw UsageError("agents: must be >= 1");
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw UsageError("seed: must be a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }

  if (!doc.contains("controller")) throw UsageError("controller: required");
  const json& ctl = doc.at("controller");
  reject_unknown(ctl, {"type", "normalize"}, "controller");
  cfg.controller = get<std::string>(ctl, "type", "controller.type", "");
  {
    const auto& names = controller_names();
    if (std::find(names.begin(), names.end(), cfg.controller) == names.end()) {
      require_choice(cfg.controller, std::set<std::string>(names.begin(), names.end()), "controller.type");
    }
  }
  cfg.normalize = get<bool>(ctl, "normalize", "controller.normalize", true);

  if (doc.contains("control_setting")) {
    const json& cs = doc.at("control_setting");
    reject_unknown(cs, {"preset", "drift", "actuation"}, "control_setting");
    cfg.setting_preset = get<std::string>(cs, "preset", "control_setting.preset", "");
    if (!cfg.setting_preset.empty()) {
      require_choice(cfg.setting_preset, {"fully_actuated", "se2_steering", "se3_steering"},
                     "control_setting.preset");
      if (cs.contains("drift") || cs.contains("actuation")) {
        throw UsageError("control_setting: give either a preset or drift/actuation, not both");
      }
      if (cfg.setting_preset == "fully_actuated") cfg.setting_preset.clear();
    }
    cfg.drift = vec(cs, "drift", "control_setting.drift");
    cfg.actuation = rows(cs, "actuation", "control_setting.actuation");
  }

  if (doc.contains("graph")) {
    const json& g = doc.at("graph");
    reject_unknown(g, {"type", "undirected", "period", "segments"}, "graph");
    cfg.graph.type = get<std::string>(g, "type", "graph.type", "complete");
    require_choice(cfg.graph.type, kGraphTypes, "graph.type");
    if (cfg.graph.type == "schedule") {
      cfg.graph.undirected = get<bool>(g, "undirected", "graph.undirected", false);
      cfg.graph.period = get<double>(g, "period", "graph.period", 0.0);
      if (!g.contains("segments") || !g.at("segments").is_array()) {
        throw UsageError("graph.segments: required list for a schedule");
      }
      for (const json& seg : g.at("segments")) {
        reject_unknown(seg, {"start", "edges"}, "graph.segments[]");
        CommGraph::Segment s;
        s.start = get<double>(seg, "start", "graph.segments[].start", 0.0);
        for (const auto& e : get<std::vector<std::vector<int>>>(seg, "edges", "graph.segments[].edges", {})) {
          if (e.size() != 2) throw UsageError("graph.segments[].edges: each edge is [from, to]");
          s.edges.push_back({e[0], e[1]});
        }
        cfg.graph.segments.push_back(std::move(s));
      }
    } else if (g.contains("undirected") || g.contains("period") || g.contains("segments")) {
      throw UsageError("graph: undirected/period/segments apply to type 'schedule' only");
    }
  }

  if (doc.contains("initial")) {
    const json& in = doc.at("initial");
    reject_unknown(in,
                   {"positions", "position_list", "position_box", "tc_velocity", "aux", "aux_list", "aux_common",
                    "aux_scale"},
                   "initial");
    cfg.positions = get<std::string>(in, "positions", "initial.positions", "random");
    require_choice(cfg.positions, {"random", "list", "tc_configuration"}, "initial.positions");
    cfg.position_list = rows(in, "position_list", "initial.position_list");
    cfg.position_box = get<double>(in, "position_box", "initial.position_box", 1.0);
    cfg.tc_velocity = vec(in, "tc_velocity", "initial.tc_velocity");
    cfg.aux = get<std::string>(in, "aux", "initial.aux", "random");
    require_choice(cfg.aux, {"random", "list", "common"}, "initial.aux");
    cfg.aux_list = rows(in, "aux_list", "initial.aux_list");
    cfg.aux_common = vec(in, "aux_common", "initial.aux_common");
    cfg.aux_scale = get<double>(in, "aux_scale", "initial.aux_scale", 1.0);
    if (!(cfg.position_box >= 0.0)) throw UsageError("initial.position_box: must be >= 0");
    if (!(cfg.aux_scale >= 0.0)) throw UsageError("initial.aux_scale: must be >= 0");
    if (cfg.positions == "list" && static_cast<int>(cfg.position_list.size()) != cfg.agents) {
      throw UsageError("initial.position_list: expected one entry per agent");
    }
    if (cfg.positions == "tc_configuration" && cfg.tc_velocity.empty()) {
      throw UsageError("initial.tc_velocity: required for tc_configuration positions");
    }
    if (cfg.aux == "list" && static_cast<int>(cfg.aux_list.size()) != cfg.agents) {
      throw UsageError("initial.aux_list: expected one entry per agent");
    }
    if (cfg.aux == "common" && cfg.aux_common.empty()) throw UsageError("initial.aux_common: required");
  }

  if (doc.contains("integration")) {
    const json& it = doc.at("integration");
    reject_unknown(it, {"h", "t_end", "aux_integrator", "reproject_every", "record_every"}, "integration");
    auto& o = cfg.integration;
    o.step = get<double>(it, "h", "integration.h", o.step);
    o.duration = get<double>(it, "t_end", "integration.t_end", o.duration);
    o.aux_integrator = parse_aux_integrator(
        get<std::string>(it, "aux_integrator", "integration.aux_integrator", std::string(to_string(o.aux_integrator))));
    o.reproject_every = get<int>(it, "reproject_every", "integration.reproject_every", o.reproject_every);
    o.record_every = get<int>(it, "record_every", "integration.record_every", o.record_every);
  }
  const auto& o = cfg.integration;
  if (!(o.step > 0.0)) throw UsageError("integration.h: must be > 0");
  if (!(o.duration > 0.0)) throw UsageError("integration.t_end: must be > 0");
  if (o.reproject_every < 0) throw UsageError("integration.reproject_every: must be >= 0");
  if (o.record_every < 1) throw UsageError("integration.record_every: must be >= 1");

  // Surface group-dependent errors (graph, setting, controller) at parse time.
  build_graph(cfg);
  dispatch_group(cfg.group, [&]<LieGroup G>() {
    const auto controller = make_controller<G>(cfg);
    initial_state<G>(cfg, *controller);
  });
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot read scenario file '" + file.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("scenario file '" + file.string() + "': " + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["group"] = cfg.group;
  doc["agents"] = cfg.agents;
  doc["seed"] = cfg.seed;
  doc["controller"] = {{"type", cfg.controller}, {"normalize", cfg.normalize}};
  if (!cfg.setting_preset.empty()) {
    doc["control_setting"] = {{"preset", cfg.setting_preset}};
  } else if (!cfg.drift.empty() || !cfg.actuation.empty()) {
    doc["control_setting"] = {{"drift", cfg.drift}, {"actuation", cfg.actuation}};
  }
  json graph = {{"type", cfg.graph.type}};
  if (cfg.graph.type == "schedule") {
    graph["undirected"] = cfg.graph.undirected;
    graph["period"] = cfg.graph.period;
    json segs = json::array();
    for (const auto& s : cfg.graph.segments) {
      json edges = json::array();
      for (const auto& e : s.edges) edges.push_back({e.from, e.to});
      segs.push_back({{"start", s.start}, {"edges", edges}});
    }
    graph["segments"] = segs;
  }
  doc["graph"] = graph;
  json initial = {{"positions", cfg.positions}, {"position_box", cfg.position_box}, {"aux", cfg.aux},
                  {"aux_scale", cfg.aux_scale}};
  if (cfg.positions == "list") initial["position_list"] = cfg.position_list;
  if (cfg.positions == "tc_configuration") initial["tc_velocity"] = cfg.tc_velocity;
  if (cfg.aux == "list") initial["aux_list"] = cfg.aux_list;
  if (cfg.aux == "common") initial["aux_common"] = cfg.aux_common;
  doc["initial"] = initial;
  const auto& o = cfg.integration;
  doc["integration"] = {{"h", o.step},
                        {"t_end", o.duration},
                        {"aux_integrator", std::string(to_string(o.aux_integrator))},
                        {"reproject_every", o.reproject_every},
                        {"record_every", o.record_every}};
  return doc;
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CommGraph build_graph(const ScenarioConfig& cfg) {
  const int n = cfg.agents;
  const auto& t = cfg.graph.type;
  if (t == "complete") return CommGraph::complete(n);
  if (t == "empty") return CommGraph::empty(n);
  if (t == "chain") return CommGraph::directed_chain(n);
  if (t == "ring") return CommGraph::ring(n);
  if (t == "path") return CommGraph::path(n);
  if (t == "star") return CommGraph::star(n);
  return CommGraph(n, cfg.graph.segments, cfg.graph.undirected, cfg.graph.period);
}

}  // namespace liecoord
