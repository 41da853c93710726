#include "manet/scenario/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace manet {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(key + ": not a non-negative integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

NodeId to_node(const std::string& key, const std::string& v) {
  const auto n = to_uint(key, v);
  if (n == 0 || n > 0xffffffffULL) throw ConfigError(key + ": node ids start at 1: '" + v + "'");
  return NodeId(static_cast<std::uint32_t>(n));
}

std::vector<NodeId> to_nodes(const std::string& key, const std::string& v) {
  std::vector<NodeId> out;
  for (const auto& item : split(v, ',')) out.push_back(to_node(key, item));
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string join(const std::vector<NodeId>& ids) {
  std::string out;
  for (NodeId id : ids) {
    if (!out.empty()) out += ',';
    out += to_string(id);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define DOUBLE_FIELD(name, member)                                                                 \
  Field {                                                                                          \
    name, [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.member = to_double(k, v); }, \
        [](const ScenarioConfig& c) { return fmt(c.member); }                                      \
  }
#define UINT_FIELD(name, member, type)                                                             \
  Field {                                                                                          \
    name, [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.member = static_cast<type>(to_uint(k, v)); }, \
        [](const ScenarioConfig& c) { return std::to_string(c.member); }                           \
  }
#define BOOL_FIELD(name, member)                                                                   \
  Field {                                                                                          \
    name, [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.member = to_bool(k, v); }, \
        [](const ScenarioConfig& c) { return std::string(c.member ? "true" : "false"); }           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      UINT_FIELD("nodes", nodes, std::size_t),
      DOUBLE_FIELD("area_width", area.width),
      DOUBLE_FIELD("area_height", area.height),
      DOUBLE_FIELD("duration", duration_s),
      DOUBLE_FIELD("range", range),
      DOUBLE_FIELD("max_speed", max_speed),
      DOUBLE_FIELD("pause", pause_s),
      UINT_FIELD("flows", flows, std::size_t),
      DOUBLE_FIELD("packet_rate", packet_rate),
      UINT_FIELD("payload", payload, std::uint32_t),
      DOUBLE_FIELD("flow_start_max", flow_start_max_s),
      DOUBLE_FIELD("drain", drain_s),
      UINT_FIELD("seed", seed, std::uint64_t),
      BOOL_FIELD("detection", detection),
      UINT_FIELD("k", k, std::size_t),
      Field{"propagate",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              if (v == "piggyback") {
                c.propagate = PropagationMode::piggyback;
              } else if (v == "neighborhood") {
                c.propagate = PropagationMode::neighborhood;
              } else {
                throw ConfigError(k + ": expected piggyback or neighborhood, got '" + v + "'");
              }
            },
            [](const ScenarioConfig& c) {
              return std::string(c.propagate == PropagationMode::piggyback ? "piggyback" : "neighborhood");
            }},
      DOUBLE_FIELD("base_loss_prob", base_loss_prob),
      Field{"buffer_capacity",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              if (v == "inf" || v == "unbounded") {
                c.buffer_capacity.reset();
              } else {
                c.buffer_capacity = static_cast<std::size_t>(to_uint(k, v));
              }
            },
            [](const ScenarioConfig& c) {
              return c.buffer_capacity ? std::to_string(*c.buffer_capacity) : std::string("inf");
            }},
      DOUBLE_FIELD("per_hop_latency", per_hop_latency_s),
      DOUBLE_FIELD("discovery_timeout", discovery_timeout_s),
      DOUBLE_FIELD("route_lifetime", route_lifetime_s),
      UINT_FIELD("pending_capacity", pending_capacity, std::size_t),
      UINT_FIELD("max_malicious", max_malicious, std::size_t),

      UINT_FIELD("grayhole.count", grayhole.count, std::size_t),
      DOUBLE_FIELD("grayhole.p_gb", grayhole.p_gb),
      DOUBLE_FIELD("grayhole.p_bg", grayhole.p_bg),
      DOUBLE_FIELD("grayhole.min_rate", grayhole.min_rate),
      DOUBLE_FIELD("grayhole.max_rate", grayhole.max_rate),
      DOUBLE_FIELD("grayhole.phase_tick", grayhole.phase_tick_s),
      Field{"grayhole.initial_phase",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              if (v == "good") {
                c.grayhole.initial_phase = Phase::good;
              } else if (v == "bad") {
                c.grayhole.initial_phase = Phase::bad;
              } else {
                throw ConfigError(k + ": expected good or bad, got '" + v + "'");
              }
            },
            [](const ScenarioConfig& c) {
              return std::string(c.grayhole.initial_phase == Phase::good ? "good" : "bad");
            }},
      Field{"grayhole.victims",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              if (v.empty() || v == "all") {
                c.grayhole.victims.reset();
                return;
              }
              const auto ids = to_nodes(k, v);
              c.grayhole.victims = std::set<NodeId>(ids.begin(), ids.end());
            },
            [](const ScenarioConfig& c) {
              if (!c.grayhole.victims) return std::string("all");
              return join(std::vector<NodeId>(c.grayhole.victims->begin(), c.grayhole.victims->end()));
            }},
      BOOL_FIELD("grayhole.collude", grayhole.collude),
      BOOL_FIELD("grayhole.sync_evasion", grayhole.sync_evasion),
      DOUBLE_FIELD("grayhole.evasion_window", grayhole.evasion_window_s),
      Field{"grayhole.ids",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.grayhole.ids = to_nodes(k, v); },
            [](const ScenarioConfig& c) { return join(c.grayhole.ids); }},
      Field{"grayhole.badmouth_target",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              if (v.empty() || v == "none") {
                c.grayhole.badmouth_target.reset();
              } else {
                c.grayhole.badmouth_target = to_node(k, v);
              }
            },
            [](const ScenarioConfig& c) {
              return c.grayhole.badmouth_target ? to_string(*c.grayhole.badmouth_target) : std::string("none");
            }},

      DOUBLE_FIELD("detect.d_max", detect.invocation.max_drop_fraction),
      DOUBLE_FIELD("detect.qos_window", detect.invocation.qos_window_s),
      DOUBLE_FIELD("detect.min_period", detect.invocation.min_period_s),
      DOUBLE_FIELD("detect.max_period", detect.invocation.max_period_s),
      Field{"detect.period",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              if (v.empty() || v == "auto") {
                c.detect.period_s.reset();
              } else {
                c.detect.period_s = to_double(k, v);
              }
            },
            [](const ScenarioConfig& c) { return c.detect.period_s ? fmt(*c.detect.period_s) : std::string("auto"); }},
      DOUBLE_FIELD("detect.threshold", detect.threshold_s),
      BOOL_FIELD("detect.churn_scaling", detect.churn_scaling),
      DOUBLE_FIELD("detect.epoch_length", detect.epoch_length_s),
      DOUBLE_FIELD("detect.rrep_wait", detect.rrep_wait_s),
      DOUBLE_FIELD("detect.probe_slack", detect.probe_slack_s),
      DOUBLE_FIELD("detect.query_timeout", detect.query_timeout_s),
      DOUBLE_FIELD("detect.probe_gap", detect.probe_gap_s),
      DOUBLE_FIELD("detect.coop_window", detect.coop_window_s),
      UINT_FIELD("detect.coop_scope", detect.coop_scope, std::uint32_t),
      Field{"detect.through_rule",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              if (v == "final_hop") {
                c.detect.through_rule = ThroughRule::final_hop;
              } else if (v == "any_forward") {
                c.detect.through_rule = ThroughRule::any_forward;
              } else {
                throw ConfigError(k + ": expected final_hop or any_forward, got '" + v + "'");
              }
            },
            [](const ScenarioConfig& c) {
              return std::string(c.detect.through_rule == ThroughRule::final_hop ? "final_hop" : "any_forward");
            }},
      UINT_FIELD("detect.alarm_hops", detect.alarm_hops, std::uint32_t),
      BOOL_FIELD("detect.corroborate", detect.corroborate),

      Field{"positions",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              c.positions.clear();
              for (const auto& item : split(v, ';')) {
                const auto colon = item.find(':');
                const auto comma = item.find(',');
                if (colon == std::string::npos || comma == std::string::npos || comma < colon)
                  throw ConfigError(k + ": expected id:x,y entries, got '" + item + "'");
                const NodeId id = to_node(k, trim(item.substr(0, colon)));
                const double x = to_double(k, trim(item.substr(colon + 1, comma - colon - 1)));
                const double y = to_double(k, trim(item.substr(comma + 1)));
                if (!c.positions.emplace(id, Position{x, y}).second)
                  throw ConfigError(k + ": node " + to_string(id) + " placed twice");
              }
            },
            [](const ScenarioConfig& c) {
              std::string out;
              for (const auto& [id, p] : c.positions) {
                if (!out.empty()) out += ';';
                out += to_string(id) + ":" + fmt(p.x) + "," + fmt(p.y);
              }
              return out;
            }},
      Field{"flow_pairs",
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
              c.flow_pairs.clear();
              for (const auto& item : split(v, ';')) {
                const auto gt = item.find('>');
                if (gt == std::string::npos) throw ConfigError(k + ": expected src>dst entries, got '" + item + "'");
                c.flow_pairs.push_back(FlowSpec{to_node(k, trim(item.substr(0, gt))), to_node(k, trim(item.substr(gt + 1)))});
              }
            },
            [](const ScenarioConfig& c) {
              std::string out;
              for (const auto& f : c.flow_pairs) {
                if (!out.empty()) out += ';';
                out += to_string(f.src) + ">" + to_string(f.dst);
              }
              return out;
            }},
  };
  return table;
}

#undef DOUBLE_FIELD
#undef UINT_FIELD
#undef BOOL_FIELD

}  // namespace

SimTime ScenarioConfig::detection_period() const {
  if (detect.period_s) {
    if (*detect.period_s <= 0.0) throw ConfigError("detect.period must be > 0");
    return SimTime::from_seconds(*detect.period_s);
  }
  InvocationPolicy p = detect.invocation;
  p.packet_rate = packet_rate;
  return how_often_to_detect(p);
}

void ScenarioConfig::validate() const {
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) errors.push_back(what);
  };
  auto prob = [&](double p, const char* key) { check(p >= 0.0 && p <= 1.0, std::string(key) + " must lie in [0,1]"); };

  check(nodes >= 2, "nodes must be >= 2");
  check(area.width > 0 && area.height > 0, "area_width and area_height must be > 0");
  check(duration_s > 0, "duration must be > 0");
  check(range > 0, "range must be > 0");
  check(max_speed >= 0, "max_speed must be >= 0");
  check(pause_s >= 0, "pause must be >= 0");
  check(packet_rate > 0, "packet_rate must be > 0");
  check(payload > 0, "payload must be > 0");
  check(flow_start_max_s >= 0, "flow_start_max must be >= 0");
  check(drain_s >= 0 && drain_s < duration_s, "drain must lie in [0, duration)");
  check(k >= 1, "k must be >= 1");
  prob(base_loss_prob, "base_loss_prob");
  check(!buffer_capacity || *buffer_capacity >= 1, "buffer_capacity must be >= 1 or inf");
  check(per_hop_latency_s > 0, "per_hop_latency must be > 0");
  check(discovery_timeout_s > 0, "discovery_timeout must be > 0");
  check(route_lifetime_s > 0, "route_lifetime must be > 0");
  check(pending_capacity >= 1, "pending_capacity must be >= 1");

  const std::size_t adversaries = grayhole.ids.empty() ? grayhole.count : grayhole.ids.size();
  check(grayhole.ids.empty() || grayhole.count == 0 || grayhole.count == grayhole.ids.size(),
        "grayhole.count disagrees with grayhole.ids");
  check(adversaries <= max_malicious,
        "grayhole.count " + std::to_string(adversaries) + " exceeds max_malicious " + std::to_string(max_malicious));
  check(adversaries < nodes, "grayhole.count must leave at least one honest node");
  prob(grayhole.p_gb, "grayhole.p_gb");
  prob(grayhole.p_bg, "grayhole.p_bg");
  prob(grayhole.min_rate, "grayhole.min_rate");
  prob(grayhole.max_rate, "grayhole.max_rate");
  check(grayhole.min_rate <= grayhole.max_rate, "grayhole.min_rate must not exceed grayhole.max_rate");
  check(grayhole.phase_tick_s > 0, "grayhole.phase_tick must be > 0");
  check(grayhole.evasion_window_s >= 0, "grayhole.evasion_window must be >= 0");
  for (NodeId id : grayhole.ids) check(id.value() <= nodes, "grayhole.ids: node " + to_string(id) + " does not exist");
  check(std::set<NodeId>(grayhole.ids.begin(), grayhole.ids.end()).size() == grayhole.ids.size(),
        "grayhole.ids: duplicate id");
  if (grayhole.badmouth_target)
    check(grayhole.badmouth_target->value() <= nodes, "grayhole.badmouth_target does not exist");

  check(detect.invocation.max_drop_fraction > 0, "detect.d_max must be > 0");
  check(detect.invocation.qos_window_s > 0, "detect.qos_window must be > 0");
  check(detect.invocation.min_period_s > 0 && detect.invocation.max_period_s >= detect.invocation.min_period_s,
        "detect.min_period/max_period must satisfy 0 < min <= max");
  check(!detect.period_s || *detect.period_s > 0, "detect.period must be > 0");
  check(detect.threshold_s > 0, "detect.threshold must be > 0");
  check(detect.epoch_length_s > 0, "detect.epoch_length must be > 0");
  check(detect.rrep_wait_s > 0 && detect.query_timeout_s > 0 && detect.probe_slack_s >= 0,
        "detect timeouts must be > 0");
  check(detect.probe_gap_s > per_hop_latency_s, "detect.probe_gap must exceed per_hop_latency");
  check(detect.coop_window_s > 0, "detect.coop_window must be > 0");
  check(detect.coop_scope >= 1 && detect.coop_scope <= 8, "detect.coop_scope must lie in [1,8]");
  check(detect.alarm_hops <= 8, "detect.alarm_hops must be <= 8");

  if (!positions.empty()) {
    check(positions.size() == nodes, "positions must place every node");
    for (const auto& [id, p] : positions) {
      check(id.value() >= 1 && id.value() <= nodes, "positions: node " + to_string(id) + " does not exist");
      check(area.contains(p), "positions: node " + to_string(id) + " lies outside the area");
    }
  }
  for (const auto& f : flow_pairs) {
    check(f.src != f.dst, "flow_pairs: source equals destination");
    check(f.src.value() <= nodes && f.dst.value() <= nodes, "flow_pairs: unknown node");
  }

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key=value");
      continue;
    }
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string render_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + "=" + f.get(cfg) + "\n";
  return out;
}

}  // namespace manet
