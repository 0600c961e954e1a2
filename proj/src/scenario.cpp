#include <json.hpp>

#include <algorithm>
#include <set>

#include "zircon/error.hpp"
#include "zircon/netsim.hpp"

namespace zircon {

using nlohmann::json;

void ScenarioConfig::validate() const {
  std::vector<std::string> problems;
  auto bad = [&](std::string what) { problems.push_back(std::move(what)); };

  const auto& topo = topology;
  if (topo.length <= 0 || topo.width <= 0) bad("area: length and width must be positive");
  if (topo.default_link_delay < 0) bad("link_delay_ms: must be non-negative");
  if (topo.nodes.empty()) bad("nodes: at least one node is required");

  std::map<NodeId, const NodeIdentity*> by_id;
  std::set<Ipv4Address> ips;
  for (const auto& n : topo.nodes) {
    const auto tag = "nodes[id=" + std::to_string(n.identity.id) + "]";
    if (!by_id.emplace(n.identity.id, &n.identity).second) bad(tag + ": duplicate id");
    if (!ips.insert(n.identity.ip).second) bad(tag + ": duplicate ip " + n.identity.ip.to_string());
    if (n.x < 0 || n.x > topo.length || n.y < 0 || n.y > topo.width) {
      bad(tag + ": position outside the deployment area");
    }
  }

  if (topo.routes.empty()) bad("routes: at least one route is required");
  std::set<NodeId> sources;
  for (std::size_t r = 0; r < topo.routes.size(); ++r) {
    const auto& route = topo.routes[r];
    const auto tag = "routes[" + std::to_string(r) + "]";
    if (route.path.size() < 2) {
      bad(tag + ": path needs a source and a gateway");
      continue;
    }
    if (route.path.size() > 254) bad(tag + ": path longer than the 8-bit hop field allows");
    if (mode == ScenarioMode::singlehop && route.path.size() != 2) {
      bad(tag + ": singlehop mode requires source -> gateway paths");
    }
    if (!route.link_delays.empty() && route.link_delays.size() != route.links()) {
      bad(tag + ": link_delays_ms needs one entry per link");
    }
    for (auto d : route.link_delays) {
      if (d < 0) bad(tag + ": negative link delay");
    }
    if (!sources.insert(route.path.front()).second) bad(tag + ": second route for the same source");
    for (std::size_t i = 0; i < route.path.size(); ++i) {
      const auto it = by_id.find(route.path[i]);
      if (it == by_id.end()) {
        bad(tag + ": unknown node " + std::to_string(route.path[i]));
        continue;
      }
      const auto& node = *it->second;
      const Role want = i == 0 ? Role::source
                        : i + 1 == route.path.size() ? Role::gateway
                                                     : Role::intermediate;
      if (node.role != want) {
        bad(tag + ": node " + std::to_string(node.id) + " must be a " + std::string(to_string(want)));
      }
      if (!node.registered) bad(tag + ": node " + std::to_string(node.id) + " is not registered");
    }
  }

  for (std::size_t t = 0; t < traffic.size(); ++t) {
    const auto& spec = traffic[t];
    const auto tag = "traffic[" + std::to_string(t) + "]";
    if (topo.route_from(spec.source) == nullptr) bad(tag + ": source has no route");
    if (spec.payload_size > 0xFFFF) bad(tag + ": payload_size exceeds 65535");
    if (spec.interval < 0 || spec.start < 0) bad(tag + ": negative time");
  }

  for (std::size_t a = 0; a < attacks.size(); ++a) {
    const auto& attack = attacks[a];
    const auto tag = "attacks[" + std::to_string(a) + "]";
    try {
      attack.validate();
    } catch (const Error& e) {
      bad(tag + ": " + e.what());
    }
    if (mode == ScenarioMode::singlehop &&
        (attack.kind == AttackKind::fake_inject || attack.kind == AttackKind::modify_watermark)) {
      bad(tag + ": " + std::string(to_string(attack.kind)) + " needs the multihop profile");
    }
    std::size_t max_links = 0;
    for (const auto& r : topo.routes) max_links = std::max(max_links, r.links());
    if (attack.kind != AttackKind::store_probe && attack.link > max_links) {
      bad(tag + ": link " + std::to_string(attack.link) + " does not exist");
    }
  }

  if (key_rotation.min > key_rotation.max) bad("key_rotation: min exceeds max");
  if (drop_timeout < 0) bad("drop_timeout_ms: must be non-negative");

  if (!problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw Error(Errc::validation, msg);
  }
}

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(Errc::validation, where + ": unknown field '" + key + "'");
    }
  }
}

PacketId parse_packet(const json& j) {
  return {j.at("source").get<NodeId>(), j.at("sequence").get<Sequence>()};
}

AttackSpec parse_attack(const json& j, std::size_t index) {
  const auto where = "attacks[" + std::to_string(index) + "]";
  reject_unknown(j,
                 {"kind", "link", "trigger", "delay_ms", "mutate_watermark", "insertions",
                  "delete_count", "delete_position", "edits", "at_ms", "impersonate",
                  "insider_store", "forged_epoch", "payload_size", "caller", "target"},
                 where);
  AttackSpec a;
  a.kind = parse_attack_kind(j.at("kind").get<std::string>());
  a.link = j.value("link", std::size_t{1});
  if (j.contains("trigger")) {
    const auto& t = j["trigger"];
    reject_unknown(t, {"source", "sequence", "from_ms", "to_ms"}, where + ".trigger");
    if (t.contains("source") || t.contains("sequence")) a.trigger.packet = parse_packet(t);
    if (t.contains("from_ms")) a.trigger.from = t["from_ms"].get<SimTime>();
    if (t.contains("to_ms")) a.trigger.to = t["to_ms"].get<SimTime>();
  }
  a.delay = j.value("delay_ms", SimTime{0});
  a.mutate_watermark = j.value("mutate_watermark", false);
  for (const auto& ins : j.value("insertions", json::array())) {
    a.insertions.push_back({ins.at("position").get<std::size_t>(), ins.value("value", 0) != 0});
  }
  a.delete_count = j.value("delete_count", std::size_t{0});
  if (j.contains("delete_position")) a.delete_position = j["delete_position"].get<std::size_t>();
  for (const auto& e : j.value("edits", json::array())) {
    a.edits.push_back({e.at("offset").get<std::size_t>(), e.value("mask", std::uint8_t{1})});
  }
  a.at = j.value("at_ms", SimTime{0});
  a.impersonate = j.value("impersonate", NodeId{0});
  a.insider_store = j.value("insider_store", true);
  a.forged_epoch = j.value("forged_epoch", std::uint32_t{0xF0000000u});
  a.payload_size = j.value("payload_size", std::size_t{16});
  a.caller = j.value("caller", NodeId{0xFFFF});
  if (j.contains("target")) a.probe_target = parse_packet(j["target"]);
  return a;
}

json attack_to_json(const AttackSpec& a) {
  json j;
  j["kind"] = std::string(to_string(a.kind));
  j["link"] = a.link;
  json trigger = json::object();
  if (a.trigger.packet) {
    trigger["source"] = a.trigger.packet->source;
    trigger["sequence"] = a.trigger.packet->sequence;
  }
  if (a.trigger.from) trigger["from_ms"] = *a.trigger.from;
  if (a.trigger.to) trigger["to_ms"] = *a.trigger.to;
  if (!trigger.empty()) j["trigger"] = trigger;
  switch (a.kind) {
    case AttackKind::replay:
      j["delay_ms"] = a.delay;
      j["mutate_watermark"] = a.mutate_watermark;
      break;
    case AttackKind::insert_bits:
      j["insertions"] = json::array();
      for (const auto& ins : a.insertions) {
        j["insertions"].push_back({{"position", ins.position}, {"value", ins.value ? 1 : 0}});
      }
      break;
    case AttackKind::delete_bits:
      j["delete_count"] = a.delete_count;
      if (a.delete_position) j["delete_position"] = *a.delete_position;
      break;
    case AttackKind::fake_inject:
      j["at_ms"] = a.at;
      j["impersonate"] = a.impersonate;
      j["insider_store"] = a.insider_store;
      j["forged_epoch"] = a.forged_epoch;
      j["payload_size"] = a.payload_size;
      break;
    case AttackKind::store_probe:
      j["at_ms"] = a.at;
      j["caller"] = a.caller;
      if (a.probe_target) {
        j["target"] = {{"source", a.probe_target->source}, {"sequence", a.probe_target->sequence}};
      }
      break;
    default:
      break;
  }
  if (!a.edits.empty()) {
    j["edits"] = json::array();
    for (const auto& e : a.edits) j["edits"].push_back({{"offset", e.offset}, {"mask", e.mask}});
  }
  return j;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, e.what());
  }
  if (!j.is_object()) throw Error(Errc::parse, "scenario must be a JSON object");

  ScenarioConfig c;
  try {
    reject_unknown(j,
                   {"seed", "mode", "area", "link_delay_ms", "freshness_s", "time_base_s",
                    "purge_on_delivery", "drop_timeout_ms", "key_rotation", "nodes", "routes",
                    "traffic", "attacks"},
                   "scenario");
    if (!j.contains("seed")) throw Error(Errc::validation, "scenario: 'seed' is required");
    c.seed = j["seed"].get<std::uint64_t>();
    const auto mode = j.value("mode", std::string("multihop"));
    if (mode == "multihop") {
      c.mode = ScenarioMode::multihop;
    } else if (mode == "singlehop") {
      c.mode = ScenarioMode::singlehop;
    } else {
      throw Error(Errc::validation, "mode: expected singlehop or multihop, got '" + mode + "'");
    }
    if (j.contains("area")) {
      reject_unknown(j["area"], {"length", "width"}, "area");
      c.topology.length = j["area"].value("length", c.topology.length);
      c.topology.width = j["area"].value("width", c.topology.width);
    }
    c.topology.default_link_delay = j.value("link_delay_ms", c.topology.default_link_delay);
    c.freshness_seconds = j.value("freshness_s", c.freshness_seconds);
    c.time_base_seconds = j.value("time_base_s", c.time_base_seconds);
    c.purge_on_delivery = j.value("purge_on_delivery", c.purge_on_delivery);
    c.drop_timeout = j.value("drop_timeout_ms", c.drop_timeout);
    if (j.contains("key_rotation")) {
      reject_unknown(j["key_rotation"], {"min", "max"}, "key_rotation");
      c.key_rotation.min = j["key_rotation"].value("min", 0u);
      c.key_rotation.max = j["key_rotation"].value("max", 0u);
    }
    for (const auto& n : j.value("nodes", json::array())) {
      reject_unknown(n, {"id", "ip", "role", "x", "y", "registered"}, "nodes");
      PlacedNode p;
      p.identity.id = n.at("id").get<NodeId>();
      p.identity.ip = Ipv4Address::parse(n.at("ip").get<std::string>());
      p.identity.role = parse_role(n.at("role").get<std::string>());
      p.identity.registered = n.value("registered", true);
      p.x = n.value("x", 0.0);
      p.y = n.value("y", 0.0);
      c.topology.nodes.push_back(p);
    }
    for (const auto& r : j.value("routes", json::array())) {
      reject_unknown(r, {"path", "link_delays_ms"}, "routes");
      Route route;
      route.path = r.at("path").get<std::vector<NodeId>>();
      route.link_delays = r.value("link_delays_ms", std::vector<SimTime>{});
      c.topology.routes.push_back(std::move(route));
    }
    for (const auto& t : j.value("traffic", json::array())) {
      reject_unknown(t, {"source", "count", "start_ms", "interval_ms", "payload_size", "payload_seed"},
                     "traffic");
      TrafficSpec spec;
      spec.source = t.at("source").get<NodeId>();
      spec.count = t.value("count", 0u);
      spec.start = t.value("start_ms", SimTime{0});
      spec.interval = t.value("interval_ms", SimTime{1000});
      spec.payload_size = t.value("payload_size", std::size_t{16});
      if (t.contains("payload_seed")) spec.payload_seed = t["payload_seed"].get<std::uint64_t>();
      c.traffic.push_back(spec);
    }
    const auto attacks = j.value("attacks", json::array());
    for (std::size_t i = 0; i < attacks.size(); ++i) c.attacks.push_back(parse_attack(attacks[i], i));
  } catch (const json::exception& e) {
    throw Error(Errc::parse, e.what());
  }
  c.validate();
  return c;
}

std::string serialize_scenario(const ScenarioConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["mode"] = std::string(to_string(c.mode));
  j["area"] = {{"length", c.topology.length}, {"width", c.topology.width}};
  j["link_delay_ms"] = c.topology.default_link_delay;
  j["freshness_s"] = c.freshness_seconds;
  j["time_base_s"] = c.time_base_seconds;
  j["purge_on_delivery"] = c.purge_on_delivery;
  j["drop_timeout_ms"] = c.drop_timeout;
  j["key_rotation"] = {{"min", c.key_rotation.min}, {"max", c.key_rotation.max}};
  j["nodes"] = json::array();
  for (const auto& n : c.topology.nodes) {
    j["nodes"].push_back({{"id", n.identity.id},
                          {"ip", n.identity.ip.to_string()},
                          {"role", std::string(to_string(n.identity.role))},
                          {"x", n.x},
                          {"y", n.y},
                          {"registered", n.identity.registered}});
  }
  j["routes"] = json::array();
  for (const auto& r : c.topology.routes) {
    json route = {{"path", r.path}};
    if (!r.link_delays.empty()) route["link_delays_ms"] = r.link_delays;
    j["routes"].push_back(route);
  }
  j["traffic"] = json::array();
  for (const auto& t : c.traffic) {
    json spec = {{"source", t.source},
                 {"count", t.count},
                 {"start_ms", t.start},
                 {"interval_ms", t.interval},
                 {"payload_size", t.payload_size}};
    if (t.payload_seed) spec["payload_seed"] = *t.payload_seed;
    j["traffic"].push_back(spec);
  }
  j["attacks"] = json::array();
  for (const auto& a : c.attacks) j["attacks"].push_back(attack_to_json(a));
  return j.dump(2) + "\n";
}

ScenarioConfig make_chain_scenario(std::size_t intermediates, std::uint32_t packets,
                                   std::uint64_t seed) {
  ScenarioConfig c;
  c.seed = seed;
  c.mode = ScenarioMode::multihop;
  c.key_rotation = {5, 10};
  const double step = c.topology.length / static_cast<double>(intermediates + 1);
  Route route;
  c.topology.nodes.push_back({{1, Ipv4Address::parse("10.0.0.1"), Role::source, true}, 0.0, 50.0});
  route.path.push_back(1);
  for (std::size_t i = 0; i < intermediates; ++i) {
    const auto id = static_cast<NodeId>(2 + i);
    c.topology.nodes.push_back({{id, Ipv4Address::from_u32(0x0A000000u + id), Role::intermediate, true},
                                step * static_cast<double>(i + 1), 50.0});
    route.path.push_back(id);
  }
  c.topology.nodes.push_back(
      {{100, Ipv4Address::parse("10.0.0.254"), Role::gateway, true}, c.topology.length, 50.0});
  route.path.push_back(100);
  c.topology.routes.push_back(route);
  c.traffic.push_back({1, packets, 0, 1000, 16, std::nullopt});
  return c;
}

std::string example_scenario_text() {
  return R"(// Example scenario: one source, three relays, one gateway.
// Times are simulated milliseconds unless the key says _s (seconds).
{
  // Every random choice (keys, rotation points, payloads) derives from this.
  "seed": 42,
  // "multihop" embeds the 24-byte watermark; "singlehop" sends bare frames
  // straight to the gateway and needs source -> gateway routes.
  "mode": "multihop",
  "area": { "length": 100.0, "width": 100.0 },
  "link_delay_ms": 300,
  // Maximum accepted age of the source timestamp at the gateway.
  "freshness_s": 60,
  "time_base_s": 1700000000,
  "purge_on_delivery": true,
  // 0 = five times link_delay_ms.
  "drop_timeout_ms": 0,
  // A new key epoch after a uniform random number of watermark generations
  // in [min, max]; min 0 disables rotation.
  "key_rotation": { "min": 5, "max": 10 },
  "nodes": [
    { "id": 1,   "ip": "10.0.0.1",   "role": "source",       "x": 0.0,   "y": 50.0 },
    { "id": 2,   "ip": "10.0.0.2",   "role": "intermediate", "x": 25.0,  "y": 50.0 },
    { "id": 3,   "ip": "10.0.0.3",   "role": "intermediate", "x": 50.0,  "y": 50.0 },
    { "id": 4,   "ip": "10.0.0.4",   "role": "intermediate", "x": 75.0,  "y": 50.0 },
    { "id": 100, "ip": "10.0.0.254", "role": "gateway",      "x": 100.0, "y": 50.0 },
    // Present in the deployment but never enrolled: useful as a probe caller.
    { "id": 900, "ip": "10.0.9.9",   "role": "source",       "x": 10.0,  "y": 10.0, "registered": false }
  ],
  "routes": [
    { "path": [1, 2, 3, 4, 100] }
  ],
  "traffic": [
    { "source": 1, "count": 10, "start_ms": 0, "interval_ms": 1000, "payload_size": 16 }
  ],
  // Kinds: eavesdrop, replay, insert_bits, delete_bits, modify_payload,
  // modify_watermark, drop, fake_inject, store_probe. Links are 1-based
  // along the route (link 1 leaves the source).
  "attacks": [
    { "kind": "modify_payload", "link": 2,
      "trigger": { "source": 1, "sequence": 5 },
      "edits": [ { "offset": 0, "mask": 1 } ] },
    { "kind": "store_probe", "at_ms": 500, "caller": 900,
      "target": { "source": 1, "sequence": 1 } }
  ]
}
)";
}

}  // namespace zircon
