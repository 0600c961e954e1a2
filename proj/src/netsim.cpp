#include "zircon/netsim.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "zircon/error.hpp"

namespace zircon {

std::string_view to_string(ScenarioMode mode) noexcept {
  return mode == ScenarioMode::singlehop ? "singlehop" : "multihop";
}

std::string_view to_string(PacketStatus status) noexcept {
  switch (status) {
    case PacketStatus::accepted: return "accepted";
    case PacketStatus::rejected: return "rejected";
    case PacketStatus::dropped: return "dropped";
    case PacketStatus::in_flight: return "in_flight";
  }
  return "?";
}

std::string_view to_string(CopyOrigin origin) noexcept {
  switch (origin) {
    case CopyOrigin::emitted: return "emitted";
    case CopyOrigin::replay: return "replay";
    case CopyOrigin::injected: return "injected";
  }
  return "?";
}

const Route* Topology::route_from(NodeId source) const {
  for (const auto& r : routes) {
    if (!r.path.empty() && r.path.front() == source) return &r;
  }
  return nullptr;
}

SimTime Topology::link_delay(const Route& route, std::size_t link) const {
  if (link >= 1 && link <= route.link_delays.size()) return route.link_delays[link - 1];
  return default_link_delay;
}

std::size_t RunReport::count(PacketStatus status, CopyOrigin origin) const {
  return static_cast<std::size_t>(std::count_if(packets.begin(), packets.end(), [&](const auto& p) {
    return p.status == status && p.origin == origin;
  }));
}

namespace {

std::string path_text(const ProvenancePath& path) {
  if (path.empty()) return "-";
  std::string out;
  for (const auto& e : path) {
    if (!out.empty()) out += ';';
    out += e.ip.to_string() + "@" + std::to_string(e.time);
  }
  return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace

std::string RunReport::to_text() const {
  std::ostringstream out;
  for (const auto& p : packets) {
    out << "packet|" << p.id.source << '|' << p.id.sequence << '|' << to_string(p.origin) << '|'
        << to_string(p.status) << '|';
    if (p.verdict) {
      out << to_string(p.verdict->outcome) << '|' << int{p.verdict->hop} << '|' << p.verdict->node
          << '|' << p.verdict->time;
    } else {
      out << "-|-|-|-";
    }
    out << '|' << p.records_at_retrieval << '|' << path_text(p.path) << '\n';
  }
  for (const auto& d : drops) out << format_drop_line(d, d.last_stored_at) << '\n';
  for (const auto& p : probes) out << p << '\n';
  out << "summary|emitted|"
      << std::count_if(packets.begin(), packets.end(),
                       [](const auto& p) { return p.origin == CopyOrigin::emitted; })
      << "|accepted|" << count(PacketStatus::accepted) << "|rejected|"
      << count(PacketStatus::rejected) << "|dropped|" << count(PacketStatus::dropped)
      << "|in_flight|" << count(PacketStatus::in_flight) << "|store_packets|"
      << store_packets_at_end << '\n';
  return out.str();
}

std::string RunResult::log_text() const { return join_lines(log); }
std::string RunResult::journal_text() const { return join_lines(journal); }

std::string format_usage_line(const NodeUsage& u) {
  return "node|" + std::to_string(u.identity.id) + "|" + std::string(to_string(u.identity.role)) +
         "|" + std::to_string(u.ops.packets) + "|" + std::to_string(u.ops.encryptions) + "|" +
         std::to_string(u.ops.decryptions) + "|" + std::to_string(u.ops.digests);
}

NodeUsage parse_usage_line(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    const auto bar = line.find('|', start);
    f.push_back(line.substr(start, bar == std::string_view::npos ? bar : bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (f.size() != 7 || f[0] != "node") {
    throw Error(Errc::parse, "bad usage line '" + std::string(line) + "'");
  }
  auto num = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [next, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || next != s.data() + s.size()) {
      throw Error(Errc::parse, "bad number in usage line '" + std::string(line) + "'");
    }
    return v;
  };
  NodeUsage u;
  u.identity.id = static_cast<NodeId>(num(f[1]));
  u.identity.role = parse_role(f[2]);
  u.ops = {num(f[3]), num(f[4]), num(f[5]), num(f[6])};
  return u;
}

// ---------------------------------------------------------------------------

struct Simulation::State {
  struct Emit {
    std::size_t traffic;
  };
  struct Deliver {
    const Route* route;
    std::size_t link;
    Bytes bytes;
    std::size_t copy;
  };
  struct Inject {
    std::size_t attack;
  };
  struct Probe {
    std::size_t attack;
  };
  using Body = std::variant<Emit, Deliver, Inject, Probe>;

  struct Event {
    SimTime time;
    std::uint64_t order;
    Body body;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.order > b.order;
    }
  };

  static ScenarioConfig validated(ScenarioConfig cfg) {
    cfg.validate();
    return cfg;
  }

  explicit State(ScenarioConfig cfg)
      : config(validated(std::move(cfg))),
        network(ProtocolSettings{config.freshness_seconds, config.purge_on_delivery,
                                 Clock{config.time_base_seconds}},
                KeySchedule(derive_seed(config.seed, 1), config.key_rotation.min,
                            config.key_rotation.max)),
        attacker_rng(derive_seed(config.seed, 2)) {
    network.set_event_sink([this](const std::string& line) {
      log.push_back(line);
      if (line.starts_with("store|") || line.starts_with("delete|")) journal.push_back(line);
    });
    log.push_back("scenario|" + std::to_string(config.seed) + "|" +
                  std::string(to_string(config.mode)));
    for (const auto& placed : config.topology.nodes) {
      network.add_node(placed.identity);
      log.push_back("node|" + std::to_string(placed.identity.id) + "|" +
                    std::string(to_string(placed.identity.role)) + "|" +
                    placed.identity.ip.to_string() + "|" +
                    (placed.identity.registered ? "1" : "0"));
    }
    for (const auto& route : config.topology.routes) {
      std::string ids;
      for (auto id : route.path) ids += (ids.empty() ? "" : ",") + std::to_string(id);
      log.push_back("route|" + ids);
    }
    for (std::size_t t = 0; t < config.traffic.size(); ++t) {
      const auto& spec = config.traffic[t];
      payload_rngs.emplace_back(spec.payload_seed.value_or(derive_seed(config.seed, 100 + t)));
      for (std::uint32_t k = 0; k < spec.count; ++k) {
        schedule(spec.start + static_cast<SimTime>(k) * spec.interval, Emit{t});
      }
    }
    for (std::size_t a = 0; a < config.attacks.size(); ++a) {
      const auto kind = config.attacks[a].kind;
      if (kind == AttackKind::fake_inject) schedule(config.attacks[a].at, Inject{a});
      if (kind == AttackKind::store_probe) schedule(config.attacks[a].at, Probe{a});
    }
  }

  void schedule(SimTime time, Body body) { queue.push(Event{time, next_order++, std::move(body)}); }

  bool multihop() const { return config.mode == ScenarioMode::multihop; }

  bool step() {
    if (queue.empty()) return false;
    Event ev = queue.top();
    queue.pop();
    now = ev.time;
    std::visit([this](auto& body) { handle(body); }, ev.body);
    return true;
  }

  void handle(const Emit& e) {
    const auto& spec = config.traffic[e.traffic];
    const Route* route = config.topology.route_from(spec.source);
    const Bytes payload = random_bytes(payload_rngs[e.traffic], spec.payload_size);
    const auto capture_time = network.settings().clock.seconds(now);
    Bytes frame;
    PacketId id;
    if (multihop()) {
      auto packet = source_emit_multihop(network, spec.source, payload, capture_time, now);
      id = packet.id;
      frame = packet.serialize();
    } else {
      auto emission = source_emit_singlehop(network, spec.source, payload, capture_time, now);
      id = emission.id;
      frame = std::move(emission.frame);
    }
    log.push_back("emit|" + std::to_string(id.source) + "|" + std::to_string(id.sequence) + "|" +
                  std::to_string(now));
    report.packets.push_back(PacketRecord{id, CopyOrigin::emitted, PacketStatus::in_flight, {}, {}, 0});
    send(route, 1, std::move(frame), report.packets.size() - 1);
  }

  void log_attack(AttackKind kind, PacketId id, std::size_t link) {
    log.push_back("attack|" + std::string(to_string(kind)) + "|" + std::to_string(id.source) + "|" +
                  std::to_string(id.sequence) + "|" + std::to_string(link) + "|" +
                  std::to_string(now));
  }

  // Puts a frame on link `link` of `route`; link attacks act here.
  void send(const Route* route, std::size_t link, Bytes bytes, std::size_t copy) {
    const PacketId id = report.packets[copy].id;
    const bool original = report.packets[copy].origin == CopyOrigin::emitted;
    const SimTime delay = config.topology.link_delay(*route, link);
    for (const auto& attack : config.attacks) {
      if (!original || attack.kind == AttackKind::fake_inject ||
          attack.kind == AttackKind::store_probe || attack.link != link ||
          !attack.trigger.matches(id, now)) {
        continue;
      }
      log_attack(attack.kind, id, link);
      auto effect = apply(attack, bytes, multihop());
      if (effect.captured) captured.push_back(*effect.captured);
      if (effect.replay_bytes) {
        report.packets.push_back(PacketRecord{id, CopyOrigin::replay, PacketStatus::in_flight, {}, {}, 0});
        schedule(now + effect.replay_delay + delay,
                 Deliver{route, link, std::move(*effect.replay_bytes), report.packets.size() - 1});
      }
      if (!effect.delivered) {
        report.packets[copy].status = PacketStatus::dropped;
        return;
      }
      bytes = std::move(*effect.delivered);
    }
    schedule(now + delay, Deliver{route, link, std::move(bytes), copy});
  }

  // A verifier only knows the header it parsed, which a damaged frame may
  // misstate; the log names the copy that was actually delivered.
  static void observe(VerificationVerdict& v, const PacketRecord& record, std::size_t link) {
    v.packet = record.id;
    v.hop = static_cast<HopIndex>(link + 1);
  }

  void handle(Deliver& d) {
    const NodeId receiver = d.route->path[d.link];
    auto& record = report.packets[d.copy];
    const bool at_gateway = d.link == d.route->links();
    if (!at_gateway) {
      auto result = intermediate_forward(network, receiver, d.bytes, now);
      observe(result.verdict, record, d.link);
      log.push_back(format_verdict_line(result.verdict));
      if (!result.verdict.accepted()) {
        record.status = PacketStatus::rejected;
        record.verdict = result.verdict;
        return;
      }
      send(d.route, d.link + 1, result.forwarded->serialize(), d.copy);
      return;
    }
    auto result = multihop() ? gateway_verify_multihop(network, receiver, d.bytes, now)
                             : gateway_verify_singlehop(network, receiver, d.bytes, now);
    observe(result.verdict, record, d.link);
    log.push_back(format_verdict_line(result.verdict));
    record.verdict = result.verdict;
    if (result.verdict.accepted()) {
      record.status = PacketStatus::accepted;
      record.records_at_retrieval = result.path->size();
      record.path = std::move(*result.path);
    } else {
      record.status = PacketStatus::rejected;
    }
  }

  crypto::SymmetricKey forged_key(std::uint32_t epoch) {
    crypto::SymmetricKey key;
    const Bytes bytes = random_bytes(attacker_rng, crypto::kKeySize);
    std::copy(bytes.begin(), bytes.end(), key.bytes.begin());
    key.epoch = epoch;
    return key;
  }

  NodeId attack_subject(const AttackSpec& attack) const {
    if (attack.impersonate != 0) return attack.impersonate;
    if (attack.trigger.packet) return attack.trigger.packet->source;
    return config.topology.routes.front().path.front();
  }

  void handle(const Inject& e) {
    const auto& attack = config.attacks[e.attack];
    const NodeId subject = attack_subject(attack);
    const Route* route = config.topology.route_from(subject);
    if (route == nullptr) route = &config.topology.routes.front();
    const auto* identity = network.directory().find(subject);
    FakeInjection spec;
    spec.id = {subject, 0x80000000u + static_cast<Sequence>(++injected)};
    spec.hop = static_cast<HopIndex>(attack.link);
    spec.ip = identity != nullptr ? identity->ip : Ipv4Address{};
    spec.capture_time = network.settings().clock.seconds(now);
    spec.payload = random_bytes(attacker_rng, attack.payload_size);
    spec.forged_key = forged_key(attack.forged_epoch);
    if (attack.insider_store) spec.insider = subject;
    log_attack(AttackKind::fake_inject, spec.id, attack.link);
    auto forged = fake_inject(network.store(), spec, now);
    log.push_back("inject|" + std::to_string(spec.id.source) + "|" +
                  std::to_string(spec.id.sequence) + "|" + std::to_string(attack.link) + "|" +
                  (forged.stored ? "stored" : "unstored") + "|" + std::to_string(now));
    report.packets.push_back(PacketRecord{spec.id, CopyOrigin::injected, PacketStatus::in_flight, {}, {}, 0});
    schedule(now + config.topology.link_delay(*route, attack.link),
             Deliver{route, attack.link, forged.packet.serialize(), report.packets.size() - 1});
  }

  void handle(const Probe& e) {
    const auto& attack = config.attacks[e.attack];
    const PacketId target =
        attack.probe_target.value_or(PacketId{attack_subject(attack), 1});
    log_attack(AttackKind::store_probe, target, 0);
    const auto outcome = store_probe(network.store(), attack.caller, target.source, target.sequence);
    std::string line = "probe|" + std::to_string(attack.caller) + "|" +
                       std::to_string(target.source) + "|" + std::to_string(target.sequence) + "|";
    line += outcome.rejected ? "rejected:" + std::string(to_string(*outcome.error))
                             : "leaked:" + std::to_string(outcome.records_leaked);
    line += "|" + std::to_string(now);
    log.push_back(line);
    report.probes.push_back(line);
  }

  RunResult finish() {
    while (step()) {
    }
    const SimTime timeout = config.effective_drop_timeout();
    const SimTime sweep_time = now + timeout + 1;
    for (const auto& drop : sweep_drops(network.store(), sweep_time, timeout)) {
      log.push_back(format_drop_line(drop, sweep_time));
      report.drops.push_back(drop);
    }
    report.store_packets_at_end = network.store().packet_count();
    RunResult result;
    result.log = log;
    result.journal = journal;
    result.report = report;
    for (const auto& [id, node] : network.nodes()) result.usage.push_back({node.identity, node.ops});
    return result;
  }

  ScenarioConfig config;
  Network network;
  Rng attacker_rng;
  std::vector<Rng> payload_rngs;
  std::priority_queue<Event, std::vector<Event>, Later> queue;
  std::uint64_t next_order = 0;
  SimTime now = 0;
  std::uint32_t injected = 0;
  std::vector<std::string> log;
  std::vector<std::string> journal;
  std::vector<Bytes> captured;
  RunReport report;
};

Simulation::Simulation(ScenarioConfig config) : state_(std::make_unique<State>(std::move(config))) {}
Simulation::~Simulation() = default;

bool Simulation::step() { return state_->step(); }
SimTime Simulation::now() const { return state_->now; }
bool Simulation::done() const { return state_->queue.empty(); }
RunResult Simulation::finish() { return state_->finish(); }
const Network& Simulation::network() const { return state_->network; }

RunResult run(const ScenarioConfig& config) {
  Simulation sim(config);
  return sim.finish();
}

}  // namespace zircon
