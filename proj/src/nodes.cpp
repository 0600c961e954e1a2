#include "zircon/nodes.hpp"

#include <variant>

#include "zircon/error.hpp"

namespace zircon {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::source: return "source";
    case Role::intermediate: return "intermediate";
    case Role::gateway: return "gateway";
  }
  return "?";
}

Role parse_role(std::string_view text) {
  if (text == "source") return Role::source;
  if (text == "intermediate") return Role::intermediate;
  if (text == "gateway") return Role::gateway;
  throw Error(Errc::parse, "unknown role '" + std::string(text) + "'");
}

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::accepted: return "accepted";
    case Outcome::integrity_fail: return "integrity_fail";
    case Outcome::provenance_fail: return "provenance_fail";
    case Outcome::frame_fail: return "frame_fail";
    case Outcome::stale_timestamp: return "stale_timestamp";
    case Outcome::missing_record: return "missing_record";
  }
  return "?";
}

Outcome parse_outcome(std::string_view text) {
  for (auto o : {Outcome::accepted, Outcome::integrity_fail, Outcome::provenance_fail,
                 Outcome::frame_fail, Outcome::stale_timestamp, Outcome::missing_record}) {
    if (text == to_string(o)) return o;
  }
  throw Error(Errc::parse, "unknown outcome '" + std::string(text) + "'");
}

std::string format_verdict_line(const VerificationVerdict& v) {
  return "verdict|" + std::to_string(v.node) + "|" + std::to_string(v.packet.source) + "|" +
         std::to_string(v.packet.sequence) + "|" + std::to_string(v.hop) + "|" +
         std::string(to_string(v.outcome)) + "|" + std::to_string(v.time);
}

void NodeDirectory::add(const NodeIdentity& node) {
  if (by_id_.contains(node.id)) {
    throw Error(Errc::validation, "duplicate node id " + std::to_string(node.id));
  }
  if (by_ip_.contains(node.ip)) {
    throw Error(Errc::validation, "duplicate node ip " + node.ip.to_string());
  }
  by_id_.emplace(node.id, node);
  by_ip_.emplace(node.ip, node.id);
}

const NodeIdentity* NodeDirectory::find(NodeId id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

const NodeIdentity* NodeDirectory::find_by_ip(const Ipv4Address& ip) const {
  const auto it = by_ip_.find(ip);
  return it == by_ip_.end() ? nullptr : find(it->second);
}

void KeyRing::install(const crypto::SymmetricKey& key) { keys_[key.epoch] = key; }

const crypto::SymmetricKey& KeyRing::current() const {
  if (keys_.empty()) throw Error(Errc::configuration, "node holds no key");
  return keys_.rbegin()->second;
}

const crypto::SymmetricKey* KeyRing::find(std::uint32_t epoch) const {
  const auto it = keys_.find(epoch);
  return it == keys_.end() ? nullptr : &it->second;
}

KeySchedule::KeySchedule(std::uint64_t seed, std::uint32_t min_generations,
                         std::uint32_t max_generations)
    : rng_(seed), min_(min_generations), max_(max_generations) {
  if (min_ > max_) throw Error(Errc::validation, "key rotation min exceeds max");
  const Bytes bytes = random_bytes(rng_, crypto::kKeySize);
  std::copy(bytes.begin(), bytes.end(), current_.bytes.begin());
  current_.epoch = 1;
  arm();
}

void KeySchedule::arm() {
  count_ = 0;
  threshold_ = enabled() ? static_cast<std::uint32_t>(uniform_between(rng_, min_, max_)) : 0;
}

bool KeySchedule::note_generation() {
  if (!enabled()) return false;
  ++count_;
  return count_ >= threshold_;
}

const crypto::SymmetricKey& KeySchedule::advance() {
  const Bytes bytes = random_bytes(rng_, crypto::kKeySize);
  std::copy(bytes.begin(), bytes.end(), current_.bytes.begin());
  ++current_.epoch;
  arm();
  return current_;
}

Network::Network(ProtocolSettings settings, KeySchedule schedule)
    : settings_(settings), schedule_(std::move(schedule)) {}

ProtocolNode& Network::add_node(const NodeIdentity& identity) {
  directory_.add(identity);
  ProtocolNode node{identity, {}, 1, {}};
  if (identity.registered) {
    if (identity.role == Role::gateway) {
      store_.register_gateway(identity.id);
    } else {
      store_.register_node(identity.id);
    }
    node.keys.install(schedule_.current());
  }
  return nodes_.emplace(identity.id, std::move(node)).first->second;
}

ProtocolNode& Network::node(NodeId id) {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::validation, "unknown node " + std::to_string(id));
  return it->second;
}

const ProtocolNode& Network::node(NodeId id) const {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::validation, "unknown node " + std::to_string(id));
  return it->second;
}

void Network::set_event_sink(EventSink sink) {
  sink_ = sink;
  store_.set_journal(std::move(sink));
}

void Network::note_generation(SimTime now) {
  if (schedule_.note_generation()) rotate_keys(*this, now);
}

void rotate_keys(Network& network, SimTime now) {
  const auto& key = network.schedule_.advance();
  for (auto& [id, node] : network.nodes_) {
    if (node.identity.registered) node.keys.install(key);
  }
  if (network.sink_) {
    network.sink_("rotate|" + std::to_string(key.epoch) + "|" + std::to_string(now));
  }
}

namespace {

void require_role(const ProtocolNode& node, Role role) {
  if (node.identity.role != role) {
    throw Error(Errc::configuration, "node " + std::to_string(node.identity.id) + " is a " +
                                         std::string(to_string(node.identity.role)) + ", not a " +
                                         std::string(to_string(role)));
  }
}

HashSubWatermark hash_of(ProtocolNode& node, ByteView payload) {
  ++node.ops.digests;
  return make_hash_subwatermark(payload);
}

ProvenanceRecordValue record_of(ProtocolNode& node, const Ipv4Address& ip, std::uint32_t t) {
  ++node.ops.encryptions;
  return make_provenance_record(make_feature_subwatermark(ip, t), node.keys.current());
}

// Decrypts a stored record with the key of its epoch; empty when this node
// never held that epoch or the padding check fails.
std::optional<FeatureSubWatermark> open_record(ProtocolNode& node,
                                               const ProvenanceRecordValue& record) {
  const auto* key = node.keys.find(record.key_epoch);
  if (key == nullptr) return std::nullopt;
  ++node.ops.decryptions;
  try {
    return FeatureSubWatermark::deserialize(crypto::decrypt_block(*key, record.cipher));
  } catch (const Error&) {
    return std::nullopt;
  }
}

// The stored record must open under a key this node holds and name the ip
// of the node that stored it.
bool record_authentic(ProtocolNode& verifier, const NodeDirectory& directory,
                      const StoredRecord& stored) {
  const auto feature = open_record(verifier, stored.value);
  if (!feature) return false;
  const auto* owner = directory.find(stored.stored_by);
  return owner != nullptr && owner->registered && owner->ip == feature->ip;
}

VerificationVerdict make_verdict(Outcome outcome, HopIndex hop, NodeId node, PacketId packet,
                                 SimTime now) {
  return VerificationVerdict{outcome, hop, node, packet, now};
}

HopIndex verifier_hop(HopIndex incoming) {
  return static_cast<HopIndex>(incoming == 0xFF ? 0xFF : incoming + 1);
}

}  // namespace

SingleHopEmission source_emit_singlehop(Network& network, NodeId source, ByteView payload,
                                        std::uint32_t capture_time, SimTime now) {
  auto& node = network.node(source);
  require_role(node, Role::source);
  const PacketId id{source, node.next_sequence};
  const auto record = record_of(node, node.identity.ip, capture_time);
  const auto hash = hash_of(node, payload);
  const auto watermark = assemble_watermark(record, hash);
  network.store().store({id.source, id.sequence, 1}, record, source, now, hash);
  ++node.next_sequence;
  ++node.ops.packets;
  network.note_generation(now);
  BareFrame frame{id, 1, Bytes(payload.begin(), payload.end()), capture_time};
  return SingleHopEmission{frame.serialize(), watermark, id};
}

VerificationResult gateway_verify_singlehop(Network& network, NodeId gateway, ByteView received,
                                            SimTime now) {
  auto& node = network.node(gateway);
  require_role(node, Role::gateway);
  ++node.ops.packets;
  auto& store = network.store();
  constexpr HopIndex kHop = 2;

  BareFrame frame;
  try {
    frame = BareFrame::parse(received);
  } catch (const Error&) {
    const auto header = peek_header(received);
    const PacketId id = header ? header->first : PacketId{};
    if (header) store.delete_all(id.source, id.sequence, now);
    return {make_verdict(Outcome::frame_fail, header ? kHop : 0, gateway, id, now), std::nullopt};
  }
  const PacketId id = frame.id;
  auto reject = [&](Outcome outcome) {
    store.delete_all(id.source, id.sequence, now);
    return VerificationResult{make_verdict(outcome, kHop, gateway, id, now), std::nullopt};
  };

  if (!store.contains(id.source, id.sequence)) {
    return {make_verdict(Outcome::missing_record, kHop, gateway, id, now), std::nullopt};
  }
  const StoredRecord stored = store.query_last(id.source, id.sequence);

  // Regenerate W' from the received data and compare hash parts first.
  const auto regenerated_hash = hash_of(node, frame.payload);
  if (!stored.hash_part || *stored.hash_part != regenerated_hash) {
    return reject(Outcome::integrity_fail);
  }

  const auto* origin = network.directory().find(id.source);
  const auto* key = node.keys.find(stored.value.key_epoch);
  if (origin == nullptr || !origin->registered || key == nullptr || stored.key.hop != 1) {
    return reject(Outcome::provenance_fail);
  }
  ++node.ops.encryptions;
  const auto regenerated =
      crypto::encrypt_block(*key, make_feature_subwatermark(origin->ip, frame.capture_time).serialize());
  if (regenerated != stored.value.cipher) return reject(Outcome::provenance_fail);

  const auto feature = open_record(node, stored.value);
  if (!feature || feature->ip != origin->ip) return reject(Outcome::provenance_fail);

  const auto now_s = network.settings().clock.seconds(now);
  if (now_s > feature->capture_time &&
      now_s - feature->capture_time > network.settings().freshness_seconds) {
    return reject(Outcome::stale_timestamp);
  }

  try {
    store.query_all(id.source, id.sequence, gateway);
  } catch (const Error& e) {
    if (e.code() == Errc::one_retrieval_violation) {
      return {make_verdict(Outcome::missing_record, kHop, gateway, id, now), std::nullopt};
    }
    throw;
  }
  if (network.settings().purge_on_delivery) store.delete_all(id.source, id.sequence, now);
  ProvenancePath path{{feature->ip, feature->capture_time, origin->id}};
  return {make_verdict(Outcome::accepted, kHop, gateway, id, now), std::move(path)};
}

WatermarkedPacket source_emit_multihop(Network& network, NodeId source, ByteView payload,
                                       std::uint32_t capture_time, SimTime now) {
  auto& node = network.node(source);
  require_role(node, Role::source);
  const PacketId id{source, node.next_sequence};
  const auto record = record_of(node, node.identity.ip, capture_time);
  const auto hash = hash_of(node, payload);
  network.store().store({id.source, id.sequence, 1}, record, source, now);
  ++node.next_sequence;
  ++node.ops.packets;
  network.note_generation(now);
  return embed(payload, assemble_watermark(record, hash), id, 1);
}

namespace {

struct CheckedFrame {
  WatermarkedPacket packet;
  StoredRecord last;
};

// Shared front half of relay and gateway verification: framing, integrity, and the
// comparison against the last stored record. Returns the failure verdict,
// or the parsed frame when every check passed.
std::variant<VerificationVerdict, CheckedFrame> verify_incoming(Network& network,
                                                                ProtocolNode& node,
                                                                ByteView received, SimTime now) {
  auto& store = network.store();
  const NodeId self = node.identity.id;
  WatermarkedPacket packet;
  try {
    packet = extract(received);
  } catch (const Error&) {
    const auto header = peek_header(received);
    if (!header) return make_verdict(Outcome::frame_fail, 0, self, {}, now);
    store.delete_all(header->first.source, header->first.sequence, now);
    return make_verdict(Outcome::frame_fail, verifier_hop(header->second), self, header->first, now);
  }
  const PacketId id = packet.id;
  const HopIndex hop = verifier_hop(packet.hop);
  auto reject = [&](Outcome outcome) {
    store.delete_all(id.source, id.sequence, now);
    return make_verdict(outcome, hop, self, id, now);
  };

  if (hash_of(node, packet.payload) != packet.watermark.hash_part) {
    return reject(Outcome::integrity_fail);
  }
  if (!store.contains(id.source, id.sequence)) {
    return make_verdict(Outcome::missing_record, hop, self, id, now);
  }
  const StoredRecord last = store.query_last(id.source, id.sequence);
  if (last.key.hop != packet.hop || last.value.cipher != packet.watermark.record.cipher) {
    return reject(Outcome::provenance_fail);
  }
  if (!record_authentic(node, network.directory(), last)) {
    return reject(Outcome::provenance_fail);
  }
  return CheckedFrame{std::move(packet), last};
}

}  // namespace

ForwardResult intermediate_forward(Network& network, NodeId node_id, ByteView received,
                                   SimTime now) {
  auto& node = network.node(node_id);
  require_role(node, Role::intermediate);
  ++node.ops.packets;
  auto checked = verify_incoming(network, node, received, now);
  if (auto* verdict = std::get_if<VerificationVerdict>(&checked)) return {*verdict, std::nullopt};

  auto& frame = std::get<CheckedFrame>(checked);
  const PacketId id = frame.packet.id;
  if (frame.packet.hop == 0xFF) {
    network.store().delete_all(id.source, id.sequence, now);
    return {make_verdict(Outcome::frame_fail, 0xFF, node_id, id, now), std::nullopt};
  }
  const auto next_hop = static_cast<HopIndex>(frame.packet.hop + 1);
  const auto record = record_of(node, node.identity.ip, network.settings().clock.seconds(now));
  const auto watermark = assemble_watermark(record, frame.packet.watermark.hash_part);
  network.store().store({id.source, id.sequence, next_hop}, record, node_id, now);
  network.note_generation(now);
  return {make_verdict(Outcome::accepted, next_hop, node_id, id, now),
          embed(frame.packet.payload, watermark, id, next_hop)};
}

VerificationResult gateway_verify_multihop(Network& network, NodeId gateway, ByteView received,
                                           SimTime now) {
  auto& node = network.node(gateway);
  require_role(node, Role::gateway);
  ++node.ops.packets;
  auto checked = verify_incoming(network, node, received, now);
  if (auto* verdict = std::get_if<VerificationVerdict>(&checked)) return {*verdict, std::nullopt};

  auto& store = network.store();
  const auto& packet = std::get<CheckedFrame>(checked).packet;
  const PacketId id = packet.id;
  const HopIndex hop = verifier_hop(packet.hop);
  auto reject = [&](Outcome outcome) {
    store.delete_all(id.source, id.sequence, now);
    return VerificationResult{make_verdict(outcome, hop, gateway, id, now), std::nullopt};
  };

  ProvenanceSet set;
  try {
    set = store.query_all(id.source, id.sequence, gateway);
  } catch (const Error& e) {
    if (e.code() == Errc::one_retrieval_violation || e.code() == Errc::missing_record) {
      return {make_verdict(Outcome::missing_record, hop, gateway, id, now), std::nullopt};
    }
    throw;
  }

  // Hop-by-hop contiguity ending at the hop the packet claims.
  if (set.size() != packet.hop) return reject(Outcome::provenance_fail);
  ProvenancePath path;
  path.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& stored = set[i];
    if (stored.key.hop != i + 1) return reject(Outcome::provenance_fail);
    const auto feature = open_record(node, stored.value);
    const auto* owner = network.directory().find(stored.stored_by);
    if (!feature || owner == nullptr || !owner->registered || owner->ip != feature->ip) {
      return reject(Outcome::provenance_fail);
    }
    path.push_back({feature->ip, feature->capture_time, owner->id});
  }

  // Origin: the first record must name the registered source the frame claims.
  const auto* origin = network.directory().find(id.source);
  if (origin == nullptr || !origin->registered || origin->ip != path.front().ip) {
    return reject(Outcome::provenance_fail);
  }
  // Freshness of the source timestamp.
  const auto now_s = network.settings().clock.seconds(now);
  const auto source_time = path.front().time;
  if (now_s > source_time && now_s - source_time > network.settings().freshness_seconds) {
    return reject(Outcome::stale_timestamp);
  }

  if (network.settings().purge_on_delivery) store.delete_all(id.source, id.sequence, now);
  return {make_verdict(Outcome::accepted, hop, gateway, id, now), std::move(path)};
}

std::vector<DropReport> sweep_drops(const ProvenanceStore& store, SimTime now, SimTime timeout) {
  std::vector<DropReport> out;
  for (const auto& pending : store.pending()) {
    if (now - pending.last_stored_at > timeout) {
      out.push_back({pending.packet, pending.last_hop, pending.last_node, pending.last_stored_at});
    }
  }
  return out;
}

std::string format_drop_line(const DropReport& drop, SimTime time) {
  return "drop|" + std::to_string(drop.packet.source) + "|" + std::to_string(drop.packet.sequence) +
         "|" + std::to_string(drop.last_hop) + "|" + std::to_string(drop.last_node) + "|" +
         std::to_string(time);
}

}  // namespace zircon
