#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zircon/address.hpp"
#include "zircon/crypto.hpp"
#include "zircon/provstore.hpp"
#include "zircon/random.hpp"
#include "zircon/watermark.hpp"

namespace zircon {

enum class Role { source, intermediate, gateway };

std::string_view to_string(Role role) noexcept;
Role parse_role(std::string_view text);

struct NodeIdentity {
  NodeId id = 0;
  Ipv4Address ip;
  Role role = Role::source;
  bool registered = true;

  bool operator==(const NodeIdentity&) const = default;
};

/// Registry of every node in the deployment, by id and by ip.
class NodeDirectory {
 public:
  /// Throws Errc::validation on duplicate id or ip.
  void add(const NodeIdentity& node);

  const NodeIdentity* find(NodeId id) const;
  const NodeIdentity* find_by_ip(const Ipv4Address& ip) const;
  const std::map<NodeId, NodeIdentity>& all() const { return by_id_; }

 private:
  std::map<NodeId, NodeIdentity> by_id_;
  std::map<Ipv4Address, NodeId> by_ip_;
};

/// Every key epoch a node has received. Old epochs stay so records written
/// before a rotation still decrypt.
class KeyRing {
 public:
  void install(const crypto::SymmetricKey& key);
  bool empty() const { return keys_.empty(); }
  /// Newest epoch. Throws Errc::configuration when empty.
  const crypto::SymmetricKey& current() const;
  const crypto::SymmetricKey* find(std::uint32_t epoch) const;

 private:
  std::map<std::uint32_t, crypto::SymmetricKey> keys_;
};

enum class Outcome {
  accepted,
  integrity_fail,
  provenance_fail,
  frame_fail,
  stale_timestamp,
  missing_record,
};

std::string_view to_string(Outcome outcome) noexcept;
Outcome parse_outcome(std::string_view text);

/// One verdict per processed packet per verifying node. `hop` is the
/// verifier's position on the route, counting the source as 1.
struct VerificationVerdict {
  Outcome outcome = Outcome::accepted;
  HopIndex hop = 0;
  NodeId node = 0;
  PacketId packet;
  SimTime time = 0;

  bool accepted() const { return outcome == Outcome::accepted; }
  bool operator==(const VerificationVerdict&) const = default;
};

/// verdict|node|src|seq|hop|outcome|time
std::string format_verdict_line(const VerificationVerdict& v);

struct PathEntry {
  Ipv4Address ip;
  std::uint32_t time = 0;
  NodeId node = 0;

  bool operator==(const PathEntry&) const = default;
};

using ProvenancePath = std::vector<PathEntry>;

struct OpCounters {
  std::uint64_t packets = 0;
  std::uint64_t encryptions = 0;
  std::uint64_t decryptions = 0;
  std::uint64_t digests = 0;
};

struct ProtocolNode {
  NodeIdentity identity;
  KeyRing keys;
  Sequence next_sequence = 1;
  OpCounters ops;
};

/// Maps simulated milliseconds to the 4-byte seconds timestamps carried in
/// feature sub-watermarks.
struct Clock {
  std::uint32_t base_seconds = 1'700'000'000;

  std::uint32_t seconds(SimTime now) const {
    return base_seconds + static_cast<std::uint32_t>(now / 1000);
  }
};

struct ProtocolSettings {
  std::uint32_t freshness_seconds = 60;
  bool purge_on_delivery = true;
  Clock clock;
};

/// Rotation policy: after a random number of watermark generations, drawn
/// uniformly from [min, max], a fresh key epoch is distributed. min = 0
/// disables rotation.
class KeySchedule {
 public:
  KeySchedule() = default;
  KeySchedule(std::uint64_t seed, std::uint32_t min_generations, std::uint32_t max_generations);

  const crypto::SymmetricKey& current() const { return current_; }
  bool enabled() const { return min_ > 0; }

  /// Counts one generation; true when the threshold has been reached.
  bool note_generation();
  /// Draws the next epoch key and re-arms the threshold.
  const crypto::SymmetricKey& advance();

  std::uint32_t threshold() const { return threshold_; }

 private:
  void arm();

  Rng rng_{0};
  std::uint32_t min_ = 0;
  std::uint32_t max_ = 0;
  std::uint32_t count_ = 0;
  std::uint32_t threshold_ = 0;
  crypto::SymmetricKey current_;
};

/// Shared protocol state: directory, trusted store, every node's local
/// state, and the key schedule.
class Network {
 public:
  using EventSink = std::function<void(const std::string&)>;

  explicit Network(ProtocolSettings settings = {}, KeySchedule schedule = {});

  /// Registered nodes are enrolled in the store (gateways as gateways) and
  /// receive the current key.
  ProtocolNode& add_node(const NodeIdentity& identity);
  ProtocolNode& node(NodeId id);
  const ProtocolNode& node(NodeId id) const;
  const std::map<NodeId, ProtocolNode>& nodes() const { return nodes_; }

  const NodeDirectory& directory() const { return directory_; }
  ProvenanceStore& store() { return store_; }
  const ProvenanceStore& store() const { return store_; }
  const ProtocolSettings& settings() const { return settings_; }
  KeySchedule& schedule() { return schedule_; }

  /// Receives store journal lines and rotate lines.
  void set_event_sink(EventSink sink);

  /// Called after every watermark generation; rotates keys when due.
  void note_generation(SimTime now);

 private:
  friend void rotate_keys(Network& network, SimTime now);

  NodeDirectory directory_;
  ProvenanceStore store_;
  ProtocolSettings settings_;
  KeySchedule schedule_;
  std::map<NodeId, ProtocolNode> nodes_;
  EventSink sink_;
};

/// Distributes the next key epoch to every registered node. Emits
/// `rotate|epoch|time`.
void rotate_keys(Network& network, SimTime now);

struct SingleHopEmission {
  Bytes frame;
  FinalWatermark stored;
  PacketId id;
};

struct VerificationResult {
  VerificationVerdict verdict;
  std::optional<ProvenancePath> path;
};

struct ForwardResult {
  VerificationVerdict verdict;
  std::optional<WatermarkedPacket> forwarded;
};

// Single-hop profile: the source stores the full W_F and sends a bare frame;
// the gateway regenerates W_F from what it received.
SingleHopEmission source_emit_singlehop(Network& network, NodeId source, ByteView payload,
                                        std::uint32_t capture_time, SimTime now);
VerificationResult gateway_verify_singlehop(Network& network, NodeId gateway,
                                            ByteView received, SimTime now);

// Multi-hop profile: W_F travels with the payload and every hop re-embeds.
WatermarkedPacket source_emit_multihop(Network& network, NodeId source, ByteView payload,
                                       std::uint32_t capture_time, SimTime now);
ForwardResult intermediate_forward(Network& network, NodeId node, ByteView received,
                                   SimTime now);
VerificationResult gateway_verify_multihop(Network& network, NodeId gateway,
                                           ByteView received, SimTime now);

/// A packet whose newest record is older than the timeout and was never
/// retrieved: the drop happened after `last_node`.
struct DropReport {
  PacketId packet;
  HopIndex last_hop = 0;
  NodeId last_node = 0;
  SimTime last_stored_at = 0;
};

std::vector<DropReport> sweep_drops(const ProvenanceStore& store, SimTime now, SimTime timeout);

/// drop|src|seq|last_hop|node|time
std::string format_drop_line(const DropReport& drop, SimTime time);

}  // namespace zircon
