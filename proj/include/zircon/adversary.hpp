#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zircon/crypto.hpp"
#include "zircon/provstore.hpp"
#include "zircon/watermark.hpp"

namespace zircon {

enum class AttackKind {
  eavesdrop,
  replay,
  insert_bits,
  delete_bits,
  modify_payload,
  modify_watermark,
  drop,
  fake_inject,
  store_probe,
};

std::string_view to_string(AttackKind kind) noexcept;
AttackKind parse_attack_kind(std::string_view text);
/// Kinds that alter or replace what the receiver sees.
bool is_active(AttackKind kind) noexcept;

/// XOR `mask` into the byte at `offset`.
struct ByteEdit {
  std::size_t offset = 0;
  std::uint8_t mask = 0x01;
};

struct BitInsertion {
  std::size_t position = 0;  // bit index from the start of the frame, MSB first
  bool value = false;
};

/// Which traffic an attack applies to. Unset fields match anything.
struct AttackTrigger {
  std::optional<PacketId> packet;
  std::optional<SimTime> from;
  std::optional<SimTime> to;

  bool matches(PacketId id, SimTime now) const;
};

struct AttackSpec {
  AttackKind kind = AttackKind::eavesdrop;
  AttackTrigger trigger;
  /// 1-based link along the packet's route (link 1 leaves the source).
  std::size_t link = 1;

  // replay
  SimTime delay = 0;
  bool mutate_watermark = false;
  // insert_bits
  std::vector<BitInsertion> insertions;
  // delete_bits: q bits starting at `delete_position` (tail when unset)
  std::size_t delete_count = 0;
  std::optional<std::size_t> delete_position;
  // modify_payload offsets are payload-relative, modify_watermark offsets are
  // relative to the 24-byte tail; also used by replay when mutate_watermark
  std::vector<ByteEdit> edits;
  // fake_inject / store_probe
  SimTime at = 0;
  NodeId impersonate = 0;
  bool insider_store = true;
  std::uint32_t forged_epoch = 0xF0000000u;
  std::size_t payload_size = 16;
  NodeId caller = 0xFFFF;
  std::optional<PacketId> probe_target;

  /// Throws Errc::attack_spec when the parameters are unusable.
  void validate() const;
};

/// What leaves the adversary after it touched a frame on a link.
struct AttackEffect {
  /// Bytes that continue to the receiver; empty when dropped.
  std::optional<Bytes> delivered;
  /// Copy kept by the adversary (eavesdrop, replay).
  std::optional<Bytes> captured;
  /// Replay copy and when to resend it, relative to now.
  std::optional<Bytes> replay_bytes;
  SimTime replay_delay = 0;
};

/// Applies a link attack to one frame. `watermarked` says whether the frame
/// carries the 24-byte tail (multi-hop profile). Throws Errc::attack_spec on
/// out-of-range positions or for kinds that are not link attacks.
AttackEffect apply(const AttackSpec& attack, ByteView frame, bool watermarked = true);

/// Bit-level edits. Insertion zero-pads the result to a whole byte; deletion
/// discards a trailing partial byte, so any deletion shortens the frame.
Bytes insert_bits(ByteView data, const std::vector<BitInsertion>& insertions);
Bytes delete_bits(ByteView data, std::size_t count, std::optional<std::size_t> position);

struct ProbeOutcome {
  bool rejected = false;
  std::optional<Errc> error;
  std::size_t records_leaked = 0;
};

/// Tries to pull a provenance set out of the store as `caller`.
ProbeOutcome store_probe(ProvenanceStore& store, NodeId caller, NodeId source,
                         Sequence sequence);

struct FakeInjection {
  PacketId id;
  HopIndex hop = 1;
  Ipv4Address ip;
  std::uint32_t capture_time = 0;
  Bytes payload;
  crypto::SymmetricKey forged_key;
  /// Registered id the compromised node stores under, if any.
  std::optional<NodeId> insider;
};

struct ForgedPacket {
  WatermarkedPacket packet;
  /// Whether the insider managed to plant records for hops 1..hop.
  bool stored = false;
};

/// Builds a well-formed frame under a key the network never issued and, for
/// an insider, plants matching records in the store.
ForgedPacket fake_inject(ProvenanceStore& store, const FakeInjection& spec, SimTime now);

/// True if the 8-byte plaintext feature sub-watermark appears anywhere in
/// captured bytes.
bool leaks_feature(ByteView captured, const FeatureSubWatermark& feature);

}  // namespace zircon
