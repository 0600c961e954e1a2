#pragma once

#include <cstdint>
#include <optional>

#include "zircon/address.hpp"
#include "zircon/bytes.hpp"
#include "zircon/crypto.hpp"

namespace zircon {

using NodeId = std::uint16_t;
using Sequence = std::uint32_t;
using HopIndex = std::uint8_t;

/// Identity of one packet lifetime: source node n and its counter k.
struct PacketId {
  NodeId source = 0;
  Sequence sequence = 0;

  auto operator<=>(const PacketId&) const = default;
};

/// sw_f = ip || capture time, 8 bytes.
struct FeatureSubWatermark {
  Ipv4Address ip;
  std::uint32_t capture_time = 0;  // seconds

  ByteArray<8> serialize() const;
  static FeatureSubWatermark deserialize(ByteView bytes);

  bool operator==(const FeatureSubWatermark&) const = default;
};

/// p_{n,k,i} = E(sw_f). The epoch tag is carried by the store, not the wire.
struct ProvenanceRecordValue {
  ByteArray<crypto::kBlockSize> cipher{};
  std::uint32_t key_epoch = 0;

  bool operator==(const ProvenanceRecordValue&) const = default;
};

/// sw_h: first 8 bytes of SHA-256(payload).
struct HashSubWatermark {
  ByteArray<crypto::kTruncatedSize> bytes{};

  bool operator==(const HashSubWatermark&) const = default;
};

/// W_F = record || hash part, always 24 bytes serialized.
struct FinalWatermark {
  static constexpr std::size_t kSize = crypto::kBlockSize + crypto::kTruncatedSize;

  ProvenanceRecordValue record;
  HashSubWatermark hash_part;

  ByteArray<kSize> serialize() const;

  bool operator==(const FinalWatermark&) const = default;
};

/// In-flight multi-hop unit.
/// Wire: [src:2][seq:4][hop:1][len:2][payload:len][cipher:16][hash:8], big-endian.
struct WatermarkedPacket {
  static constexpr std::size_t kHeaderSize = 7;
  static constexpr std::size_t kLengthSize = 2;
  static constexpr std::size_t kOverhead = kHeaderSize + kLengthSize + FinalWatermark::kSize;

  PacketId id;
  HopIndex hop = 1;
  Bytes payload;
  FinalWatermark watermark;

  Bytes serialize() const;

  bool operator==(const WatermarkedPacket&) const = default;
};

/// Single-hop bare frame (no embedded watermark). The sensing time travels
/// as a trailing field so the gateway can regenerate the feature part.
/// Wire: [src:2][seq:4][hop:1][len:2][payload:len][time:4], big-endian.
struct BareFrame {
  static constexpr std::size_t kOverhead = 7 + 2 + 4;

  PacketId id;
  HopIndex hop = 1;
  Bytes payload;
  std::uint32_t capture_time = 0;

  Bytes serialize() const;
  /// Throws Errc::frame on any length mismatch.
  static BareFrame parse(ByteView bytes);

  bool operator==(const BareFrame&) const = default;
};

FeatureSubWatermark make_feature_subwatermark(const Ipv4Address& ip, std::uint32_t t);

ProvenanceRecordValue make_provenance_record(const FeatureSubWatermark& sw,
                                             const crypto::SymmetricKey& key);

HashSubWatermark make_hash_subwatermark(ByteView payload);

FinalWatermark assemble_watermark(const ProvenanceRecordValue& record,
                                  const HashSubWatermark& hash_part);

/// Throws Errc::length_violation for payloads of 2^16 bytes or more.
WatermarkedPacket embed(ByteView payload, const FinalWatermark& w, PacketId id, HopIndex hop);

/// Parses a multi-hop frame. Any inconsistency between the length field and
/// the buffer size throws Errc::frame.
WatermarkedPacket extract(ByteView bytes);

/// Header of a frame if at least its first 7 bytes are present.
std::optional<std::pair<PacketId, HopIndex>> peek_header(ByteView bytes);

struct WatermarkParts {
  ProvenanceRecordValue record;
  HashSubWatermark hash_part;

  bool operator==(const WatermarkParts&) const = default;
};

WatermarkParts split_watermark(const FinalWatermark& w);
/// From the 24-byte wire form; the record's key_epoch is 0.
/// Throws Errc::length_violation on any other size.
WatermarkParts split_watermark(ByteView bytes);

}  // namespace zircon
