#include "zircon/watermark.hpp"

#include <algorithm>

#include "zircon/error.hpp"

namespace zircon {

ByteArray<8> FeatureSubWatermark::serialize() const {
  ByteArray<8> out{};
  std::copy(ip.octets.begin(), ip.octets.end(), out.begin());
  for (int i = 0; i < 4; ++i) {
    out[4 + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(capture_time >> (24 - 8 * i));
  }
  return out;
}

FeatureSubWatermark FeatureSubWatermark::deserialize(ByteView bytes) {
  if (bytes.size() != 8) {
    throw Error(Errc::length_violation, "feature sub-watermark must be 8 bytes");
  }
  FeatureSubWatermark out;
  std::copy_n(bytes.begin(), 4, out.ip.octets.begin());
  out.capture_time = get_u32(bytes, 4);
  return out;
}

ByteArray<FinalWatermark::kSize> FinalWatermark::serialize() const {
  ByteArray<kSize> out{};
  auto it = std::copy(record.cipher.begin(), record.cipher.end(), out.begin());
  std::copy(hash_part.bytes.begin(), hash_part.bytes.end(), it);
  return out;
}

namespace {

void put_header(Bytes& out, PacketId id, HopIndex hop, std::size_t payload_size) {
  put_u16(out, id.source);
  put_u32(out, id.sequence);
  out.push_back(hop);
  put_u16(out, static_cast<std::uint16_t>(payload_size));
}

void check_payload_size(std::size_t size) {
  if (size > 0xFFFF) {
    throw Error(Errc::length_violation,
                "payload of " + std::to_string(size) + " bytes exceeds the 16-bit length field");
  }
}

}  // namespace

Bytes WatermarkedPacket::serialize() const {
  check_payload_size(payload.size());
  Bytes out;
  out.reserve(kOverhead + payload.size());
  put_header(out, id, hop, payload.size());
  append(out, payload);
  append(out, watermark.serialize());
  return out;
}

Bytes BareFrame::serialize() const {
  check_payload_size(payload.size());
  Bytes out;
  out.reserve(kOverhead + payload.size());
  put_header(out, id, hop, payload.size());
  append(out, payload);
  put_u32(out, capture_time);
  return out;
}

BareFrame BareFrame::parse(ByteView bytes) {
  if (bytes.size() < kOverhead) {
    throw Error(Errc::frame, "bare frame shorter than its fixed fields");
  }
  const std::size_t len = get_u16(bytes, 7);
  if (bytes.size() != kOverhead + len) {
    throw Error(Errc::frame, "bare frame length field disagrees with frame size");
  }
  BareFrame out;
  out.id = {get_u16(bytes, 0), get_u32(bytes, 2)};
  out.hop = bytes[6];
  out.payload.assign(bytes.begin() + 9, bytes.begin() + 9 + static_cast<std::ptrdiff_t>(len));
  out.capture_time = get_u32(bytes, 9 + len);
  return out;
}

FeatureSubWatermark make_feature_subwatermark(const Ipv4Address& ip, std::uint32_t t) {
  return FeatureSubWatermark{ip, t};
}

ProvenanceRecordValue make_provenance_record(const FeatureSubWatermark& sw,
                                             const crypto::SymmetricKey& key) {
  return ProvenanceRecordValue{crypto::encrypt_block(key, sw.serialize()), key.epoch};
}

HashSubWatermark make_hash_subwatermark(ByteView payload) {
  return HashSubWatermark{crypto::truncate_digest(crypto::digest(payload))};
}

FinalWatermark assemble_watermark(const ProvenanceRecordValue& record,
                                  const HashSubWatermark& hash_part) {
  return FinalWatermark{record, hash_part};
}

WatermarkedPacket embed(ByteView payload, const FinalWatermark& w, PacketId id, HopIndex hop) {
  check_payload_size(payload.size());
  return WatermarkedPacket{id, hop, Bytes(payload.begin(), payload.end()), w};
}

WatermarkedPacket extract(ByteView bytes) {
  if (bytes.size() < WatermarkedPacket::kOverhead) {
    throw Error(Errc::frame, "frame of " + std::to_string(bytes.size()) +
                                 " bytes is shorter than the fixed overhead");
  }
  const std::size_t len = get_u16(bytes, 7);
  if (bytes.size() != WatermarkedPacket::kOverhead + len) {
    throw Error(Errc::frame, "length field " + std::to_string(len) + " disagrees with frame size " +
                                 std::to_string(bytes.size()));
  }
  WatermarkedPacket out;
  out.id = {get_u16(bytes, 0), get_u32(bytes, 2)};
  out.hop = bytes[6];
  const auto payload_begin = bytes.begin() + 9;
  out.payload.assign(payload_begin, payload_begin + static_cast<std::ptrdiff_t>(len));
  const auto parts = split_watermark(bytes.subspan(9 + len));
  out.watermark = assemble_watermark(parts.record, parts.hash_part);
  return out;
}

std::optional<std::pair<PacketId, HopIndex>> peek_header(ByteView bytes) {
  if (bytes.size() < WatermarkedPacket::kHeaderSize) return std::nullopt;
  return std::pair{PacketId{get_u16(bytes, 0), get_u32(bytes, 2)}, HopIndex{bytes[6]}};
}

WatermarkParts split_watermark(const FinalWatermark& w) { return {w.record, w.hash_part}; }

WatermarkParts split_watermark(ByteView bytes) {
  if (bytes.size() != FinalWatermark::kSize) {
    throw Error(Errc::length_violation,
                "watermark must be 24 bytes, got " + std::to_string(bytes.size()));
  }
  WatermarkParts out;
  std::copy_n(bytes.begin(), crypto::kBlockSize, out.record.cipher.begin());
  std::copy_n(bytes.begin() + crypto::kBlockSize, crypto::kTruncatedSize,
              out.hash_part.bytes.begin());
  return out;
}

}  // namespace zircon
