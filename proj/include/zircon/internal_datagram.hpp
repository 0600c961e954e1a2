#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "zircon/address.hpp"
#include "zircon/bytes.hpp"
#include "zircon/crypto.hpp"

namespace zircon {

/// Modeled subset of an IPv4 datagram. The 32 label bits occupy
/// identification (16) | flags (3) | fragment offset (13).
struct Ipv4HeaderModel {
  static constexpr std::size_t kHeaderSize = 20;
  static constexpr std::uint8_t kProtocol = 253;  // experimental
  static constexpr std::uint8_t kTtl = 64;

  Ipv4Address src;
  Ipv4Address dst;
  std::uint16_t identification = 0;
  std::uint8_t flags = 0;             // 3 bits
  std::uint16_t fragment_offset = 0;  // 13 bits
  std::uint16_t total_length = kHeaderSize;
  Bytes payload;

  /// total_length set from the payload.
  static Ipv4HeaderModel make(const Ipv4Address& src, const Ipv4Address& dst, Bytes payload);

  std::uint32_t label() const;
  void set_label(std::uint32_t bits);
  /// Actual on-wire size: header plus payload.
  std::size_t wire_size() const { return kHeaderSize + payload.size(); }

  /// 20-byte header (with checksum) followed by the payload.
  Bytes serialize() const;
  /// Throws Errc::frame on short input or a version/IHL other than 4/5.
  static Ipv4HeaderModel parse(ByteView bytes);

  bool operator==(const Ipv4HeaderModel&) const = default;
};

/// RFC 1071 ones' complement checksum over the given bytes.
std::uint16_t internet_checksum(ByteView header);

enum class InternalVerdict { internal_authenticated, internal_forged, requires_ids };

std::string_view to_string(InternalVerdict verdict) noexcept;

struct LabelConfig {
  crypto::LabelMode mode = crypto::LabelMode::lsb32;
  std::optional<std::uint64_t> seed;
};

/// H(dst ip || first 20 payload bytes, zero padded).
crypto::Digest label_digest(const Ipv4HeaderModel& d);

/// Writes the 32 selected digest bits into the header.
Ipv4HeaderModel label_datagram(Ipv4HeaderModel d, const LabelConfig& config = {});

using InternalPredicate = std::function<bool(const Ipv4Address&)>;

inline constexpr std::size_t kInternalManagingSize = 48;

/// Both ends internal and the size matches: recompute and compare the
/// label. Anything else goes to the IDS.
InternalVerdict check_datagram(const Ipv4HeaderModel& d, const InternalPredicate& is_internal,
                               std::size_t expected_size = kInternalManagingSize,
                               const LabelConfig& config = {});

}  // namespace zircon
