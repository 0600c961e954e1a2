#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "zircon/bytes.hpp"

namespace zircon {

/// IPv4 address held as four octets in network order.
struct Ipv4Address {
  ByteArray<4> octets{};

  static Ipv4Address from_u32(std::uint32_t value);
  /// Dotted quad. Throws Errc::parse on malformed input.
  static Ipv4Address parse(std::string_view text);

  std::uint32_t to_u32() const;
  std::string to_string() const;

  auto operator<=>(const Ipv4Address&) const = default;
};

/// CIDR block, used as the "internal network" predicate.
struct Subnet {
  Ipv4Address base;
  std::uint8_t prefix = 32;

  static Subnet parse(std::string_view cidr);
  bool contains(const Ipv4Address& ip) const;
};

}  // namespace zircon
