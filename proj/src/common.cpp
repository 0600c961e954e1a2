#include <charconv>

#include "zircon/address.hpp"
#include "zircon/bytes.hpp"
#include "zircon/error.hpp"

namespace zircon {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::length_violation: return "length violation";
    case Errc::decryption_failure: return "decryption failure";
    case Errc::configuration: return "configuration error";
    case Errc::frame: return "frame error";
    case Errc::authorization: return "authorization error";
    case Errc::sequencing: return "sequencing error";
    case Errc::missing_record: return "missing record";
    case Errc::one_retrieval_violation: return "one-retrieval violation";
    case Errc::attack_spec: return "attack spec error";
    case Errc::validation: return "validation error";
    case Errc::domain: return "domain error";
    case Errc::io: return "i/o error";
    case Errc::parse: return "parse error";
  }
  return "error";
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(Errc::parse, "odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_value(hex[i]);
    const int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::parse, "invalid hex digit in '" + std::string(hex) + "'");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

Ipv4Address Ipv4Address::from_u32(std::uint32_t value) {
  return Ipv4Address{{static_cast<std::uint8_t>(value >> 24), static_cast<std::uint8_t>(value >> 16),
                      static_cast<std::uint8_t>(value >> 8), static_cast<std::uint8_t>(value)}};
}

Ipv4Address Ipv4Address::parse(std::string_view text) {
  Ipv4Address out;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 4; ++i) {
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc{} || next == p || value > 255) {
      throw Error(Errc::parse, "bad IPv4 address '" + std::string(text) + "'");
    }
    out.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
    p = next;
    if (i < 3) {
      if (p == end || *p != '.') throw Error(Errc::parse, "bad IPv4 address '" + std::string(text) + "'");
      ++p;
    }
  }
  if (p != end) throw Error(Errc::parse, "bad IPv4 address '" + std::string(text) + "'");
  return out;
}

std::uint32_t Ipv4Address::to_u32() const { return get_u32(octets, 0); }

std::string Ipv4Address::to_string() const {
  return std::to_string(octets[0]) + "." + std::to_string(octets[1]) + "." +
         std::to_string(octets[2]) + "." + std::to_string(octets[3]);
}

Subnet Subnet::parse(std::string_view cidr) {
  const auto slash = cidr.find('/');
  Subnet out;
  out.base = Ipv4Address::parse(cidr.substr(0, slash));
  if (slash != std::string_view::npos) {
    unsigned prefix = 0;
    const auto tail = cidr.substr(slash + 1);
    auto [next, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), prefix);
    if (ec != std::errc{} || next != tail.data() + tail.size() || prefix > 32) {
      throw Error(Errc::parse, "bad CIDR prefix in '" + std::string(cidr) + "'");
    }
    out.prefix = static_cast<std::uint8_t>(prefix);
  }
  return out;
}

bool Subnet::contains(const Ipv4Address& ip) const {
  if (prefix == 0) return true;
  const std::uint32_t mask = prefix >= 32 ? 0xFFFFFFFFu : ~((1u << (32 - prefix)) - 1u);
  return (ip.to_u32() & mask) == (base.to_u32() & mask);
}

}  // namespace zircon
