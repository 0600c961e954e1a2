#include "zircon/internal_datagram.hpp"

#include <algorithm>

#include "zircon/error.hpp"

namespace zircon {

Ipv4HeaderModel Ipv4HeaderModel::make(const Ipv4Address& src, const Ipv4Address& dst,
                                      Bytes payload) {
  Ipv4HeaderModel d;
  d.src = src;
  d.dst = dst;
  d.payload = std::move(payload);
  d.total_length = static_cast<std::uint16_t>(kHeaderSize + d.payload.size());
  return d;
}

std::uint32_t Ipv4HeaderModel::label() const {
  return (std::uint32_t{identification} << 16) | (std::uint32_t{flags} << 13) |
         std::uint32_t{fragment_offset};
}

void Ipv4HeaderModel::set_label(std::uint32_t bits) {
  identification = static_cast<std::uint16_t>(bits >> 16);
  flags = static_cast<std::uint8_t>((bits >> 13) & 0x7u);
  fragment_offset = static_cast<std::uint16_t>(bits & 0x1FFFu);
}

std::uint16_t internet_checksum(ByteView header) {
  std::uint32_t sum = 0;
  for (std::size_t i = 0; i + 1 < header.size(); i += 2) sum += get_u16(header, i);
  if (header.size() % 2 != 0) sum += std::uint32_t{header.back()} << 8;
  while (sum >> 16) sum = (sum & 0xFFFFu) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

Bytes Ipv4HeaderModel::serialize() const {
  Bytes out;
  out.reserve(wire_size());
  out.push_back(0x45);  // version 4, IHL 5
  out.push_back(0x00);  // DSCP/ECN
  put_u16(out, total_length);
  put_u16(out, identification);
  put_u16(out, static_cast<std::uint16_t>((std::uint16_t{flags} << 13) | (fragment_offset & 0x1FFFu)));
  out.push_back(kTtl);
  out.push_back(kProtocol);
  put_u16(out, 0);
  append(out, src.octets);
  append(out, dst.octets);
  const auto checksum = internet_checksum(ByteView(out).first(kHeaderSize));
  out[10] = static_cast<std::uint8_t>(checksum >> 8);
  out[11] = static_cast<std::uint8_t>(checksum);
  append(out, payload);
  return out;
}

Ipv4HeaderModel Ipv4HeaderModel::parse(ByteView bytes) {
  if (bytes.size() < kHeaderSize) throw Error(Errc::frame, "datagram shorter than an IPv4 header");
  if (bytes[0] != 0x45) throw Error(Errc::frame, "only IPv4 headers without options are modeled");
  Ipv4HeaderModel d;
  d.total_length = get_u16(bytes, 2);
  d.identification = get_u16(bytes, 4);
  const auto flags_offset = get_u16(bytes, 6);
  d.flags = static_cast<std::uint8_t>(flags_offset >> 13);
  d.fragment_offset = static_cast<std::uint16_t>(flags_offset & 0x1FFFu);
  std::copy_n(bytes.begin() + 12, 4, d.src.octets.begin());
  std::copy_n(bytes.begin() + 16, 4, d.dst.octets.begin());
  d.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
  return d;
}

std::string_view to_string(InternalVerdict verdict) noexcept {
  switch (verdict) {
    case InternalVerdict::internal_authenticated: return "internal_authenticated";
    case InternalVerdict::internal_forged: return "internal_forged";
    case InternalVerdict::requires_ids: return "requires_ids";
  }
  return "?";
}

crypto::Digest label_digest(const Ipv4HeaderModel& d) {
  constexpr std::size_t kContentBytes = 20;
  Bytes input(d.dst.octets.begin(), d.dst.octets.end());
  const std::size_t take = std::min(kContentBytes, d.payload.size());
  input.insert(input.end(), d.payload.begin(), d.payload.begin() + static_cast<std::ptrdiff_t>(take));
  input.resize(4 + kContentBytes, 0);
  return crypto::digest(input);
}

Ipv4HeaderModel label_datagram(Ipv4HeaderModel d, const LabelConfig& config) {
  d.set_label(crypto::select_label_bits(label_digest(d), config.mode, config.seed));
  return d;
}

InternalVerdict check_datagram(const Ipv4HeaderModel& d, const InternalPredicate& is_internal,
                               std::size_t expected_size, const LabelConfig& config) {
  if (!is_internal(d.src) || !is_internal(d.dst) || d.wire_size() != expected_size) {
    return InternalVerdict::requires_ids;
  }
  const auto expected = crypto::select_label_bits(label_digest(d), config.mode, config.seed);
  return expected == d.label() ? InternalVerdict::internal_authenticated
                               : InternalVerdict::internal_forged;
}

}  // namespace zircon
