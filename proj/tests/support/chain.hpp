#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "zircon/nodes.hpp"

namespace testing_support {

using namespace zircon;

inline Ipv4Address node_ip(NodeId id) {
  return id == 100 ? Ipv4Address::parse("10.0.0.254") : Ipv4Address::from_u32(0x0A000000u + id);
}

/// Source 1 -> relays 2.. -> gateway 100, driven by hand, one hop per
/// call, with an optional hook that rewrites the frame on a chosen link.
struct Chain {
  explicit Chain(std::size_t relays, ProtocolSettings settings = {}, std::uint64_t key_seed = 11,
                 std::uint32_t rotate_min = 0, std::uint32_t rotate_max = 0)
      : net(settings, KeySchedule(key_seed, rotate_min, rotate_max)) {
    path.push_back(1);
    for (std::size_t i = 0; i < relays; ++i) path.push_back(static_cast<NodeId>(2 + i));
    path.push_back(100);
    for (std::size_t i = 0; i < path.size(); ++i) {
      const Role role = i == 0 ? Role::source : i + 1 == path.size() ? Role::gateway : Role::intermediate;
      net.add_node({path[i], node_ip(path[i]), role, true});
    }
  }

  struct Trip {
    std::vector<VerificationVerdict> verdicts;
    std::optional<ProvenancePath> path;
    const VerificationVerdict& last() const { return verdicts.back(); }
    bool accepted() const { return path.has_value(); }
  };

  using Tamper = std::function<void(std::size_t link, Bytes& frame)>;

  /// Emits one packet at `now` (ms) and carries it to the gateway or the
  /// first rejection. Links take `link_ms` each.
  Trip send(const Bytes& payload, SimTime now = 0, const Tamper& tamper = {}, SimTime link_ms = 300) {
    const auto packet = source_emit_multihop(net, 1, payload, net.settings().clock.seconds(now), now);
    return carry(packet.serialize(), 1, now, tamper, link_ms);
  }

  Trip carry(Bytes frame, std::size_t link, SimTime now, const Tamper& tamper = {},
             SimTime link_ms = 300) {
    Trip trip;
    for (; link < path.size(); ++link) {
      if (tamper) tamper(link, frame);
      now += link_ms;
      const NodeId receiver = path[link];
      if (link + 1 == path.size()) {
        auto result = gateway_verify_multihop(net, receiver, frame, now);
        trip.verdicts.push_back(result.verdict);
        trip.path = std::move(result.path);
        return trip;
      }
      auto result = intermediate_forward(net, receiver, frame, now);
      trip.verdicts.push_back(result.verdict);
      if (!result.forwarded) return trip;
      frame = result.forwarded->serialize();
    }
    return trip;
  }

  Network net;
  std::vector<NodeId> path;
};

}  // namespace testing_support
