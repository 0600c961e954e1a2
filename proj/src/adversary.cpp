#include "zircon/adversary.hpp"

#include <algorithm>

#include "zircon/error.hpp"

namespace zircon {

namespace {

constexpr AttackKind kAllKinds[] = {
    AttackKind::eavesdrop,        AttackKind::replay, AttackKind::insert_bits,
    AttackKind::delete_bits,      AttackKind::modify_payload,
    AttackKind::modify_watermark, AttackKind::drop, AttackKind::fake_inject,
    AttackKind::store_probe,
};

using Bits = std::vector<bool>;

Bits to_bits(ByteView data) {
  Bits out;
  out.reserve(data.size() * 8);
  for (std::uint8_t b : data) {
    for (int i = 7; i >= 0; --i) out.push_back(((b >> i) & 1) != 0);
  }
  return out;
}

Bytes from_bits(const Bits& bits) {
  Bytes out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

void apply_edits(Bytes& frame, std::size_t base, std::size_t region,
                 const std::vector<ByteEdit>& edits) {
  for (const auto& e : edits) {
    if (e.offset >= region) {
      throw Error(Errc::attack_spec, "byte edit offset " + std::to_string(e.offset) +
                                         " outside a region of " + std::to_string(region) +
                                         " bytes");
    }
    frame[base + e.offset] ^= e.mask;
  }
}

}  // namespace

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::eavesdrop: return "eavesdrop";
    case AttackKind::replay: return "replay";
    case AttackKind::insert_bits: return "insert_bits";
    case AttackKind::delete_bits: return "delete_bits";
    case AttackKind::modify_payload: return "modify_payload";
    case AttackKind::modify_watermark: return "modify_watermark";
    case AttackKind::drop: return "drop";
    case AttackKind::fake_inject: return "fake_inject";
    case AttackKind::store_probe: return "store_probe";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view text) {
  for (auto kind : kAllKinds) {
    if (text == to_string(kind)) return kind;
  }
  throw Error(Errc::parse, "unknown attack kind '" + std::string(text) + "'");
}

bool is_active(AttackKind kind) noexcept {
  return kind != AttackKind::eavesdrop && kind != AttackKind::store_probe;
}

bool AttackTrigger::matches(PacketId id, SimTime now) const {
  if (packet && *packet != id) return false;
  if (from && now < *from) return false;
  if (to && now > *to) return false;
  return true;
}

void AttackSpec::validate() const {
  auto fail = [this](const std::string& why) {
    throw Error(Errc::attack_spec, std::string(to_string(kind)) + ": " + why);
  };
  if (link == 0) fail("link is 1-based");
  switch (kind) {
    case AttackKind::insert_bits:
      if (insertions.empty()) fail("no insertions");
      break;
    case AttackKind::delete_bits:
      if (delete_count < 1) fail("q must be at least 1");
      break;
    case AttackKind::modify_payload:
    case AttackKind::modify_watermark:
      if (edits.empty()) fail("byte-edit list is empty");
      break;
    case AttackKind::replay:
      if (delay < 0) fail("negative replay delay");
      break;
    case AttackKind::fake_inject:
      if (payload_size > 0xFFFF) fail("payload too large");
      break;
    default:
      break;
  }
  for (const auto& e : edits) {
    if (e.mask == 0) fail("byte edit with zero mask changes nothing");
  }
}

Bytes insert_bits(ByteView data, const std::vector<BitInsertion>& insertions) {
  Bits bits = to_bits(data);
  for (const auto& ins : insertions) {
    if (ins.position > bits.size()) {
      throw Error(Errc::attack_spec, "bit insertion at " + std::to_string(ins.position) +
                                         " beyond " + std::to_string(bits.size()) + " bits");
    }
    bits.insert(bits.begin() + static_cast<std::ptrdiff_t>(ins.position), ins.value);
  }
  return from_bits(bits);
}

Bytes delete_bits(ByteView data, std::size_t count, std::optional<std::size_t> position) {
  Bits bits = to_bits(data);
  if (count == 0 || count > bits.size()) {
    throw Error(Errc::attack_spec, "cannot delete " + std::to_string(count) + " of " +
                                       std::to_string(bits.size()) + " bits");
  }
  const std::size_t start = position.value_or(bits.size() - count);
  if (start + count > bits.size()) {
    throw Error(Errc::attack_spec, "bit deletion runs past the end of the frame");
  }
  bits.erase(bits.begin() + static_cast<std::ptrdiff_t>(start),
             bits.begin() + static_cast<std::ptrdiff_t>(start + count));
  // The link carries whole octets; a trailing partial octet is lost.
  bits.resize(bits.size() / 8 * 8);
  return from_bits(bits);
}

AttackEffect apply(const AttackSpec& attack, ByteView frame, bool watermarked) {
  attack.validate();
  Bytes bytes(frame.begin(), frame.end());
  AttackEffect effect;
  auto watermark_base = [&]() {
    if (!watermarked || bytes.size() < FinalWatermark::kSize) {
      throw Error(Errc::attack_spec, "frame carries no watermark");
    }
    return bytes.size() - FinalWatermark::kSize;
  };

  switch (attack.kind) {
    case AttackKind::eavesdrop:
      effect.captured = bytes;
      effect.delivered = std::move(bytes);
      break;
    case AttackKind::replay: {
      Bytes copy = bytes;
      if (attack.mutate_watermark) {
        const std::vector<ByteEdit> fallback{{0, 0x01}};
        apply_edits(copy, watermark_base(), FinalWatermark::kSize,
                    attack.edits.empty() ? fallback : attack.edits);
      }
      effect.captured = bytes;
      effect.replay_bytes = std::move(copy);
      effect.replay_delay = attack.delay;
      effect.delivered = std::move(bytes);
      break;
    }
    case AttackKind::insert_bits:
      effect.delivered = insert_bits(bytes, attack.insertions);
      break;
    case AttackKind::delete_bits:
      effect.delivered = delete_bits(bytes, attack.delete_count, attack.delete_position);
      break;
    case AttackKind::modify_payload: {
      if (bytes.size() < 9) throw Error(Errc::attack_spec, "frame too short to hold a payload");
      const std::size_t len = std::min<std::size_t>(get_u16(bytes, 7), bytes.size() - 9);
      apply_edits(bytes, 9, len, attack.edits);
      effect.delivered = std::move(bytes);
      break;
    }
    case AttackKind::modify_watermark:
      apply_edits(bytes, watermark_base(), FinalWatermark::kSize, attack.edits);
      effect.delivered = std::move(bytes);
      break;
    case AttackKind::drop:
      break;
    case AttackKind::fake_inject:
    case AttackKind::store_probe:
      throw Error(Errc::attack_spec,
                  std::string(to_string(attack.kind)) + " is not applied to frames on a link");
  }
  return effect;
}

ProbeOutcome store_probe(ProvenanceStore& store, NodeId caller, NodeId source,
                         Sequence sequence) {
  try {
    const auto set = store.query_all(source, sequence, caller);
    return ProbeOutcome{false, std::nullopt, set.size()};
  } catch (const Error& e) {
    return ProbeOutcome{true, e.code(), 0};
  }
}

ForgedPacket fake_inject(ProvenanceStore& store, const FakeInjection& spec, SimTime now) {
  const auto record =
      make_provenance_record(make_feature_subwatermark(spec.ip, spec.capture_time), spec.forged_key);
  const auto watermark = assemble_watermark(record, make_hash_subwatermark(spec.payload));
  ForgedPacket out{embed(spec.payload, watermark, spec.id, spec.hop), false};
  if (spec.insider) {
    try {
      for (HopIndex h = 1; h <= spec.hop; ++h) {
        store.store({spec.id.source, spec.id.sequence, h}, record, *spec.insider, now);
      }
      out.stored = true;
    } catch (const Error&) {
      out.stored = false;
    }
  }
  return out;
}

bool leaks_feature(ByteView captured, const FeatureSubWatermark& feature) {
  const auto needle = feature.serialize();
  return std::search(captured.begin(), captured.end(), needle.begin(), needle.end()) !=
         captured.end();
}

}  // namespace zircon
