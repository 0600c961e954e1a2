#pragma once

#include <cstdint>
#include <optional>

#include "zircon/bytes.hpp"

namespace zircon::crypto {

inline constexpr std::size_t kKeySize = 16;
inline constexpr std::size_t kBlockSize = 16;
inline constexpr std::size_t kPlainSize = 8;
inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kTruncatedSize = 8;

/// Shared AES-128 key K_j. `epoch` is the rotation index j.
struct SymmetricKey {
  ByteArray<kKeySize> bytes{};
  std::uint32_t epoch = 0;

  bool operator==(const SymmetricKey&) const = default;
};

/// SHA-256 output.
struct Digest {
  ByteArray<kDigestSize> bytes{};

  bool operator==(const Digest&) const = default;
};

/// AES-128 on a single block: the 8-byte plaintext is PKCS#7 padded to 16
/// bytes (eight 0x08 bytes) and encrypted raw. Throws Errc::length_violation
/// unless `plain` is exactly 8 bytes.
ByteArray<kBlockSize> encrypt_block(const SymmetricKey& key, ByteView plain);

/// Inverse of encrypt_block. All eight padding bytes must read 0x08, which
/// makes a wrong key or corrupted block fail with Errc::decryption_failure
/// except with probability 2^-64.
ByteArray<kPlainSize> decrypt_block(const SymmetricKey& key, ByteView cipher);

Digest digest(ByteView data);

/// First 8 bytes of the digest, in order.
ByteArray<kTruncatedSize> truncate_digest(const Digest& d);

enum class LabelMode { lsb32, prng };

/// 32 label bits taken from a digest.
///
/// lsb32: the 32 least-significant bits of the digest read as a big-endian
/// 256-bit integer (its last four bytes).
///
/// prng: 32 distinct bit positions drawn without replacement from a
/// generator seeded with `seed`; the first drawn bit becomes the most
/// significant bit of the result. Position 0 is the least-significant bit
/// of the last byte. Throws Errc::configuration when `seed` is absent.
std::uint32_t select_label_bits(const Digest& d, LabelMode mode,
                                std::optional<std::uint64_t> seed = std::nullopt);

/// Bit `position` (0 = LSB of byte 31) of a digest.
bool digest_bit(const Digest& d, unsigned position);

}  // namespace zircon::crypto
