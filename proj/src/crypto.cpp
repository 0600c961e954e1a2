#include "zircon/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <memory>
#include <vector>

#include "zircon/error.hpp"
#include "zircon/random.hpp"

namespace zircon::crypto {

namespace {

constexpr std::uint8_t kPad = kBlockSize - kPlainSize;

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

// One raw AES-128 block, no chaining and no library padding.
ByteArray<kBlockSize> aes_block(const SymmetricKey& key, const ByteArray<kBlockSize>& in,
                                bool encrypt) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw Error(Errc::configuration, "EVP_CIPHER_CTX_new failed");
  if (EVP_CipherInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.bytes.data(), nullptr,
                        encrypt ? 1 : 0) != 1) {
    throw Error(Errc::configuration, "AES-128 init failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  ByteArray<kBlockSize> out{};
  int written = 0;
  if (EVP_CipherUpdate(ctx.get(), out.data(), &written, in.data(), static_cast<int>(in.size())) != 1 ||
      written != static_cast<int>(kBlockSize)) {
    throw Error(Errc::configuration, "AES-128 block operation failed");
  }
  return out;
}

}  // namespace

ByteArray<kBlockSize> encrypt_block(const SymmetricKey& key, ByteView plain) {
  if (plain.size() != kPlainSize) {
    throw Error(Errc::length_violation,
                "encrypt_block expects 8 bytes, got " + std::to_string(plain.size()));
  }
  ByteArray<kBlockSize> block{};
  std::copy(plain.begin(), plain.end(), block.begin());
  std::fill(block.begin() + kPlainSize, block.end(), kPad);
  return aes_block(key, block, true);
}

ByteArray<kPlainSize> decrypt_block(const SymmetricKey& key, ByteView cipher) {
  if (cipher.size() != kBlockSize) {
    throw Error(Errc::length_violation,
                "decrypt_block expects 16 bytes, got " + std::to_string(cipher.size()));
  }
  ByteArray<kBlockSize> block{};
  std::copy(cipher.begin(), cipher.end(), block.begin());
  const auto plain = aes_block(key, block, false);
  if (!std::all_of(plain.begin() + kPlainSize, plain.end(),
                   [](std::uint8_t b) { return b == kPad; })) {
    throw Error(Errc::decryption_failure, "padding check failed (wrong key or corrupted block)");
  }
  ByteArray<kPlainSize> out{};
  std::copy(plain.begin(), plain.begin() + kPlainSize, out.begin());
  return out;
}

Digest digest(ByteView data) {
  Digest d;
  SHA256(data.data(), data.size(), d.bytes.data());
  return d;
}

ByteArray<kTruncatedSize> truncate_digest(const Digest& d) {
  ByteArray<kTruncatedSize> out{};
  std::copy_n(d.bytes.begin(), kTruncatedSize, out.begin());
  return out;
}

bool digest_bit(const Digest& d, unsigned position) {
  const std::size_t byte = kDigestSize - 1 - position / 8;
  return ((d.bytes[byte] >> (position % 8)) & 1u) != 0;
}

std::uint32_t select_label_bits(const Digest& d, LabelMode mode,
                                std::optional<std::uint64_t> seed) {
  if (mode == LabelMode::lsb32) return get_u32(d.bytes, kDigestSize - 4);

  if (!seed) throw Error(Errc::configuration, "prng label mode requires a seed");
  Rng rng(*seed);
  // Partial Fisher-Yates over the 256 positions gives draws without replacement.
  std::vector<unsigned> positions(kDigestSize * 8);
  for (unsigned i = 0; i < positions.size(); ++i) positions[i] = i;
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < 32; ++i) {
    const auto j = i + uniform_below(rng, positions.size() - i);
    std::swap(positions[i], positions[j]);
    out = (out << 1) | (digest_bit(d, positions[i]) ? 1u : 0u);
  }
  return out;
}

}  // namespace zircon::crypto
