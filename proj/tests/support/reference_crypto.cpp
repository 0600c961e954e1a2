#include "reference_crypto.hpp"

#include <cstring>

namespace reference {
namespace {

std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0));
}

std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

// S-box built from the field inverse and the affine map rather than copied in.
struct Sbox {
  std::array<std::uint8_t, 256> fwd{};
  std::array<std::uint8_t, 256> inv{};
  Sbox() {
    for (int x = 0; x < 256; ++x) {
      std::uint8_t invx = 0;
      if (x != 0) {
        for (int y = 1; y < 256; ++y) {
          if (gmul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
            invx = static_cast<std::uint8_t>(y);
            break;
          }
        }
      }
      std::uint8_t s = invx;
      for (int i = 1; i <= 4; ++i) {
        s ^= static_cast<std::uint8_t>((invx << i) | (invx >> (8 - i)));
      }
      s ^= 0x63;
      fwd[x] = s;
      inv[s] = static_cast<std::uint8_t>(x);
    }
  }
};

const Sbox& sbox() {
  static const Sbox s;
  return s;
}

using Schedule = std::array<Block, 11>;

Schedule expand(const Block& key) {
  const auto& S = sbox().fwd;
  std::array<std::uint8_t, 176> w{};
  std::memcpy(w.data(), key.data(), 16);
  std::uint8_t rcon = 1;
  for (int i = 4; i < 44; ++i) {
    std::uint8_t t[4] = {w[4 * (i - 1)], w[4 * (i - 1) + 1], w[4 * (i - 1) + 2], w[4 * (i - 1) + 3]};
    if (i % 4 == 0) {
      const std::uint8_t first = t[0];
      t[0] = static_cast<std::uint8_t>(S[t[1]] ^ rcon);
      t[1] = S[t[2]];
      t[2] = S[t[3]];
      t[3] = S[first];
      rcon = xtime(rcon);
    }
    for (int j = 0; j < 4; ++j) w[4 * i + j] = static_cast<std::uint8_t>(w[4 * (i - 4) + j] ^ t[j]);
  }
  Schedule out;
  for (int r = 0; r < 11; ++r) std::memcpy(out[r].data(), w.data() + 16 * r, 16);
  return out;
}

void add_round_key(Block& s, const Block& k) {
  for (int i = 0; i < 16; ++i) s[i] ^= k[i];
}

// State is column-major: byte (row r, column c) sits at index 4c + r.
void shift_rows(Block& s, bool inverse) {
  Block t = s;
  for (int r = 1; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int from = inverse ? (c - r + 4) % 4 : (c + r) % 4;
      s[4 * c + r] = t[4 * from + r];
    }
  }
}

void mix_columns(Block& s, bool inverse) {
  const std::uint8_t m[4] = {static_cast<std::uint8_t>(inverse ? 0x0e : 0x02),
                             static_cast<std::uint8_t>(inverse ? 0x0b : 0x03),
                             static_cast<std::uint8_t>(inverse ? 0x0d : 0x01),
                             static_cast<std::uint8_t>(inverse ? 0x09 : 0x01)};
  for (int c = 0; c < 4; ++c) {
    std::uint8_t a[4];
    for (int r = 0; r < 4; ++r) a[r] = s[4 * c + r];
    for (int r = 0; r < 4; ++r) {
      s[4 * c + r] = static_cast<std::uint8_t>(gmul(a[r], m[0]) ^ gmul(a[(r + 1) % 4], m[1]) ^
                                               gmul(a[(r + 2) % 4], m[2]) ^ gmul(a[(r + 3) % 4], m[3]));
    }
  }
}

}  // namespace

Block aes128_encrypt(const Block& key, const Block& plain) {
  const auto ks = expand(key);
  const auto& S = sbox().fwd;
  Block s = plain;
  add_round_key(s, ks[0]);
  for (int round = 1; round <= 10; ++round) {
    for (auto& b : s) b = S[b];
    shift_rows(s, false);
    if (round != 10) mix_columns(s, false);
    add_round_key(s, ks[round]);
  }
  return s;
}

Block aes128_decrypt(const Block& key, const Block& cipher) {
  const auto ks = expand(key);
  const auto& Si = sbox().inv;
  Block s = cipher;
  add_round_key(s, ks[10]);
  for (int round = 9; round >= 0; --round) {
    shift_rows(s, true);
    for (auto& b : s) b = Si[b];
    add_round_key(s, ks[round]);
    if (round != 0) mix_columns(s, true);
  }
  return s;
}

namespace {

std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

bool is_prime(int n) {
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return n >= 2;
}

// First 32 fractional bits of p^(1/k): floor(p^(1/k) * 2^32) mod 2^32,
// found exactly by bisection on x^k <= p * 2^(32k).
std::uint32_t frac_root(int p, int k) {
  using u128 = unsigned __int128;
  auto pow_k = [k](u128 x) {
    u128 r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  };
  const u128 target = static_cast<u128>(p) << (32 * k);
  u128 lo = 0;
  u128 hi = static_cast<u128>(1) << 40;
  while (lo < hi) {
    const u128 mid = (lo + hi + 1) / 2;
    if (pow_k(mid) <= target) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return static_cast<std::uint32_t>(lo);
}

struct Constants {
  std::array<std::uint32_t, 8> h{};
  std::array<std::uint32_t, 64> k{};
  Constants() {
    int found = 0;
    for (int n = 2; found < 64; ++n) {
      if (!is_prime(n)) continue;
      if (found < 8) h[found] = frac_root(n, 2);
      k[found] = frac_root(n, 3);
      ++found;
    }
  }
};

}  // namespace

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  static const Constants C;
  std::vector<std::uint8_t> msg(data.begin(), data.end());
  const std::uint64_t bit_len = static_cast<std::uint64_t>(data.size()) * 8;
  msg.push_back(0x80);
  while (msg.size() % 64 != 56) msg.push_back(0);
  for (int i = 7; i >= 0; --i) msg.push_back(static_cast<std::uint8_t>(bit_len >> (8 * i)));

  auto h = C.h;
  for (std::size_t off = 0; off < msg.size(); off += 64) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) {
      w[i] = (std::uint32_t{msg[off + 4 * i]} << 24) | (std::uint32_t{msg[off + 4 * i + 1]} << 16) |
             (std::uint32_t{msg[off + 4 * i + 2]} << 8) | msg[off + 4 * i + 3];
    }
    for (int i = 16; i < 64; ++i) {
      const auto s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const auto s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto [a, b, c, d, e, f, g, hh] = h;
    for (int i = 0; i < 64; ++i) {
      const auto S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const auto ch = (e & f) ^ (~e & g);
      const auto t1 = hh + S1 + ch + C.k[i] + w[i];
      const auto S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const auto maj = (a & b) ^ (a & c) ^ (b & c);
      const auto t2 = S0 + maj;
      hh = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    const std::uint32_t add[8] = {a, b, c, d, e, f, g, hh};
    for (int i = 0; i < 8; ++i) h[i] += add[i];
  }
  std::array<std::uint8_t, 32> out{};
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 4; ++j) out[4 * i + j] = static_cast<std::uint8_t>(h[i] >> (24 - 8 * j));
  }
  return out;
}

}  // namespace reference
