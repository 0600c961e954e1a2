#include <gtest/gtest.h>

#include "zircon/address.hpp"
#include "zircon/bytes.hpp"
#include "zircon/error.hpp"
#include "zircon/random.hpp"

using namespace zircon;

TEST(Hex, RoundTrip) {
  const Bytes b{0x00, 0x7f, 0x80, 0xff};
  EXPECT_EQ(to_hex(b), "007f80ff");
  EXPECT_EQ(from_hex("007F80ff"), b);
  EXPECT_THROW(from_hex("abc"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
  EXPECT_THROW(array_from_hex<4>("0011"), Error);
}

TEST(Bytes, BigEndianFields) {
  Bytes b;
  put_u16(b, 0x1234);
  put_u32(b, 0xdeadbeef);
  EXPECT_EQ(to_hex(b), "1234deadbeef");
  EXPECT_EQ(get_u16(b, 0), 0x1234);
  EXPECT_EQ(get_u32(b, 2), 0xdeadbeefu);
}

TEST(Address, ParseAndFormat) {
  const auto ip = Ipv4Address::parse("192.168.1.10");
  EXPECT_EQ(ip.to_u32(), 0xc0a8010au);
  EXPECT_EQ(ip.to_string(), "192.168.1.10");
  EXPECT_EQ(Ipv4Address::from_u32(0x0a0000fe).to_string(), "10.0.0.254");
  for (const char* bad : {"1.2.3", "1.2.3.4.5", "256.1.1.1", "a.b.c.d", "", "1..2.3", "1.2.3.4 "}) {
    EXPECT_THROW(Ipv4Address::parse(bad), Error) << bad;
  }
}

TEST(Address, Subnet) {
  const auto net = Subnet::parse("10.0.0.0/8");
  EXPECT_TRUE(net.contains(Ipv4Address::parse("10.200.3.4")));
  EXPECT_FALSE(net.contains(Ipv4Address::parse("11.0.0.1")));
  EXPECT_TRUE(Subnet::parse("0.0.0.0/0").contains(Ipv4Address::parse("8.8.8.8")));
  EXPECT_THROW(Subnet::parse("10.0.0.0/33"), Error);
  const auto host = Subnet::parse("10.0.0.7");
  EXPECT_TRUE(host.contains(Ipv4Address::parse("10.0.0.7")));
  EXPECT_FALSE(host.contains(Ipv4Address::parse("10.0.0.8")));
  EXPECT_THROW(Subnet::parse("10.0.0.0/x"), Error);
}

TEST(Random, UniformBelowStaysInRange) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(uniform_below(rng, 7), 7u);
  for (int i = 0; i < 1000; ++i) {
    const auto v = uniform_between(rng, 5, 10);
    EXPECT_GE(v, 5u);
    EXPECT_LE(v, 10u);
  }
}

TEST(Random, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
}
