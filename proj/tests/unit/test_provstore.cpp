#include <gtest/gtest.h>

#include "zircon/error.hpp"
#include "zircon/provstore.hpp"

using namespace zircon;

namespace {

ProvenanceRecordValue value(std::uint8_t tag, std::uint32_t epoch = 1) {
  ProvenanceRecordValue v;
  v.cipher.fill(tag);
  v.key_epoch = epoch;
  return v;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::validation;
}

struct StoreTest : ::testing::Test {
  void SetUp() override {
    for (NodeId id : {1, 2, 3, 4, 5}) store.register_node(id);
    store.register_gateway(100);
    store.set_journal([this](const std::string& line) { journal.push_back(line); });
  }
  void fill(NodeId src, Sequence seq, int hops) {
    for (int h = 1; h <= hops; ++h) {
      store.store({src, seq, static_cast<HopIndex>(h)}, value(static_cast<std::uint8_t>(h)),
                  static_cast<NodeId>(h), h * 10);
    }
  }
  ProvenanceStore store;
  std::vector<std::string> journal;
};

}  // namespace

TEST_F(StoreTest, FirstStoreMustBeHopOne) {
  EXPECT_EQ(code_of([&] { store.store({1, 1, 2}, value(1), 1, 0); }), Errc::sequencing);
  store.store({1, 1, 1}, value(1), 1, 0);
  EXPECT_EQ(code_of([&] { store.store({1, 1, 3}, value(3), 2, 0); }), Errc::sequencing);
  EXPECT_EQ(code_of([&] { store.store({1, 1, 1}, value(9), 2, 0); }), Errc::sequencing);
}

TEST_F(StoreTest, UnregisteredWriterIsRefused) {
  EXPECT_EQ(code_of([&] { store.store({1, 1, 1}, value(1), 77, 0); }), Errc::authorization);
  EXPECT_FALSE(store.contains(1, 1));
}

TEST_F(StoreTest, QueryLastTracksTheNewestHop) {
  EXPECT_EQ(code_of([&] { store.query_last(1, 1); }), Errc::missing_record);
  fill(1, 1, 3);
  EXPECT_EQ(store.query_last(1, 1).key.hop, 3);
  EXPECT_EQ(store.query_last(1, 1).value, value(3));
  store.delete_all(1, 1, 50);
  EXPECT_EQ(code_of([&] { store.query_last(1, 1); }), Errc::missing_record);
}

TEST_F(StoreTest, QueryAllReturnsOrderedSetOnce) {
  fill(1, 5, 4);
  const auto set = store.query_all(1, 5, 100);
  ASSERT_EQ(set.size(), 4u);
  for (std::size_t i = 0; i < set.size(); ++i) EXPECT_EQ(set[i].key.hop, i + 1);
  EXPECT_EQ(code_of([&] { store.query_all(1, 5, 100); }), Errc::one_retrieval_violation);
  // query_last still works: only the full-set read is once-only.
  EXPECT_EQ(store.query_last(1, 5).key.hop, 4);
}

TEST_F(StoreTest, QueryAllIsGatewayOnly) {
  fill(1, 5, 2);
  EXPECT_EQ(code_of([&] { store.query_all(1, 5, 2); }), Errc::authorization);
  EXPECT_EQ(code_of([&] { store.query_all(1, 5, 0xFFFF); }), Errc::authorization);
  EXPECT_EQ(code_of([&] { store.query_all(1, 6, 100); }), Errc::missing_record);
  // Failed attempts did not consume the set.
  EXPECT_EQ(store.query_all(1, 5, 100).size(), 2u);
}

TEST_F(StoreTest, DeleteAll) {
  fill(1, 1, 5);
  EXPECT_EQ(store.delete_all(1, 1, 99), 5u);
  EXPECT_EQ(store.delete_all(1, 1, 99), 0u);
  EXPECT_FALSE(store.contains(1, 1));
  store.store({1, 1, 1}, value(1), 1, 100);
  EXPECT_EQ(store.record_count(1, 1), 1u);
}

TEST_F(StoreTest, JournalLinesRoundTrip) {
  fill(1, 2, 2);
  store.delete_all(1, 2, 70);
  ASSERT_EQ(journal.size(), 3u);
  EXPECT_EQ(journal[0], "store|1|2|1|01010101010101010101010101010101|1|10");
  EXPECT_EQ(journal[2], "delete|1|2|2|70");
  const auto entry = parse_journal_line(journal[1]);
  EXPECT_EQ(entry.kind, JournalEntry::Kind::store);
  EXPECT_EQ(entry.packet, (PacketId{1, 2}));
  EXPECT_EQ(entry.hop, 2);
  EXPECT_EQ(entry.by, 2);
  EXPECT_EQ(entry.time, 20);
  EXPECT_EQ(entry.value, Bytes(16, 0x02));
  const auto del = parse_journal_line(journal[2]);
  EXPECT_EQ(del.kind, JournalEntry::Kind::remove);
  EXPECT_EQ(del.count, 2u);
}

TEST_F(StoreTest, SingleHopEntriesJournalTheFullWatermark) {
  HashSubWatermark h;
  h.bytes.fill(0xAB);
  store.store({1, 1, 1}, value(0x11), 1, 0, h);
  EXPECT_EQ(parse_journal_line(journal.back()).value.size(), 24u);
  EXPECT_EQ(store.query_last(1, 1).hash_part, h);
}

TEST(Journal, MalformedLinesAreRejected) {
  for (const char* bad : {"", "store|1|2", "store|1|2|1|zz|1|0", "erase|1|2|3|4", "delete|1|2|x|4",
                          "store|1|2|1|0011|1|0"}) {
    EXPECT_THROW(parse_journal_line(bad), Error) << bad;
  }
}

TEST(Journal, ReplayKeepsSurvivingSets) {
  std::vector<JournalEntry> entries;
  for (const char* line : {"store|1|1|1|00000000000000000000000000000000|1|0",
                           "store|1|1|2|00000000000000000000000000000000|2|5",
                           "store|1|2|1|00000000000000000000000000000000|1|9",
                           "delete|1|1|2|10"}) {
    entries.push_back(parse_journal_line(line));
  }
  const auto live = replay_journal(entries);
  ASSERT_EQ(live.size(), 1u);
  EXPECT_EQ(live.begin()->first, (PacketId{1, 2}));
}

TEST_F(StoreTest, PendingSetsReportTheLastHop) {
  fill(1, 1, 3);
  fill(1, 2, 1);
  store.query_all(1, 2, 100);
  const auto pending = store.pending();
  ASSERT_EQ(pending.size(), 1u);
  EXPECT_EQ(pending[0].packet, (PacketId{1, 1}));
  EXPECT_EQ(pending[0].last_hop, 3);
  EXPECT_EQ(pending[0].last_node, 3);
  EXPECT_EQ(pending[0].last_stored_at, 30);
}
