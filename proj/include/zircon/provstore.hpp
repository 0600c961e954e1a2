#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "zircon/watermark.hpp"

namespace zircon {

/// Simulated milliseconds.
using SimTime = std::int64_t;

struct ProvenanceKey {
  NodeId source = 0;
  Sequence sequence = 0;
  HopIndex hop = 1;

  PacketId packet() const { return {source, sequence}; }
  auto operator<=>(const ProvenanceKey&) const = default;
};

struct StoredRecord {
  ProvenanceKey key;
  ProvenanceRecordValue value;
  /// Present only for single-hop entries, where the full W_F is stored.
  std::optional<HashSubWatermark> hash_part;
  NodeId stored_by = 0;
  SimTime stored_at = 0;

  bool operator==(const StoredRecord&) const = default;
};

/// P_{n,k}: records in ascending hop order, hops contiguous from 1.
using ProvenanceSet = std::vector<StoredRecord>;

/// Summary of a packet whose set has not been retrieved yet.
struct PendingSet {
  PacketId packet;
  HopIndex last_hop = 0;
  NodeId last_node = 0;
  SimTime last_stored_at = 0;
};

/// The trusted network database.
///
/// There is no way to overwrite a stored record: the only mutations are
/// append, the consumed flag set by query_all, and delete_all.
class ProvenanceStore {
 public:
  using JournalSink = std::function<void(const std::string&)>;

  void register_node(NodeId id);
  void register_gateway(NodeId id);
  bool is_registered(NodeId id) const;
  bool is_gateway(NodeId id) const;

  /// Every store/delete emits one journal line to the sink.
  void set_journal(JournalSink sink) { journal_ = std::move(sink); }

  /// Appends p_{n,k,i}. `key.hop` must be one past the current maximum for
  /// the packet (1 when none). Errors: authorization, sequencing.
  void store(const ProvenanceKey& key, const ProvenanceRecordValue& value, NodeId by,
             SimTime now, std::optional<HashSubWatermark> hash_part = std::nullopt);

  /// Record with the highest hop; does not consume. Errors: missing_record.
  const StoredRecord& query_last(NodeId source, Sequence sequence) const;

  /// Whole set, at most once per packet lifetime, gateways only.
  /// Errors: authorization, missing_record, one_retrieval_violation.
  ProvenanceSet query_all(NodeId source, Sequence sequence, NodeId by);

  /// Removes every record of the packet; returns how many were removed.
  std::size_t delete_all(NodeId source, Sequence sequence, SimTime now);

  bool contains(NodeId source, Sequence sequence) const;
  std::size_t record_count(NodeId source, Sequence sequence) const;
  std::size_t packet_count() const { return sets_.size(); }

  /// Unconsumed sets in packet order.
  std::vector<PendingSet> pending() const;

 private:
  struct Entry {
    ProvenanceSet records;
    bool consumed = false;
  };

  void emit(const std::string& line) const;

  std::set<NodeId> nodes_;
  std::set<NodeId> gateways_;
  std::map<PacketId, Entry> sets_;
  JournalSink journal_;
};

// Journal lines:
//   store|src|seq|hop|hex(value)|by|time
//   delete|src|seq|count|time
std::string format_store_line(const StoredRecord& record);
std::string format_delete_line(PacketId packet, std::size_t count, SimTime time);

struct JournalEntry {
  enum class Kind { store, remove } kind = Kind::store;
  PacketId packet;
  HopIndex hop = 0;
  Bytes value;  // 16 bytes, or 24 for single-hop entries
  NodeId by = 0;
  std::size_t count = 0;
  SimTime time = 0;
};

/// Parses one journal line. Throws Errc::parse.
JournalEntry parse_journal_line(std::string_view line);

/// Replays a journal into the live sets it describes (consumption is not
/// journaled, so every surviving set is returned).
std::map<PacketId, std::vector<JournalEntry>> replay_journal(
    const std::vector<JournalEntry>& entries);

}  // namespace zircon
