#include "zircon/provstore.hpp"

#include <charconv>

#include "zircon/error.hpp"

namespace zircon {

namespace {

std::string packet_name(NodeId source, Sequence sequence) {
  return "(" + std::to_string(source) + "," + std::to_string(sequence) + ")";
}

}  // namespace

void ProvenanceStore::register_node(NodeId id) { nodes_.insert(id); }

void ProvenanceStore::register_gateway(NodeId id) {
  nodes_.insert(id);
  gateways_.insert(id);
}

bool ProvenanceStore::is_registered(NodeId id) const { return nodes_.contains(id); }
bool ProvenanceStore::is_gateway(NodeId id) const { return gateways_.contains(id); }

void ProvenanceStore::emit(const std::string& line) const {
  if (journal_) journal_(line);
}

void ProvenanceStore::store(const ProvenanceKey& key, const ProvenanceRecordValue& value,
                            NodeId by, SimTime now, std::optional<HashSubWatermark> hash_part) {
  if (!is_registered(by)) {
    throw Error(Errc::authorization, "node " + std::to_string(by) + " is not registered");
  }
  auto it = sets_.find(key.packet());
  const std::size_t current = it == sets_.end() ? 0 : it->second.records.back().key.hop;
  if (key.hop != current + 1) {
    throw Error(Errc::sequencing, "packet " + packet_name(key.source, key.sequence) +
                                      " expects hop " + std::to_string(current + 1) + ", got " +
                                      std::to_string(key.hop));
  }
  if (it == sets_.end()) it = sets_.emplace(key.packet(), Entry{}).first;
  StoredRecord record{key, value, hash_part, by, now};
  it->second.records.push_back(record);
  emit(format_store_line(record));
}

const StoredRecord& ProvenanceStore::query_last(NodeId source, Sequence sequence) const {
  const auto it = sets_.find({source, sequence});
  if (it == sets_.end()) {
    throw Error(Errc::missing_record, "no records for packet " + packet_name(source, sequence));
  }
  return it->second.records.back();
}

ProvenanceSet ProvenanceStore::query_all(NodeId source, Sequence sequence, NodeId by) {
  if (!is_gateway(by)) {
    throw Error(Errc::authorization, "node " + std::to_string(by) + " is not an authorized gateway");
  }
  const auto it = sets_.find({source, sequence});
  if (it == sets_.end()) {
    throw Error(Errc::missing_record, "no records for packet " + packet_name(source, sequence));
  }
  if (it->second.consumed) {
    throw Error(Errc::one_retrieval_violation,
                "provenance of packet " + packet_name(source, sequence) + " was already retrieved");
  }
  it->second.consumed = true;
  return it->second.records;
}

std::size_t ProvenanceStore::delete_all(NodeId source, Sequence sequence, SimTime now) {
  const auto it = sets_.find({source, sequence});
  const std::size_t count = it == sets_.end() ? 0 : it->second.records.size();
  if (it != sets_.end()) sets_.erase(it);
  emit(format_delete_line({source, sequence}, count, now));
  return count;
}

bool ProvenanceStore::contains(NodeId source, Sequence sequence) const {
  return sets_.contains({source, sequence});
}

std::size_t ProvenanceStore::record_count(NodeId source, Sequence sequence) const {
  const auto it = sets_.find({source, sequence});
  return it == sets_.end() ? 0 : it->second.records.size();
}

std::vector<PendingSet> ProvenanceStore::pending() const {
  std::vector<PendingSet> out;
  for (const auto& [packet, entry] : sets_) {
    if (entry.consumed) continue;
    const auto& last = entry.records.back();
    out.push_back({packet, last.key.hop, last.stored_by, last.stored_at});
  }
  return out;
}

std::string format_store_line(const StoredRecord& record) {
  Bytes value(record.value.cipher.begin(), record.value.cipher.end());
  if (record.hash_part) append(value, record.hash_part->bytes);
  return "store|" + std::to_string(record.key.source) + "|" + std::to_string(record.key.sequence) +
         "|" + std::to_string(record.key.hop) + "|" + to_hex(value) + "|" +
         std::to_string(record.stored_by) + "|" + std::to_string(record.stored_at);
}

std::string format_delete_line(PacketId packet, std::size_t count, SimTime time) {
  return "delete|" + std::to_string(packet.source) + "|" + std::to_string(packet.sequence) + "|" +
         std::to_string(count) + "|" + std::to_string(time);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = line.find('|', start);
    out.push_back(line.substr(start, bar == std::string_view::npos ? bar : bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, std::string_view line) {
  T value{};
  auto [next, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || next != field.data() + field.size()) {
    throw Error(Errc::parse, "bad number '" + std::string(field) + "' in '" + std::string(line) + "'");
  }
  return value;
}

}  // namespace

JournalEntry parse_journal_line(std::string_view line) {
  const auto f = split_fields(line);
  JournalEntry out;
  if (f[0] == "store" && f.size() == 7) {
    out.kind = JournalEntry::Kind::store;
    out.packet = {parse_number<NodeId>(f[1], line), parse_number<Sequence>(f[2], line)};
    out.hop = parse_number<HopIndex>(f[3], line);
    out.value = from_hex(f[4]);
    if (out.value.size() != 16 && out.value.size() != 24) {
      throw Error(Errc::parse, "record value must be 16 or 24 bytes in '" + std::string(line) + "'");
    }
    out.by = parse_number<NodeId>(f[5], line);
    out.time = parse_number<SimTime>(f[6], line);
  } else if (f[0] == "delete" && f.size() == 5) {
    out.kind = JournalEntry::Kind::remove;
    out.packet = {parse_number<NodeId>(f[1], line), parse_number<Sequence>(f[2], line)};
    out.count = parse_number<std::size_t>(f[3], line);
    out.time = parse_number<SimTime>(f[4], line);
  } else {
    throw Error(Errc::parse, "unrecognized journal line '" + std::string(line) + "'");
  }
  return out;
}

std::map<PacketId, std::vector<JournalEntry>> replay_journal(
    const std::vector<JournalEntry>& entries) {
  std::map<PacketId, std::vector<JournalEntry>> live;
  for (const auto& e : entries) {
    if (e.kind == JournalEntry::Kind::store) {
      live[e.packet].push_back(e);
    } else {
      live.erase(e.packet);
    }
  }
  return live;
}

}  // namespace zircon
