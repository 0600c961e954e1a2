#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "zircon/adversary.hpp"
#include "zircon/nodes.hpp"

namespace zircon {

enum class ScenarioMode { singlehop, multihop };

struct PlacedNode {
  NodeIdentity identity;
  double x = 0.0;
  double y = 0.0;
};

struct Route {
  /// Source first, gateway last.
  std::vector<NodeId> path;
  /// One delay per link; empty means the topology default for every link.
  std::vector<SimTime> link_delays;

  std::size_t links() const { return path.empty() ? 0 : path.size() - 1; }
};

struct Topology {
  double length = 100.0;
  double width = 100.0;
  std::vector<PlacedNode> nodes;
  std::vector<Route> routes;
  SimTime default_link_delay = 300;

  const Route* route_from(NodeId source) const;
  SimTime link_delay(const Route& route, std::size_t link) const;
};

struct TrafficSpec {
  NodeId source = 0;
  std::uint32_t count = 0;
  SimTime start = 0;
  SimTime interval = 1000;
  std::size_t payload_size = 16;
  std::optional<std::uint64_t> payload_seed;
};

struct RotationRange {
  std::uint32_t min = 0;
  std::uint32_t max = 0;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  ScenarioMode mode = ScenarioMode::multihop;
  Topology topology;
  std::vector<TrafficSpec> traffic;
  std::vector<AttackSpec> attacks;
  RotationRange key_rotation;
  std::uint32_t freshness_seconds = 60;
  std::uint32_t time_base_seconds = 1'700'000'000;
  bool purge_on_delivery = true;
  /// Drop sweep timeout; 0 means five times the default link delay.
  SimTime drop_timeout = 0;

  /// Throws Errc::validation listing every offending field.
  void validate() const;
  SimTime effective_drop_timeout() const {
    return drop_timeout > 0 ? drop_timeout : 5 * topology.default_link_delay;
  }
};

std::string_view to_string(ScenarioMode mode) noexcept;

/// Reads the JSON scenario format (// comments allowed). Throws Errc::parse
/// or Errc::validation.
ScenarioConfig parse_scenario(std::string_view text);
std::string serialize_scenario(const ScenarioConfig& config);
/// A commented, valid example config.
std::string example_scenario_text();
/// Source -> `intermediates` relays -> gateway, `packets` packets, no attacks.
ScenarioConfig make_chain_scenario(std::size_t intermediates, std::uint32_t packets,
                                   std::uint64_t seed);

enum class PacketStatus { accepted, rejected, dropped, in_flight };
enum class CopyOrigin { emitted, replay, injected };

std::string_view to_string(PacketStatus status) noexcept;
std::string_view to_string(CopyOrigin origin) noexcept;

/// Fate of one copy of a packet on the network.
struct PacketRecord {
  PacketId id;
  CopyOrigin origin = CopyOrigin::emitted;
  PacketStatus status = PacketStatus::in_flight;
  std::optional<VerificationVerdict> verdict;
  ProvenancePath path;
  /// Records the store held for the packet when the gateway retrieved it.
  std::size_t records_at_retrieval = 0;
};

struct RunReport {
  std::vector<PacketRecord> packets;
  std::vector<DropReport> drops;
  std::vector<std::string> probes;
  std::size_t store_packets_at_end = 0;

  std::size_t count(PacketStatus status, CopyOrigin origin = CopyOrigin::emitted) const;
  /// Line-oriented text form; deterministic.
  std::string to_text() const;
};

/// Per-node accounting for the energy table.
struct NodeUsage {
  NodeIdentity identity;
  OpCounters ops;
};

struct RunResult {
  std::vector<std::string> log;
  std::vector<std::string> journal;
  RunReport report;
  std::vector<NodeUsage> usage;

  std::string log_text() const;
  std::string journal_text() const;
};

/// nodes.txt line: node|id|role|packets|encryptions|decryptions|digests
std::string format_usage_line(const NodeUsage& usage);
NodeUsage parse_usage_line(std::string_view line);

/// Deterministic discrete-event simulation of one scenario. Events at equal
/// times run in insertion order.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Processes exactly one event; false once the queue is empty.
  bool step();
  SimTime now() const;
  bool done() const;

  /// Drains the queue, runs the final drop sweep, and returns everything.
  RunResult finish();

  const Network& network() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

RunResult run(const ScenarioConfig& config);

}  // namespace zircon
