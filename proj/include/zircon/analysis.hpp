#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

#include "zircon/adversary.hpp"
#include "zircon/netsim.hpp"

namespace zircon::analysis {

/// Mica2-class node constants. Times in ms, power in mW, energy in mJ.
struct EnergyParams {
  double power_mw = 30.0;
  double active_ms = 1.0;
  double sensing_ms = 0.5;
  double transmit_ms = 300.0;
  double sleep_ms = 299.0;
  double intermediate_multiplier = 1.0;
  double base_energy_mj = 1000.0;
};

/// E = P_n (T_A + T_S + T_C + T_TR + T_SL), in mJ. Throws Errc::domain for
/// negative inputs.
double node_energy(const EnergyParams& params, double computation_ms);

/// Energy budget for a role: E_0, or E_0 + m E_0 for intermediates.
double energy_budget(const EnergyParams& params, Role role);

/// Nominal per-operation compute times used to turn operation counts into
/// T_C; configurable, not measured.
struct ComputeCosts {
  double encrypt_ms = 0.012;
  double decrypt_ms = 0.012;
  double digest_ms = 0.008;

  double computation_ms(const OpCounters& ops) const;
};

enum class Scheme { zircon, ssp, mp, bfp };

std::string_view to_string(Scheme scheme) noexcept;

struct CostModel {
  Scheme scheme = Scheme::zircon;
  std::uint32_t hops = 1;
  double false_positive = 0.02;
};

struct ProvenanceSize {
  double bits = 0.0;
  std::uint64_t bytes = 0;
};

/// Per-packet provenance carried in flight: ssp 42H, mp 6H, bfp
/// ceil(m/8) with m = -H ln(P_fp) / (ln 2)^2, zircon 24.
ProvenanceSize provenance_size(const CostModel& model);

/// Smallest H such that bfp bytes exceed zircon for every larger H.
std::uint32_t bfp_crossover_hops(double false_positive);

struct KindStats {
  std::size_t attacked = 0;
  std::size_t detected = 0;
  std::size_t false_accepts = 0;
  std::map<int, std::size_t> detection_hops;

  double detection_rate() const {
    return attacked == 0 ? 1.0 : static_cast<double>(detected) / static_cast<double>(attacked);
  }
};

struct DetectionReport {
  std::map<AttackKind, KindStats> kinds;
  std::size_t clean_packets = 0;
  std::size_t false_rejects = 0;

  double false_reject_rate() const {
    return clean_packets == 0 ? 0.0
                              : static_cast<double>(false_rejects) / static_cast<double>(clean_packets);
  }
  std::size_t total_false_accepts() const;
};

/// Reads a completed event log. Throws Errc::parse on malformed lines.
DetectionReport detection_report(const std::vector<std::string>& log);

// CSV emitters. Output is a pure function of the inputs.
std::string cost_csv(std::uint32_t max_hops, double false_positive);
std::string energy_csv(const std::vector<NodeUsage>& usage, const EnergyParams& params,
                       const ComputeCosts& costs);
std::string energy_sweep_csv(std::uint32_t max_packets, const EnergyParams& params,
                             double source_tc_ms, double intermediate_tc_ms);
std::string detection_matrix(const DetectionReport& report);

/// One scenario per attack kind on a source -> 3 relays -> gateway chain.
/// Attack parameters (offsets, masks, bit positions) are drawn from `seed`.
std::vector<std::pair<AttackKind, ScenarioConfig>> attack_suite(std::uint64_t seed,
                                                                std::uint32_t packets = 20);

/// Runs every suite scenario and merges the per-kind statistics.
DetectionReport run_attack_suite(std::uint64_t seed, std::uint32_t packets = 20);

/// Throws Errc::io when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace zircon::analysis
