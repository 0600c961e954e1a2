#include "zircon/analysis.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "zircon/error.hpp"
#include "zircon/random.hpp"
#include "zircon/watermark.hpp"

namespace zircon::analysis {

double node_energy(const EnergyParams& p, double computation_ms) {
  if (!(computation_ms >= 0.0)) throw Error(Errc::domain, "T_C must be non-negative");
  if (p.power_mw < 0 || p.active_ms < 0 || p.sensing_ms < 0 || p.transmit_ms < 0 ||
      p.sleep_ms < 0) {
    throw Error(Errc::domain, "energy parameters must be non-negative");
  }
  const double cycle = p.active_ms + p.sensing_ms + computation_ms + p.transmit_ms + p.sleep_ms;
  return p.power_mw * cycle / 1000.0;
}

double energy_budget(const EnergyParams& p, Role role) {
  if (p.base_energy_mj < 0 || p.intermediate_multiplier < 0) {
    throw Error(Errc::domain, "energy budget parameters must be non-negative");
  }
  if (role == Role::intermediate) return p.base_energy_mj + p.intermediate_multiplier * p.base_energy_mj;
  return p.base_energy_mj;
}

double ComputeCosts::computation_ms(const OpCounters& ops) const {
  return encrypt_ms * static_cast<double>(ops.encryptions) +
         decrypt_ms * static_cast<double>(ops.decryptions) +
         digest_ms * static_cast<double>(ops.digests);
}

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::zircon: return "zircon";
    case Scheme::ssp: return "ssp";
    case Scheme::mp: return "mp";
    case Scheme::bfp: return "bfp";
  }
  return "?";
}

ProvenanceSize provenance_size(const CostModel& m) {
  if (m.hops < 1) throw Error(Errc::domain, "hop count must be at least 1");
  const double h = static_cast<double>(m.hops);
  switch (m.scheme) {
    case Scheme::zircon: return {24.0 * 8, 24};
    case Scheme::ssp: return {42.0 * 8 * h, 42ull * m.hops};
    case Scheme::mp: return {6.0 * 8 * h, 6ull * m.hops};
    case Scheme::bfp: {
      if (!(m.false_positive > 0.0 && m.false_positive < 1.0)) {
        throw Error(Errc::domain, "false-positive probability must lie in (0, 1)");
      }
      const double bits = -h * std::log(m.false_positive) / (std::numbers::ln2 * std::numbers::ln2);
      return {bits, static_cast<std::uint64_t>(std::ceil(bits / 8.0))};
    }
  }
  return {};
}

std::uint32_t bfp_crossover_hops(double false_positive) {
  // bfp bytes are non-decreasing in H, so the first H where they exceed 24
  // fixes the crossover.
  for (std::uint32_t h = 1;; ++h) {
    if (provenance_size({Scheme::bfp, h, false_positive}).bytes > 24) return h - 1;
  }
}

std::size_t DetectionReport::total_false_accepts() const {
  std::size_t total = 0;
  for (const auto& [kind, stats] : kinds) total += stats.false_accepts;
  return total;
}

namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = line.find('|', start);
    out.push_back(line.substr(start, bar == std::string_view::npos ? bar : bar - start));
    if (bar == std::string_view::npos) return out;
    start = bar + 1;
  }
}

template <typename T>
T number(std::string_view s, std::string_view line) {
  T v{};
  auto [next, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || next != s.data() + s.size()) {
    throw Error(Errc::parse, "bad number in log line '" + std::string(line) + "'");
  }
  return v;
}

struct Verdict {
  NodeId node;
  int hop;
  Outcome outcome;
  SimTime time;
};

using Key = std::pair<NodeId, Sequence>;

}  // namespace

DetectionReport detection_report(const std::vector<std::string>& log) {
  std::set<NodeId> gateways;
  std::map<Key, std::vector<Verdict>> verdicts;
  std::map<Key, std::map<AttackKind, SimTime>> attacked;
  std::map<Key, int> drops;
  std::vector<Key> emitted;
  std::map<Key, bool> probes;  // true = access refused

  for (const auto& line : log) {
    if (line.empty()) continue;
    const auto f = fields(line);
    const auto need = [&](std::size_t n) {
      if (f.size() != n) throw Error(Errc::parse, "malformed log line '" + line + "'");
    };
    const auto& tag = f[0];
    if (tag == "node") {
      need(5);
      if (parse_role(f[2]) == Role::gateway) gateways.insert(number<NodeId>(f[1], line));
    } else if (tag == "verdict") {
      need(7);
      const Key key{number<NodeId>(f[2], line), number<Sequence>(f[3], line)};
      verdicts[key].push_back({number<NodeId>(f[1], line), number<int>(f[4], line),
                               parse_outcome(f[5]), number<SimTime>(f[6], line)});
    } else if (tag == "attack") {
      need(6);
      const Key key{number<NodeId>(f[2], line), number<Sequence>(f[3], line)};
      const auto kind = parse_attack_kind(f[1]);
      const auto time = number<SimTime>(f[5], line);
      attacked[key].try_emplace(kind, time);
    } else if (tag == "drop") {
      need(6);
      drops[{number<NodeId>(f[1], line), number<Sequence>(f[2], line)}] = number<int>(f[3], line);
    } else if (tag == "emit") {
      need(4);
      emitted.push_back({number<NodeId>(f[1], line), number<Sequence>(f[2], line)});
    } else if (tag == "probe") {
      need(6);
      probes[{number<NodeId>(f[2], line), number<Sequence>(f[3], line)}] =
          f[4].starts_with("rejected:");
    } else if (tag == "scenario") {
      need(3);
    } else if (tag == "route" || tag == "store" || tag == "delete" || tag == "rotate" ||
               tag == "inject") {
    } else {
      throw Error(Errc::parse, "unknown log line '" + line + "'");
    }
  }

  DetectionReport report;
  for (const auto& [key, kinds] : attacked) {
    const auto vit = verdicts.find(key);
    const std::vector<Verdict> none;
    const auto& vs = vit == verdicts.end() ? none : vit->second;
    for (const auto& [kind, since] : kinds) {
      auto& stats = report.kinds[kind];
      ++stats.attacked;
      if (kind == AttackKind::eavesdrop) continue;
      if (kind == AttackKind::store_probe) {
        const auto p = probes.find(key);
        if (p != probes.end() && p->second) {
          ++stats.detected;
          stats.detection_hops[0]++;
        } else {
          ++stats.false_accepts;
        }
        continue;
      }
      if (kind == AttackKind::drop) {
        const auto d = drops.find(key);
        if (d != drops.end()) {
          ++stats.detected;
          stats.detection_hops[d->second]++;
        }
        continue;
      }
      const Verdict* first_reject = nullptr;
      std::size_t gateway_accepts = 0;
      for (const auto& v : vs) {
        if (v.time < since) continue;
        if (v.outcome != Outcome::accepted && first_reject == nullptr) first_reject = &v;
        if (v.outcome == Outcome::accepted && gateways.contains(v.node)) ++gateway_accepts;
      }
      if (first_reject != nullptr) {
        ++stats.detected;
        stats.detection_hops[first_reject->hop]++;
      }
      // A replayed packet has one legitimate delivery; anything beyond that got through.
      const std::size_t allowed = kind == AttackKind::replay ? 1 : 0;
      if (gateway_accepts > allowed) ++stats.false_accepts;
    }
  }
  for (const auto& key : emitted) {
    if (attacked.contains(key)) continue;
    ++report.clean_packets;
    const auto vit = verdicts.find(key);
    if (vit == verdicts.end()) continue;
    for (const auto& v : vit->second) {
      if (v.outcome != Outcome::accepted) {
        ++report.false_rejects;
        break;
      }
    }
  }
  return report;
}

namespace {

std::string fixed(double v, int precision) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << v;
  return out.str();
}

}  // namespace

std::string cost_csv(std::uint32_t max_hops, double false_positive) {
  if (max_hops < 1) throw Error(Errc::domain, "max hops must be at least 1");
  std::string out = "H,zircon,ssp,mp,bfp_bytes,bfp_bits\n";
  for (std::uint32_t h = 1; h <= max_hops; ++h) {
    const auto bfp = provenance_size({Scheme::bfp, h, false_positive});
    out += std::to_string(h) + "," + std::to_string(provenance_size({Scheme::zircon, h, 0}).bytes) +
           "," + std::to_string(provenance_size({Scheme::ssp, h, 0}).bytes) + "," +
           std::to_string(provenance_size({Scheme::mp, h, 0}).bytes) + "," +
           std::to_string(bfp.bytes) + "," + fixed(bfp.bits, 5) + "\n";
  }
  return out;
}

std::string energy_csv(const std::vector<NodeUsage>& usage, const EnergyParams& params,
                       const ComputeCosts& costs) {
  std::string out = "node,role,packets,T_C_ms,energy_mJ\n";
  for (const auto& u : usage) {
    const double tc = costs.computation_ms(u.ops);
    // Per-packet cycle constants repeat once per handled packet; T_C is the run total.
    const double base = node_energy(params, 0.0) * static_cast<double>(u.ops.packets);
    const double energy = base + params.power_mw * tc / 1000.0;
    out += std::to_string(u.identity.id) + "," + std::string(to_string(u.identity.role)) + "," +
           std::to_string(u.ops.packets) + "," + fixed(tc, 6) + "," + fixed(energy, 6) + "\n";
  }
  return out;
}

std::string energy_sweep_csv(std::uint32_t max_packets, const EnergyParams& params,
                             double source_tc_ms, double intermediate_tc_ms) {
  std::string out = "packets,source_energy_mJ,intermediate_energy_mJ\n";
  for (std::uint32_t n = 1; n <= max_packets; ++n) {
    const double k = static_cast<double>(n);
    out += std::to_string(n) + "," + fixed(k * node_energy(params, source_tc_ms), 6) + "," +
           fixed(k * node_energy(params, intermediate_tc_ms), 6) + "\n";
  }
  return out;
}

std::string detection_matrix(const DetectionReport& report) {
  std::ostringstream out;
  out << "kind,attacked,detected,rate,false_accepts,hops\n";
  for (const auto& [kind, s] : report.kinds) {
    out << to_string(kind) << ',' << s.attacked << ',';
    if (kind == AttackKind::eavesdrop) {
      out << "-,passive," << s.false_accepts << ",-\n";
      continue;
    }
    out << s.detected << ',' << fixed(s.detection_rate(), 4) << ',' << s.false_accepts << ',';
    std::string hops;
    for (const auto& [hop, n] : s.detection_hops) {
      if (!hops.empty()) hops += ';';
      hops += std::to_string(hop) + ":" + std::to_string(n);
    }
    out << (hops.empty() ? "-" : hops) << '\n';
  }
  out << "clean," << report.clean_packets << ",-,-,-,false_rejects=" << report.false_rejects << '\n';
  return out.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(Errc::io, "write to '" + path.string() + "' failed");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace zircon::analysis

namespace zircon::analysis {

std::vector<std::pair<AttackKind, ScenarioConfig>> attack_suite(std::uint64_t seed,
                                                                std::uint32_t packets) {
  Rng rng(derive_seed(seed, 7));
  const ScenarioConfig base = make_chain_scenario(3, packets, seed);
  const SimTime interval = base.traffic.front().interval;
  const std::size_t payload = base.traffic.front().payload_size;
  const std::size_t frame_bits = (WatermarkedPacket::kOverhead + payload) * 8;

  auto per_packet = [&](AttackKind kind, std::size_t link, auto&& fill) {
    ScenarioConfig c = base;
    for (std::uint32_t k = 1; k <= packets; ++k) {
      AttackSpec a;
      a.kind = kind;
      a.link = link;
      a.trigger.packet = PacketId{1, k};
      fill(a, k);
      c.attacks.push_back(std::move(a));
    }
    return c;
  };
  auto nonzero_mask = [&] { return static_cast<std::uint8_t>(1 + uniform_below(rng, 255)); };

  std::vector<std::pair<AttackKind, ScenarioConfig>> out;
  out.emplace_back(AttackKind::eavesdrop, per_packet(AttackKind::eavesdrop, 2, [](auto&, auto) {}));
  out.emplace_back(AttackKind::replay, per_packet(AttackKind::replay, 2, [&](AttackSpec& a, auto) {
    a.delay = 5 * base.topology.default_link_delay;
  }));
  out.emplace_back(AttackKind::insert_bits,
                   per_packet(AttackKind::insert_bits, 2, [&](AttackSpec& a, auto) {
                     const auto n = 1 + uniform_below(rng, 8);
                     for (std::uint64_t i = 0; i < n; ++i) {
                       a.insertions.push_back({static_cast<std::size_t>(uniform_below(rng, frame_bits)),
                                               uniform_below(rng, 2) == 1});
                     }
                   }));
  out.emplace_back(AttackKind::delete_bits,
                   per_packet(AttackKind::delete_bits, 2, [&](AttackSpec& a, auto) {
                     a.delete_count = 1 + uniform_below(rng, 64);
                   }));
  out.emplace_back(AttackKind::modify_payload,
                   per_packet(AttackKind::modify_payload, 2, [&](AttackSpec& a, auto) {
                     a.edits.push_back({static_cast<std::size_t>(uniform_below(rng, payload)), nonzero_mask()});
                   }));
  out.emplace_back(AttackKind::modify_watermark,
                   per_packet(AttackKind::modify_watermark, 2, [&](AttackSpec& a, auto) {
                     a.edits.push_back({static_cast<std::size_t>(uniform_below(rng, FinalWatermark::kSize)),
                                        nonzero_mask()});
                   }));
  out.emplace_back(AttackKind::drop, per_packet(AttackKind::drop, 3, [](auto&, auto) {}));
  {
    ScenarioConfig c = base;
    for (std::uint32_t k = 1; k <= packets; ++k) {
      AttackSpec a;
      a.kind = AttackKind::fake_inject;
      a.link = 1 + uniform_below(rng, 4);
      a.at = static_cast<SimTime>(k) * interval - interval / 2;
      a.impersonate = 1;
      c.attacks.push_back(a);
    }
    out.emplace_back(AttackKind::fake_inject, std::move(c));
  }
  {
    ScenarioConfig c = base;
    c.topology.nodes.push_back({{900, Ipv4Address::parse("10.0.9.9"), Role::source, false}, 10.0, 10.0});
    for (std::uint32_t k = 1; k <= packets; ++k) {
      AttackSpec a;
      a.kind = AttackKind::store_probe;
      // Mid-flight, while the set is in the store.
      a.at = static_cast<SimTime>(k - 1) * interval + 2 * base.topology.default_link_delay + 1;
      a.caller = k % 2 == 0 ? NodeId{900} : static_cast<NodeId>(2 + k % 3);
      a.probe_target = PacketId{1, k};
      c.attacks.push_back(a);
    }
    out.emplace_back(AttackKind::store_probe, std::move(c));
  }
  return out;
}

DetectionReport run_attack_suite(std::uint64_t seed, std::uint32_t packets) {
  DetectionReport merged;
  for (const auto& [kind, config] : attack_suite(seed, packets)) {
    const auto result = run(config);
    const auto report = detection_report(result.log);
    const auto it = report.kinds.find(kind);
    if (it != report.kinds.end()) merged.kinds[kind] = it->second;
    merged.clean_packets += report.clean_packets;
    merged.false_rejects += report.false_rejects;
  }
  return merged;
}

}  // namespace zircon::analysis
