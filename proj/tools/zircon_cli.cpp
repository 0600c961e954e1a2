#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include "zircon/analysis.hpp"
#include "zircon/error.hpp"
#include "zircon/netsim.hpp"
#include "zircon/provstore.hpp"

namespace fs = std::filesystem;
using namespace zircon;

namespace {

constexpr int kMissingInput = 2;

std::string read_input(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  return analysis::read_file(path);
}

void write_output(const std::string& path, std::string_view text) {
  if (path == "-") {
    std::cout << text;
  } else {
    analysis::write_file(path, text);
  }
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  if (config_path != "-" && !fs::exists(config_path)) {
    std::cerr << "zircon: config file '" << config_path << "' not found\n";
    return kMissingInput;
  }
  const auto config = parse_scenario(read_input(config_path));
  const auto result = run(config);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  analysis::write_file(dir / "events.log", result.log_text());
  analysis::write_file(dir / "journal.log", result.journal_text());
  analysis::write_file(dir / "report.txt", result.report.to_text());
  std::string nodes;
  for (const auto& u : result.usage) nodes += format_usage_line(u) + "\n";
  analysis::write_file(dir / "nodes.txt", nodes);
  const auto& r = result.report;
  std::cout << "accepted " << r.count(PacketStatus::accepted) << ", rejected "
            << r.count(PacketStatus::rejected) << ", dropped " << r.count(PacketStatus::dropped)
            << " of " << config.traffic.size() << " traffic stream(s); output in " << out_dir << "\n";
  return 0;
}

int cmd_attack_suite(std::uint64_t seed, std::uint32_t packets) {
  const auto report = analysis::run_attack_suite(seed, packets);
  std::cout << analysis::detection_matrix(report);
  const auto fa = report.total_false_accepts();
  if (fa > 0) {
    std::cerr << "zircon: " << fa << " false accept(s)\n";
    return 1;
  }
  return 0;
}

int cmd_energy_table(const std::string& run_dir, const std::string& out, std::uint32_t sweep) {
  const fs::path nodes = fs::path(run_dir) / "nodes.txt";
  if (!fs::exists(nodes)) {
    std::cerr << "zircon: '" << nodes.string() << "' not found (run `zircon run` first)\n";
    return kMissingInput;
  }
  std::vector<NodeUsage> usage;
  for (const auto& line : lines_of(analysis::read_file(nodes))) usage.push_back(parse_usage_line(line));
  const analysis::EnergyParams params;
  const analysis::ComputeCosts costs;
  if (sweep == 0) {
    write_output(out, analysis::energy_csv(usage, params, costs));
    return 0;
  }
  // Per-packet T_C averaged over the run, one column per role.
  double tc[2] = {0, 0};
  std::uint64_t handled[2] = {0, 0};
  for (const auto& u : usage) {
    if (u.identity.role == Role::gateway) continue;
    const int i = u.identity.role == Role::source ? 0 : 1;
    tc[i] += costs.computation_ms(u.ops);
    handled[i] += u.ops.packets;
  }
  const double source_tc = handled[0] ? tc[0] / static_cast<double>(handled[0]) : 0.0;
  const double relay_tc = handled[1] ? tc[1] / static_cast<double>(handled[1]) : 0.0;
  write_output(out, analysis::energy_sweep_csv(sweep, params, source_tc, relay_tc));
  return 0;
}

int cmd_inspect_store(const std::string& journal_path) {
  if (journal_path != "-" && !fs::exists(journal_path)) {
    std::cerr << "zircon: journal '" << journal_path << "' not found\n";
    return kMissingInput;
  }
  std::vector<JournalEntry> entries;
  for (const auto& line : lines_of(read_input(journal_path))) {
    entries.push_back(parse_journal_line(line));
  }
  std::size_t stores = 0;
  std::size_t deletes = 0;
  for (const auto& e : entries) (e.kind == JournalEntry::Kind::store ? stores : deletes)++;
  const auto live = replay_journal(entries);
  std::cout << "entries " << entries.size() << " (store " << stores << ", delete " << deletes
            << "), live sets " << live.size() << "\n";
  for (const auto& [id, records] : live) {
    std::cout << "set " << id.source << ":" << id.sequence << " hops";
    for (const auto& r : records) std::cout << ' ' << int{r.hop} << "@" << r.by;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zircon: zero-watermark integrity and provenance simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write events.log, report.txt, journal.log, nodes.txt");
  run_cmd->add_option("--config", config_path, "Scenario JSON file, or - for stdin")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::uint64_t seed = 1;
  std::uint32_t suite_packets = 20;
  auto* suite_cmd = app.add_subcommand("attack-suite", "Run one scenario per attack kind and print the detection matrix");
  suite_cmd->add_option("--seed", seed, "Seed for every scenario")->capture_default_str();
  suite_cmd->add_option("--packets", suite_packets, "Packets per scenario")
      ->capture_default_str()
      ->check(CLI::Range(1u, 100000u));

  std::uint32_t max_hops = 30;
  double pfp = 0.02;
  std::string cost_out = "-";
  auto* cost_cmd = app.add_subcommand("cost-table", "Write cost.csv (per-packet provenance bytes by hop count)");
  cost_cmd->add_option("--max-hops", max_hops)->capture_default_str()->check(CLI::Range(1u, 1000000u));
  cost_cmd->add_option("--pfp", pfp, "Bloom filter false-positive probability")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cost_cmd->add_option("--out", cost_out, "Output file, or - for stdout")->capture_default_str();

  std::string run_dir;
  std::string energy_out = "-";
  std::uint32_t sweep = 0;
  auto* energy_cmd = app.add_subcommand("energy-table", "Write energy.csv from a run directory");
  energy_cmd->add_option("--run", run_dir, "Directory written by `zircon run`")->required();
  energy_cmd->add_option("--out", energy_out, "Output file, or - for stdout")->capture_default_str();
  energy_cmd->add_option("--sweep", sweep, "Instead, sweep per-node energy over 1..N packets");

  std::string journal_path;
  auto* inspect_cmd = app.add_subcommand("inspect-store", "Summarize a provenance journal");
  inspect_cmd->add_option("--journal", journal_path, "journal.log, or - for stdin")->required();

  std::string gen_out = "-";
  auto* gen_cmd = app.add_subcommand("gen-config", "Print a commented example scenario");
  gen_cmd->add_option("--out", gen_out, "Output file, or - for stdout")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(config_path, out_dir);
    if (*suite_cmd) return cmd_attack_suite(seed, suite_packets);
    if (*cost_cmd) {
      if (pfp <= 0.0 || pfp >= 1.0) throw Error(Errc::domain, "--pfp must lie strictly between 0 and 1");
      write_output(cost_out, analysis::cost_csv(max_hops, pfp));
      return 0;
    }
    if (*energy_cmd) return cmd_energy_table(run_dir, energy_out, sweep);
    if (*inspect_cmd) return cmd_inspect_store(journal_path);
    if (*gen_cmd) {
      write_output(gen_out, example_scenario_text());
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "zircon: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "zircon: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
