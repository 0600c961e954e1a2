#include <gtest/gtest.h>

#include "zircon/error.hpp"
#include "zircon/netsim.hpp"

using namespace zircon;

namespace {

std::size_t count_prefix(const std::vector<std::string>& log, std::string_view prefix) {
  return static_cast<std::size_t>(
      std::count_if(log.begin(), log.end(), [&](const auto& l) { return l.starts_with(prefix); }));
}

AttackSpec link_attack(AttackKind kind, std::size_t link, Sequence seq) {
  AttackSpec a;
  a.kind = kind;
  a.link = link;
  a.trigger.packet = PacketId{1, seq};
  return a;
}

Errc validation_of(const ScenarioConfig& c) {
  try {
    c.validate();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io;  // sentinel: no error
}

}  // namespace

TEST(Simulation, DirectRouteAcceptsEverything) {
  const auto result = run(make_chain_scenario(0, 10, 3));
  EXPECT_EQ(result.report.count(PacketStatus::accepted), 10u);
  EXPECT_EQ(count_prefix(result.log, "verdict|100|"), 10u);
}

TEST(Simulation, ModifiedPacketIsRejectedAtTheNextVerifier) {
  auto config = make_chain_scenario(3, 10, 3);
  auto attack = link_attack(AttackKind::modify_payload, 2, 5);
  attack.edits.push_back({0, 0x01});
  config.attacks.push_back(attack);
  const auto result = run(config);
  for (const auto& p : result.report.packets) {
    if (p.id.sequence == 5) {
      EXPECT_EQ(p.status, PacketStatus::rejected);
      ASSERT_TRUE(p.verdict);
      EXPECT_EQ(p.verdict->outcome, Outcome::integrity_fail);
      EXPECT_EQ(p.verdict->hop, 3);
      EXPECT_EQ(p.verdict->node, 3);
    } else {
      EXPECT_EQ(p.status, PacketStatus::accepted) << p.id.sequence;
    }
  }
}

TEST(Simulation, SameSeedSameBytes) {
  auto config = make_chain_scenario(3, 50, 9);
  AttackSpec replay = link_attack(AttackKind::replay, 1, 7);
  replay.delay = 2000;
  config.attacks.push_back(replay);
  const auto a = run(config);
  const auto b = run(config);
  EXPECT_EQ(a.log_text(), b.log_text());
  EXPECT_EQ(a.journal_text(), b.journal_text());
  EXPECT_EQ(a.report.to_text(), b.report.to_text());
  config.seed = 10;
  EXPECT_NE(run(config).log_text(), a.log_text());
}

TEST(Simulation, ClockNeverGoesBackwards) {
  auto config = make_chain_scenario(2, 20, 1);
  config.topology.routes[0].link_delays = {500, 50, 900};
  Simulation sim(config);
  SimTime last = 0;
  while (sim.step()) {
    EXPECT_GE(sim.now(), last);
    last = sim.now();
  }
  EXPECT_TRUE(sim.done());
}

TEST(Simulation, DroppedPacketIsNeverDeliveredAndIsLocalized) {
  auto config = make_chain_scenario(3, 5, 2);
  config.attacks.push_back(link_attack(AttackKind::drop, 3, 2));
  const auto result = run(config);
  for (const auto& l : result.log) EXPECT_FALSE(l.starts_with("verdict|4|1|2|")) << l;
  ASSERT_EQ(result.report.drops.size(), 1u);
  EXPECT_EQ(result.report.drops[0].packet, (PacketId{1, 2}));
  EXPECT_EQ(result.report.drops[0].last_hop, 3);
  EXPECT_EQ(result.report.drops[0].last_node, 3);
  EXPECT_EQ(result.report.count(PacketStatus::dropped), 1u);
}

TEST(Simulation, RotationReachesEveryNodeBeforeTheNextDelivery) {
  auto config = make_chain_scenario(3, 40, 5);
  const auto result = run(config);
  EXPECT_GT(count_prefix(result.log, "rotate|"), 0u);
  EXPECT_EQ(result.report.count(PacketStatus::accepted), 40u);
  Simulation sim(config);
  std::uint32_t epoch = 1;
  while (sim.step()) {
    const auto& nodes = sim.network().nodes();
    const auto current = nodes.at(1).keys.current().epoch;
    for (const auto& [id, node] : nodes) EXPECT_EQ(node.keys.current().epoch, current);
    EXPECT_GE(current, epoch);
    epoch = current;
  }
}

TEST(Simulation, EveryPacketEndsInExactlyOneState) {
  auto config = make_chain_scenario(3, 30, 4);
  config.attacks.push_back(link_attack(AttackKind::drop, 2, 3));
  auto flip = link_attack(AttackKind::modify_watermark, 1, 4);
  flip.edits.push_back({3, 0x10});
  config.attacks.push_back(flip);
  const auto result = run(config);
  const auto& r = result.report;
  EXPECT_EQ(r.count(PacketStatus::accepted) + r.count(PacketStatus::rejected) +
                r.count(PacketStatus::dropped) + r.count(PacketStatus::in_flight),
            30u);
  EXPECT_EQ(r.count(PacketStatus::in_flight), 0u);
}

TEST(Simulation, SingleHopMode) {
  auto config = make_chain_scenario(0, 10, 6);
  config.mode = ScenarioMode::singlehop;
  auto attack = link_attack(AttackKind::modify_payload, 1, 3);
  attack.edits.push_back({2, 0x40});
  config.attacks.push_back(attack);
  const auto result = run(config);
  EXPECT_EQ(result.report.count(PacketStatus::accepted), 9u);
  for (const auto& p : result.report.packets) {
    if (p.status == PacketStatus::accepted) {
      ASSERT_EQ(p.path.size(), 1u);
    }
  }
  EXPECT_EQ(result.report.packets[2].verdict->outcome, Outcome::integrity_fail);
}

TEST(Simulation, OutputFormats) {
  const auto result = run(make_chain_scenario(1, 1, 3));
  EXPECT_EQ(result.log.front(), "scenario|3|multihop");
  EXPECT_EQ(result.log[1], "node|1|source|10.0.0.1|1");
  EXPECT_EQ(count_prefix(result.log, "route|1,2,100"), 1u);
  EXPECT_EQ(count_prefix(result.journal, "store|"), 2u);
  EXPECT_EQ(count_prefix(result.journal, "delete|"), 1u);
  const auto text = result.report.to_text();
  EXPECT_NE(text.find("packet|1|1|emitted|accepted|accepted|3|100|600|2|10.0.0.1@1700000000;10.0.0.2@1700000000\n"),
            std::string::npos)
      << text;
  EXPECT_NE(text.find("summary|emitted|1|accepted|1|"), std::string::npos);
  const auto line = format_usage_line(result.usage.front());
  EXPECT_EQ(line, "node|1|source|1|1|0|1");
  const auto parsed = parse_usage_line(line);
  EXPECT_EQ(parsed.identity.id, 1);
  EXPECT_EQ(parsed.ops.digests, 1u);
  EXPECT_THROW(parse_usage_line("node|1|source|1|1|0"), Error);
  EXPECT_THROW(parse_usage_line("node|1|source|1|1|0|x"), Error);
}

TEST(Validation, ReportsEveryProblem) {
  auto c = make_chain_scenario(2, 5, 1);
  c.topology.nodes.push_back(c.topology.nodes.front());
  c.topology.nodes.back().x = -5;
  c.topology.routes.push_back({{1, 100}, {}});
  c.key_rotation = {9, 3};
  try {
    c.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::validation);
    const std::string what = e.what();
    EXPECT_NE(what.find("duplicate id"), std::string::npos);
    EXPECT_NE(what.find("outside the deployment area"), std::string::npos);
    EXPECT_NE(what.find("second route"), std::string::npos);
    EXPECT_NE(what.find("key_rotation"), std::string::npos);
  }
}

TEST(Validation, RouteShape) {
  auto c = make_chain_scenario(2, 5, 1);
  std::swap(c.topology.routes[0].path[1], c.topology.routes[0].path[3]);
  EXPECT_EQ(validation_of(c), Errc::validation);

  c = make_chain_scenario(2, 5, 1);
  c.topology.routes[0].path[1] = 55;
  EXPECT_EQ(validation_of(c), Errc::validation);

  c = make_chain_scenario(2, 5, 1);
  c.topology.nodes[1].identity.registered = false;
  EXPECT_EQ(validation_of(c), Errc::validation);

  c = make_chain_scenario(2, 5, 1);
  c.topology.routes[0].link_delays = {1, 2};
  EXPECT_EQ(validation_of(c), Errc::validation);

  c = make_chain_scenario(2, 5, 1);
  c.mode = ScenarioMode::singlehop;
  EXPECT_EQ(validation_of(c), Errc::validation);

  c = make_chain_scenario(2, 5, 1);
  c.traffic[0].source = 2;
  EXPECT_EQ(validation_of(c), Errc::validation);

  EXPECT_EQ(validation_of(make_chain_scenario(2, 5, 1)), Errc::io);
}

TEST(Validation, Attacks) {
  auto c = make_chain_scenario(2, 5, 1);
  c.attacks.push_back(link_attack(AttackKind::drop, 4, 1));
  EXPECT_EQ(validation_of(c), Errc::validation);

  c = make_chain_scenario(0, 5, 1);
  c.mode = ScenarioMode::singlehop;
  AttackSpec w = link_attack(AttackKind::modify_watermark, 1, 1);
  w.edits.push_back({0, 1});
  c.attacks.push_back(w);
  EXPECT_EQ(validation_of(c), Errc::validation);

  c = make_chain_scenario(2, 5, 1);
  c.attacks.push_back(link_attack(AttackKind::insert_bits, 1, 1));  // no insertions
  EXPECT_EQ(validation_of(c), Errc::validation);
}

TEST(Validation, SimulationRefusesInvalidConfig) {
  auto c = make_chain_scenario(2, 5, 1);
  c.topology.routes.clear();
  EXPECT_THROW(Simulation{c}, Error);
}

TEST(ScenarioFile, ExampleParsesAndRuns) {
  const auto config = parse_scenario(example_scenario_text());
  EXPECT_EQ(config.seed, 42u);
  EXPECT_EQ(config.topology.nodes.size(), 6u);
  EXPECT_EQ(config.attacks.size(), 2u);
  const auto result = run(config);
  EXPECT_EQ(result.report.count(PacketStatus::accepted), 9u);
  EXPECT_EQ(result.report.probes.size(), 1u);
}

TEST(ScenarioFile, SerializeRoundTrip) {
  auto config = make_chain_scenario(3, 12, 77);
  config.topology.routes[0].link_delays = {100, 200, 300, 400};
  config.traffic[0].payload_seed = 5;
  auto replay = link_attack(AttackKind::replay, 2, 3);
  replay.delay = 1000;
  replay.mutate_watermark = true;
  replay.edits.push_back({2, 0x20});
  config.attacks.push_back(replay);
  auto ins = link_attack(AttackKind::insert_bits, 1, 4);
  ins.insertions = {{5, true}, {9, false}};
  config.attacks.push_back(ins);
  AttackSpec del = link_attack(AttackKind::delete_bits, 3, 5);
  del.delete_count = 4;
  del.delete_position = 17;
  config.attacks.push_back(del);
  AttackSpec fake;
  fake.kind = AttackKind::fake_inject;
  fake.link = 2;
  fake.at = 1500;
  fake.impersonate = 1;
  config.attacks.push_back(fake);
  AttackSpec probe;
  probe.kind = AttackKind::store_probe;
  probe.caller = 2;
  probe.probe_target = PacketId{1, 2};
  config.attacks.push_back(probe);

  const auto text = serialize_scenario(config);
  const auto again = parse_scenario(text);
  EXPECT_EQ(serialize_scenario(again), text);
  EXPECT_EQ(run(config).log_text(), run(again).log_text());
}

TEST(ScenarioFile, Errors) {
  EXPECT_THROW(parse_scenario("{"), Error);
  EXPECT_THROW(parse_scenario("[]"), Error);
  try {
    parse_scenario(R"({"nodes": []})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::validation);
    EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
  }
  const auto base = serialize_scenario(make_chain_scenario(1, 1, 1));
  auto with = [&](std::string_view key, std::string_view value) {
    std::string t = base;
    t.insert(1, "\"" + std::string(key) + "\": " + std::string(value) + ",");
    return t;
  };
  EXPECT_THROW(parse_scenario(with("colour", "1")), Error);
  std::string bad_mode = base;
  bad_mode.replace(bad_mode.find("\"multihop\""), 10, "\"mesh\"");
  EXPECT_THROW(parse_scenario(bad_mode), Error);
  std::string bad_ip = base;
  bad_ip.replace(bad_ip.find("10.0.0.1"), 8, "10.0.0.x");
  EXPECT_THROW(parse_scenario(bad_ip), Error);
  std::string bad_role = base;
  bad_role.replace(bad_role.find("\"source\""), 8, "\"router\"");
  EXPECT_THROW(parse_scenario(bad_role), Error);
}
