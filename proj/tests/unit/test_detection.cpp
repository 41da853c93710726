#include <doctest.h>

#include "fixtures.hpp"
#include "manet/detection/dri.hpp"
#include "manet/detection/invocation.hpp"
#include "manet/detection/probe_check.hpp"
#include "manet/scenario/simulation.hpp"

using namespace manet;

namespace {

const SimTime kThreshold = SimTime::from_seconds_int(10);

std::vector<NodeId> ids(std::initializer_list<std::uint32_t> v) {
  std::vector<NodeId> out;
  for (auto x : v) out.emplace_back(x);
  return out;
}

/// Node 7's table from the reference example: 1 (0,0), 2 (1,1) cleared,
/// 6 (0,1), 8 (1,0) cleared, 9 (0,1).
DriTable reference_table() {
  DriTable t(NodeId(7));
  t.observe_presence(ids({1, 2, 6, 8, 9}), SimTime{}, kThreshold * 2);
  const SimTime at = SimTime::from_seconds_int(3);
  t.mark_from(NodeId(2), at);
  t.mark_through(NodeId(2), at);
  t.mark_through(NodeId(6), SimTime::from_seconds_int(1));
  t.mark_from(NodeId(8), SimTime::from_seconds_int(2));
  t.mark_through(NodeId(9), SimTime::from_seconds_int(1));
  t.set_check_bit(NodeId(2));
  t.set_check_bit(NodeId(8));
  return t;
}

}  // namespace

TEST_CASE("forwarding sets From on the previous hop and Through on the next") {
  DriTable t(NodeId(7));
  dri_observe_forward(t, NodeId(2), NodeId(8), NodeId(8), SimTime::from_seconds_int(1));
  CHECK(t.find(NodeId(2))->from_bit == 1);
  CHECK(t.find(NodeId(2))->through_bit == 0);
  CHECK(t.find(NodeId(8))->through_bit == 1);
  CHECK(t.find(NodeId(8))->from_bit == 0);
  CHECK(t.find(NodeId(1)) == nullptr);

  dri_observe_forward(t, NodeId(8), NodeId(2), NodeId(2), SimTime::from_seconds_int(2));
  CHECK(t.find(NodeId(2))->from_bit == 1);
  CHECK(t.find(NodeId(2))->through_bit == 1);
}

TEST_CASE("Through rule variants") {
  DriTable strict(NodeId(7)), loose(NodeId(7));
  dri_observe_forward(strict, NodeId(2), NodeId(8), NodeId(5), SimTime{}, ThroughRule::final_hop);
  dri_observe_forward(loose, NodeId(2), NodeId(8), NodeId(5), SimTime{}, ThroughRule::any_forward);
  CHECK((strict.find(NodeId(8)) == nullptr || strict.find(NodeId(8))->through_bit == 0));
  CHECK(loose.find(NodeId(8))->through_bit == 1);
}

TEST_CASE("reference table: suspects and cooperative node") {
  const DriTable t = reference_table();
  CHECK(scan_suspects(t, kThreshold, kThreshold) == ids({1}));
  CHECK(scan_suspects(t, kThreshold, SimTime::from_seconds_int(9)).empty());
  CHECK(select_cooperative_node(t, NodeId(1)) == NodeId(2));
}

TEST_CASE("suspect scan edge cases") {
  DriTable t(NodeId(7));
  t.observe_presence(ids({1, 2}), SimTime{}, kThreshold * 2);
  for (auto n : {1u, 2u}) {
    t.mark_from(NodeId(n), SimTime{});
    t.mark_through(NodeId(n), SimTime{});
  }
  CHECK(scan_suspects(t, kThreshold, kThreshold).empty());

  DriTable c(NodeId(7));
  c.observe_presence(ids({1}), SimTime{}, kThreshold * 2);
  c.set_check_bit(NodeId(1));
  CHECK(scan_suspects(c, kThreshold, kThreshold).empty());
  c.roll_epoch(kThreshold);
  CHECK(c.find(NodeId(1))->check_bit == 0);
  CHECK(scan_suspects(c, kThreshold, kThreshold * 2) == ids({1}));

  // a newcomer must stay a full threshold interval before it can be suspected
  DriTable n(NodeId(7));
  n.observe_presence(ids({1}), SimTime{}, kThreshold * 2);
  n.observe_presence(ids({1, 3}), SimTime::from_seconds_int(8), kThreshold * 2);
  CHECK(scan_suspects(n, kThreshold, kThreshold) == ids({1}));
  CHECK(scan_suspects(n, kThreshold, SimTime::from_seconds_int(18)) == ids({1, 3}));
}

TEST_CASE("departed neighbors are forgotten after twice the threshold") {
  DriTable t(NodeId(7));
  t.observe_presence(ids({1, 2}), SimTime{}, kThreshold * 2);
  t.mark_from(NodeId(2), SimTime{});
  CHECK(t.observe_presence(ids({1}), SimTime::from_seconds_int(1), kThreshold * 2) == 1);
  t.observe_presence(ids({1}), SimTime::from_seconds_int(20), kThreshold * 2);
  REQUIRE(t.find(NodeId(2)) != nullptr);
  t.observe_presence(ids({1}), SimTime::from_seconds_int(22), kThreshold * 2);
  CHECK(t.find(NodeId(2)) == nullptr);
}

TEST_CASE("cooperative node tie-breaks") {
  DriTable t(NodeId(7));
  t.observe_presence(ids({1, 6, 8}), SimTime{}, kThreshold * 2);
  t.mark_from(NodeId(8), SimTime::from_seconds_int(4));
  t.mark_through(NodeId(6), SimTime::from_seconds_int(4));
  CHECK(select_cooperative_node(t, NodeId(1)) == NodeId(6));
  t.mark_from(NodeId(8), SimTime::from_seconds_int(5));
  CHECK(select_cooperative_node(t, NodeId(1)) == NodeId(8));

  DriTable quiet(NodeId(7));
  quiet.observe_presence(ids({1, 6}), SimTime{}, kThreshold * 2);
  quiet.observe_presence(ids({1, 4, 6}), SimTime::from_seconds_int(1), kThreshold * 2);
  CHECK(select_cooperative_node(quiet, NodeId(1)) == NodeId(6));
  CHECK(select_cooperative_node(quiet, NodeId(6)) == NodeId(1));

  DriTable lone(NodeId(7));
  lone.observe_presence(ids({1}), SimTime{}, kThreshold * 2);
  CHECK_FALSE(select_cooperative_node(lone, NodeId(1)).has_value());
}

TEST_CASE("RTS/CTS counters are kept as a pair") {
  DriTable t(NodeId(7));
  t.count_attempt(NodeId(1), true);  // no row yet: ignored
  CHECK(t.find(NodeId(1)) == nullptr);
  t.upsert(NodeId(1));
  for (int i = 0; i < 15; ++i) t.count_attempt(NodeId(1), i < 3);
  CHECK(t.find(NodeId(1))->rts_count == 15);
  CHECK(t.find(NodeId(1))->cts_count == 3);
  CHECK(t.find(NodeId(1))->rts_cts_ratio() == doctest::Approx(5.0));
}

TEST_CASE("three-probe rule over the reference probe table") {
  ProbeCheckTable t;
  for (auto w : {2u, 6u, 8u, 9u}) t.record_notification(NodeId(w));
  for (auto w : {6u, 8u, 9u}) t.record_further_probe(NodeId(w));
  t.record_further_probe(NodeId(3));  // probe without notification is not a row
  const auto rows = t.rows();
  CHECK(rows == std::map<NodeId, std::uint8_t>{{NodeId(2), 0}, {NodeId(6), 1}, {NodeId(8), 1}, {NodeId(9), 1}});
  const CoopVerdict v = evaluate(t);
  CHECK(v.outcome == CoopOutcome::malicious);
  CHECK(v.victims == std::set<NodeId>{NodeId(2)});

  t.record_further_probe(NodeId(2));
  CHECK(evaluate(t).outcome == CoopOutcome::not_confirmed);
  CHECK(evaluate(ProbeCheckTable{}).outcome == CoopOutcome::insufficient_witnesses);
}

TEST_CASE("invocation period") {
  InvocationPolicy p;
  CHECK(how_often_to_detect(p) == SimTime::from_seconds_int(10));
  CHECK(period_for_budget(20, 2, 1, 60) == SimTime::from_seconds_int(10));
  p.max_drop_fraction = 1.0;
  CHECK(how_often_to_detect(p) == SimTime::from_seconds_int(60));
  p.max_drop_fraction = 0.0;
  CHECK_THROWS_AS(how_often_to_detect(p), ConfigError);
  p.max_drop_fraction = -0.5;
  CHECK_THROWS_AS(how_often_to_detect(p), ConfigError);
  CHECK(period_for_budget(1, 2, 1, 60) == SimTime::from_seconds_int(1));
  CHECK(scaled_threshold(SimTime::from_seconds_int(10), 0.5) == SimTime::from_seconds_int(15));
  CHECK(scaled_threshold(SimTime::from_seconds_int(10), 0.0) == SimTime::from_seconds_int(10));
}

namespace {

struct ProbeRun {
  VectorTrace trace;
  std::vector<RoundResult> results;

  explicit ProbeRun(bool adversary) {
    ScenarioConfig cfg = fixtures::static_config(fixtures::reference_layout(), 30.0);
    cfg.detect.coop_scope = 1;
    if (adversary) {
      cfg.grayhole.ids = {NodeId(1)};
      cfg.grayhole.initial_phase = Phase::bad;
      cfg.grayhole.p_bg = 0.0;
      cfg.grayhole.min_rate = cfg.grayhole.max_rate = 1.0;
      cfg.grayhole.victims = std::set<NodeId>{NodeId(2)};
    }
    Simulation sim(cfg, &trace);
    sim.set_round_observer([this](const RoundResult& r) { results.push_back(r); });
    sim.run_until(SimTime::from_seconds_int(1));
    REQUIRE(sim.node(NodeId(7)).detector->start_local_round(NodeId(1), NodeId(2)).has_value());
    sim.run();
    check_secrecy(NodeId(1));
    cleared = sim.node(NodeId(7)).detector->dri().find(NodeId(1)) != nullptr &&
              sim.node(NodeId(7)).detector->dri().find(NodeId(1))->check_bit == 1;
  }

  /// Notifications and queries must never touch the suspect.
  void check_secrecy(NodeId suspect) {
    for (const auto& r : trace.records)
      if (r.kind == PacketKind::notify || r.kind == PacketKind::probe_query || r.kind == PacketKind::probe_reply) {
        CHECK(r.src != suspect.value());
        CHECK(r.dst != suspect.value());
      }
  }

  bool cleared = false;
};

}  // namespace

TEST_CASE("local round against an honest suspect clears it") {
  ProbeRun run(false);
  REQUIRE(run.results.size() == 1);
  CHECK(run.results[0].outcome == Outcome::cleared);
  CHECK(run.results[0].cooperator == NodeId(2));
  CHECK(run.cleared);
}

TEST_CASE("selective gray hole is convicted for exactly its victim") {
  ProbeRun run(true);
  REQUIRE(run.results.size() == 1);
  CHECK(run.results[0].outcome == Outcome::malicious);
  CHECK(run.results[0].victims == std::set<NodeId>{NodeId(2)});
  CHECK(run.results[0].suspect == NodeId(1));
  CHECK(run.results[0].initiator == NodeId(7));

  // the probe went to node 2 through node 1 and the four witnesses notified
  bool probe_via_sn = false, escalated = false;
  std::set<std::uint32_t> notifiers;
  for (const auto& r : run.trace.records) {
    escalated |= r.kind == PacketKind::verdict && r.outcome == Outcome::escalate && r.src == 7 && r.dst == 1;
    probe_via_sn |= r.kind == PacketKind::probe && r.src == 7 && r.dst == 1;
    if (r.kind == PacketKind::notify && r.dst == 7 && r.outcome == Outcome::delivered) notifiers.insert(r.src);
  }
  CHECK(escalated);
  CHECK(probe_via_sn);
  CHECK(notifiers == std::set<std::uint32_t>{2, 6, 8, 9});
}
