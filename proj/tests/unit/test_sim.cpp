#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "manet/sim/engine.hpp"
#include "manet/sim/mobility.hpp"
#include "manet/sim/network.hpp"
#include "manet/sim/rng.hpp"
#include "manet/sim/trace.hpp"

using namespace manet;

TEST_CASE("engine orders events by time, then by insertion") {
  Engine e;
  std::vector<std::string> log;
  e.schedule(SimTime::from_seconds_int(5), [&] { log.push_back("A"); });
  e.schedule(SimTime::from_seconds_int(5), [&] { log.push_back("B"); });
  e.schedule(SimTime::from_seconds_int(3), [&] { log.push_back("first"); });
  e.run_until(SimTime::from_seconds_int(10));
  CHECK(log == std::vector<std::string>{"first", "A", "B"});
  CHECK(e.now() == SimTime::from_seconds_int(10));
}

TEST_CASE("engine rejects scheduling in the past") {
  Engine e;
  e.run_until(SimTime::from_seconds_int(3));
  CHECK_THROWS_AS(e.schedule(SimTime::from_seconds_int(2), [] {}), EngineError);
  CHECK_NOTHROW(e.schedule(SimTime::from_seconds_int(5), [] {}));
}

TEST_CASE("empty run advances the clock only") {
  Engine e;
  e.run_until(SimTime::from_seconds_int(1500));
  CHECK(e.now() == SimTime::from_seconds_int(1500));
  CHECK(e.processed() == 0);
}

TEST_CASE("rng streams are reproducible and independent per label") {
  RngStream a(42, "mobility/1"), b(42, "mobility/1"), c(42, "mobility/2");
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("trace records round-trip through text") {
  TraceRecord r{SimTime::from_millis(1234), PacketKind::rreq, 3, 9, Outcome::lost_channel, 60, 77, "2:4,9"};
  const std::string line = format_record(r);
  CHECK(line == "t=1.234000000 kind=rreq src=3 dst=9 outcome=lost_channel bytes=60 nonce=77 fl=2:4,9");
  CHECK(parse_record(line) == r);
  CHECK_THROWS_AS(parse_record("t=1 kind=rreq src=3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_record("t=1 kind=bogus src=3 dst=4 outcome=delivered bytes=1"), std::invalid_argument);
}

namespace {

struct Pair {
  VectorTrace trace;
  Network net;
  std::vector<std::pair<NodeId, NodeId>> received;

  Pair(double distance, double loss, std::optional<std::size_t> buffer = std::nullopt)
      : net(LinkModel{200.0, loss, buffer, SimTime::from_millis(2)}, 7, &trace) {
    net.add_node(NodeId(1), Trajectory(Position{0, 0}));
    net.add_node(NodeId(2), Trajectory(Position{distance, 0}));
    net.set_receiver([this](NodeId to, NodeId from, const Message&) { received.emplace_back(to, from); });
  }
};

DataPacket packet() {
  DataPacket p;
  p.src = NodeId(1);
  p.dst = NodeId(2);
  return p;
}

}  // namespace

TEST_CASE("transmit outcomes") {
  SUBCASE("beyond range") {
    Pair p(250, 0.0);
    CHECK(p.net.transmit(NodeId(1), NodeId(2), packet()) == DeliveryOutcome::out_of_range);
  }
  SUBCASE("lossless delivery after one hop latency") {
    Pair p(100, 0.0);
    CHECK(p.net.transmit(NodeId(1), NodeId(2), packet()) == DeliveryOutcome::delivered);
    CHECK(p.received.empty());
    p.net.engine().run_until(SimTime::from_millis(2));
    REQUIRE(p.received.size() == 1);
    CHECK(p.trace.records.back().outcome == Outcome::delivered);
    CHECK(p.trace.records.back().t == SimTime::from_millis(2));
  }
  SUBCASE("forced loss") {
    Pair p(100, 1.0);
    for (int i = 0; i < 50; ++i) CHECK(p.net.transmit(NodeId(1), NodeId(2), packet()) == DeliveryOutcome::lost_channel);
  }
  SUBCASE("full receive buffer") {
    Pair p(100, 0.0, 2);
    CHECK(p.net.transmit(NodeId(1), NodeId(2), packet()) == DeliveryOutcome::delivered);
    CHECK(p.net.transmit(NodeId(1), NodeId(2), packet()) == DeliveryOutcome::delivered);
    CHECK(p.net.transmit(NodeId(1), NodeId(2), packet()) == DeliveryOutcome::dropped_buffer);
    p.net.engine().run_until(SimTime::from_millis(5));
    CHECK(p.net.transmit(NodeId(1), NodeId(2), packet()) == DeliveryOutcome::delivered);
  }
  SUBCASE("unknown node") {
    Pair p(100, 0.0);
    CHECK_THROWS_AS(p.net.transmit(NodeId(1), NodeId(9), packet()), ConfigError);
  }
}

TEST_CASE("every transmission leaves exactly one link record") {
  Pair p(150, 0.3, 3);
  for (int i = 0; i < 200; ++i) p.net.transmit(NodeId(1), NodeId(2), packet());
  p.net.engine().run_until(SimTime::from_seconds_int(1));
  std::size_t link = 0;
  for (const auto& r : p.trace.records) link += is_link_outcome(r.outcome) ? 1 : 0;
  CHECK(link == 200);
  CHECK(p.net.transmissions() == 200);
}

TEST_CASE("node registry rejects id 0 and duplicates") {
  Network net(LinkModel{}, 1, nullptr);
  CHECK_THROWS_AS(net.add_node(NodeId(0), Trajectory(Position{})), ConfigError);
  net.add_node(NodeId(1), Trajectory(Position{}));
  CHECK_THROWS_AS(net.add_node(NodeId(1), Trajectory(Position{})), ConfigError);
}

TEST_CASE("neighbor sets: symmetric, isolated node empty, reference layout") {
  Network net(LinkModel{}, 1, nullptr);
  for (const auto& [id, pos] : fixtures::reference_layout()) net.add_node(id, Trajectory(pos));
  net.add_node(NodeId(11), Trajectory(Position{1900, 50}));
  CHECK(net.neighbors(NodeId(7)) == std::vector<NodeId>{NodeId(1), NodeId(2), NodeId(6), NodeId(8), NodeId(9)});
  CHECK(net.neighbors(NodeId(11)).empty());
  for (NodeId a : net.node_ids())
    for (NodeId b : net.neighbors(a)) {
      const auto back = net.neighbors(b);
      CHECK(std::find(back.begin(), back.end(), a) != back.end());
    }
}

TEST_CASE("neighbor relation stays symmetric under mobility") {
  Network net(LinkModel{}, 3, nullptr);
  RandomWaypoint model(Area{}, 20.0, 0.0);
  for (std::uint32_t i = 1; i <= 30; ++i)
    net.add_node(NodeId(i), Trajectory(model, RngStream(3, "mobility/" + std::to_string(i))));
  for (int step = 0; step < 50; ++step) {
    net.engine().run_until(SimTime::from_seconds_int(step * 7));
    for (NodeId a : net.node_ids())
      for (NodeId b : net.neighbors(a)) CHECK(net.in_range(b, a));
  }
}

TEST_CASE("waypoint kinematics") {
  RandomWaypoint model(Area{}, 20.0, 0.0);
  RngStream rng(1, "k");
  MobilityState s{{0, 0}, {100, 0}, 20.0, 0.0};
  s = model.advance(s, 1.0, rng);
  CHECK(s.position.x == doctest::Approx(20.0));
  CHECK(s.position.y == doctest::Approx(0.0));
}

TEST_CASE("zero max speed keeps every node in place") {
  RandomWaypoint model(Area{}, 0.0, 0.0);
  Trajectory t(model, RngStream(5, "mobility/1"));
  const Position p0 = t.position_at(SimTime{});
  for (int s = 1; s <= 1500; s += 37) CHECK(t.position_at(SimTime::from_seconds_int(s)) == p0);
}

TEST_CASE("positions never leave the area") {
  RandomWaypoint model(Area{}, 20.0, 0.0);
  Trajectory t(model, RngStream(9, "mobility/4"));
  for (int s = 0; s <= 1500; s += 3) CHECK(Area{}.contains(t.position_at(SimTime::from_seconds_int(s))));
}

// Oracle: with leg speed density f(v) on (0, vmax], the fraction of time spent
// at speed v is proportional to f(v)/v. For f(v) = 2v/vmax^2 that is uniform,
// so the time-averaged speed is vmax/2 and the per-leg mean is 2 vmax/3. For
// uniform f the time average has no positive limit (E[1/v] diverges).
TEST_CASE("steady-state speed sampling differs from naive sampling") {
  const double vmax = 20.0;
  RandomWaypoint model(Area{}, vmax, 0.0);
  RngStream rng(2024, "legs");
  const int legs = 100000;
  double leg_sum = 0.0, dist = 0.0, time_steady = 0.0, time_naive = 0.0;
  for (int i = 0; i < legs; ++i) {
    const double d = distance(model.sample_position(rng), model.sample_position(rng));
    const double v = model.sample_speed(rng);
    const double u = sample_uniform_speed(vmax, rng);
    CHECK_MESSAGE((v > 0.0 && v <= vmax), "speed out of range");
    leg_sum += v;
    dist += d;
    time_steady += d / v;
    time_naive += d / u;
  }
  const double steady_time_avg = dist / time_steady;
  const double naive_time_avg = dist / time_naive;
  CHECK(leg_sum / legs == doctest::Approx(2.0 * vmax / 3.0).epsilon(0.01));
  CHECK(steady_time_avg == doctest::Approx(vmax / 2.0).epsilon(0.03));
  CHECK(naive_time_avg < 0.6 * steady_time_avg);
}
