#include <algorithm>

#include "doctest.h"
#include "drugsim/drug.hpp"
#include "drugsim/engine.hpp"
#include "drugsim/metrics.hpp"

using namespace drugsim;

namespace {

// sink at index 0, then one node every `spacing` meters along the x axis
std::vector<Position> chain_positions(int hops, double spacing = 100.0) {
  std::vector<Position> positions;
  for (int i = 0; i <= hops; ++i) {
    positions.push_back({spacing * static_cast<double>(i), 0.0});
  }
  return positions;
}

RunConfig fixture_config() {
  RunConfig cfg;
  cfg.event_rate_hz = 0.0;
  cfg.duration_s = 20.0;
  cfg.snapshot_s = 5.0;
  return cfg;
}

}  // namespace

TEST_CASE("gradient init equals BFS on a line") {
  const auto topo = build_adjacency(chain_positions(2), 150.0);
  CHECK(initialize_gradient(topo, 0) == std::vector<int>{0, 1, 2});
}

TEST_CASE("gradient init on a lone sink") {
  const auto topo = build_adjacency({{5.0, 5.0}}, 150.0);
  CHECK(initialize_gradient(topo, 0) == std::vector<int>{0});
}

TEST_CASE("disconnected nodes stay at the infinite sentinel") {
  const auto topo = build_adjacency({{0.0, 0.0}, {900.0, 900.0}}, 150.0);
  const auto gradient = initialize_gradient(topo, 0);
  CHECK(gradient[0] == 0);
  CHECK(gradient[1] == kInfiniteHops);
}

TEST_CASE("equal-distance neighbors keep their BFS value") {
  // triangle: both non-sink nodes sit one hop out and hear each other
  const auto topo =
      build_adjacency({{0.0, 0.0}, {50.0, 0.0}, {0.0, 50.0}}, 100.0);
  CHECK(initialize_gradient(topo, 0) == std::vector<int>{0, 1, 1});
}

TEST_CASE("gradient init matches the BFS oracle on random deployments") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto positions = generate_deployment(100, 1000.0, 1000.0, seed);
    positions.push_back({500.0, 500.0});
    const auto topo = build_adjacency(positions, 150.0);
    const NodeId sink = 100;
    CHECK(initialize_gradient(topo, sink) == bfs_hop_distance(topo, sink));
  }
}

TEST_CASE("relay admission rule") {
  CHECK(should_ack(2, 3, 0.4, 0.05));
  CHECK_FALSE(should_ack(3, 3, 0.4, 0.05));     // strict descent only
  CHECK_FALSE(should_ack(2, 3, 0.04, 0.05));    // starved node refuses
  CHECK(should_ack(2, 3, 0.05, 0.05));          // threshold is inclusive
  CHECK_FALSE(should_ack(kInfiniteHops, kInfiniteHops, 1.0, 0.05));
  CHECK_FALSE(should_ack(kInfiniteHops, 4, 1.0, 0.05));
}

TEST_CASE("next-hop selection") {
  CHECK(select_next_hop({{1, 1, 0.3}, {2, 2, 0.5}}) == 1);  // lower gradient
  CHECK(select_next_hop({{1, 1, 0.3}, {2, 1, 0.5}}) == 2);  // higher energy
  CHECK(select_next_hop({{1, 1, 0.3}, {2, 1, 0.3}}) == 1);  // lower id
  CHECK_FALSE(select_next_hop({}).has_value());
}

TEST_CASE("drug handlers, driven directly") {
  RunConfig cfg = fixture_config();
  DrugProtocol drug;
  drug.reset(4, cfg);

  NodeState node;
  node.id = 1;
  node.gradient_value = 1;
  node.residual_energy = 0.4;

  SUBCASE("fresh event broadcasts one ADV and arms the ack timer") {
    const MetaData meta{1, 0};
    const auto result = drug.on_event_sensed(node, meta, 0.0);
    REQUIRE(result.sends.size() == 1);
    CHECK(result.sends[0].msg.kind == MsgKind::Adv);
    CHECK(result.sends[0].msg.is_broadcast());
    CHECK(result.sends[0].msg.gradient == 1);
    REQUIRE(result.timers.size() == 1);
    CHECK(result.timers[0].delay_s == cfg.ack_wait_s);

    // duplicate sensing of the same event is suppressed
    CHECK(drug.on_event_sensed(node, meta, 1.0).sends.empty());
  }

  SUBCASE("a starved node still advertises its own event") {
    node.residual_energy = 0.01;
    const auto result = drug.on_event_sensed(node, MetaData{1, 1}, 0.0);
    CHECK(result.sends.size() == 1);
  }

  SUBCASE("ADV from further out draws an ACK carrying gradient and energy") {
    Message adv;
    adv.kind = MsgKind::Adv;
    adv.meta = {3, 0};
    adv.src = 3;
    adv.gradient = 2;
    const auto result = drug.on_receive(node, adv, 0.0);
    REQUIRE(result.sends.size() == 1);
    const Message& ack = result.sends[0].msg;
    CHECK(ack.kind == MsgKind::Ack);
    CHECK(ack.dst == 3);
    CHECK(ack.gradient == 1);
    CHECK(ack.residual_energy == 0.4);
  }

  SUBCASE("ADV from closer in is ignored") {
    Message adv;
    adv.kind = MsgKind::Adv;
    adv.meta = {3, 0};
    adv.src = 3;
    adv.gradient = 1;
    CHECK(drug.on_receive(node, adv, 0.0).sends.empty());
  }

  SUBCASE("stray ACK without a pending attempt does nothing") {
    Message ack;
    ack.kind = MsgKind::Ack;
    ack.meta = {3, 0};
    ack.src = 2;
    ack.gradient = 0;
    CHECK(drug.on_receive(node, ack, 0.0).sends.empty());
  }

  SUBCASE("duplicate DATA is consumed silently") {
    mark_seen(node, MetaData{3, 0});
    Message data;
    data.kind = MsgKind::Data;
    data.meta = {3, 0};
    data.src = 2;
    data.dst = 1;
    CHECK(drug.on_receive(node, data, 0.0).sends.empty());
  }
}

TEST_CASE("three-node chain relays with exactly two unicast DATA hops") {
  RunConfig cfg = fixture_config();
  SimOverrides overrides;
  overrides.scripted_sense = {{1.0, 2}};
  const RunResult run =
      run_simulation_on(cfg, chain_positions(2), 0, overrides);

  CHECK(run.generated.size() == 1);
  REQUIRE(run.deliveries.size() == 1);
  CHECK(run.deliveries[0].time_s == doctest::Approx(1.12));

  int data_count = 0;
  for (const TraceRecord& r : run.trace) {
    if (r.kind == MsgKind::Data) {
      ++data_count;
      CHECK(r.dst != kBroadcast);
      // strict gradient descent on every hop
      CHECK(run.gradients[static_cast<std::size_t>(r.src)] >
            run.gradients[static_cast<std::size_t>(r.dst)]);
    }
    if (r.kind == MsgKind::Ack) {
      CHECK(r.dst != kBroadcast);
    }
  }
  CHECK(data_count == 2);

  // the sink never advertises application events
  for (const TraceRecord& r : run.trace) {
    if (r.kind == MsgKind::Adv && r.src == 0) {
      CHECK(r.meta.origin == 0);  // gradient-init broadcast only
    }
  }
}

TEST_CASE("a starved relay dead-ends the event after the retry budget") {
  RunConfig cfg = fixture_config();
  SimOverrides overrides;
  overrides.scripted_sense = {{1.0, 2}};
  overrides.initial_energy = {{1, 0.04}};  // below the 0.05 threshold
  const RunResult run =
      run_simulation_on(cfg, chain_positions(2), 0, overrides);

  CHECK(run.generated.size() == 1);
  CHECK(run.deliveries.empty());
  CHECK(delivery_ratio(run, cfg.duration_s) == 0.0);

  int event_advs = 0;
  int data_count = 0;
  int acks = 0;
  for (const TraceRecord& r : run.trace) {
    if (r.meta.origin != 2) continue;
    if (r.kind == MsgKind::Adv) ++event_advs;
    if (r.kind == MsgKind::Data) ++data_count;
    if (r.kind == MsgKind::Ack) ++acks;
  }
  CHECK(event_advs == 1 + cfg.max_retries);
  CHECK(data_count == 0);
  CHECK(acks == 0);
}

TEST_CASE("engine gradients match the pure oracle on a default deployment") {
  RunConfig cfg;
  cfg.event_rate_hz = 0.0;
  cfg.duration_s = 1.0;
  cfg.seed = 0;
  const RunResult run = run_simulation(cfg);

  auto positions = run.positions;
  const auto topo = build_adjacency(positions, cfg.radio_range_m);
  CHECK(run.gradients == bfs_hop_distance(topo, run.sink));
  CHECK(run.gradients == initialize_gradient(topo, run.sink));
}

TEST_CASE("monotone descent holds on a random run with traffic") {
  RunConfig cfg;
  cfg.node_count = 50;
  cfg.duration_s = 60.0;
  cfg.seed = 4;
  const RunResult run = run_simulation(cfg);
  REQUIRE(!run.trace.empty());
  for (const TraceRecord& r : run.trace) {
    if (r.kind != MsgKind::Data) continue;
    CHECK(run.gradients[static_cast<std::size_t>(r.src)] >
          run.gradients[static_cast<std::size_t>(r.dst)]);
  }
}
