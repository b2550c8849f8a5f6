#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "drugsim/baselines.hpp"
#include "drugsim/config.hpp"
#include "drugsim/drug.hpp"
#include "drugsim/protocol.hpp"
#include "drugsim/topology.hpp"

namespace drugsim {

enum class EventKind { Snapshot, GradientInit, Traffic, Transmit, Deliver, Timer };

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;  // schedule-order tie break
  EventKind kind = EventKind::Snapshot;
  NodeId node = -1;       // Traffic origin / Deliver receiver / Timer owner
  Message msg;            // Transmit, Deliver
  MetaData meta;          // Timer
  std::size_t trace_idx = 0;  // Deliver: record accumulating rx costs
};

/// Min-heap over (time, seq): equal-time events run in schedule order.
class EventQueue {
 public:
  void schedule(Event ev) {
    if (ev.time < now_) {
      throw std::logic_error("event scheduled into the past");
    }
    ev.seq = next_seq_++;
    heap_.push_back(std::move(ev));
    std::push_heap(heap_.begin(), heap_.end(), Later{});
  }

  std::optional<Event> next() {
    if (heap_.empty()) {
      return std::nullopt;
    }
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    now_ = ev.time;
    return ev;
  }

  double now() const { return now_; }
  bool empty() const { return heap_.empty(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::vector<Event> heap_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
};

// ---------- run log ----------

struct TraceRecord {
  double time_s = 0.0;
  MsgKind kind = MsgKind::Adv;
  NodeId src = -1;
  NodeId dst = kBroadcast;
  MetaData meta;
  std::int64_t bits = 0;
  double tx_cost_j = 0.0;        // amount charged to the sender
  double rx_cost_total_j = 0.0;  // sum charged across receivers
};

struct ChargeRecord {
  double time_s = 0.0;
  NodeId node = -1;
  double amount_j = 0.0;
  std::size_t trace_idx = 0;
  bool is_tx = false;
};

struct DeathRecord {
  double time_s = 0.0;
  NodeId node = -1;
};

struct EventStamp {
  double time_s = 0.0;
  MetaData meta;
};

struct SnapshotRow {
  double time_s = 0.0;
  double residual_j = 0.0;  // non-sink nodes
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  int alive_nodes = 0;      // non-sink
  double charged_j = 0.0;   // cumulative applied charges
};

struct RunResult {
  RunConfig cfg;
  std::vector<Position> positions;  // sensors first, sink last
  NodeId sink = -1;
  std::vector<int> gradients;       // final per-node gradient (drug runs)
  std::vector<SnapshotRow> snapshots;
  std::vector<TraceRecord> trace;
  std::vector<ChargeRecord> charges;
  std::vector<DeathRecord> deaths;
  std::vector<EventStamp> generated;
  std::vector<EventStamp> deliveries;
  std::vector<double> final_residual;  // per node
  double total_charged_j = 0.0;
};

/// Test hooks: pre-placed sensing times and per-node battery overrides.
struct SimOverrides {
  std::vector<std::pair<double, NodeId>> scripted_sense;
  std::vector<std::pair<NodeId, double>> initial_energy;
};

inline std::unique_ptr<Protocol> make_protocol(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Drug:
      return std::make_unique<DrugProtocol>();
    case ProtocolKind::Spin:
      return std::make_unique<SpinProtocol>();
    case ProtocolKind::Flooding:
      return std::make_unique<FloodingProtocol>();
  }
  throw std::logic_error("unknown protocol");
}

/// One deterministic discrete-event run. Instances are single-use and
/// single-threaded; independent runs share nothing mutable.
class SimEngine {
 public:
  explicit SimEngine(RunConfig cfg, std::vector<Position> positions,
                     NodeId sink, const SimOverrides& overrides = {})
      : cfg_(std::move(cfg)) {
    if (sink < 0 || static_cast<std::size_t>(sink) >= positions.size()) {
      throw ConfigError("sink: id out of range for the deployment");
    }
    cfg_.node_count = static_cast<int>(positions.size()) - 1;  // sensors only
    validate(cfg_);
    topo_ = build_adjacency(std::move(positions), cfg_.radio_range_m);
    sink_ = sink;
    nodes_.resize(topo_.size());
    for (std::size_t i = 0; i < topo_.size(); ++i) {
      nodes_[i].id = static_cast<NodeId>(i);
      nodes_[i].position = topo_.positions[i];
      nodes_[i].residual_energy = cfg_.energy.initial_energy;
      nodes_[i].is_sink = (static_cast<NodeId>(i) == sink_);
    }
    for (const auto& [id, energy] : overrides.initial_energy) {
      nodes_.at(static_cast<std::size_t>(id)).residual_energy = energy;
    }
    protocol_ = make_protocol(cfg_.protocol);
    protocol_->reset(nodes_.size(), cfg_);
    scripted_ = overrides.scripted_sense;
    next_event_seq_.assign(nodes_.size(), 0);
  }

  RunResult run() {
    schedule_snapshots();
    if (protocol_->needs_gradient_init()) {
      queue_.schedule({0.0, 0, EventKind::GradientInit});
      if (cfg_.reinit_period_s > 0.0) {
        for (double t = cfg_.reinit_period_s; t <= cfg_.duration_s;
             t += cfg_.reinit_period_s) {
          queue_.schedule({t, 0, EventKind::GradientInit});
        }
      }
    }
    schedule_traffic();
    while (auto ev = queue_.next()) {
      if (ev->time > cfg_.duration_s) {
        break;
      }
      dispatch(*ev);
    }
    return finish();
  }

 private:
  void schedule_snapshots() {
    const double step = cfg_.snapshot_s;
    double t = 0.0;
    for (int k = 0; t <= cfg_.duration_s * (1.0 + 1e-12); ++k, t = k * step) {
      queue_.schedule({t, 0, EventKind::Snapshot});
    }
  }

  void schedule_traffic() {
    if (!scripted_.empty()) {
      for (const auto& [time, node] : scripted_) {
        if (node == sink_ || node < 0 ||
            static_cast<std::size_t>(node) >= nodes_.size()) {
          throw ConfigError("scripted sense events must hit sensor nodes");
        }
        Event ev{time, 0, EventKind::Traffic};
        ev.node = node;
        queue_.schedule(ev);
      }
      return;
    }
    if (cfg_.event_rate_hz <= 0.0) {
      return;
    }
    RandomEngine rng = make_engine(cfg_.seed, RngStream::Traffic);
    const auto count = static_cast<std::int64_t>(
        cfg_.duration_s * cfg_.event_rate_hz * (1.0 + 1e-12));
    for (std::int64_t k = 1; k <= count; ++k) {
      Event ev{static_cast<double>(k) / cfg_.event_rate_hz, 0,
               EventKind::Traffic};
      // Sensing hits any sensor node, dead or alive; dead sensors still count
      // toward the generated total.
      NodeId origin = static_cast<NodeId>(
          uniform_index(rng, static_cast<std::uint64_t>(nodes_.size() - 1)));
      if (origin >= sink_) {
        ++origin;
      }
      ev.node = origin;
      queue_.schedule(ev);
    }
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::Snapshot:
        take_snapshot();
        break;
      case EventKind::GradientInit:
        run_gradient_init();
        break;
      case EventKind::Traffic:
        handle_traffic(ev.node);
        break;
      case EventKind::Transmit:
        if (node(ev.msg.src).alive) {
          transmit(ev.msg);
        }
        break;
      case EventKind::Deliver:
        deliver(ev);
        break;
      case EventKind::Timer:
        if (node(ev.node).alive) {
          apply(ev.node, protocol_->on_timer(node(ev.node), ev.meta, queue_.now()));
        }
        break;
    }
  }

  void take_snapshot() {
    SnapshotRow row;
    row.time_s = queue_.now();
    for (const NodeState& n : nodes_) {
      if (n.is_sink) continue;
      row.residual_j += n.residual_energy;
      row.alive_nodes += n.alive ? 1 : 0;
    }
    row.generated = static_cast<std::int64_t>(generated_.size());
    row.delivered = static_cast<std::int64_t>(deliveries_.size());
    row.charged_j = charged_total_;
    snapshots_.push_back(row);
  }

  void handle_traffic(NodeId origin) {
    MetaData meta{origin, next_event_seq_[static_cast<std::size_t>(origin)]++};
    generated_.push_back({queue_.now(), meta});
    if (node(origin).alive) {
      apply(origin, protocol_->on_event_sensed(node(origin), meta, queue_.now()));
    }
  }

  void apply(NodeId owner, const HandlerResult& result) {
    for (const SendIntent& intent : result.sends) {
      if (!node(intent.msg.src).alive) {
        continue;  // an earlier send in this batch drained the battery
      }
      if (intent.delay_s <= 0.0) {
        transmit(intent.msg);
      } else {
        Event ev{queue_.now() + intent.delay_s, 0, EventKind::Transmit};
        ev.msg = intent.msg;
        queue_.schedule(ev);
      }
    }
    for (const TimerRequest& timer : result.timers) {
      Event ev{queue_.now() + timer.delay_s, 0, EventKind::Timer};
      ev.node = owner;
      ev.meta = timer.meta;
      queue_.schedule(ev);
    }
  }

  // Transmits msg from its src now: charges the sender once (broadcasts and
  // multicasts are amplified to radio_range, unicasts to the actual link
  // distance) and schedules one delivery per target after the hop latency.
  // A transmission that exhausts the sender still propagates.
  void transmit(const Message& msg) {
    NodeState& sender = node(msg.src);
    TraceRecord record;
    record.time_s = queue_.now();
    record.kind = msg.kind;
    record.src = msg.src;
    record.dst = msg.dst;
    record.meta = msg.meta;
    record.bits = msg.payload_bits;
    const std::size_t trace_idx = trace_.size();

    const double distance =
        msg.is_broadcast() || msg.is_multicast()
            ? topo_.radio_range
            : euclidean(sender.position, node(msg.dst).position);
    record.tx_cost_j = charge_send(sender, msg, distance, cfg_.energy);
    trace_.push_back(record);
    note_charge(msg.src, record.tx_cost_j, trace_idx, true);
    if (!sender.alive) {
      deaths_.push_back({queue_.now(), msg.src});
    }

    const double arrival = queue_.now() + cfg_.per_hop_latency_s;
    const auto deliver_to = [&](NodeId receiver) {
      Event ev{arrival, 0, EventKind::Deliver};
      ev.node = receiver;
      ev.msg = msg;
      ev.trace_idx = trace_idx;
      queue_.schedule(ev);
    };
    if (msg.is_broadcast()) {
      for (NodeId neighbor : topo_.adjacency[static_cast<std::size_t>(msg.src)]) {
        deliver_to(neighbor);
      }
    } else if (msg.is_multicast()) {
      for (NodeId receiver : msg.multicast) {
        deliver_to(receiver);
      }
    } else {
      deliver_to(msg.dst);
    }
  }

  void deliver(const Event& ev) {
    NodeState& receiver = node(ev.node);
    if (!receiver.alive) {
      return;  // died in flight; nothing is received or charged
    }
    const double cost = charge_receive(receiver, ev.msg, cfg_.energy);
    trace_[ev.trace_idx].rx_cost_total_j += cost;
    note_charge(ev.node, cost, ev.trace_idx, false);
    if (!receiver.alive) {
      deaths_.push_back({queue_.now(), ev.node});
      return;  // the charge exhausted the battery mid-reception
    }
    if (ev.msg.kind == MsgKind::Data && receiver.is_sink &&
        delivered_.count(ev.msg.meta) == 0) {
      delivered_.insert(ev.msg.meta);
      deliveries_.push_back({queue_.now(), ev.msg.meta});
    }
    apply(ev.node, protocol_->on_receive(receiver, ev.msg, queue_.now()));
  }

  // Charged variant of the gradient flood: every dequeue is a real ADV
  // broadcast paid for under the control-message size, and dead nodes drop
  // out of the exchange.
  void run_gradient_init() {
    for (NodeState& n : nodes_) {
      n.gradient_value = kInfiniteHops;
    }
    Message adv;
    adv.kind = MsgKind::Adv;
    adv.meta = {sink_, 0};
    adv.payload_bits = cfg_.control_bits;
    adv.dst = kBroadcast;

    std::vector<int> value(nodes_.size(), kInfiniteHops);
    std::queue<NodeId> pending;
    value[static_cast<std::size_t>(sink_)] = 0;
    pending.push(sink_);
    while (!pending.empty()) {
      const NodeId x = pending.front();
      pending.pop();
      if (!node(x).alive) {
        continue;
      }
      adv.src = x;
      adv.gradient = value[static_cast<std::size_t>(x)];
      const std::size_t trace_idx = trace_.size();
      TraceRecord record;
      record.time_s = queue_.now();
      record.kind = MsgKind::Adv;
      record.src = x;
      record.dst = kBroadcast;
      record.meta = adv.meta;
      record.bits = cfg_.control_bits;
      record.tx_cost_j =
          charge_send(node(x), adv, topo_.radio_range, cfg_.energy);
      trace_.push_back(record);
      note_charge(x, record.tx_cost_j, trace_idx, true);
      if (!node(x).alive) {
        deaths_.push_back({queue_.now(), x});
      }
      for (NodeId y : topo_.adjacency[static_cast<std::size_t>(x)]) {
        if (!node(y).alive) {
          continue;
        }
        const double cost = charge_receive(node(y), adv, cfg_.energy);
        trace_[trace_idx].rx_cost_total_j += cost;
        note_charge(y, cost, trace_idx, false);
        if (!node(y).alive) {
          deaths_.push_back({queue_.now(), y});
          continue;
        }
        int& own = value[static_cast<std::size_t>(y)];
        if (own >= adv.gradient + 1) {
          own = adv.gradient + 1;
          pending.push(y);
        }
      }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      nodes_[i].gradient_value = value[i];
    }
  }

  void note_charge(NodeId id, double amount, std::size_t trace_idx,
                   bool is_tx) {
    charged_total_ += amount;
    charges_.push_back({queue_.now(), id, amount, trace_idx, is_tx});
  }

  NodeState& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }

  RunResult finish() {
    RunResult result;
    result.cfg = cfg_;
    result.positions = topo_.positions;
    result.sink = sink_;
    if (protocol_->needs_gradient_init()) {
      result.gradients.reserve(nodes_.size());
      for (const NodeState& n : nodes_) {
        result.gradients.push_back(n.gradient_value);
      }
    }
    result.snapshots = std::move(snapshots_);
    result.trace = std::move(trace_);
    result.charges = std::move(charges_);
    result.deaths = std::move(deaths_);
    result.generated = std::move(generated_);
    result.deliveries = std::move(deliveries_);
    result.final_residual.reserve(nodes_.size());
    for (const NodeState& n : nodes_) {
      result.final_residual.push_back(n.residual_energy);
    }
    result.total_charged_j = charged_total_;
    return result;
  }

  RunConfig cfg_;
  Topology topo_;
  NodeId sink_ = -1;
  std::vector<NodeState> nodes_;
  std::unique_ptr<Protocol> protocol_;
  std::vector<std::pair<double, NodeId>> scripted_;
  std::vector<std::int64_t> next_event_seq_;
  EventQueue queue_;

  std::vector<SnapshotRow> snapshots_;
  std::vector<TraceRecord> trace_;
  std::vector<ChargeRecord> charges_;
  std::vector<DeathRecord> deaths_;
  std::vector<EventStamp> generated_;
  std::vector<EventStamp> deliveries_;
  std::unordered_set<MetaData, MetaDataHash> delivered_;
  double charged_total_ = 0.0;
};

/// Runs the configured scenario on a generated deployment: `node_count`
/// sensors placed uniformly at random plus a dedicated sink appended as the
/// last node id.
inline RunResult run_simulation(const RunConfig& cfg) {
  validate(cfg);
  std::vector<Position> positions = generate_deployment(
      cfg.node_count, cfg.area_w_m, cfg.area_h_m, cfg.seed);
  positions.push_back(cfg.sink_position());
  const NodeId sink = static_cast<NodeId>(cfg.node_count);
  SimEngine engine(cfg, std::move(positions), sink);
  return engine.run();
}

/// Runs on an explicit deployment (fixtures, replayed deployments, tests).
inline RunResult run_simulation_on(const RunConfig& cfg,
                                   std::vector<Position> positions,
                                   NodeId sink,
                                   const SimOverrides& overrides = {}) {
  SimEngine engine(cfg, std::move(positions), sink, overrides);
  return engine.run();
}

}  // namespace drugsim
