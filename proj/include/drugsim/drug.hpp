#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "drugsim/protocol.hpp"
#include "drugsim/topology.hpp"

namespace drugsim {

/// Hop-gradient initialization flooded out from the sink. Every node starts
/// at the infinite sentinel; the sink takes 0 and enters the queue. Each
/// dequeued node broadcasts its value, and a receiver adopts value+1 whenever
/// that is no worse than what it holds, re-entering the queue. With FIFO
/// processing the result equals BFS hop distance on the sink's component and
/// stays infinite elsewhere; ties re-enqueue a node without changing its
/// value, so a node may broadcast more than once.
inline std::vector<int> initialize_gradient(const Topology& topo, NodeId sink) {
  if (sink < 0 || static_cast<std::size_t>(sink) >= topo.size()) {
    throw std::out_of_range("sink id not in topology");
  }
  std::vector<int> value(topo.size(), kInfiniteHops);
  std::queue<NodeId> pending;
  value[static_cast<std::size_t>(sink)] = 0;
  pending.push(sink);
  while (!pending.empty()) {
    const NodeId x = pending.front();
    pending.pop();
    const int advertised = value[static_cast<std::size_t>(x)];
    for (NodeId y : topo.adjacency[static_cast<std::size_t>(x)]) {
      int& own = value[static_cast<std::size_t>(y)];
      if (own >= advertised + 1) {
        own = advertised + 1;
        pending.push(y);
      }
    }
  }
  return value;
}

/// Relay admission rule: answer an advertisement only from strictly closer to
/// the sink, and only with battery at or above the participation threshold.
inline bool should_ack(int own_gradient, int adv_gradient, double own_energy,
                       double threshold) {
  return own_gradient < adv_gradient && own_energy >= threshold;
}

struct AckInfo {
  NodeId node = -1;
  int gradient = kInfiniteHops;
  double residual_energy = 0.0;
};

/// Picks the forwarding target among collected acknowledgements: lowest
/// gradient first, then highest residual energy, then lowest id. Empty input
/// means no route (callers retry or drop).
inline std::optional<NodeId> select_next_hop(const std::vector<AckInfo>& acks) {
  if (acks.empty()) {
    return std::nullopt;
  }
  const AckInfo* best = &acks.front();
  for (const AckInfo& a : acks) {
    if (a.gradient != best->gradient) {
      if (a.gradient < best->gradient) best = &a;
    } else if (a.residual_energy != best->residual_energy) {
      if (a.residual_energy > best->residual_energy) best = &a;
    } else if (a.node < best->node) {
      best = &a;
    }
  }
  return best->node;
}

/// Negotiated unicast forwarding along the hop gradient. A data holder
/// broadcasts an ADV, collects ACKs from eligible closer neighbors during the
/// ack window, then unicasts DATA to the selected one; each relay repeats the
/// cycle until the sink is reached. No ACKs after the final retry drops the
/// event.
class DrugProtocol final : public Protocol {
 public:
  std::string_view name() const override { return "drug"; }
  bool needs_gradient_init() const override { return true; }

  void reset(std::size_t node_count, const RunConfig& cfg) override {
    pending_.assign(node_count, {});
    control_bits_ = cfg.control_bits;
    data_msg_bits_ = cfg.data_message_bits();
    ack_wait_s_ = cfg.ack_wait_s;
    max_retries_ = cfg.max_retries;
    threshold_ = cfg.energy.participation_threshold;
  }

  HandlerResult on_event_sensed(NodeState& node, const MetaData& meta,
                                double now) override {
    (void)now;
    if (!node.alive || has_seen(node, meta)) {
      return {};
    }
    mark_seen(node, meta);
    return open_attempt(node, meta);
  }

  HandlerResult on_receive(NodeState& node, const Message& msg,
                           double now) override {
    (void)now;
    switch (msg.kind) {
      case MsgKind::Adv:
        return handle_adv(node, msg);
      case MsgKind::Ack:
        return handle_ack(node, msg);
      case MsgKind::Data:
        return handle_data(node, msg);
    }
    return {};
  }

  HandlerResult on_timer(NodeState& node, const MetaData& meta,
                         double now) override {
    (void)now;
    auto& pending = pending_for(node.id);
    const auto it = pending.find(meta);
    if (it == pending.end() || !node.alive) {
      return {};
    }
    Attempt& attempt = it->second;
    if (const auto next = select_next_hop(attempt.acks)) {
      Message data;
      data.kind = MsgKind::Data;
      data.meta = meta;
      data.payload_bits = data_msg_bits_;
      data.src = node.id;
      data.dst = *next;
      pending.erase(it);
      HandlerResult result;
      result.sends.push_back({data, 0.0});
      return result;
    }
    if (attempt.retries_used < max_retries_) {
      ++attempt.retries_used;
      return advertise(node, meta);
    }
    pending.erase(it);  // dead end; the event stays undelivered
    return {};
  }

 private:
  struct Attempt {
    std::vector<AckInfo> acks;
    int retries_used = 0;
  };
  using PendingMap = std::unordered_map<MetaData, Attempt, MetaDataHash>;

  PendingMap& pending_for(NodeId id) {
    return pending_[static_cast<std::size_t>(id)];
  }

  HandlerResult open_attempt(NodeState& node, const MetaData& meta) {
    pending_for(node.id).emplace(meta, Attempt{});
    return advertise(node, meta);
  }

  HandlerResult advertise(const NodeState& node, const MetaData& meta) {
    Message adv;
    adv.kind = MsgKind::Adv;
    adv.meta = meta;
    adv.payload_bits = control_bits_;
    adv.src = node.id;
    adv.dst = kBroadcast;
    adv.gradient = node.gradient_value;
    HandlerResult result;
    result.sends.push_back({adv, 0.0});
    result.timers.push_back({meta, ack_wait_s_});
    return result;
  }

  HandlerResult handle_adv(NodeState& node, const Message& msg) {
    if (!should_ack(node.gradient_value, msg.gradient, node.residual_energy,
                    threshold_)) {
      return {};
    }
    Message ack;
    ack.kind = MsgKind::Ack;
    ack.meta = msg.meta;
    ack.payload_bits = control_bits_;
    ack.src = node.id;
    ack.dst = msg.src;
    ack.gradient = node.gradient_value;
    ack.residual_energy = node.residual_energy;
    HandlerResult result;
    result.sends.push_back({ack, 0.0});
    return result;
  }

  HandlerResult handle_ack(NodeState& node, const Message& msg) {
    auto& pending = pending_for(node.id);
    const auto it = pending.find(msg.meta);
    if (it == pending.end()) {
      return {};  // late or stray ACK
    }
    if (msg.gradient < node.gradient_value) {
      it->second.acks.push_back(
          {msg.src, msg.gradient, msg.residual_energy});
    }
    return {};
  }

  HandlerResult handle_data(NodeState& node, const Message& msg) {
    if (has_seen(node, msg.meta)) {
      return {};  // duplicate, consumed silently
    }
    mark_seen(node, msg.meta);
    if (node.is_sink) {
      return {};  // destination reached; the engine records the delivery
    }
    return open_attempt(node, msg.meta);
  }

  std::vector<PendingMap> pending_;
  std::int64_t control_bits_ = 64;
  std::int64_t data_msg_bits_ = 2064;
  double ack_wait_s_ = 0.05;
  int max_retries_ = 2;
  double threshold_ = 0.05;
};

}  // namespace drugsim
