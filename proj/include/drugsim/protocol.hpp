#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "drugsim/config.hpp"
#include "drugsim/energy.hpp"
#include "drugsim/rng.hpp"
#include "drugsim/topology.hpp"

namespace drugsim {

inline constexpr NodeId kBroadcast = -1;

/// Compact descriptor of one sensed event. Distinct events never share a
/// descriptor; copies of the same event always do.
struct MetaData {
  NodeId origin = -1;
  std::int64_t event_seq = -1;

  friend bool operator==(const MetaData&, const MetaData&) = default;
};

struct MetaDataHash {
  std::size_t operator()(const MetaData& m) const {
    return static_cast<std::size_t>(
        split_mix(static_cast<std::uint64_t>(m.origin) * 0x1F123BB5ULL ^
                  static_cast<std::uint64_t>(m.event_seq)));
  }
};

using SeenSet = std::unordered_set<MetaData, MetaDataHash>;

enum class MsgKind { Adv, Ack, Data };

inline std::string_view msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::Adv:
      return "ADV";
    case MsgKind::Ack:
      return "ACK";
    case MsgKind::Data:
      return "DATA";
  }
  return "?";
}

struct Message {
  MsgKind kind = MsgKind::Adv;
  MetaData meta;
  std::int64_t payload_bits = 0;
  NodeId src = -1;
  NodeId dst = kBroadcast;
  // Multicast: one transmission addressed to this set of receivers (dst
  // stays kBroadcast in the log). Empty for ordinary unicast/broadcast.
  std::vector<NodeId> multicast;
  // Negotiation payload: the sender's hop gradient (ADV, ACK) and residual
  // energy (ACK). Ignored by protocols that do not negotiate.
  int gradient = kInfiniteHops;
  double residual_energy = 0.0;

  bool is_broadcast() const { return dst == kBroadcast && multicast.empty(); }
  bool is_multicast() const { return !multicast.empty(); }
};

struct NodeState {
  NodeId id = -1;
  Position position;
  double residual_energy = 0.0;
  int gradient_value = kInfiniteHops;
  SeenSet seen;
  bool alive = true;
  bool is_sink = false;
};

inline void mark_seen(NodeState& node, const MetaData& meta) {
  node.seen.insert(meta);
}

inline bool has_seen(const NodeState& node, const MetaData& meta) {
  return node.seen.count(meta) != 0;
}

/// Deducts the transmit cost of `message` over `distance` meters. Returns the
/// energy actually drained (a dying node can only spend what it has left);
/// the sink is mains-powered and never charged. A node whose residual reaches
/// zero is clamped and marked dead.
inline double charge_send(NodeState& node, const Message& message,
                          double distance, const EnergyModel& model) {
  if (!node.alive) {
    throw std::logic_error("charge_send on a dead node");
  }
  if (node.is_sink) {
    return 0.0;
  }
  const double cost = tx_cost(model, message.payload_bits, distance);
  const double drained = std::min(cost, node.residual_energy);
  node.residual_energy -= cost;
  if (node.residual_energy <= 0.0) {
    node.residual_energy = 0.0;
    node.alive = false;
  }
  return drained;
}

/// Deducts the receive cost of `message`. Same drain, clamp-and-kill, and
/// sink rules as charge_send.
inline double charge_receive(NodeState& node, const Message& message,
                             const EnergyModel& model) {
  if (!node.alive) {
    throw std::logic_error("charge_receive on a dead node");
  }
  if (node.is_sink) {
    return 0.0;
  }
  const double cost = rx_cost(model, message.payload_bits);
  const double drained = std::min(cost, node.residual_energy);
  node.residual_energy -= cost;
  if (node.residual_energy <= 0.0) {
    node.residual_energy = 0.0;
    node.alive = false;
  }
  return drained;
}

/// A message to transmit after delay_s of local holdoff (0 = immediately).
struct SendIntent {
  Message msg;
  double delay_s = 0.0;
};

struct TimerRequest {
  MetaData meta;
  double delay_s = 0.0;
};

struct HandlerResult {
  std::vector<SendIntent> sends;
  std::vector<TimerRequest> timers;
};

/// Behavioral interface the engine drives. Handlers are deterministic
/// functions of node state, message, and current time; they communicate only
/// through returned send intents and timer requests.
class Protocol {
 public:
  virtual ~Protocol() = default;

  virtual std::string_view name() const = 0;
  virtual bool needs_gradient_init() const { return false; }

  /// Called once before the run starts.
  virtual void reset(std::size_t node_count, const RunConfig& cfg) = 0;

  virtual HandlerResult on_event_sensed(NodeState& node, const MetaData& meta,
                                        double now) = 0;
  virtual HandlerResult on_receive(NodeState& node, const Message& msg,
                                   double now) = 0;
  virtual HandlerResult on_timer(NodeState& node, const MetaData& meta,
                                 double now) {
    (void)node;
    (void)meta;
    (void)now;
    return {};
  }
};

}  // namespace drugsim
