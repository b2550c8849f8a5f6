#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "drugsim/protocol.hpp"
#include "drugsim/rng.hpp"

namespace drugsim {

/// Blind dissemination: the origin broadcasts DATA and every first-time
/// receiver rebroadcasts once. No negotiation traffic at all.
class FloodingProtocol final : public Protocol {
 public:
  std::string_view name() const override { return "flooding"; }

  void reset(std::size_t node_count, const RunConfig& cfg) override {
    data_msg_bits_ = cfg.data_message_bits();
    // Fixed per-node holdoff before a relay rebroadcasts, to spread otherwise
    // simultaneous rebroadcasts across distinct timestamps in the log.
    jitter_s_.resize(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
      RandomEngine rng(split_mix(
          split_mix(cfg.seed ^ static_cast<std::uint64_t>(RngStream::Jitter)) +
          i));
      jitter_s_[i] = uniform01(rng) * 0.1 * cfg.per_hop_latency_s;
    }
  }

  HandlerResult on_event_sensed(NodeState& node, const MetaData& meta,
                                double now) override {
    (void)now;
    if (!node.alive || has_seen(node, meta)) {
      return {};
    }
    mark_seen(node, meta);
    HandlerResult result;
    result.sends.push_back({make_data(node.id, meta), 0.0});
    return result;
  }

  HandlerResult on_receive(NodeState& node, const Message& msg,
                           double now) override {
    (void)now;
    if (msg.kind != MsgKind::Data || has_seen(node, msg.meta)) {
      return {};
    }
    mark_seen(node, msg.meta);
    HandlerResult result;
    result.sends.push_back({make_data(node.id, msg.meta),
                            jitter_s_[static_cast<std::size_t>(node.id)]});
    return result;
  }

 private:
  Message make_data(NodeId src, const MetaData& meta) const {
    Message data;
    data.kind = MsgKind::Data;
    data.meta = meta;
    data.payload_bits = data_msg_bits_;
    data.src = src;
    data.dst = kBroadcast;
    return data;
  }

  std::int64_t data_msg_bits_ = 2064;
  std::vector<double> jitter_s_;
};

/// Three-stage negotiated dissemination: a data holder broadcasts an ADV,
/// every neighbor that has not seen the data requests it with a unicast ACK,
/// and the holder answers the burst of requests with one multicast DATA
/// addressed to the requesters. New holders re-advertise, so the data
/// spreads network-wide; there is no sink awareness, energy threshold, or
/// gradient.
class SpinProtocol final : public Protocol {
 public:
  std::string_view name() const override { return "spin"; }

  void reset(std::size_t node_count, const RunConfig& cfg) override {
    requested_.assign(node_count, {});
    pending_requests_.assign(node_count, {});
    control_bits_ = cfg.control_bits;
    data_msg_bits_ = cfg.data_message_bits();
    // requests triggered by one ADV arrive together one hop later; this
    // window batches them into a single response
    response_window_s_ = cfg.per_hop_latency_s;
  }

  HandlerResult on_event_sensed(NodeState& node, const MetaData& meta,
                                double now) override {
    (void)now;
    if (!node.alive || has_seen(node, meta)) {
      return {};
    }
    mark_seen(node, meta);
    return advertise(node.id, meta);
  }

  HandlerResult on_receive(NodeState& node, const Message& msg,
                           double now) override {
    (void)now;
    switch (msg.kind) {
      case MsgKind::Adv: {
        auto& requested = requested_[static_cast<std::size_t>(node.id)];
        if (has_seen(node, msg.meta) || requested.count(msg.meta) != 0) {
          return {};
        }
        requested.insert(msg.meta);
        Message request;
        request.kind = MsgKind::Ack;
        request.meta = msg.meta;
        request.payload_bits = control_bits_;
        request.src = node.id;
        request.dst = msg.src;
        HandlerResult result;
        result.sends.push_back({request, 0.0});
        return result;
      }
      case MsgKind::Ack: {
        if (!has_seen(node, msg.meta)) {
          return {};  // request for data this node does not hold
        }
        auto& pending = pending_requests_[static_cast<std::size_t>(node.id)];
        auto& requesters = pending[msg.meta];
        requesters.push_back(msg.src);
        HandlerResult result;
        if (requesters.size() == 1) {
          result.timers.push_back({msg.meta, response_window_s_});
        }
        return result;
      }
      case MsgKind::Data: {
        if (has_seen(node, msg.meta)) {
          return {};
        }
        mark_seen(node, msg.meta);
        return advertise(node.id, msg.meta);
      }
    }
    return {};
  }

  HandlerResult on_timer(NodeState& node, const MetaData& meta,
                         double now) override {
    (void)now;
    auto& pending = pending_requests_[static_cast<std::size_t>(node.id)];
    const auto it = pending.find(meta);
    if (it == pending.end() || it->second.empty()) {
      return {};
    }
    Message data;
    data.kind = MsgKind::Data;
    data.meta = meta;
    data.payload_bits = data_msg_bits_;
    data.src = node.id;
    data.multicast = std::move(it->second);
    pending.erase(it);
    HandlerResult result;
    result.sends.push_back({data, 0.0});
    return result;
  }

 private:
  HandlerResult advertise(NodeId src, const MetaData& meta) const {
    Message adv;
    adv.kind = MsgKind::Adv;
    adv.meta = meta;
    adv.payload_bits = control_bits_;
    adv.src = src;
    adv.dst = kBroadcast;
    HandlerResult result;
    result.sends.push_back({adv, 0.0});
    return result;
  }

  using RequestMap =
      std::unordered_map<MetaData, std::vector<NodeId>, MetaDataHash>;

  std::vector<std::unordered_set<MetaData, MetaDataHash>> requested_;
  std::vector<RequestMap> pending_requests_;
  std::int64_t control_bits_ = 64;
  std::int64_t data_msg_bits_ = 2064;
  double response_window_s_ = 0.010;
};

}  // namespace drugsim
