#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include "drugsim/engine.hpp"

namespace drugsim {

/// Time of the first non-sink battery death, if any node died.
inline std::optional<double> first_death_time(const RunResult& run) {
  if (run.deaths.empty()) {
    return std::nullopt;
  }
  return run.deaths.front().time_s;
}

/// Distinct events delivered at the sink by time t over events generated by
/// time t; 1.0 before anything was generated.
inline double delivery_ratio(const RunResult& run, double t) {
  std::int64_t generated = 0;
  for (const EventStamp& e : run.generated) {
    if (e.time_s <= t) ++generated;
  }
  if (generated == 0) {
    return 1.0;
  }
  std::int64_t delivered = 0;
  for (const EventStamp& e : run.deliveries) {
    if (e.time_s <= t) ++delivered;
  }
  return static_cast<double>(delivered) / static_cast<double>(generated);
}

/// Total residual energy over non-sink nodes at time t, reconstructed from
/// the charge log.
inline double residual_energy_total(const RunResult& run, double t) {
  double total = static_cast<double>(run.cfg.node_count) *
                 run.cfg.energy.initial_energy;
  for (const ChargeRecord& c : run.charges) {
    if (c.time_s <= t) total -= c.amount_j;
  }
  return total;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

inline void write_metrics_csv(std::ostream& out, const RunResult& run) {
  out << "time_s,residual_j,generated,delivered,delivery_ratio,alive_nodes,"
         "charged_j\n";
  for (const SnapshotRow& row : run.snapshots) {
    const double ratio =
        row.generated == 0 ? 1.0
                           : static_cast<double>(row.delivered) /
                                 static_cast<double>(row.generated);
    out << detail::fmt_double(row.time_s) << ','
        << detail::fmt_double(row.residual_j) << ',' << row.generated << ','
        << row.delivered << ',' << detail::fmt_double(ratio) << ','
        << row.alive_nodes << ',' << detail::fmt_double(row.charged_j) << '\n';
  }
}

/// One row per transmitted message. dst -1 means broadcast.
inline void write_trace_csv(std::ostream& out, const RunResult& run) {
  out << "time_s,kind,src,dst,meta_origin,meta_seq,bits,tx_cost_J,"
         "rx_cost_total_J\n";
  for (const TraceRecord& r : run.trace) {
    out << detail::fmt_double(r.time_s) << ',' << msg_kind_name(r.kind) << ','
        << r.src << ',' << r.dst << ',' << r.meta.origin << ','
        << r.meta.event_seq << ',' << r.bits << ','
        << detail::fmt_double(r.tx_cost_j) << ','
        << detail::fmt_double(r.rx_cost_total_j) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const RunResult& run) {
  out << "protocol,seed,first_death_s,any_death,generated,delivered,"
         "final_delivery_ratio,final_residual_j,total_charged_j,messages\n";
  const auto death = first_death_time(run);
  const SnapshotRow& last = run.snapshots.back();
  const double ratio = last.generated == 0
                           ? 1.0
                           : static_cast<double>(last.delivered) /
                                 static_cast<double>(last.generated);
  out << protocol_name(run.cfg.protocol) << ',' << run.cfg.seed << ','
      << detail::fmt_double(death.value_or(run.cfg.duration_s)) << ','
      << (death.has_value() ? 1 : 0) << ',' << last.generated << ','
      << last.delivered << ',' << detail::fmt_double(ratio) << ','
      << detail::fmt_double(last.residual_j) << ','
      << detail::fmt_double(run.total_charged_j) << ',' << run.trace.size()
      << '\n';
}

}  // namespace drugsim
