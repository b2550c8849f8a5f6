#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "drugsim/engine.hpp"
#include "drugsim/metrics.hpp"

namespace drugsim {

struct BatteryResult {
  std::vector<RunResult> runs;  // protocol-major, seeds ascending within
  std::vector<ProtocolKind> protocols;
  std::vector<std::uint64_t> seeds;
};

inline int battery_thread_cap() {
  if (const char* env = std::getenv("DRUGSIM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return cap;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs every (protocol, seed) combination. Runs are independent and execute
/// on up to DRUGSIM_THREADS workers; results land in a fixed slot per
/// combination, so the outcome does not depend on scheduling.
inline BatteryResult run_battery(const RunConfig& base,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::vector<ProtocolKind>& protocols) {
  if (seeds.empty() || protocols.empty()) {
    throw ConfigError("battery needs at least one seed and one protocol");
  }
  validate(base);
  BatteryResult result;
  result.protocols = protocols;
  result.seeds = seeds;
  const std::size_t total = seeds.size() * protocols.size();
  result.runs.resize(total);

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= total || failed.load()) {
        return;
      }
      const std::size_t p = i / seeds.size();
      const std::size_t s = i % seeds.size();
      RunConfig cfg = base;
      cfg.protocol = protocols[p];
      cfg.seed = seeds[s];
      try {
        result.runs[i] = run_simulation(cfg);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        failure = std::string("run failed (protocol=") +
                  protocol_name(cfg.protocol) + ", seed=" +
                  std::to_string(cfg.seed) + "): " + e.what();
        return;
      }
    }
  };

  const int thread_count =
      std::min<int>(battery_thread_cap(), static_cast<int>(total));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }
  if (failed.load()) {
    throw std::runtime_error(failure);
  }
  return result;
}

// ---------- aggregated CSV files ----------
// All three share the column layout (protocol, seed, time_s, value) and are
// stable-sorted by (protocol order given, seed, time).

/// first_death.csv: one row per run. value 1 marks a run whose first non-sink
/// node died at time_s; value 0 means no death, with time_s = duration.
inline void write_first_death_csv(std::ostream& out,
                                  const BatteryResult& battery) {
  out << "protocol,seed,time_s,value\n";
  for (std::size_t i = 0; i < battery.runs.size(); ++i) {
    const RunResult& run = battery.runs[i];
    const auto death = first_death_time(run);
    out << protocol_name(run.cfg.protocol) << ',' << run.cfg.seed << ','
        << detail::fmt_double(death.value_or(run.cfg.duration_s)) << ','
        << (death.has_value() ? 1 : 0) << '\n';
  }
}

/// delivery_ratio.csv: one row per snapshot per run.
inline void write_delivery_ratio_csv(std::ostream& out,
                                     const BatteryResult& battery) {
  out << "protocol,seed,time_s,value\n";
  for (const RunResult& run : battery.runs) {
    for (const SnapshotRow& row : run.snapshots) {
      const double ratio =
          row.generated == 0 ? 1.0
                             : static_cast<double>(row.delivered) /
                                   static_cast<double>(row.generated);
      out << protocol_name(run.cfg.protocol) << ',' << run.cfg.seed << ','
          << detail::fmt_double(row.time_s) << ',' << detail::fmt_double(ratio)
          << '\n';
    }
  }
}

/// residual_energy.csv: one row per snapshot per run.
inline void write_residual_energy_csv(std::ostream& out,
                                      const BatteryResult& battery) {
  out << "protocol,seed,time_s,value\n";
  for (const RunResult& run : battery.runs) {
    for (const SnapshotRow& row : run.snapshots) {
      out << protocol_name(run.cfg.protocol) << ',' << run.cfg.seed << ','
          << detail::fmt_double(row.time_s) << ','
          << detail::fmt_double(row.residual_j) << '\n';
    }
  }
}

inline void write_battery_files(const std::string& out_dir,
                                const BatteryResult& battery) {
  const auto open = [&](const std::string& name) {
    std::ofstream out(out_dir + "/" + name);
    if (!out) {
      throw std::runtime_error("cannot write " + out_dir + "/" + name);
    }
    return out;
  };
  {
    auto out = open("first_death.csv");
    write_first_death_csv(out, battery);
  }
  {
    auto out = open("delivery_ratio.csv");
    write_delivery_ratio_csv(out, battery);
  }
  {
    auto out = open("residual_energy.csv");
    write_residual_energy_csv(out, battery);
  }
}

}  // namespace drugsim
