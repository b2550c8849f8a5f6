// drugsim command line: single runs, seed/protocol batteries, and plots.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drugsim/drugsim.hpp"

namespace fs = std::filesystem;

namespace {

drugsim::RunConfig load_config(const std::string& path) {
  if (path.empty()) {
    return drugsim::RunConfig{};
  }
  return drugsim::parse_config_file(path);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dots));
    const auto hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) {
      throw drugsim::ConfigError("--seeds: range end before start");
    }
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const auto comma = text.find(',', begin);
    const std::string item = text.substr(
        begin, comma == std::string::npos ? std::string::npos : comma - begin);
    if (!item.empty()) {
      seeds.push_back(std::stoull(item));
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (seeds.empty()) {
    throw drugsim::ConfigError("--seeds: empty list");
  }
  return seeds;
}

std::vector<drugsim::ProtocolKind> parse_protocol_list(const std::string& text) {
  std::vector<drugsim::ProtocolKind> protocols;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const auto comma = text.find(',', begin);
    const std::string item = text.substr(
        begin, comma == std::string::npos ? std::string::npos : comma - begin);
    if (!item.empty()) {
      protocols.push_back(drugsim::parse_protocol(item));
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (protocols.empty()) {
    throw drugsim::ConfigError("--protocols: empty list");
  }
  return protocols;
}

void write_file(const fs::path& path, const auto& writer) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  writer(out);
}

int cmd_run(const std::string& config_path, const std::string& protocol,
            std::int64_t seed, bool trace, const std::string& out_dir) {
  drugsim::RunConfig cfg = load_config(config_path);
  if (!protocol.empty()) cfg.protocol = drugsim::parse_protocol(protocol);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (trace) cfg.trace = true;
  drugsim::validate(cfg);

  fs::create_directories(out_dir);
  const drugsim::RunResult result = drugsim::run_simulation(cfg);

  write_file(fs::path(out_dir) / "metrics.csv",
             [&](std::ostream& o) { drugsim::write_metrics_csv(o, result); });
  write_file(fs::path(out_dir) / "summary.csv",
             [&](std::ostream& o) { drugsim::write_summary_csv(o, result); });
  write_file(fs::path(out_dir) / "deployment.txt", [&](std::ostream& o) {
    drugsim::save_deployment(o, result.positions, result.sink,
                             cfg.radio_range_m);
  });
  if (cfg.trace) {
    write_file(fs::path(out_dir) / "trace.csv",
               [&](std::ostream& o) { drugsim::write_trace_csv(o, result); });
  }

  const auto death = drugsim::first_death_time(result);
  std::cout << "protocol=" << drugsim::protocol_name(cfg.protocol)
            << " seed=" << cfg.seed << " generated="
            << result.generated.size() << " delivered="
            << result.deliveries.size() << " first_death_s="
            << (death ? std::to_string(*death) : std::string("none")) << '\n';
  return 0;
}

int cmd_battery(const std::string& config_path, const std::string& seeds_text,
                const std::string& protocols_text, const std::string& out_dir) {
  drugsim::RunConfig cfg = load_config(config_path);
  drugsim::validate(cfg);
  const auto seeds = parse_seed_list(seeds_text);
  const auto protocols = parse_protocol_list(protocols_text);

  fs::create_directories(out_dir);
  const drugsim::BatteryResult battery =
      drugsim::run_battery(cfg, seeds, protocols);
  drugsim::write_battery_files(out_dir, battery);
  std::cout << "battery complete: " << battery.runs.size() << " runs, files in "
            << out_dir << '\n';
  return 0;
}

int cmd_plot(const std::string& in_dir) {
  drugsim::render_plots(in_dir);
  std::cout << "plots written to " << in_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic wireless sensor network protocol simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string protocol;
  std::int64_t seed = -1;
  bool trace = false;
  std::string out_dir;
  std::string in_dir;
  std::string seeds_text = "0..9";
  std::string protocols_text = "drug,spin,flooding";

  CLI::App* run = app.add_subcommand("run", "execute one simulation run");
  run->add_option("--config", config_path, "flat key=value config file");
  run->add_option("--protocol", protocol, "drug|spin|flooding");
  run->add_option("--seed", seed, "run seed (overrides config)");
  run->add_flag("--trace", trace, "emit per-message trace.csv");
  run->add_option("--out", out_dir, "output directory")->required();

  CLI::App* battery =
      app.add_subcommand("battery", "run a seed x protocol comparison");
  battery->add_option("--config", config_path, "flat key=value config file");
  battery->add_option("--seeds", seeds_text, "range a..b or comma list");
  battery->add_option("--protocols", protocols_text, "comma list");
  battery->add_option("--out", out_dir, "output directory")->required();

  CLI::App* plot = app.add_subcommand("plot", "render SVG charts from CSVs");
  plot->add_option("--in", in_dir, "directory with battery CSVs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, protocol, seed, trace, out_dir);
    }
    if (battery->parsed()) {
      return cmd_battery(config_path, seeds_text, protocols_text, out_dir);
    }
    if (plot->parsed()) {
      return cmd_plot(in_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
