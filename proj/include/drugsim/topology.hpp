#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drugsim/rng.hpp"

namespace drugsim {

using NodeId = int;

/// Hop-count sentinel for nodes with no path to the sink.
inline constexpr int kInfiniteHops = std::numeric_limits<int>::max();

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double euclidean(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Node positions plus unit-disk adjacency: i and j are neighbors iff their
/// distance is at most radio_range and i != j. Immutable after construction.
struct Topology {
  std::vector<Position> positions;
  double radio_range = 0.0;
  std::vector<std::vector<NodeId>> adjacency;

  std::size_t size() const { return positions.size(); }
};

/// Draws node_count positions independently and uniformly over
/// [0,width] x [0,height]. Same inputs and seed give identical output.
inline std::vector<Position> generate_deployment(int node_count, double width,
                                                 double height,
                                                 std::uint64_t seed) {
  if (node_count < 1) {
    throw std::invalid_argument("node_count must be at least 1");
  }
  if (width <= 0.0 || height <= 0.0) {
    throw std::invalid_argument("deployment area must be positive");
  }
  RandomEngine rng = make_engine(seed, RngStream::Deployment);
  std::vector<Position> positions;
  positions.reserve(static_cast<std::size_t>(node_count));
  for (int i = 0; i < node_count; ++i) {
    const double x = uniform01(rng) * width;
    const double y = uniform01(rng) * height;
    positions.push_back({x, y});
  }
  return positions;
}

inline Topology build_adjacency(std::vector<Position> positions,
                                double radio_range) {
  if (radio_range <= 0.0) {
    throw std::invalid_argument("radio_range must be positive");
  }
  Topology topo;
  topo.radio_range = radio_range;
  topo.adjacency.assign(positions.size(), {});
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if (euclidean(positions[i], positions[j]) <= radio_range) {
        topo.adjacency[i].push_back(static_cast<NodeId>(j));
        topo.adjacency[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  topo.positions = std::move(positions);
  return topo;
}

/// Breadth-first hop distance from the sink. Unreachable nodes get
/// kInfiniteHops. Independent of any protocol logic; used as the reference
/// for gradient initialization.
inline std::vector<int> bfs_hop_distance(const Topology& topo, NodeId sink) {
  if (sink < 0 || static_cast<std::size_t>(sink) >= topo.size()) {
    throw std::out_of_range("sink id not in topology");
  }
  std::vector<int> dist(topo.size(), kInfiniteHops);
  std::queue<NodeId> frontier;
  dist[static_cast<std::size_t>(sink)] = 0;
  frontier.push(sink);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : topo.adjacency[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(v)] == kInfiniteHops) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

// ---------- deployment text format ----------
// Header line "# sink <id> range <r>", then one "id x y" line per node,
// 17 significant digits so positions round-trip exactly.

inline void save_deployment(std::ostream& out,
                            const std::vector<Position>& positions,
                            NodeId sink, double radio_range) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# sink %d range %.17g\n", sink, radio_range);
  out << buf;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g\n", i, positions[i].x,
                  positions[i].y);
    out << buf;
  }
}

struct DeploymentFile {
  std::vector<Position> positions;
  NodeId sink = 0;
  double radio_range = 0.0;
};

inline DeploymentFile load_deployment(std::istream& in) {
  DeploymentFile result;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("deployment file is empty");
  }
  {
    std::istringstream header(line);
    std::string hash, sink_word, range_word;
    if (!(header >> hash >> sink_word >> result.sink >> range_word >>
          result.radio_range) ||
        hash != "#" || sink_word != "sink" || range_word != "range") {
      throw std::runtime_error("deployment file has a malformed header");
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    std::size_t id = 0;
    Position p;
    if (!(row >> id >> p.x >> p.y)) {
      throw std::runtime_error("deployment file has a malformed node line");
    }
    if (id != result.positions.size()) {
      throw std::runtime_error("deployment file node ids must be consecutive");
    }
    result.positions.push_back(p);
  }
  if (result.sink < 0 ||
      static_cast<std::size_t>(result.sink) >= result.positions.size()) {
    throw std::runtime_error("deployment file sink id out of range");
  }
  return result;
}

}  // namespace drugsim
