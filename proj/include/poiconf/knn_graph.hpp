#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poiconf/error.hpp"
#include "poiconf/geo.hpp"
#include "poiconf/grid_index.hpp"

namespace poiconf {

/// One graph node per distinct fsq_place_id: several matched rows can share
/// a node when one Foursquare place matched several OSM records.
struct GraphNode {
  std::string fsq_place_id;
  GeoPoint point;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

/// Directed edge: kNN neighborhoods are asymmetric.
struct GraphEdge {
  std::string source;
  std::string destination;
  double distance_m;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Collapses matched rows to one node per fsq_place_id, keeping the first
/// occurrence's coordinates. Rows sharing an id carry identical coordinates
/// by construction; a mismatch means corrupted input and raises.
inline std::vector<GraphNode> dedupe_nodes(
    const std::vector<std::pair<std::string, GeoPoint>>& rows) {
  std::vector<GraphNode> nodes;
  std::unordered_map<std::string, std::size_t> seen;
  seen.reserve(rows.size());
  for (const auto& [id, point] : rows) {
    const auto [it, inserted] = seen.emplace(id, nodes.size());
    if (inserted) {
      nodes.push_back(GraphNode{id, point});
    } else if (!(nodes[it->second].point == point)) {
      throw IntegrityError("fsq_place_id '" + id +
                           "' appears with differing coordinates");
    }
  }
  return nodes;
}

/// Directed kNN edges over the node set: each node connects to its
/// min(k, n-1) nearest other nodes by great-circle distance. Output is
/// sorted by (source, distance_m, destination); distance ties break by
/// destination id.
inline std::vector<GraphEdge> build_knn_graph(std::vector<GraphNode> nodes,
                                              std::size_t k) {
  if (k < 1) throw ConfigError("--k must be at least 1");
  std::vector<GraphEdge> edges;
  if (nodes.size() < 2) return edges;

  // Node ordinals follow id order, so the index's ordinal tie-break is the
  // destination-id tie-break.
  std::sort(nodes.begin(), nodes.end(),
            [](const GraphNode& a, const GraphNode& b) {
              return a.fsq_place_id < b.fsq_place_id;
            });

  double lat_lo = 90, lat_hi = -90, lon_lo = 180, lon_hi = -180;
  std::vector<std::pair<std::size_t, GeoPoint>> points;
  points.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    points.emplace_back(i, nodes[i].point);
    lat_lo = std::min(lat_lo, nodes[i].point.lat());
    lat_hi = std::max(lat_hi, nodes[i].point.lat());
    lon_lo = std::min(lon_lo, nodes[i].point.lon());
    lon_hi = std::max(lon_hi, nodes[i].point.lon());
  }

  // Cell sizing only affects speed, not results: aim for about one point
  // per cell across the data extent.
  const double extent_m =
      std::max(lat_hi - lat_lo, lon_hi - lon_lo) * kMetersPerDegree;
  const double cell_m = std::clamp(
      extent_m / std::max(1.0, std::sqrt(static_cast<double>(nodes.size()))),
      1.0, 1e7);
  const GridIndex index(points, cell_m);

  edges.reserve(nodes.size() * std::min(k, nodes.size() - 1));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const Neighbor& n : index.knn_query(nodes[i].point, k, i)) {
      edges.push_back(GraphEdge{nodes[i].fsq_place_id,
                                nodes[n.ordinal].fsq_place_id, n.distance_m});
    }
  }
  return edges;
}

}  // namespace poiconf
