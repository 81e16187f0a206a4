#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poiconf/conflate.hpp"
#include "poiconf/csv.hpp"
#include "poiconf/error.hpp"
#include "poiconf/ingest.hpp"
#include "poiconf/knn_graph.hpp"

namespace poiconf {

/// Writes the matched table: header `poi_id,<columns...>`, rows ordered by
/// poi_id, minimal RFC 4180 quoting. Atomic (temp file + rename). Returns
/// the number of data rows written.
inline std::size_t write_matches_csv(const std::filesystem::path& path,
                                     const MatchTable& table) {
  AtomicFile file(path);
  CsvWriter writer(file.stream());

  std::vector<std::string> header;
  header.reserve(table.columns.size() + 1);
  header.push_back("poi_id");
  header.insert(header.end(), table.columns.begin(), table.columns.end());
  writer.write_record(header);

  std::vector<const MatchedPoi*> ordered;
  ordered.reserve(table.rows.size());
  for (const auto& row : table.rows) ordered.push_back(&row);
  std::sort(ordered.begin(), ordered.end(),
            [](const MatchedPoi* a, const MatchedPoi* b) {
              return a->poi_id < b->poi_id;
            });

  std::vector<std::string> fields;
  for (const MatchedPoi* row : ordered) {
    fields.clear();
    fields.reserve(row->values.size() + 1);
    fields.push_back(std::to_string(row->poi_id));
    fields.insert(fields.end(), row->values.begin(), row->values.end());
    writer.write_record(fields);
  }
  file.commit();
  return table.rows.size();
}

inline constexpr const char* kEdgeHeader =
    "fsq_place_id_source,fsq_place_id_destination,distance_m";

/// Writes the edge list: fixed three-column header and distances with two
/// decimal places. Rows are sorted by (source, distance, destination).
inline std::size_t write_edges_csv(const std::filesystem::path& path,
                                   std::span<const GraphEdge> edges) {
  std::vector<const GraphEdge*> ordered;
  ordered.reserve(edges.size());
  for (const auto& e : edges) ordered.push_back(&e);
  std::sort(ordered.begin(), ordered.end(),
            [](const GraphEdge* a, const GraphEdge* b) {
              if (a->source != b->source) return a->source < b->source;
              if (a->distance_m != b->distance_m) {
                return a->distance_m < b->distance_m;
              }
              return a->destination < b->destination;
            });

  AtomicFile file(path);
  CsvWriter writer(file.stream());
  file.stream() << kEdgeHeader << '\n';
  char dist[32];
  std::vector<std::string> fields(3);
  for (const GraphEdge* e : ordered) {
    std::snprintf(dist, sizeof(dist), "%.2f", e->distance_m);
    fields[0] = e->source;
    fields[1] = e->destination;
    fields[2] = dist;
    writer.write_record(fields);
  }
  file.commit();
  return edges.size();
}

/// One row of a matched table as seen by the graph and stats commands.
struct MatchesRow {
  std::string fsq_place_id;
  GeoPoint fsq_point;
  std::optional<double> sim_trg;
  std::optional<double> sim_lev;
  std::optional<double> distance_deg;
};

/// Streaming reader over a written matched table. Requires the id and
/// Foursquare coordinate columns; the computed score/distance columns are
/// optional (has_scores() tells). Matched tables are pipeline outputs, so
/// malformed values raise instead of being skipped.
class MatchesCsvReader {
 public:
  explicit MatchesCsvReader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary), csv_(in_) {
    if (!in_) throw IoError("cannot open matches file: " + path.string());
    if (!csv_.next(header_)) {
      throw SchemaError("missing header row: " + path.string());
    }
    id_idx_ = require_column("fsq_place_id");
    lat_idx_ = require_column("fsq_latitude");
    lon_idx_ = require_column("fsq_longitude");
    trg_idx_ = find_column(kTrigramScoreColumn);
    lev_idx_ = find_column(kLevenshteinScoreColumn);
    dist_idx_ = find_column(kDistanceColumn);
  }

  bool has_scores() const { return trg_idx_ && lev_idx_ && dist_idx_; }
  const std::vector<std::string>& header() const { return header_; }

  std::optional<MatchesRow> next() {
    std::vector<std::string> fields;
    if (!csv_.next(fields)) return std::nullopt;
    if (fields.size() != header_.size()) {
      throw ParseError(path_.string() + ": record " +
                       std::to_string(csv_.record_number()) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header_.size()));
    }
    MatchesRow row{fields[id_idx_],
                   GeoPoint(parse_double(fields[lat_idx_]),
                            parse_double(fields[lon_idx_])),
                   std::nullopt,
                   std::nullopt,
                   std::nullopt};
    if (trg_idx_) row.sim_trg = parse_double(fields[*trg_idx_]);
    if (lev_idx_) row.sim_lev = parse_double(fields[*lev_idx_]);
    if (dist_idx_) row.distance_deg = parse_double(fields[*dist_idx_]);
    return row;
  }

 private:
  std::optional<std::size_t> find_column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (header_[i] == name) return i;
    }
    return std::nullopt;
  }

  std::size_t require_column(const std::string& name) const {
    const auto idx = find_column(name);
    if (!idx) {
      throw SchemaError("missing column '" + name + "' in " + path_.string());
    }
    return *idx;
  }

  double parse_double(const std::string& text) const {
    double value = 0.0;
    const auto r =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
      throw ParseError(path_.string() + ": record " +
                       std::to_string(csv_.record_number()) +
                       ": bad number '" + text + "'");
    }
    return value;
  }

  std::filesystem::path path_;
  std::ifstream in_;
  CsvReader csv_;
  std::vector<std::string> header_;
  std::size_t id_idx_ = 0;
  std::size_t lat_idx_ = 0;
  std::size_t lon_idx_ = 0;
  std::optional<std::size_t> trg_idx_;
  std::optional<std::size_t> lev_idx_;
  std::optional<std::size_t> dist_idx_;
};

}  // namespace poiconf
