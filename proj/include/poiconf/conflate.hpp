#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poiconf/error.hpp"
#include "poiconf/geo.hpp"
#include "poiconf/grid_index.hpp"
#include "poiconf/ingest.hpp"
#include "poiconf/similarity.hpp"

namespace poiconf {

enum class JoinMode { kNearestOnly, kAllWithinRadius };
enum class FilterMetric { kLevenshtein, kTrigram, kBoth, kEither };
enum class Comparator { kAtLeast, kGreaterThan };

struct ConflationConfig {
  double radius_m = 50.0;
  JoinMode join_mode = JoinMode::kAllWithinRadius;
  FilterMetric filter_metric = FilterMetric::kLevenshtein;
  double threshold = 0.5;
  Comparator comparator = Comparator::kAtLeast;
  std::size_t k = 10;        // graph neighbors per node
  unsigned threads = 0;      // 0 = all hardware threads
  bool emit_distance_m = false;

  void validate() const {
    if (!(radius_m > 0.0)) {
      throw ConfigError("--radius-m must be positive, got " +
                        std::to_string(radius_m));
    }
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
      throw ConfigError("--threshold must be within [0, 1], got " +
                        std::to_string(threshold));
    }
    if (k < 1) throw ConfigError("--k must be at least 1");
  }
};

/// A spatially joined pair. Scores stay empty until score_candidate runs.
struct MatchCandidate {
  PoiRecord fsq;
  PoiRecord osm;
  double distance_deg;
  double distance_m;
  std::optional<SimilarityScore> sim_trg;
  std::optional<SimilarityScore> sim_lev;
};

/// Candidates for one Foursquare record: every OSM record within
/// cfg.radius_m (or just the closest one under kNearestOnly), ordered by
/// ascending distance with ties by OSM ordinal.
inline std::vector<MatchCandidate> join_candidates(
    const PoiRecord& fsq, const std::vector<PoiRecord>& osm_records,
    const GridIndex& osm_index, const ConflationConfig& cfg) {
  std::vector<Neighbor> hits = osm_index.radius_query(fsq.point, cfg.radius_m);
  if (cfg.join_mode == JoinMode::kNearestOnly && hits.size() > 1) {
    hits.resize(1);
  }
  std::vector<MatchCandidate> out;
  out.reserve(hits.size());
  for (const Neighbor& hit : hits) {
    const PoiRecord& osm = osm_records[hit.ordinal];
    out.push_back(MatchCandidate{fsq, osm,
                                 degree_distance(fsq.point, osm.point),
                                 hit.distance_m, std::nullopt, std::nullopt});
  }
  return out;
}

inline void score_candidate(MatchCandidate& candidate) {
  candidate.sim_trg = trigram_similarity(candidate.fsq.name,
                                         candidate.osm.name);
  candidate.sim_lev = levenshtein_similarity(candidate.fsq.name,
                                             candidate.osm.name);
}

inline std::vector<MatchCandidate> score_candidates(
    std::vector<MatchCandidate> candidates) {
  for (auto& c : candidates) score_candidate(c);
  return candidates;
}

inline bool passes_filter(const MatchCandidate& candidate,
                          const ConflationConfig& cfg) {
  if (!candidate.sim_trg || !candidate.sim_lev) {
    throw ContractError("filter applied to an unscored candidate");
  }
  auto meets = [&](const SimilarityScore& score) {
    return cfg.comparator == Comparator::kAtLeast
               ? score.value() >= cfg.threshold
               : score.value() > cfg.threshold;
  };
  switch (cfg.filter_metric) {
    case FilterMetric::kLevenshtein:
      return meets(*candidate.sim_lev);
    case FilterMetric::kTrigram:
      return meets(*candidate.sim_trg);
    case FilterMetric::kBoth:
      return meets(*candidate.sim_lev) && meets(*candidate.sim_trg);
    case FilterMetric::kEither:
      return meets(*candidate.sim_lev) || meets(*candidate.sim_trg);
  }
  return false;
}

inline std::vector<MatchCandidate> filter_matches(
    std::vector<MatchCandidate> candidates, const ConflationConfig& cfg) {
  std::erase_if(candidates,
                [&](const MatchCandidate& c) { return !passes_filter(c, cfg); });
  return candidates;
}

/// One exported row: primary key plus the flattened column values.
struct MatchedPoi {
  std::uint64_t poi_id;
  std::vector<std::string> values;  // aligned with MatchTable::columns
};

struct MatchTable {
  std::vector<std::string> columns;  // without the leading poi_id
  std::vector<MatchedPoi> rows;      // sorted by poi_id, which is 1..n
};

inline constexpr const char* kTrigramScoreColumn =
    "fsq_osm_name_similarity_score_trg";
inline constexpr const char* kLevenshteinScoreColumn =
    "fsq_osm_name_similarity_score_lev";
inline constexpr const char* kDistanceColumn = "fsq_osm_distance";
inline constexpr const char* kDistanceMetersColumn = "fsq_osm_distance_m";

/// Sorts matches by (fsq id, osm id), numbers them 1..n and flattens each
/// into the output column set: the Foursquare columns, the OSM columns,
/// both similarity scores and the pair distance in degrees. Duplicate fsq
/// ids stay: every surviving pair gets its own row and poi_id.
inline MatchTable assign_poi_ids(
    std::vector<MatchCandidate> matches,
    const std::shared_ptr<const std::vector<std::string>>& fsq_columns,
    const std::shared_ptr<const std::vector<std::string>>& osm_columns,
    bool emit_distance_m = false) {
  std::stable_sort(matches.begin(), matches.end(),
                   [](const MatchCandidate& a, const MatchCandidate& b) {
                     if (a.fsq.id != b.fsq.id) return a.fsq.id < b.fsq.id;
                     return a.osm.id < b.osm.id;
                   });

  MatchTable table;
  table.columns.reserve(fsq_columns->size() + osm_columns->size() + 4);
  table.columns.insert(table.columns.end(), fsq_columns->begin(),
                       fsq_columns->end());
  table.columns.insert(table.columns.end(), osm_columns->begin(),
                       osm_columns->end());
  table.columns.push_back(kTrigramScoreColumn);
  table.columns.push_back(kLevenshteinScoreColumn);
  table.columns.push_back(kDistanceColumn);
  if (emit_distance_m) table.columns.push_back(kDistanceMetersColumn);

  table.rows.reserve(matches.size());
  std::uint64_t next_id = 1;
  for (MatchCandidate& m : matches) {
    if (!m.sim_trg || !m.sim_lev) {
      throw ContractError("assign_poi_ids on an unscored candidate");
    }
    MatchedPoi row{next_id++, {}};
    row.values.reserve(table.columns.size());
    row.values.insert(row.values.end(),
                      std::make_move_iterator(m.fsq.values.begin()),
                      std::make_move_iterator(m.fsq.values.end()));
    row.values.insert(row.values.end(),
                      std::make_move_iterator(m.osm.values.begin()),
                      std::make_move_iterator(m.osm.values.end()));
    row.values.push_back(format_double(m.sim_trg->value()));
    row.values.push_back(format_double(m.sim_lev->value()));
    row.values.push_back(format_double(m.distance_deg));
    if (emit_distance_m) row.values.push_back(format_double(m.distance_m));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace poiconf
