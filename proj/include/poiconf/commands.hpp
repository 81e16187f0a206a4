#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poiconf/conflate.hpp"
#include "poiconf/grid_index.hpp"
#include "poiconf/ingest.hpp"
#include "poiconf/knn_graph.hpp"
#include "poiconf/manifest.hpp"
#include "poiconf/table_io.hpp"

namespace poiconf {

inline const char* to_string(JoinMode m) {
  return m == JoinMode::kAllWithinRadius ? "all" : "nearest";
}

inline const char* to_string(FilterMetric m) {
  switch (m) {
    case FilterMetric::kLevenshtein: return "lev";
    case FilterMetric::kTrigram: return "trg";
    case FilterMetric::kBoth: return "both";
    case FilterMetric::kEither: return "either";
  }
  return "?";
}

inline const char* to_string(Comparator c) {
  return c == Comparator::kAtLeast ? "ge" : "gt";
}

inline nlohmann::json config_snapshot(const ConflationConfig& cfg) {
  return {{"radius_m", cfg.radius_m},
          {"join_mode", to_string(cfg.join_mode)},
          {"metric", to_string(cfg.filter_metric)},
          {"threshold", cfg.threshold},
          {"comparator", to_string(cfg.comparator)},
          {"k", cfg.k},
          {"threads", cfg.threads},
          {"emit_distance_m", cfg.emit_distance_m}};
}

struct ConflateOptions {
  std::filesystem::path fsq_path;
  std::filesystem::path osm_path;
  std::filesystem::path out_path;
  std::optional<std::filesystem::path> manifest_path;
  ConflationConfig config;
};

struct ConflateReport {
  std::size_t rows_written = 0;
  std::size_t candidates = 0;
  IngestCounts fsq_counts;
  IngestCounts osm_counts;
  RunManifest manifest;
};

namespace detail {

// Join + score + filter one contiguous slice of the block. Results append
// in slice order, so output never depends on how slices are scheduled.
inline void conflate_slice(const std::vector<PoiRecord>& block,
                           std::size_t lo, std::size_t hi,
                           const std::vector<PoiRecord>& osm_records,
                           const GridIndex& index,
                           const ConflationConfig& cfg,
                           std::vector<MatchCandidate>& kept,
                           std::size_t& candidates) {
  for (std::size_t i = lo; i < hi; ++i) {
    auto found = join_candidates(block[i], osm_records, index, cfg);
    candidates += found.size();
    for (auto& c : found) {
      score_candidate(c);
      if (passes_filter(c, cfg)) kept.push_back(std::move(c));
    }
  }
}

}  // namespace detail

/// The whole pipeline: read both sources, index the OSM side, join within
/// the radius, score names, filter, number the survivors and write the
/// matched table (plus the manifest when requested). Join and scoring fan
/// out over cfg.threads workers on contiguous shards; output is
/// byte-identical for any worker count.
inline ConflateReport run_conflate(const ConflateOptions& opts) {
  opts.config.validate();
  const ConflationConfig& cfg = opts.config;
  const unsigned threads = std::max(
      1u, cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency());

  ConflateReport report;
  Stopwatch watch;

  SourceFilter osm_filter;
  osm_filter.exclude_class = "highway";
  PoiCsvReader osm_reader(opts.osm_path, SourceSchema::osm(), osm_filter);
  std::vector<PoiRecord> osm_records;
  while (auto rec = osm_reader.next()) osm_records.push_back(std::move(*rec));
  report.manifest.timing_ms["read_osm"] = watch.lap_ms();

  std::vector<std::pair<std::size_t, GeoPoint>> osm_points;
  osm_points.reserve(osm_records.size());
  for (std::size_t i = 0; i < osm_records.size(); ++i) {
    osm_points.emplace_back(i, osm_records[i].point);
  }
  const GridIndex osm_index(osm_points, cfg.radius_m);
  report.manifest.timing_ms["build_index"] = watch.lap_ms();

  PoiCsvReader fsq_reader(opts.fsq_path, SourceSchema::foursquare());
  std::vector<MatchCandidate> kept;
  const std::size_t block_size = std::max<std::size_t>(1024, 512 * threads);
  std::vector<PoiRecord> block;
  block.reserve(block_size);
  bool exhausted = false;
  while (!exhausted) {
    block.clear();
    while (block.size() < block_size) {
      auto rec = fsq_reader.next();
      if (!rec) {
        exhausted = true;
        break;
      }
      block.push_back(std::move(*rec));
    }
    if (block.empty()) break;

    const std::size_t workers =
        std::min<std::size_t>(threads, block.size());
    std::vector<std::vector<MatchCandidate>> slices(workers);
    std::vector<std::size_t> tallies(workers, 0);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::size_t per = (block.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * per;
      const std::size_t hi = std::min(block.size(), lo + per);
      pool.emplace_back([&, w, lo, hi] {
        try {
          detail::conflate_slice(block, lo, hi, osm_records, osm_index, cfg,
                                 slices[w], tallies[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
    for (std::size_t w = 0; w < workers; ++w) {
      report.candidates += tallies[w];
      kept.insert(kept.end(), std::make_move_iterator(slices[w].begin()),
                  std::make_move_iterator(slices[w].end()));
    }
  }
  report.manifest.timing_ms["join_score_filter"] = watch.lap_ms();

  MatchTable table =
      assign_poi_ids(std::move(kept), fsq_reader.columns(),
                     osm_reader.columns(), cfg.emit_distance_m);
  report.manifest.timing_ms["assign_ids"] = watch.lap_ms();

  report.rows_written = write_matches_csv(opts.out_path, table);
  report.manifest.timing_ms["write"] = watch.lap_ms();

  report.fsq_counts = fsq_reader.counts();
  report.osm_counts = osm_reader.counts();

  RunManifest& manifest = report.manifest;
  manifest.command = "conflate";
  manifest.config = config_snapshot(cfg);
  manifest.add_input(opts.fsq_path, report.fsq_counts);
  manifest.add_input(opts.osm_path, report.osm_counts);
  manifest.add_output(opts.out_path, report.rows_written);
  manifest.counts = {{"osm_indexed", osm_records.size()},
                     {"candidates", report.candidates},
                     {"matched", report.rows_written}};
  manifest.created = RunManifest::now_utc();
  if (opts.manifest_path) manifest.write(*opts.manifest_path);
  return report;
}

struct GraphOptions {
  std::filesystem::path matches_path;
  std::filesystem::path out_path;
  std::optional<std::filesystem::path> manifest_path;
  std::size_t k = 10;
};

struct GraphReport {
  std::size_t rows_read = 0;
  std::size_t nodes = 0;
  std::size_t edges_written = 0;
  RunManifest manifest;
};

/// Reads a matched table, collapses rows to one node per fsq_place_id and
/// writes the directed kNN edge list.
inline GraphReport run_graph(const GraphOptions& opts) {
  if (opts.k < 1) throw ConfigError("--k must be at least 1");

  GraphReport report;
  Stopwatch watch;

  MatchesCsvReader reader(opts.matches_path);
  std::vector<std::pair<std::string, GeoPoint>> rows;
  while (auto row = reader.next()) {
    rows.emplace_back(std::move(row->fsq_place_id), row->fsq_point);
  }
  report.rows_read = rows.size();
  report.manifest.timing_ms["read_matches"] = watch.lap_ms();

  std::vector<GraphNode> nodes = dedupe_nodes(rows);
  report.nodes = nodes.size();
  const std::vector<GraphEdge> edges = build_knn_graph(std::move(nodes), opts.k);
  report.manifest.timing_ms["build_graph"] = watch.lap_ms();

  report.edges_written = write_edges_csv(opts.out_path, edges);
  report.manifest.timing_ms["write"] = watch.lap_ms();

  RunManifest& manifest = report.manifest;
  manifest.command = "graph";
  manifest.config = {{"k", opts.k}};
  IngestCounts counts;
  counts.rows_read = report.rows_read;
  counts.yielded = report.rows_read;
  manifest.add_input(opts.matches_path, counts);
  manifest.add_output(opts.out_path, report.edges_written);
  manifest.counts = {{"rows", report.rows_read},
                     {"nodes", report.nodes},
                     {"edges", report.edges_written}};
  manifest.created = RunManifest::now_utc();
  if (opts.manifest_path) manifest.write(*opts.manifest_path);
  return report;
}

struct StatsReport {
  std::size_t rows = 0;
  std::array<std::size_t, 10> trg_histogram{};
  std::array<std::size_t, 10> lev_histogram{};
  std::map<std::string, double> distance_percentiles;
  std::size_t duplicate_fsq_ids = 0;
};

/// Row count, 10-bin score histograms, distance percentiles and the number
/// of fsq ids that occur on more than one row.
inline StatsReport compute_stats(const std::filesystem::path& matches_path) {
  MatchesCsvReader reader(matches_path);
  if (!reader.has_scores()) {
    throw SchemaError("matches file lacks the similarity/distance columns: " +
                      matches_path.string());
  }

  StatsReport report;
  std::vector<double> distances;
  std::unordered_map<std::string, std::size_t> id_counts;
  auto bin_of = [](double v) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return std::min<std::size_t>(9, static_cast<std::size_t>(clamped * 10.0));
  };
  while (auto row = reader.next()) {
    ++report.rows;
    ++report.trg_histogram[bin_of(*row->sim_trg)];
    ++report.lev_histogram[bin_of(*row->sim_lev)];
    distances.push_back(*row->distance_deg);
    ++id_counts[row->fsq_place_id];
  }
  for (const auto& [id, n] : id_counts) {
    if (n > 1) ++report.duplicate_fsq_ids;
  }

  std::sort(distances.begin(), distances.end());
  auto percentile = [&](double q) {
    if (distances.empty()) return 0.0;
    const double rank = q / 100.0 * static_cast<double>(distances.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil(rank));
    idx = std::min(std::max<std::size_t>(idx, 1), distances.size());
    return distances[idx - 1];
  };
  report.distance_percentiles = {
      {"p00_min", distances.empty() ? 0.0 : distances.front()},
      {"p25", percentile(25)},
      {"p50", percentile(50)},
      {"p75", percentile(75)},
      {"p90", percentile(90)},
      {"p99", percentile(99)},
      {"p100_max", distances.empty() ? 0.0 : distances.back()}};
  return report;
}

inline void print_stats(const StatsReport& report, std::ostream& out) {
  out << "rows: " << report.rows << '\n';
  out << "duplicate_fsq_ids: " << report.duplicate_fsq_ids << '\n';
  auto histogram = [&](const char* name,
                       const std::array<std::size_t, 10>& bins) {
    out << name << " histogram (bin width 0.1):\n";
    char label[32];
    for (std::size_t i = 0; i < bins.size(); ++i) {
      std::snprintf(label, sizeof(label), "[%.1f, %.1f%c", i / 10.0,
                    (i + 1) / 10.0, i == 9 ? ']' : ')');
      out << "  " << label << " " << bins[i] << '\n';
    }
  };
  histogram("trigram score", report.trg_histogram);
  histogram("levenshtein score", report.lev_histogram);
  out << "distance_deg percentiles:\n";
  for (const auto& [name, value] : report.distance_percentiles) {
    out << "  " << name << ": " << format_double(value) << '\n';
  }
}

}  // namespace poiconf
