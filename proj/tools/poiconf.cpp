// poiconf: merge two point-of-interest CSV sources by spatial proximity and
// name similarity, and build kNN proximity graphs over the result.
//
// Exit codes: 0 success, 1 I/O or data errors, 2 bad flags/config.
// Diagnostics go to stderr; data only to files (stats prints to stdout).

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "poiconf/commands.hpp"

namespace {

struct CliState {
  poiconf::ConflateOptions conflate;
  poiconf::GraphOptions graph;
  std::string stats_matches;

  std::string conflate_fsq, conflate_osm, conflate_out, conflate_manifest;
  std::string graph_matches, graph_out, graph_manifest;
};

void add_conflate(CLI::App& app, CliState& state) {
  auto* sub = app.add_subcommand(
      "conflate", "Join two POI sources within a radius, score name "
                  "similarity, filter and export the matched table");
  sub->add_option("--fsq", state.conflate_fsq,
                  "Foursquare-side input CSV")->required();
  sub->add_option("--osm", state.conflate_osm, "OSM-side input CSV")
      ->required();
  sub->add_option("--out", state.conflate_out, "Output matched-table CSV")
      ->required();

  auto& cfg = state.conflate.config;
  sub->add_option("--radius-m", cfg.radius_m,
                  "Join radius in meters (default 50)");
  sub->add_option("--threshold", cfg.threshold,
                  "Similarity threshold in [0,1] (default 0.5)");
  sub->add_option("--metric", cfg.filter_metric,
                  "Filter metric: lev|trg|both|either (default lev)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, poiconf::FilterMetric>{
              {"lev", poiconf::FilterMetric::kLevenshtein},
              {"trg", poiconf::FilterMetric::kTrigram},
              {"both", poiconf::FilterMetric::kBoth},
              {"either", poiconf::FilterMetric::kEither}},
          CLI::ignore_case));
  sub->add_option("--cmp", cfg.comparator,
                  "Threshold comparison: ge|gt (default ge)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, poiconf::Comparator>{
              {"ge", poiconf::Comparator::kAtLeast},
              {"gt", poiconf::Comparator::kGreaterThan}},
          CLI::ignore_case));
  sub->add_option("--join-mode", cfg.join_mode,
                  "all: every OSM record in radius; nearest: closest only "
                  "(default all)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, poiconf::JoinMode>{
              {"all", poiconf::JoinMode::kAllWithinRadius},
              {"nearest", poiconf::JoinMode::kNearestOnly}},
          CLI::ignore_case));
  sub->add_option("--threads", cfg.threads,
                  "Worker threads (default: all cores); output is identical "
                  "for any value");
  sub->add_flag("--emit-distance-m", cfg.emit_distance_m,
                "Append a fsq_osm_distance_m column (meters)");
  sub->add_option("--manifest", state.conflate_manifest,
                  "Write a JSON run manifest to this path");
}

void add_graph(CLI::App& app, CliState& state) {
  auto* sub = app.add_subcommand(
      "graph", "Build the k-nearest-neighbor edge list over a matched table");
  sub->add_option("--matches", state.graph_matches,
                  "Matched-table CSV from `conflate`")->required();
  sub->add_option("--out", state.graph_out, "Output edge-list CSV")
      ->required();
  sub->add_option("--k", state.graph.k,
                  "Neighbors per node (default 10)");
  sub->add_option("--manifest", state.graph_manifest,
                  "Write a JSON run manifest to this path");
}

void add_stats(CLI::App& app, CliState& state) {
  auto* sub = app.add_subcommand(
      "stats", "Print score histograms, distance percentiles and duplicate "
               "counts for a matched table");
  sub->add_option("--matches", state.stats_matches,
                  "Matched-table CSV from `conflate`")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POI conflation engine"};
  app.require_subcommand(1);
  CliState state;
  add_conflate(app, state);
  add_graph(app, state);
  add_stats(app, state);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("conflate")) {
      state.conflate.fsq_path = state.conflate_fsq;
      state.conflate.osm_path = state.conflate_osm;
      state.conflate.out_path = state.conflate_out;
      if (!state.conflate_manifest.empty()) {
        state.conflate.manifest_path = state.conflate_manifest;
      }
      const auto report = poiconf::run_conflate(state.conflate);
      std::cerr << "conflate: " << report.rows_written << " matches from "
                << report.candidates << " candidates ("
                << report.fsq_counts.yielded << " fsq x "
                << report.osm_counts.yielded << " osm records)\n";
    } else if (app.got_subcommand("graph")) {
      state.graph.matches_path = state.graph_matches;
      state.graph.out_path = state.graph_out;
      if (!state.graph_manifest.empty()) {
        state.graph.manifest_path = state.graph_manifest;
      }
      const auto report = poiconf::run_graph(state.graph);
      std::cerr << "graph: " << report.edges_written << " edges over "
                << report.nodes << " nodes\n";
    } else if (app.got_subcommand("stats")) {
      const auto report = poiconf::compute_stats(state.stats_matches);
      poiconf::print_stats(report, std::cout);
    }
  } catch (const poiconf::ConfigError& e) {
    std::cerr << "poiconf: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "poiconf: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
