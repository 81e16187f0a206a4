// Acceptance suite. Runs every criterion, prints exactly one PASS/FAIL
// line per criterion and exits nonzero if any failed. Usage:
//   acceptance <path-to-poiconf-binary>
#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "poiconf/commands.hpp"
#include "poiconf/geo.hpp"
#include "poiconf/grid_index.hpp"
#include "poiconf/knn_graph.hpp"
#include "poiconf/similarity.hpp"
#include "poiconf/table_io.hpp"

#include "fixture.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using namespace poiconf;
using namespace poiconf::testing;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define CHECK(cond, detail)                                              \
  do {                                                                   \
    if (!(cond)) {                                                       \
      std::ostringstream oss;                                            \
      oss << "line " << __LINE__ << ": " << #cond << " | " << detail;    \
      throw CheckFailure(oss.str());                                     \
    }                                                                    \
  } while (0)

std::string g_cli_path;

// ---- shared fixture state (generated once, used by several criteria) ----

struct PipelineArtifacts {
  TempDir dir{"acceptance"};
  Fixture fixture;
  std::filesystem::path fsq_csv, osm_csv, matches_csv, edges_csv;
  MatchTable table;  // in-memory result of the default-config run

  PipelineArtifacts() : fixture(make_fixture()) {
    fsq_csv = dir.file("fsq.csv");
    osm_csv = dir.file("osm.csv");
    matches_csv = dir.file("matches.csv");
    edges_csv = dir.file("edges.csv");
    fixture.write_fsq_csv(fsq_csv);
    fixture.write_osm_csv(osm_csv);
  }
};

PipelineArtifacts* g_arts = nullptr;

// Reads (poi_id, fsq_place_id, osm_id) triples back from a matched table.
struct MatchedTriple {
  std::uint64_t poi_id;
  std::string fsq_id;
  std::string osm_id;
};

std::vector<MatchedTriple> read_match_triples(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  CHECK(in.good(), "open " << path);
  CsvReader reader(in);
  std::vector<std::string> fields;
  CHECK(reader.next(fields), "header in " << path);
  std::size_t poi_idx = fields.size(), fsq_idx = fields.size(),
              osm_idx = fields.size();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "poi_id") poi_idx = i;
    if (fields[i] == "fsq_place_id") fsq_idx = i;
    if (fields[i] == "osm_id") osm_idx = i;
  }
  CHECK(poi_idx < fields.size() && fsq_idx < fields.size() &&
            osm_idx < fields.size(),
        "id columns present in " << path);
  std::vector<MatchedTriple> out;
  while (reader.next(fields)) {
    out.push_back({std::stoull(fields[poi_idx]), fields[fsq_idx],
                   fields[osm_idx]});
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = g_cli_path + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---- criteria ----

// Stored pair distance in degrees, reproduced from the same coordinates.
void criterion1_degree_distance_fixed_point() {
  const GeoPoint fsq(33.768107, -84.34941113);
  const GeoPoint osm(33.7680684, -84.3494503);
  const double d = degree_distance(fsq, osm);
  CHECK(std::abs(d - 5.499317e-05) <= 1e-9, "got " << format_double(d));
}

// Great-circle calibration plus metric sanity over random pairs.
void criterion2_great_circle_calibration() {
  const double one_degree = haversine_m(GeoPoint(0, 0), GeoPoint(0, 1));
  CHECK(std::abs(one_degree - 111194.93) <= 0.01, "got " << one_degree);

  std::mt19937 rng(26000);
  std::uniform_real_distribution<double> lat(-89.9, 89.9);
  std::uniform_real_distribution<double> lon(-179.9, 179.9);
  for (int i = 0; i < 10000; ++i) {
    const GeoPoint a(lat(rng), lon(rng));
    const GeoPoint b(lat(rng), lon(rng));
    const double ab = haversine_m(a, b);
    const double ba = haversine_m(b, a);
    CHECK(ab == ba, "symmetry at i=" << i);
    CHECK(haversine_m(a, a) == 0.0, "zero on equal at i=" << i);
  }
}

// Production text metrics against their independent oracles.
void criterion3_similarity_oracles() {
  std::mt19937 rng(35000);
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> ch(0, 3);
  for (int i = 0; i < 5000; ++i) {
    std::string a, b;
    for (int n = len(rng); n > 0; --n) a.push_back(static_cast<char>('a' + ch(rng)));
    for (int n = len(rng); n > 0; --n) b.push_back(static_cast<char>('a' + ch(rng)));
    const std::size_t got = levenshtein_distance(a, b);
    const std::size_t want = naive_levenshtein(a, b);
    CHECK(got == want, '"' << a << "\" vs \"" << b << "\": " << got
                           << " != " << want);
  }

  std::uniform_int_distribution<int> wlen(0, 12);
  std::uniform_int_distribution<int> wch(0, 25);
  std::uniform_int_distribution<int> words(1, 3);
  auto gen_words = [&]() {
    std::string s;
    const int w = words(rng);
    for (int k = 0; k < w; ++k) {
      if (k) s.push_back(' ');
      for (int n = wlen(rng); n > 0; --n) {
        s.push_back(static_cast<char>('a' + wch(rng)));
      }
    }
    return s;
  };
  for (int i = 0; i < 1000; ++i) {
    const std::string a = gen_words();
    const std::string b = gen_words();
    const double got = trigram_similarity(a, b).value();
    const double want =
        oracle_trigram_similarity(normalize_name(a), normalize_name(b));
    CHECK(got == want, '"' << a << "\" vs \"" << b << "\": " << got
                           << " != " << want);
  }
}

// Grid index vs brute force on random instances, with polar clusters.
void criterion4_spatial_exactness() {
  std::mt19937 rng(45000);
  std::uniform_real_distribution<double> any_lat(-60.0, 60.0);
  std::uniform_real_distribution<double> any_lon(-170.0, 170.0);
  std::uniform_int_distribution<int> count(1, 1000);
  std::uniform_real_distribution<double> radius(20.0, 3000.0);
  std::uniform_real_distribution<double> spread(0.002, 0.05);

  for (int inst = 0; inst < 50; ++inst) {
    const bool polar = inst % 5 == 4;
    const double clat = polar ? 70.0 : any_lat(rng);
    const double clon = polar ? -45.0 : any_lon(rng);
    const double s = spread(rng);
    std::uniform_real_distribution<double> dlat(clat - s, clat + s);
    std::uniform_real_distribution<double> dlon(clon - s, clon + s);

    const int n = count(rng);
    std::vector<GeoPoint> pts;
    std::vector<std::pair<std::size_t, GeoPoint>> numbered;
    for (int i = 0; i < n; ++i) {
      pts.emplace_back(dlat(rng), dlon(rng));
      numbered.emplace_back(static_cast<std::size_t>(i), pts.back());
    }
    const double r = radius(rng);
    const GridIndex index(numbered, r);

    for (int q = 0; q < 100; ++q) {
      const GeoPoint query(dlat(rng), dlon(rng));
      const auto got_r = index.radius_query(query, r);
      const auto want_r = brute_radius(pts, query, r);
      CHECK(got_r.size() == want_r.size(),
            "radius size, instance " << inst << " query " << q);
      for (std::size_t i = 0; i < got_r.size(); ++i) {
        CHECK(got_r[i].ordinal == want_r[i].ordinal &&
                  got_r[i].distance_m == want_r[i].distance_m,
              "radius mismatch at " << i << ", instance " << inst);
      }
      const auto got_k = index.knn_query(query, 10);
      const auto want_k = brute_knn(pts, query, 10);
      CHECK(got_k.size() == want_k.size(),
            "knn size, instance " << inst << " query " << q);
      for (std::size_t i = 0; i < got_k.size(); ++i) {
        CHECK(got_k[i].ordinal == want_k[i].ordinal &&
                  got_k[i].distance_m == want_k[i].distance_m,
              "knn mismatch at " << i << ", instance " << inst);
      }
    }
  }
}

// Default-config pipeline on the planted fixture: exact recovery.
void criterion5_pipeline_oracle() {
  ConflateOptions opts;
  opts.fsq_path = g_arts->fsq_csv;
  opts.osm_path = g_arts->osm_csv;
  opts.out_path = g_arts->matches_csv;
  const auto report = run_conflate(opts);
  CHECK(report.rows_written == 80, "rows " << report.rows_written);

  const auto triples = read_match_triples(g_arts->matches_csv);
  std::set<std::pair<std::string, std::string>> got;
  std::set<std::uint64_t> ids;
  for (const auto& t : triples) {
    got.emplace(t.fsq_id, t.osm_id);
    ids.insert(t.poi_id);
  }
  CHECK(got == g_arts->fixture.true_pairs,
        "recovered " << got.size() << " pairs, planted "
                     << g_arts->fixture.true_pairs.size()
                     << " (precision or recall below 1)");
  CHECK(ids.size() == 80 && *ids.begin() == 1 && *ids.rbegin() == 80,
        "poi_id not a gap-free 1..80");
}

// Non-increasing match sets as the threshold rises.
void criterion6_threshold_monotonicity() {
  std::vector<std::set<std::pair<std::string, std::string>>> kept;
  for (const double t : {0.3, 0.5, 0.7, 0.9}) {
    ConflateOptions opts;
    opts.fsq_path = g_arts->fsq_csv;
    opts.osm_path = g_arts->osm_csv;
    opts.out_path = g_arts->dir.file("thr.csv");
    opts.config.threshold = t;
    run_conflate(opts);
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& tr : read_match_triples(opts.out_path)) {
      pairs.emplace(tr.fsq_id, tr.osm_id);
    }
    kept.push_back(std::move(pairs));
  }
  for (std::size_t i = 1; i < kept.size(); ++i) {
    CHECK(kept[i].size() <= kept[i - 1].size(),
          "count grew from threshold step " << i);
    CHECK(std::includes(kept[i - 1].begin(), kept[i - 1].end(),
                        kept[i].begin(), kept[i].end()),
          "kept set at step " << i << " is not a subset");
  }
}

// Graph contract on the fixture's matches.
void criterion7_graph_contract() {
  // Node set from the matched table.
  MatchesCsvReader reader(g_arts->matches_csv);
  std::vector<std::pair<std::string, GeoPoint>> rows;
  while (auto row = reader.next()) {
    rows.emplace_back(row->fsq_place_id, row->fsq_point);
  }
  auto nodes = dedupe_nodes(rows);
  const std::size_t n = nodes.size();
  const std::size_t k = 10;
  const auto edges = build_knn_graph(nodes, k);

  std::sort(nodes.begin(), nodes.end(),
            [](const GraphNode& a, const GraphNode& b) {
              return a.fsq_place_id < b.fsq_place_id;
            });
  std::map<std::string, GeoPoint> coord;
  std::vector<GeoPoint> pts;
  for (const auto& node : nodes) {
    coord.emplace(node.fsq_place_id, node.point);
    pts.push_back(node.point);
  }

  // Degree bound, stored distances, oracle equality.
  std::map<std::string, std::size_t> degree;
  for (const auto& e : edges) {
    ++degree[e.source];
    const double re = haversine_m(coord.at(e.source), coord.at(e.destination));
    CHECK(std::abs(e.distance_m - re) <= 1e-6 * std::max(1.0, re),
          "distance drift on " << e.source << "->" << e.destination);
  }
  CHECK(degree.size() == n, "every node has out-edges");
  for (const auto& [id, deg] : degree) {
    CHECK(deg == std::min(k, n - 1), id << " degree " << deg);
  }

  std::vector<GraphEdge> expected;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const auto& nb : brute_knn(pts, pts[i], k, i)) {
      expected.push_back({nodes[i].fsq_place_id,
                          nodes[nb.ordinal].fsq_place_id, nb.distance_m});
    }
  }
  CHECK(edges == expected, "edge list differs from brute-force oracle");

  // Byte-exact header and 2-decimal distances in the written file.
  write_edges_csv(g_arts->edges_csv, edges);
  std::ifstream in(g_arts->edges_csv, std::ios::binary);
  std::string line;
  std::getline(in, line);
  CHECK(line == "fsq_place_id_source,fsq_place_id_destination,distance_m",
        "header was '" << line << "'");
  std::size_t data_lines = 0;
  while (std::getline(in, line)) {
    ++data_lines;
    const auto dot = line.rfind('.');
    CHECK(dot != std::string::npos && line.size() == dot + 3,
          "not 2-decimal: '" << line << "'");
  }
  CHECK(data_lines == edges.size(), "row count " << data_lines);
}

// Byte-identical outputs across reruns and thread counts, via the binary.
void criterion8_determinism() {
  TempDir dir("accept_det");
  auto conflate = [&](const std::string& tag, int threads) {
    const auto out = dir.file(tag + ".csv");
    const int code = run_cli("conflate --fsq " + g_arts->fsq_csv.string() +
                             " --osm " + g_arts->osm_csv.string() + " --out " +
                             out.string() + " --threads " +
                             std::to_string(threads));
    CHECK(code == 0, "conflate exit " << code);
    return read_file(out);
  };
  const std::string a = conflate("a", 1);
  const std::string b = conflate("b", 1);
  const std::string c = conflate("c", 8);
  CHECK(a == b, "rerun differs");
  CHECK(a == c, "--threads 8 differs from --threads 1");

  write_file(dir.file("m.csv"), a);
  auto graph = [&](const std::string& tag) {
    const auto out = dir.file(tag + ".edges.csv");
    const int code = run_cli("graph --matches " + dir.file("m.csv").string() +
                             " --out " + out.string() + " --k 10");
    CHECK(code == 0, "graph exit " << code);
    return read_file(out);
  };
  CHECK(graph("g1") == graph("g2"), "graph rerun differs");
}

// One fsq id matched to two OSM records: two rows, one node.
void criterion9_duplicate_semantics() {
  const std::string& dup = g_arts->fixture.duplicated_fsq_id;
  CHECK(!dup.empty(), "fixture plants a duplicated fsq id");

  std::vector<std::uint64_t> dup_ids;
  std::set<std::string> distinct_fsq;
  for (const auto& t : read_match_triples(g_arts->matches_csv)) {
    distinct_fsq.insert(t.fsq_id);
    if (t.fsq_id == dup) dup_ids.push_back(t.poi_id);
  }
  CHECK(dup_ids.size() == 2, "expected 2 rows for " << dup << ", got "
                                                    << dup_ids.size());
  CHECK(dup_ids[0] != dup_ids[1], "poi_ids must differ");

  // The graph written by criterion 7 holds one node per distinct fsq id:
  // the duplicated id has exactly one node's worth of out-edges.
  std::ifstream in(g_arts->edges_csv, std::ios::binary);
  std::string line;
  std::getline(in, line);
  std::size_t dup_out_degree = 0;
  std::set<std::string> sources;
  while (std::getline(in, line)) {
    const std::string source = line.substr(0, line.find(','));
    sources.insert(source);
    if (source == dup) ++dup_out_degree;
  }
  CHECK(sources.size() == distinct_fsq.size(),
        "node count " << sources.size() << " vs distinct ids "
                      << distinct_fsq.size());
  CHECK(dup_out_degree == std::min<std::size_t>(10, distinct_fsq.size() - 1),
        "duplicated id out-degree " << dup_out_degree);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-poiconf-binary>\n";
    return 2;
  }
  g_cli_path = argv[1];

  PipelineArtifacts arts;
  g_arts = &arts;

  struct Criterion {
    int id;
    const char* name;
    std::function<void()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "degree-distance fixed point", criterion1_degree_distance_fixed_point},
      {2, "great-circle calibration", criterion2_great_circle_calibration},
      {3, "similarity metrics equal oracles", criterion3_similarity_oracles},
      {4, "spatial queries equal brute force", criterion4_spatial_exactness},
      {5, "pipeline recovers planted pairs exactly", criterion5_pipeline_oracle},
      {6, "threshold monotonicity", criterion6_threshold_monotonicity},
      {7, "kNN graph contract", criterion7_graph_contract},
      {8, "byte-identical reruns and thread counts", criterion8_determinism},
      {9, "duplicate fsq id: two rows, one node", criterion9_duplicate_semantics},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criterion.body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (error.empty()) {
      std::cout << "[C" << criterion.id << "] PASS " << criterion.name << " ("
                << ms << " ms)\n";
    } else {
      ++failures;
      std::cout << "[C" << criterion.id << "] FAIL " << criterion.name << " ("
                << ms << " ms): " << error << '\n';
    }
  }
  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all " << criteria.size() << " criteria passed\n";
  return 0;
}
