// Synthetic two-source fixture with planted ground truth:
//   - 80 true pairs (offsets < 50 m, name edits keeping lev >= 0.5), two of
//     which share one fsq id so duplicate semantics are exercised,
//   - 40 near misses (same name, offsets 60-200 m),
//   - 40 name mismatches (offsets < 50 m, lev < 0.5),
//   - singletons filling both sources up to 200 records each.
// Sites sit on a grid with >= ~480 m spacing, so no cross-site pair can
// enter a 50 m join. Every planted property is verified at generation time
// with independent checks (full-matrix edit distance, vector great-circle),
// not with the library code under test.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "poiconf/csv.hpp"
#include "poiconf/geo.hpp"
#include "oracles.hpp"

namespace poiconf::testing {

struct FixturePoi {
  std::string id;
  std::string name;
  double lat;
  double lon;
};

struct Fixture {
  std::vector<FixturePoi> fsq;
  std::vector<FixturePoi> osm;
  std::set<std::pair<std::string, std::string>> true_pairs;
  std::string duplicated_fsq_id;

  void write_fsq_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    CsvWriter writer(out);
    writer.write_record(std::vector<std::string>{
        "fsq_place_id", "fsq_name", "fsq_latitude", "fsq_longitude",
        "fsq_address"});
    for (const auto& p : fsq) {
      writer.write_record(std::vector<std::string>{
          p.id, p.name, format_double(p.lat), format_double(p.lon),
          "Street " + p.id});
    }
  }

  void write_osm_csv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    CsvWriter writer(out);
    writer.write_record(std::vector<std::string>{
        "osm_id", "osm_name", "osm_class", "osm_latitude", "osm_longitude",
        "osm_extratags"});
    for (const auto& p : osm) {
      writer.write_record(std::vector<std::string>{
          p.id, p.name, "shop", format_double(p.lat), format_double(p.lon),
          "\"source\"=>\"fixture\""});
    }
  }
};

namespace fixture_detail {

// Independent verification pieces: plain full-matrix edit distance over
// ASCII-lowercased bytes (fixture names are ASCII by construction).
inline std::string ascii_lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return s;
}

inline std::size_t matrix_edit_distance(const std::string& a,
                                        const std::string& b) {
  std::vector<std::vector<std::size_t>> dp(
      a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 0; i <= a.size(); ++i) dp[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) dp[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst =
          dp[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      dp[i][j] = std::min({subst, dp[i - 1][j] + 1, dp[i][j - 1] + 1});
    }
  }
  return dp[a.size()][b.size()];
}

inline double check_lev(const std::string& a, const std::string& b) {
  const std::string la = ascii_lower(a);
  const std::string lb = ascii_lower(b);
  const std::size_t longest = std::max(la.size(), lb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(matrix_edit_distance(la, lb)) /
                   static_cast<double>(longest);
}

// Deterministic fraction in [0, 1) straight from the engine, bypassing
// distributions whose output is not pinned by the standard.
inline double frac(std::mt19937& rng) {
  return static_cast<double>(rng()) / 4294967296.0;
}

inline double range(std::mt19937& rng, double lo, double hi) {
  return lo + (hi - lo) * frac(rng);
}

inline std::size_t pick(std::mt19937& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

inline std::string make_name(std::mt19937& rng) {
  static const std::array<const char*, 16> first{
      "North", "Harbor", "Polar",  "Blue",   "Old Town", "Fjord",
      "Granite", "Summit", "Coastal", "Aurora", "Iceberg", "Juniper",
      "Kestrel", "Lantern", "Meridian", "Drift"};
  static const std::array<const char*, 14> second{
      "Bakery",  "Market",   "Hostel",  "Cinema",  "Pharmacy", "Grill",
      "Books",   "Hardware", "Kiosk",   "Brewery", "Gallery",  "Diner",
      "Outfitters", "Laundry"};
  return std::string(first[pick(rng, first.size())]) + " " +
         second[pick(rng, second.size())] + " " +
         std::to_string(1 + pick(rng, 97));
}

// A small edit of `name` that stays clearly above the 0.5 similarity line.
inline std::string edit_name(std::mt19937& rng, const std::string& name) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    std::string edited = name;
    switch (pick(rng, 5)) {
      case 0:
        break;  // identical
      case 1:   // shout the first word
        for (char& c : edited) {
          if (c == ' ') break;
          if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
        }
        break;
      case 2:  // drop one interior character
        edited.erase(1 + pick(rng, edited.size() - 2), 1);
        break;
      case 3:  // swap two adjacent characters
      {
        const std::size_t i = 1 + pick(rng, edited.size() - 3);
        std::swap(edited[i], edited[i + 1]);
        break;
      }
      default:  // append a branch token
        edited += " II";
        break;
    }
    if (check_lev(name, edited) >= 0.6) return edited;
  }
  throw std::logic_error("fixture: could not derive a similar name");
}

inline std::string mismatch_name(std::mt19937& rng, const std::string& name) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const std::string other = make_name(rng);
    if (check_lev(name, other) < 0.45) return other;
  }
  throw std::logic_error("fixture: could not derive a dissimilar name");
}

}  // namespace fixture_detail

inline Fixture make_fixture(std::uint32_t seed = 20250807) {
  using namespace fixture_detail;
  std::mt19937 rng(seed);

  constexpr int kTruePairs = 80;       // over 79 fsq records (one dup)
  constexpr int kNearMisses = 40;
  constexpr int kMismatches = 40;
  constexpr int kFsqSingles = 41;
  constexpr int kOsmSingles = 40;
  constexpr double kBaseLat = 64.0;
  constexpr double kBaseLon = -51.0;
  constexpr double kLatStep = 0.005;  // ~556 m
  constexpr double kLonStep = 0.010;  // ~487 m at 64 degrees

  Fixture fx;
  int next_site = 0;
  auto site_center = [&](int site) {
    return GeoPoint(kBaseLat + kLatStep * (site / 20),
                    kBaseLon + kLonStep * (site % 20));
  };
  auto jitter = [&](const GeoPoint& center, double min_m, double max_m) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double r = range(rng, min_m, max_m);
      const double theta = range(rng, 0.0, 2.0 * kPi);
      const GeoPoint p =
          offset_m(center, r * std::cos(theta), r * std::sin(theta));
      const double d = oracle_great_circle_m(center, p);
      if (d >= min_m && d <= max_m) return p;
    }
    throw std::logic_error("fixture: offset out of tolerance");
  };
  int fsq_seq = 0, osm_seq = 0;
  auto fsq_id = [&]() {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "f%04x", 0x1000 + fsq_seq++);
    return std::string(buf);
  };
  auto osm_id = [&]() { return std::to_string(900000000 + osm_seq++); };

  // True pairs: fsq record + nearby osm record with a similar name. The
  // first fsq record gets a second osm partner at the same site.
  for (int i = 0; i < kTruePairs - 1; ++i) {
    const GeoPoint center = site_center(next_site++);
    const std::string base = make_name(rng);
    FixturePoi f{fsq_id(), base, 0, 0};
    const GeoPoint fp = jitter(center, 0.0, 10.0);
    f.lat = fp.lat();
    f.lon = fp.lon();
    fx.fsq.push_back(f);

    const int partners = (i == 0) ? 2 : 1;
    for (int p = 0; p < partners; ++p) {
      const std::string name = edit_name(rng, base);
      GeoPoint op = jitter(fp, 2.0, 40.0);
      if (oracle_great_circle_m(fp, op) > 45.0) {
        throw std::logic_error("fixture: true pair offset too large");
      }
      FixturePoi o{osm_id(), name, op.lat(), op.lon()};
      fx.osm.push_back(o);
      fx.true_pairs.emplace(f.id, o.id);
      if (check_lev(f.name, o.name) < 0.5) {
        throw std::logic_error("fixture: true pair name drifted below 0.5");
      }
    }
    if (i == 0) fx.duplicated_fsq_id = f.id;
  }

  // Near misses: same name, but 60-200 m apart.
  for (int i = 0; i < kNearMisses; ++i) {
    const GeoPoint center = site_center(next_site++);
    const std::string name = make_name(rng);
    const GeoPoint fp = jitter(center, 0.0, 10.0);
    const GeoPoint op = jitter(fp, 60.0, 200.0);
    if (oracle_great_circle_m(fp, op) < 55.0) {
      throw std::logic_error("fixture: near miss too close");
    }
    fx.fsq.push_back({fsq_id(), name, fp.lat(), fp.lon()});
    fx.osm.push_back({osm_id(), name, op.lat(), op.lon()});
  }

  // Name mismatches: within the radius, names far apart.
  for (int i = 0; i < kMismatches; ++i) {
    const GeoPoint center = site_center(next_site++);
    const std::string base = make_name(rng);
    const GeoPoint fp = jitter(center, 0.0, 10.0);
    const GeoPoint op = jitter(fp, 2.0, 40.0);
    fx.fsq.push_back({fsq_id(), base, fp.lat(), fp.lon()});
    fx.osm.push_back({osm_id(), mismatch_name(rng, base), op.lat(), op.lon()});
  }

  // Singletons: far from every other site by construction.
  for (int i = 0; i < kFsqSingles; ++i) {
    const GeoPoint p = jitter(site_center(next_site++), 0.0, 10.0);
    fx.fsq.push_back({fsq_id(), make_name(rng), p.lat(), p.lon()});
  }
  for (int i = 0; i < kOsmSingles; ++i) {
    const GeoPoint p = jitter(site_center(next_site++), 0.0, 10.0);
    fx.osm.push_back({osm_id(), make_name(rng), p.lat(), p.lon()});
  }

  if (fx.fsq.size() != 200 || fx.osm.size() != 200 ||
      fx.true_pairs.size() != static_cast<std::size_t>(kTruePairs)) {
    throw std::logic_error("fixture: unexpected record counts");
  }

  // Shuffle row order so downstream sorting is actually exercised.
  std::shuffle(fx.fsq.begin(), fx.fsq.end(), rng);
  std::shuffle(fx.osm.begin(), fx.osm.end(), rng);
  return fx;
}

}  // namespace poiconf::testing
