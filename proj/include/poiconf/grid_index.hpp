#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poiconf/error.hpp"
#include "poiconf/geo.hpp"

namespace poiconf {

struct Neighbor {
  std::size_t ordinal;
  double distance_m;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Uniform-grid spatial index over (ordinal, point) pairs: exact radius and
/// k-nearest-neighbor queries by great-circle distance. Immutable once
/// built; queries are const and safe to run from any number of threads.
///
/// Cells are squares of cell_deg degrees keyed by floor(lon / cell_deg),
/// floor(lat / cell_deg). Queries widen the candidate longitude range by
/// 1 / cos(lat), so results stay exact at high latitudes. There is no
/// wraparound at lon = +/-180: pairs straddling the antimeridian are not
/// found, matching the documented join semantics.
class GridIndex {
 public:
  /// radius_m fixes the cell edge (radius_m / 111,195 degrees) and is the
  /// largest radius radius_query() accepts.
  GridIndex(std::span<const std::pair<std::size_t, GeoPoint>> points,
            double radius_m)
      : cell_deg_(radius_m / 111195.0), build_radius_m_(radius_m) {
    if (!(radius_m > 0.0)) {
      throw ConfigError("index radius must be positive, got " +
                        std::to_string(radius_m));
    }
    for (const auto& [ordinal, point] : points) {
      const CellKey key{cell_of(point.lon()), cell_of(point.lat())};
      buckets_[key].push_back(Entry{ordinal, point});
      if (size_ == 0) {
        min_x_ = max_x_ = key.x;
        min_y_ = max_y_ = key.y;
      } else {
        min_x_ = std::min(min_x_, key.x);
        max_x_ = std::max(max_x_, key.x);
        min_y_ = std::min(min_y_, key.y);
        max_y_ = std::max(max_y_, key.y);
      }
      ++size_;
    }
  }

  std::size_t size() const { return size_; }
  double cell_deg() const { return cell_deg_; }
  double build_radius_m() const { return build_radius_m_; }

  /// All points within radius_m meters of center, sorted by ascending
  /// distance, ties by ordinal. radius_m must not exceed the build radius;
  /// a larger radius would silently miss neighbors, so it throws instead.
  std::vector<Neighbor> radius_query(const GeoPoint& center,
                                     double radius_m) const {
    if (radius_m > build_radius_m_) {
      throw ContractError("query radius " + std::to_string(radius_m) +
                          " exceeds build radius " +
                          std::to_string(build_radius_m_));
    }
    std::vector<Neighbor> out;
    if (size_ == 0 || radius_m < 0.0) return out;

    const double r_lat = radius_m / kMetersPerDegree;
    const double w_lon = lon_half_width_deg(center.lat(), radius_m);

    // One extra cell on every side absorbs floor() edge effects.
    const std::int64_t y0 =
        std::max(cell_of(center.lat() - r_lat) - 1, min_y_);
    const std::int64_t y1 =
        std::min(cell_of(center.lat() + r_lat) + 1, max_y_);
    std::int64_t x0 = min_x_, x1 = max_x_;
    if (w_lon < 180.0) {
      x0 = std::max(cell_of(center.lon() - w_lon) - 1, min_x_);
      x1 = std::min(cell_of(center.lon() + w_lon) + 1, max_x_);
    }
    for (std::int64_t y = y0; y <= y1; ++y) {
      for (std::int64_t x = x0; x <= x1; ++x) {
        const auto it = buckets_.find(CellKey{x, y});
        if (it == buckets_.end()) continue;
        for (const Entry& e : it->second) {
          const double d = haversine_m(center, e.point);
          if (d <= radius_m) out.push_back({e.ordinal, d});
        }
      }
    }
    std::sort(out.begin(), out.end(), less_by_distance);
    return out;
  }

  /// The k eligible points nearest to center (great-circle), sorted by
  /// ascending distance with ties by ordinal; shorter when fewer than k
  /// eligible points exist. `exclude` drops one ordinal, so a point can ask
  /// for its neighbors while indexed itself.
  std::vector<Neighbor> knn_query(
      const GeoPoint& center, std::size_t k,
      std::optional<std::size_t> exclude = std::nullopt) const {
    if (k == 0) throw ContractError("knn_query requires k >= 1");
    if (size_ == 0) return {};

    const std::int64_t qx = cell_of(center.lon());
    const std::int64_t qy = cell_of(center.lat());

    // Max-heap of the current best k, ordered worst-first.
    auto worse = [](const Neighbor& a, const Neighbor& b) {
      return a.distance_m != b.distance_m ? a.distance_m < b.distance_m
                                          : a.ordinal < b.ordinal;
    };
    std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> best(
        worse);
    auto offer = [&](const Neighbor& n) {
      if (best.size() < k) {
        best.push(n);
      } else if (worse(n, best.top())) {
        best.pop();
        best.push(n);
      }
    };
    auto scan_cell = [&](std::int64_t x, std::int64_t y) {
      const auto it = buckets_.find(CellKey{x, y});
      if (it == buckets_.end()) return;
      for (const Entry& e : it->second) {
        if (exclude && *exclude == e.ordinal) continue;
        offer({e.ordinal, haversine_m(center, e.point)});
      }
    };

    for (std::int64_t ring = 0;; ++ring) {
      const std::int64_t xa = qx - ring, xb = qx + ring;
      const std::int64_t ya = qy - ring, yb = qy + ring;
      if (ring == 0) {
        scan_cell(qx, qy);
      } else {
        for (std::int64_t x = std::max(xa, min_x_);
             x <= std::min(xb, max_x_); ++x) {
          if (ya >= min_y_ && ya <= max_y_) scan_cell(x, ya);
          if (yb >= min_y_ && yb <= max_y_) scan_cell(x, yb);
        }
        for (std::int64_t y = std::max(ya + 1, min_y_);
             y <= std::min(yb - 1, max_y_); ++y) {
          if (xa >= min_x_ && xa <= max_x_) scan_cell(xa, y);
          if (xb >= min_x_ && xb <= max_x_) scan_cell(xb, y);
        }
      }
      const bool covers_all = xa <= min_x_ && xb >= max_x_ && ya <= min_y_ &&
                              yb >= max_y_;
      if (covers_all) break;
      if (best.size() == k &&
          beyond_ring_lower_bound_m(center, ring) > best.top().distance_m) {
        break;
      }
    }

    std::vector<Neighbor> out;
    out.reserve(best.size());
    while (!best.empty()) {
      out.push_back(best.top());
      best.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  struct Entry {
    std::size_t ordinal;
    GeoPoint point;
  };

  struct CellKey {
    std::int64_t x;
    std::int64_t y;
    friend bool operator==(const CellKey&, const CellKey&) = default;
  };

  struct CellHash {
    std::size_t operator()(const CellKey& k) const {
      auto mix = [](std::uint64_t v) {
        v ^= v >> 33;
        v *= 0xFF51AFD7ED558CCDull;
        v ^= v >> 33;
        return v;
      };
      return mix(static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull ^
                 mix(static_cast<std::uint64_t>(k.y)));
    }
  };

  static bool less_by_distance(const Neighbor& a, const Neighbor& b) {
    return a.distance_m != b.distance_m ? a.distance_m < b.distance_m
                                        : a.ordinal < b.ordinal;
  }

  std::int64_t cell_of(double degrees) const {
    return static_cast<std::int64_t>(std::floor(degrees / cell_deg_));
  }

  // Longitude half-width (degrees) that is guaranteed to contain every
  // point within radius_m of a query at latitude lat_deg. Derived from the
  // haversine inequality with cos(lat) bounded over the reachable latitude
  // band; returns 180 when the band approaches a pole.
  double lon_half_width_deg(double lat_deg, double radius_m) const {
    const double d2r = kPi / 180.0;
    const double r_lat = radius_m / kMetersPerDegree;
    const double band =
        std::min(90.0, std::max(std::abs(lat_deg) + r_lat, std::abs(lat_deg)));
    const double denom =
        std::sqrt(std::cos(lat_deg * d2r) * std::cos(band * d2r));
    const double s = std::sin(radius_m / (2.0 * kEarthRadiusM));
    if (!(denom > 0.0) || s >= denom) return 180.0;
    return 2.0 * std::asin(s / denom) / d2r;
  }

  // Lower bound on the distance of any point whose cell lies outside the
  // Chebyshev ring `ring` around the query cell. Such a point is at least
  // ring * cell_deg away in latitude or in longitude.
  double beyond_ring_lower_bound_m(const GeoPoint& center,
                                   std::int64_t ring) const {
    const double d2r = kPi / 180.0;
    const double gap_deg = static_cast<double>(ring) * cell_deg_;
    const double lat_bound = gap_deg * kMetersPerDegree;

    // Points that could still compete are within lat_bound of the query
    // latitude; bound cos over that band.
    double lon_bound = 0.0;
    if (gap_deg < 180.0) {
      const double band = std::abs(center.lat()) + gap_deg;
      if (band < 90.0) {
        const double cc =
            std::cos(center.lat() * d2r) * std::cos(band * d2r);
        lon_bound = 2.0 * kEarthRadiusM *
                    std::asin(std::min(1.0, std::sqrt(std::max(cc, 0.0)) *
                                                std::sin(gap_deg * d2r / 2.0)));
      }
    }
    return std::min(lat_bound, lon_bound);
  }

  double cell_deg_;
  double build_radius_m_;
  std::unordered_map<CellKey, std::vector<Entry>, CellHash> buckets_;
  std::int64_t min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
  std::size_t size_ = 0;
};

}  // namespace poiconf
