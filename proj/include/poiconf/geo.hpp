#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "poiconf/error.hpp"

namespace poiconf {

inline constexpr double kPi = 3.14159265358979323846;

// Spherical earth model. Fixed radius keeps every distance deterministic.
inline constexpr double kEarthRadiusM = 6'371'000.0;

// Meters spanned by one degree of latitude (or of longitude at the equator).
inline constexpr double kMetersPerDegree = kEarthRadiusM * kPi / 180.0;

/// WGS 84 latitude/longitude pair in decimal degrees. Construction rejects
/// out-of-range (or NaN) coordinates, so a GeoPoint is valid by existence.
class GeoPoint {
 public:
  GeoPoint(double lat_deg, double lon_deg) : lat_(lat_deg), lon_(lon_deg) {
    if (!(lat_deg >= -90.0 && lat_deg <= 90.0)) {
      throw RangeError("latitude out of range [-90, 90]: " +
                       std::to_string(lat_deg));
    }
    if (!(lon_deg >= -180.0 && lon_deg <= 180.0)) {
      throw RangeError("longitude out of range [-180, 180]: " +
                       std::to_string(lon_deg));
    }
  }

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_;
  double lon_;
};

/// Open polyline with at least two vertices.
class LineString {
 public:
  explicit LineString(std::vector<GeoPoint> vertices)
      : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) {
      throw RangeError("LineString requires at least 2 vertices");
    }
  }

  const std::vector<GeoPoint>& vertices() const { return vertices_; }

  friend bool operator==(const LineString&, const LineString&) = default;

 private:
  std::vector<GeoPoint> vertices_;
};

/// Single explicitly closed ring: at least 4 vertices, first equals last.
class Polygon {
 public:
  explicit Polygon(std::vector<GeoPoint> ring) : ring_(std::move(ring)) {
    if (ring_.size() < 4) {
      throw RangeError("Polygon ring requires at least 4 vertices");
    }
    if (!(ring_.front() == ring_.back())) {
      throw RangeError("Polygon ring must be closed (first vertex == last)");
    }
  }

  const std::vector<GeoPoint>& ring() const { return ring_; }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<GeoPoint> ring_;
};

using Geometry = std::variant<GeoPoint, LineString, Polygon>;

/// Planar Euclidean distance in degree space. This is the unit of the
/// stored pair-distance column; do not confuse with meters.
inline double degree_distance(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = a.lat() - b.lat();
  const double dlon = a.lon() - b.lon();
  return std::sqrt(dlat * dlat + dlon * dlon);
}

/// Great-circle distance in meters on the fixed sphere (haversine form).
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double deg2rad = kPi / 180.0;
  const double phi1 = a.lat() * deg2rad;
  const double phi2 = b.lat() * deg2rad;
  const double dphi = (b.lat() - a.lat()) * deg2rad;
  const double dlam = (b.lon() - a.lon()) * deg2rad;
  const double sp = std::sin(dphi / 2.0);
  const double sl = std::sin(dlam / 2.0);
  const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

namespace detail {

inline GeoPoint vertex_mean(const std::vector<GeoPoint>& vs, std::size_t n) {
  double lat = 0.0, lon = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lat += vs[i].lat();
    lon += vs[i].lon();
  }
  return GeoPoint(lat / static_cast<double>(n), lon / static_cast<double>(n));
}

}  // namespace detail

/// Representative point of a geometry, computed in planar degree space.
/// Points map to themselves; lines to the length-weighted mean of segment
/// midpoints; rings to the signed-area (shoelace) centroid. Degenerate
/// inputs (zero length, zero area) fall back to the vertex mean, so this
/// never fails on a valid Geometry.
inline GeoPoint centroid(const Geometry& geom) {
  if (const auto* p = std::get_if<GeoPoint>(&geom)) {
    return *p;
  }
  if (const auto* ls = std::get_if<LineString>(&geom)) {
    const auto& vs = ls->vertices();
    double total = 0.0, lat = 0.0, lon = 0.0;
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
      const double len = degree_distance(vs[i], vs[i + 1]);
      lat += len * 0.5 * (vs[i].lat() + vs[i + 1].lat());
      lon += len * 0.5 * (vs[i].lon() + vs[i + 1].lon());
      total += len;
    }
    if (total <= 0.0) {
      return detail::vertex_mean(vs, vs.size());
    }
    return GeoPoint(lat / total, lon / total);
  }

  const auto& ring = std::get<Polygon>(geom).ring();
  const std::size_t n = ring.size() - 1;  // drop the closing duplicate
  double area2 = 0.0, clat = 0.0, clon = 0.0;
  double lat_lo = ring[0].lat(), lat_hi = ring[0].lat();
  double lon_lo = ring[0].lon(), lon_hi = ring[0].lon();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& p = ring[i];
    const GeoPoint& q = ring[i + 1];
    const double cross = p.lon() * q.lat() - q.lon() * p.lat();
    area2 += cross;
    clon += (p.lon() + q.lon()) * cross;
    clat += (p.lat() + q.lat()) * cross;
    lat_lo = std::min(lat_lo, p.lat());
    lat_hi = std::max(lat_hi, p.lat());
    lon_lo = std::min(lon_lo, p.lon());
    lon_hi = std::max(lon_hi, p.lon());
  }
  const double span = std::max(lat_hi - lat_lo, lon_hi - lon_lo);
  if (std::abs(area2) <= 1e-12 * std::max(span * span, 1e-30)) {
    return detail::vertex_mean(ring, n);
  }
  // Self-intersecting rings can push the signed-area centroid outside the
  // hull; clamp to the vertex bounding box (a no-op for simple rings).
  const double lat = std::clamp(clat / (3.0 * area2), lat_lo, lat_hi);
  const double lon = std::clamp(clon / (3.0 * area2), lon_lo, lon_hi);
  return GeoPoint(lat, lon);
}

namespace detail {

struct WktScanner {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("wkt parse error at offset " + std::to_string(pos) +
                     ": " + what);
  }

  void skip_ws() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r' ||
            text[pos] == '\n')) {
      ++pos;
    }
  }

  bool try_char(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect_char(char c) {
    if (!try_char(c)) fail(std::string("expected '") + c + "'");
  }

  std::string keyword() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    std::string word(text.substr(start, pos - start));
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return word;
  }

  double number() {
    skip_ws();
    double value = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) fail("expected number");
    pos += static_cast<std::size_t>(ptr - first);
    return value;
  }

  // WKT orders coordinates lon-first.
  GeoPoint coord() {
    const std::size_t at = pos;
    const double lon = number();
    const double lat = number();
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
      throw RangeError("wkt coordinate out of range at offset " +
                       std::to_string(at));
    }
    return GeoPoint(lat, lon);
  }

  std::vector<GeoPoint> coord_list() {
    std::vector<GeoPoint> out;
    out.push_back(coord());
    while (try_char(',')) {
      out.push_back(coord());
    }
    return out;
  }
};

}  // namespace detail

/// Parses the POINT / LINESTRING / POLYGON (single ring, no Z/M) subset of
/// well-known text. Coordinates are lon-first; whitespace is insignificant.
inline Geometry parse_wkt(std::string_view text) {
  detail::WktScanner s{text};
  const std::string kind = s.keyword();
  if (kind.empty()) s.fail("expected geometry keyword");

  Geometry result = GeoPoint(0.0, 0.0);
  if (kind == "POINT") {
    s.expect_char('(');
    result = s.coord();
    s.expect_char(')');
  } else if (kind == "LINESTRING") {
    s.expect_char('(');
    auto vs = s.coord_list();
    s.expect_char(')');
    if (vs.size() < 2) s.fail("LINESTRING requires at least 2 points");
    result = LineString(std::move(vs));
  } else if (kind == "POLYGON") {
    s.expect_char('(');
    s.expect_char('(');
    auto ring = s.coord_list();
    s.expect_char(')');
    if (s.try_char(',')) s.fail("multi-ring POLYGON not supported");
    s.expect_char(')');
    if (ring.size() < 4) s.fail("POLYGON ring requires at least 4 points");
    if (!(ring.front() == ring.back())) s.fail("POLYGON ring is not closed");
    result = Polygon(std::move(ring));
  } else {
    s.fail("unsupported geometry type '" + kind + "'");
  }

  s.skip_ws();
  if (s.pos != text.size()) s.fail("trailing characters after geometry");
  return result;
}

/// Shortest decimal form that parses back to the exact same double.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string format_wkt(const Geometry& geom) {
  auto coord = [](const GeoPoint& p) {
    return format_double(p.lon()) + ' ' + format_double(p.lat());
  };
  auto list = [&](const std::vector<GeoPoint>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i > 0) out += ", ";
      out += coord(vs[i]);
    }
    return out;
  };
  if (const auto* p = std::get_if<GeoPoint>(&geom)) {
    return "POINT(" + coord(*p) + ")";
  }
  if (const auto* ls = std::get_if<LineString>(&geom)) {
    return "LINESTRING(" + list(ls->vertices()) + ")";
  }
  return "POLYGON((" + list(std::get<Polygon>(geom).ring()) + "))";
}

}  // namespace poiconf
