#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poiconf/csv.hpp"
#include "poiconf/error.hpp"
#include "poiconf/geo.hpp"
#include "poiconf/similarity.hpp"

namespace poiconf {

/// One source row. `values` aligns with `*column_names` (the prefixed
/// output columns shared by every record of the same file); id, name and
/// point are parsed copies of the promoted columns.
struct PoiRecord {
  std::string id;
  std::string name;
  GeoPoint point;
  std::shared_ptr<const std::vector<std::string>> column_names;
  std::vector<std::string> values;
};

/// Maps one source file onto the promoted columns. Column lookups tolerate
/// the prefix being present or absent in the file header; stored column
/// names always carry the prefix.
struct SourceSchema {
  std::string id_column;
  std::string name_column;
  std::string lat_column;
  std::string lon_column;
  std::optional<std::string> geometry_column;
  std::optional<std::string> class_column;
  std::string prefix;

  static SourceSchema foursquare() {
    return {"fsq_place_id", "fsq_name",      "fsq_latitude",
            "fsq_longitude", std::nullopt,   std::nullopt,
            "fsq_"};
  }

  static SourceSchema osm() {
    return {"osm_id",       "osm_name",   "osm_latitude", "osm_longitude",
            "osm_geometry", "osm_class",  "osm_"};
  }
};

struct SourceFilter {
  bool require_name = true;
  std::optional<std::string> exclude_class;

  static SourceFilter none() { return {false, std::nullopt}; }
};

struct IngestCounts {
  std::size_t rows_read = 0;
  std::size_t yielded = 0;
  std::size_t skipped = 0;   // filtered: missing name, excluded class
  std::size_t rejected = 0;  // malformed: routed to the rejects sidecar
};

/// Streaming reader over one POI CSV. Yields records in file order;
/// filtered rows are counted, malformed rows go to `<input>.rejects.csv`
/// with a reason, and processing continues. Coordinates come from the
/// lat/lon columns, or from the geometry column's centroid when the file
/// has no coordinate columns.
class PoiCsvReader {
 public:
  PoiCsvReader(const std::filesystem::path& path, SourceSchema schema,
               SourceFilter filter = {})
      : path_(path),
        schema_(std::move(schema)),
        filter_(std::move(filter)),
        in_(path, std::ios::binary),
        csv_(in_) {
    if (!in_) throw IoError("cannot open input file: " + path.string());
    if (!csv_.next(header_)) {
      throw SchemaError("missing header row: " + path.string());
    }

    id_idx_ = require_column(schema_.id_column);
    name_idx_ = require_column(schema_.name_column);
    const auto lat = find_column(schema_.lat_column);
    const auto lon = find_column(schema_.lon_column);
    if (lat && lon) {
      lat_idx_ = *lat;
      lon_idx_ = *lon;
    } else if (schema_.geometry_column &&
               (geom_idx_ = find_column(*schema_.geometry_column))) {
      // centroid path
    } else {
      throw SchemaError("no coordinate source in " + path_.string() +
                        ": need columns '" + schema_.lat_column + "'+'" +
                        schema_.lon_column + "' or '" +
                        schema_.geometry_column.value_or("<geometry>") + "'");
    }
    if (schema_.class_column) {
      class_idx_ = require_column(*schema_.class_column);
    }

    auto names = std::make_shared<std::vector<std::string>>();
    for (const auto& h : header_) names->push_back(prefixed(h));
    if (!lat_idx_) {
      derived_coords_ = true;
      names->push_back(schema_.prefix + "latitude");
      names->push_back(schema_.prefix + "longitude");
    }
    column_names_ = std::move(names);
  }

  /// Prefixed output column names (derived lat/lon appended when the
  /// coordinates come from a geometry column).
  const std::shared_ptr<const std::vector<std::string>>& columns() const {
    return column_names_;
  }

  const IngestCounts& counts() const { return counts_; }
  const std::filesystem::path& rejects_path() const { return rejects_path_; }

  std::optional<PoiRecord> next() {
    std::vector<std::string> fields;
    while (csv_.next(fields)) {
      ++counts_.rows_read;
      if (fields.size() != header_.size()) {
        reject("expected " + std::to_string(header_.size()) + " fields, got " +
               std::to_string(fields.size()));
        continue;
      }
      if (fields[id_idx_].empty()) {
        reject("empty id");
        continue;
      }
      if (filter_.require_name && normalize_name(fields[name_idx_]).empty()) {
        ++counts_.skipped;
        continue;
      }
      if (class_idx_ && filter_.exclude_class &&
          fields[*class_idx_] == *filter_.exclude_class) {
        ++counts_.skipped;
        continue;
      }

      std::optional<GeoPoint> point;
      if (lat_idx_) {
        point = parse_lat_lon(fields[*lat_idx_], fields[*lon_idx_]);
      } else {
        point = parse_geometry(fields[*geom_idx_]);
      }
      if (!point) continue;  // rejected with reason already

      PoiRecord rec{fields[id_idx_], fields[name_idx_], *point, column_names_,
                    std::move(fields)};
      if (derived_coords_) {
        rec.values.push_back(format_double(point->lat()));
        rec.values.push_back(format_double(point->lon()));
      }
      ++counts_.yielded;
      return rec;
    }
    return std::nullopt;
  }

 private:
  std::optional<std::size_t> find_column(const std::string& wanted) const {
    auto index_of = [&](const std::string& name) -> std::optional<std::size_t> {
      for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return i;
      }
      return std::nullopt;
    };
    if (auto i = index_of(wanted)) return i;
    if (wanted.starts_with(schema_.prefix)) {
      return index_of(wanted.substr(schema_.prefix.size()));
    }
    return index_of(schema_.prefix + wanted);
  }

  std::size_t require_column(const std::string& wanted) const {
    const auto idx = find_column(wanted);
    if (!idx) {
      throw SchemaError("missing column '" + wanted + "' in " +
                        path_.string());
    }
    return *idx;
  }

  std::string prefixed(const std::string& name) const {
    return name.starts_with(schema_.prefix) ? name : schema_.prefix + name;
  }

  std::optional<GeoPoint> parse_lat_lon(const std::string& lat_text,
                                        const std::string& lon_text) {
    double lat = 0.0, lon = 0.0;
    const auto lr = std::from_chars(lat_text.data(),
                                    lat_text.data() + lat_text.size(), lat);
    const auto gr = std::from_chars(lon_text.data(),
                                    lon_text.data() + lon_text.size(), lon);
    if (lr.ec != std::errc() || lr.ptr != lat_text.data() + lat_text.size() ||
        gr.ec != std::errc() || gr.ptr != lon_text.data() + lon_text.size()) {
      reject("unparseable coordinates '" + lat_text + "', '" + lon_text + "'");
      return std::nullopt;
    }
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
      reject("coordinates out of range '" + lat_text + "', '" + lon_text +
             "'");
      return std::nullopt;
    }
    return GeoPoint(lat, lon);
  }

  std::optional<GeoPoint> parse_geometry(const std::string& wkt) {
    try {
      return centroid(parse_wkt(wkt));
    } catch (const std::exception& e) {
      reject(std::string("bad geometry: ") + e.what());
      return std::nullopt;
    }
  }

  void reject(const std::string& reason) {
    ++counts_.rejected;
    if (!rejects_out_.is_open()) {
      rejects_path_ = path_;
      rejects_path_ += ".rejects.csv";
      rejects_out_.open(rejects_path_, std::ios::binary | std::ios::trunc);
      if (!rejects_out_) {
        throw IoError("cannot open rejects file: " + rejects_path_.string());
      }
      rejects_writer_.emplace(rejects_out_);
      rejects_writer_->write_record(
          std::vector<std::string>{"record", "reason", "row"});
    }
    rejects_writer_->write_record(std::vector<std::string>{
        std::to_string(csv_.record_number()), reason, csv_.raw_record()});
    rejects_out_.flush();
  }

  std::filesystem::path path_;
  SourceSchema schema_;
  SourceFilter filter_;
  std::ifstream in_;
  CsvReader csv_;
  std::vector<std::string> header_;
  std::shared_ptr<const std::vector<std::string>> column_names_;
  std::size_t id_idx_ = 0;
  std::size_t name_idx_ = 0;
  std::optional<std::size_t> lat_idx_;
  std::optional<std::size_t> lon_idx_;
  std::optional<std::size_t> geom_idx_;
  std::optional<std::size_t> class_idx_;
  bool derived_coords_ = false;
  IngestCounts counts_;
  std::filesystem::path rejects_path_;
  std::ofstream rejects_out_;
  std::optional<CsvWriter> rejects_writer_;
};

/// Writes to `<path>.tmp` and renames on commit, so a crash or error never
/// leaves a truncated file at the final path.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path)
      : final_(std::move(path)), tmp_(final_) {
    tmp_ += ".tmp";
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot open output file: " + tmp_.string());
  }

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw IoError("write failed: " + tmp_.string());
    out_.close();
    std::error_code ec;
    std::filesystem::rename(tmp_, final_, ec);
    if (ec) {
      throw IoError("cannot rename " + tmp_.string() + " to " +
                    final_.string() + ": " + ec.message());
    }
    committed_ = true;
  }

  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

 private:
  std::filesystem::path final_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace poiconf
