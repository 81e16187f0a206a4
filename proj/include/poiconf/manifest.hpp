#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "poiconf/error.hpp"
#include "poiconf/ingest.hpp"

namespace poiconf {

/// FNV-1a 64-bit digest of a file's bytes; cheap input fingerprint for the
/// run manifest.
inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file for digest: " + path.string());
  std::uint64_t hash = 0xCBF29CE484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001B3ull;
    }
  }
  return hash;
}

inline std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

/// Reproducibility record for one command run: config snapshot, input
/// digests, row accounting and stage timings. Everything except the
/// "timing_ms" and "created" fields is deterministic for identical inputs
/// and config.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::vector<nlohmann::json> inputs;
  std::vector<nlohmann::json> outputs;
  nlohmann::json counts;
  std::map<std::string, std::int64_t> timing_ms;
  std::string created;

  void add_input(const std::filesystem::path& path, const IngestCounts& c) {
    inputs.push_back({{"path", path.string()},
                      {"fnv1a64", hex64(fnv1a64_file(path))},
                      {"rows_read", c.rows_read},
                      {"yielded", c.yielded},
                      {"skipped", c.skipped},
                      {"rejected", c.rejected}});
  }

  void add_output(const std::filesystem::path& path, std::size_t rows) {
    outputs.push_back({{"path", path.string()}, {"rows", rows}});
  }

  nlohmann::json to_json() const {
    return {{"command", command}, {"config", config},   {"inputs", inputs},
            {"outputs", outputs}, {"counts", counts},   {"timing_ms", timing_ms},
            {"created", created}};
  }

  void write(const std::filesystem::path& path) const {
    AtomicFile file(path);
    file.stream() << to_json().dump(2) << '\n';
    file.commit();
  }

  static std::string now_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }
};

/// Millisecond stopwatch for stage timings.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  std::int64_t lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(now - start_)
            .count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace poiconf
