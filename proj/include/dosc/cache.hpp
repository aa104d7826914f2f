#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

#include "dosc/oscint.hpp"

namespace dosc {

struct CacheKey {
  std::uint64_t phase_hash = 0;
  std::uint64_t cfg_hash = 0;
  double lambda = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  Engine engine = Engine::DIRECT2D;

  auto tie() const { return std::tie(phase_hash, cfg_hash, lambda, s1, s2, engine); }
  bool operator<(const CacheKey& o) const { return tie() < o.tie(); }
  bool operator==(const CacheKey& o) const { return tie() == o.tie(); }
};

/// Append-only CSV sample cache. Writes go through one mutex and an
/// advisory file lock; a key already present is never written again.
class SampleCache {
 public:
  SampleCache() = default;
  /// Loads `path` if it exists. An empty path gives an in-memory cache.
  explicit SampleCache(std::string path);

  std::optional<OscSample> lookup(const CacheKey& key) const;
  void insert(const CacheKey& key, const OscSample& sample);

  std::size_t size() const;
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  const std::string& path() const { return path_; }
  /// Offline caches never compute: a miss is a Config error.
  void set_offline(bool v) { offline_ = v; }
  bool offline() const { return offline_; }

  /// $OSC_CACHE_DIR/samples.csv, or .dosc_cache/samples.csv.
  static std::string default_path();

  static const char* header();
  static std::string format_record(const CacheKey& key, const OscSample& sample);
  /// Throws Config on malformed lines.
  static std::pair<CacheKey, OscSample> parse_record(const std::string& line);

 private:
  void load();

  std::string path_;
  std::map<CacheKey, OscSample> records_;
  mutable std::mutex mutex_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
  bool offline_ = false;
};

std::string hex64(std::uint64_t v);
std::uint64_t parse_hex64(const std::string& s);
/// 17 significant digits.
std::string format_double(double v);

}  // namespace dosc
