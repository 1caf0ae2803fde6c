#pragma once

// Content-addressed on-disk store.
//
//   <root>/records/<key>.json   {"checksum": "<fnv1a64 of payload dump>", "payload": ...}
//   <root>/spectra/<key>.bin    "NCTS" | u32 version | u64 count | u64 checksum | count x f64 (little endian)
//
// Keys are 16 hex digits. Writes go to a temporary file in the same
// directory and are renamed into place. Entries that fail to parse or whose
// checksum does not match are deleted and reported as misses. Distinct keys
// may be accessed from several threads at once.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace nct {

class Cache {
 public:
  explicit Cache(std::filesystem::path root);
  /// NCT_CACHE_DIR if set, otherwise ./.nctorus-cache.
  static std::filesystem::path default_root();

  const std::filesystem::path& root() const { return root_; }

  std::optional<nlohmann::json> get_record(const std::string& key);
  void put_record(const std::string& key, const nlohmann::json& payload);

  std::optional<std::vector<double>> get_vector(const std::string& key);
  void put_vector(const std::string& key, const std::vector<double>& values);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t evictions() const { return evictions_; }

 private:
  std::filesystem::path entry(const char* kind, const std::string& key, const char* ext) const;
  void evict(const std::filesystem::path& p);

  std::filesystem::path root_;
  std::atomic<std::size_t> hits_{0}, misses_{0}, evictions_{0};
};

std::string hex_key(std::uint64_t h);

}  // namespace nct
