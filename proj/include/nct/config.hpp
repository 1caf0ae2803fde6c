#pragma once

// Flat key-value experiment configuration with typed sections.
//
//   # comment
//   [section]
//   key = value
//
// Every key belongs to a fixed schema (docs/formats.md); unknown sections or
// keys, duplicates and malformed values raise ConfigError. Values are stored
// in canonical text form, so serialize(parse(text)) is a fixed point and the
// content hash does not depend on formatting or key order.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nct {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConfigType { integer, real, boolean, choice, int_list, real_list, complex_list, element };

struct ConfigKey {
  std::string section;
  std::string key;
  ConfigType type;
  std::string fallback;
  std::vector<std::string> choices;  // for ConfigType::choice
};

const std::vector<ConfigKey>& config_schema();

class Config {
 public:
  /// Every key at its default.
  Config();

  static Config parse(const std::string& text);
  /// Throws ConfigError if the file cannot be read.
  static Config load(const std::filesystem::path& path);

  /// "section.key" = value, validated and canonicalised.
  void set(const std::string& dotted, const std::string& value);

  std::string serialize() const;
  /// FNV-1a 64 of serialize().
  std::uint64_t hash() const;
  std::string hash_hex() const;

  const std::string& raw(const std::string& dotted) const;
  long long get_int(const std::string& dotted) const;
  double get_real(const std::string& dotted) const;
  bool get_bool(const std::string& dotted) const;
  std::vector<int> get_ints(const std::string& dotted) const;
  std::vector<double> get_reals(const std::string& dotted) const;
  std::vector<std::complex<double>> get_complexes(const std::string& dotted) const;

  bool operator==(const Config& other) const { return values_ == other.values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace nct
