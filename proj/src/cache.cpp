#include "nct/cache.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "nct/config.hpp"

namespace nct {

namespace {

constexpr char kMagic[4] = {'N', 'C', 'T', 'S'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv_bytes(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_key(const std::string& key) {
  if (key.size() != 16 || key.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw std::invalid_argument("cache key must be 16 lowercase hex digits");
}

void atomic_write(const std::filesystem::path& target, const std::string& bytes) {
  static std::atomic<unsigned> counter{0};
  std::filesystem::create_directories(target.parent_path());
  const auto tmp = target.parent_path() /
                   (target.filename().string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cache: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

template <class U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(U)];
    std::memcpy(b, &v, sizeof v);
    std::reverse(b, b + sizeof(U));
    std::memcpy(&v, b, sizeof v);
  }
  return v;
}

template <class U>
void append_le(std::string& s, U v) {
  v = to_little(v);
  s.append(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class U>
U read_le(const std::string& s, std::size_t off) {
  U v;
  std::memcpy(&v, s.data() + off, sizeof v);
  return to_little(v);
}

}  // namespace

std::string hex_key(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Cache::Cache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path Cache::default_root() {
  if (const char* env = std::getenv("NCT_CACHE_DIR"); env != nullptr && *env != '\0') return env;
  return ".nctorus-cache";
}

std::filesystem::path Cache::entry(const char* kind, const std::string& key, const char* ext) const {
  check_key(key);
  return root_ / kind / (key + ext);
}

void Cache::evict(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::remove(p, ec);
  ++evictions_;
  ++misses_;
}

std::optional<nlohmann::json> Cache::get_record(const std::string& key) {
  const auto p = entry("records", key, ".json");
  std::ifstream in(p);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  try {
    const auto doc = nlohmann::json::parse(in);
    const auto& payload = doc.at("payload");
    if (doc.at("checksum").get<std::string>() != hex_key(fnv1a64(payload.dump()))) {
      evict(p);
      return std::nullopt;
    }
    ++hits_;
    return payload;
  } catch (const std::exception&) {
    evict(p);
    return std::nullopt;
  }
}

void Cache::put_record(const std::string& key, const nlohmann::json& payload) {
  const nlohmann::json doc = {{"checksum", hex_key(fnv1a64(payload.dump()))}, {"payload", payload}};
  atomic_write(entry("records", key, ".json"), doc.dump());
}

std::optional<std::vector<double>> Cache::get_vector(const std::string& key) {
  const auto p = entry("spectra", key, ".bin");
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string s = buf.str();
  constexpr std::size_t header = 4 + 4 + 8 + 8;
  if (s.size() < header || std::memcmp(s.data(), kMagic, 4) != 0 || read_le<std::uint32_t>(s, 4) != kVersion) {
    evict(p);
    return std::nullopt;
  }
  const auto count = read_le<std::uint64_t>(s, 8);
  const auto checksum = read_le<std::uint64_t>(s, 16);
  if (s.size() != header + count * 8) {
    evict(p);
    return std::nullopt;
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i)
    values[i] = std::bit_cast<double>(read_le<std::uint64_t>(s, header + 8 * i));
  if (fnv_bytes(s.data() + header, count * 8) != checksum) {
    evict(p);
    return std::nullopt;
  }
  ++hits_;
  return values;
}

void Cache::put_vector(const std::string& key, const std::vector<double>& values) {
  std::string body;
  body.reserve(values.size() * 8);
  for (double v : values) append_le(body, std::bit_cast<std::uint64_t>(v));
  std::string s(kMagic, 4);
  append_le(s, kVersion);
  append_le(s, static_cast<std::uint64_t>(values.size()));
  append_le(s, fnv_bytes(body.data(), body.size()));
  s += body;
  atomic_write(entry("spectra", key, ".bin"), s);
}

}  // namespace nct
