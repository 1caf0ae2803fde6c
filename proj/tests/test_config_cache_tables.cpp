#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "nct/cache.hpp"
#include "nct/config.hpp"
#include "nct/tables.hpp"

using namespace nct;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nct_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parse and serialize round-trip") {
  const std::string text =
      "# weyl sweep\n"
      "[experiment]\nkind = weyl\nseed=7\n\n"
      "[torus]\n d = 3 \n"
      "[operator]\nV = -2 1@1,0,0 1@-1,0,0\n"
      "[grid]\nh_values = 0.5, 0.25\nz_values = 3.5, 4+i\n";
  const Config c = Config::parse(text);
  CHECK(c.raw("experiment.kind") == "weyl");
  CHECK(c.get_int("experiment.seed") == 7);
  CHECK(c.get_reals("grid.h_values") == std::vector<double>{0.5, 0.25});
  CHECK(c.get_complexes("grid.z_values")[1] == std::complex<double>(4.0, 1.0));
  CHECK(c.get_int("lattice.N") == 8);  // default

  const std::string once = c.serialize();
  const Config again = Config::parse(once);
  CHECK(again == c);
  CHECK(again.serialize() == once);
  CHECK(again.hash() == c.hash());
  CHECK(c.hash_hex().size() == 16);
  CHECK(Config().serialize() == Config::parse("").serialize());
}

TEST_CASE("config hash follows content, not formatting") {
  const Config a = Config::parse("[grid]\nh_start = 0.5\n[experiment]\nseed = 3\n");
  const Config b = Config::parse("[experiment]\nseed=3\n[grid]\nh_start=5e-1\n");
  CHECK(a.hash() == b.hash());
  Config c = a;
  c.set("experiment.seed", "4");
  CHECK(c.hash() != a.hash());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(Config::parse("[experiment]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[nowhere]\nkind = cif\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("kind = cif\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[experiment]\nseed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[experiment]\nseed = one\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[experiment]\nkind = sideways\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[operator]\nspinor = maybe\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[operator]\nV = 1@x\n"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/path/to.cfg"), ConfigError);
  Config c;
  CHECK_THROWS_AS(c.set("grid.nothing", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("noseparator", "1"), ConfigError);
}

TEST_CASE("cache records and vectors round-trip") {
  const auto root = fresh_dir("cache");
  Cache cache(root);
  const std::string key = hex_key(fnv1a64("some assembly"));
  CHECK(key.size() == 16);
  CHECK_FALSE(cache.get_record(key).has_value());
  const nlohmann::json payload = {{"count", 27}, {"tie", false}, {"values", {1.5, -2.25}}};
  cache.put_record(key, payload);
  CHECK(cache.get_record(key) == payload);

  const std::vector<double> v = {1.0, 0.5, 1.0 / 3.0, 0.0, -1e-300};
  cache.put_vector(key, v);
  CHECK(cache.get_vector(key) == v);
  CHECK(cache.hits() == 2);
  CHECK(cache.misses() == 1);

  CHECK(hex_key(fnv1a64("seed=1")) != hex_key(fnv1a64("seed=2")));
  CHECK_THROWS_AS(cache.get_record("../escape"), std::invalid_argument);
  fs::remove_all(root);
}

TEST_CASE("corrupt cache entries are evicted") {
  const auto root = fresh_dir("cache_corrupt");
  Cache cache(root);
  const std::string key = hex_key(42);
  cache.put_record(key, {{"a", 1}});
  cache.put_vector(key, {1.0, 2.0, 3.0});

  const auto rec = root / "records" / (key + ".json");
  std::string text = slurp(rec);
  text.replace(text.find("\"a\":1"), 5, "\"a\":2");
  std::ofstream(rec, std::ios::binary | std::ios::trunc) << text;
  CHECK_FALSE(cache.get_record(key).has_value());
  CHECK_FALSE(fs::exists(rec));

  const auto bin = root / "spectra" / (key + ".bin");
  std::string bytes = slurp(bin);
  bytes[bytes.size() - 1] ^= 0x01;
  std::ofstream(bin, std::ios::binary | std::ios::trunc) << bytes;
  CHECK_FALSE(cache.get_vector(key).has_value());
  CHECK_FALSE(fs::exists(bin));

  cache.put_vector(key, {1.0});
  std::ofstream(bin, std::ios::binary | std::ios::trunc) << "NCTS";  // truncated
  CHECK_FALSE(cache.get_vector(key).has_value());
  CHECK(cache.evictions() == 3);
  fs::remove_all(root);
}

TEST_CASE("tables: CSV, JSON and summary") {
  ExperimentRecord r;
  r.kind = "weyl";
  r.config_hash = "0123456789abcdef";
  r.seed = 9;
  r.observables = {{"h=0.5", 3.375, 4.18879020478639, 0.194268}, {"h=0.4,odd", 1.0 / 3.0, 1.0, 2.0 / 3.0}};
  r.predicted_constant = 4.18879020478639;
  r.max_discrepancy = 2.0 / 3.0;
  r.diagnostics = {{"note", "x"}};
  r.failures = {"too far"};
  r.passed = false;

  const std::string csv = observables_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == kObservablesHeader);
  std::getline(in, line);
  CHECK(line == "h=0.5,3.375,4.18879020479,0.194268");
  std::getline(in, line);
  CHECK(line == "\"h=0.4,odd\",0.333333333333,1,0.666666666667");
  CHECK_FALSE(std::getline(in, line));

  ExperimentRecord empty = r;
  empty.observables.clear();
  CHECK(observables_csv(empty) == std::string(kObservablesHeader) + "\n");

  CHECK(record_from_json(to_json(r)) == r);
  CHECK(record_from_json(nlohmann::json::parse(to_json(r).dump())) == r);

  const std::string summary = summary_text(r);
  CHECK(summary.find("0123456789abcdef") != std::string::npos);
  CHECK(summary.find("seed") != std::string::npos);
  CHECK(summary.find("too far") != std::string::npos);

  const auto out = fresh_dir("tables") / "nested";
  emit_tables(r, out);
  CHECK(slurp(out / "observables.csv") == csv);
  CHECK(record_from_json(nlohmann::json::parse(slurp(out / "record.json"))) == r);
  CHECK(fs::exists(out / "summary.txt"));
  fs::remove_all(out.parent_path());
}
