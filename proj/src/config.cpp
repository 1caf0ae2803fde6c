#include "nct/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nct/nc_algebra.hpp"

namespace nct {

namespace {

using T = ConfigType;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) out.push_back(trim(part));
  return out;
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

long long to_int(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError(where + ": expected an integer, got '" + s + "'");
  return v;
}

double to_real(const std::string& s, const std::string& where) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError(where + ": expected a number, got '" + s + "'");
  return v;
}

const ConfigKey& lookup(const std::string& section, const std::string& key) {
  for (const auto& k : config_schema())
    if (k.section == section && k.key == key) return k;
  throw ConfigError("unknown key '" + section + "." + key + "'");
}

std::string canonical(const ConfigKey& k, const std::string& raw) {
  const std::string where = k.section + "." + k.key;
  const std::string v = trim(raw);
  switch (k.type) {
    case T::integer:
      return std::to_string(to_int(v, where));
    case T::real:
      return fmt_real(to_real(v, where));
    case T::boolean:
      if (v == "true" || v == "1" || v == "yes" || v == "on") return "true";
      if (v == "false" || v == "0" || v == "no" || v == "off") return "false";
      throw ConfigError(where + ": expected true or false, got '" + v + "'");
    case T::choice:
      for (const auto& c : k.choices)
        if (c == v) return v;
      throw ConfigError(where + ": '" + v + "' is not one of the allowed values");
    case T::int_list:
    case T::real_list:
    case T::complex_list: {
      std::string out;
      for (const auto& item : split_list(v)) {
        if (!out.empty()) out += ", ";
        if (k.type == T::int_list) {
          out += std::to_string(to_int(item, where));
        } else if (k.type == T::real_list) {
          out += fmt_real(to_real(item, where));
        } else {
          try {
            out += format_complex(parse_complex(item));
          } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + e.what());
          }
        }
      }
      return out;
    }
    case T::element: {
      // syntax only here; the dimension is checked against theta when the experiment is built
      std::istringstream in(v);
      std::string term, out;
      std::size_t arity = 0;
      while (in >> term) {
        const auto at = term.find('@');
        try {
          parse_complex(term.substr(0, at));
        } catch (const std::invalid_argument&) {
          throw ConfigError(where + ": bad coefficient in term '" + term + "'");
        }
        if (at != std::string::npos) {
          const auto idx = split_list(term.substr(at + 1));
          if (idx.empty() || (arity != 0 && idx.size() != arity))
            throw ConfigError(where + ": inconsistent multi-index in term '" + term + "'");
          arity = idx.size();
          for (const auto& i : idx) to_int(i, where);
        }
        out += (out.empty() ? "" : " ") + term;
      }
      return out;
    }
  }
  return v;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"experiment", "kind", T::choice, "cif", {"cif", "weyl", "bs", "csz", "zeta", "norms"}},
      {"experiment", "seed", T::integer, "1", {}},
      {"experiment", "workers", T::integer, "1", {}},
      {"experiment", "cache", T::choice, "use", {"off", "use", "refresh"}},
      {"torus", "d", T::integer, "3", {}},
      {"torus", "theta", T::real_list, "", {}},
      {"lattice", "N", T::integer, "8", {}},
      {"lattice", "N_ladder", T::int_list, "", {}},
      {"lattice", "tau_N", T::integer, "24", {}},
      {"lattice", "trust_fraction", T::real, "0.25", {}},
      {"lattice", "max_size", T::integer, "4000000", {}},
      {"operator", "b", T::element, "1", {}},
      {"operator", "b_factor", T::element, "", {}},
      {"operator", "a", T::element, "1", {}},
      {"operator", "V", T::element, "-1", {}},
      {"operator", "lambda", T::real, "0", {}},
      {"operator", "spinor", T::boolean, "false", {}},
      {"grid", "h_start", T::real, "0.5", {}},
      {"grid", "h_ratio", T::real, "0.8", {}},
      {"grid", "h_count", T::integer, "5", {}},
      {"grid", "h_values", T::real_list, "", {}},
      {"grid", "z_values", T::complex_list, "3.5", {}},
      {"grid", "eps_values", T::real_list, "0.32, 0.16, 0.08, 0.04, 0.02", {}},
      {"random", "instances", T::integer, "20", {}},
      {"random", "dim_min", T::integer, "4", {}},
      {"random", "dim_max", T::integer, "16", {}},
      {"random", "T_max", T::real, "10", {}},
      {"random", "h_min", T::real, "0.1", {}},
      {"random", "h_max", T::real, "5", {}},
      {"tolerance", "discrepancy", T::real, "0.05", {}},
      {"tolerance", "residual", T::real, "1e-6", {}},
      {"tolerance", "require_trend", T::boolean, "false", {}},
      {"tolerance", "tie_redraws", T::integer, "5", {}},
  };
  return schema;
}

Config::Config() {
  for (const auto& k : config_schema()) values_[k.section + "." + k.key] = canonical(k, k.fallback);
}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& k : config_schema()) known = known || k.section == section;
      if (!known) throw ConfigError(where + ": unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string dotted = section + "." + key;
    if (!seen.insert(dotted).second) throw ConfigError(where + ": duplicate key '" + dotted + "'");
    cfg.values_[dotted] = canonical(lookup(section, key), line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Config::set(const std::string& dotted, const std::string& value) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw ConfigError("override '" + dotted + "' must have the form section.key");
  values_[dotted] = canonical(lookup(dotted.substr(0, dot), dotted.substr(dot + 1)), value);
}

std::string Config::serialize() const {
  std::string out, section;
  for (const auto& k : config_schema()) {
    if (k.section != section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.key + " = " + values_.at(k.section + "." + k.key) + "\n";
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Config::hash() const { return fnv1a64(serialize()); }

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

const std::string& Config::raw(const std::string& dotted) const {
  auto it = values_.find(dotted);
  if (it == values_.end()) throw ConfigError("unknown key '" + dotted + "'");
  return it->second;
}

long long Config::get_int(const std::string& dotted) const { return to_int(raw(dotted), dotted); }
double Config::get_real(const std::string& dotted) const { return to_real(raw(dotted), dotted); }
bool Config::get_bool(const std::string& dotted) const { return raw(dotted) == "true"; }

std::vector<int> Config::get_ints(const std::string& dotted) const {
  std::vector<int> out;
  for (const auto& s : split_list(raw(dotted))) out.push_back(static_cast<int>(to_int(s, dotted)));
  return out;
}

std::vector<double> Config::get_reals(const std::string& dotted) const {
  std::vector<double> out;
  for (const auto& s : split_list(raw(dotted))) out.push_back(to_real(s, dotted));
  return out;
}

std::vector<std::complex<double>> Config::get_complexes(const std::string& dotted) const {
  std::vector<std::complex<double>> out;
  for (const auto& s : split_list(raw(dotted))) out.push_back(parse_complex(s));
  return out;
}

}  // namespace nct
