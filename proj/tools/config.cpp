#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace geocli {

using geolab::Rat;
using geolab::VecQ;

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::islower(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

// every key the grammar knows, in both roles
const std::set<std::string>& space_keys() {
  static const std::set<std::string> keys = {"space",    "basis", "vertices", "edges",
                                             "sides",    "profile", "epsilon", "h"};
  return keys;
}

const std::set<std::string>& param_keys() {
  static const std::set<std::string> keys = {
      "x",    "y",       "t",    "tmax",          "step",      "blockers",
      "loops", "resolution", "grid", "samples", "max_violations", "diam_grid",
      "seed", "tol",     "out"};
  return keys;
}

}  // namespace

const char* space_kind_str(SpaceKind k) {
  switch (k) {
    case SpaceKind::Torus: return "torus";
    case SpaceKind::Graph: return "graph";
    case SpaceKind::Apartment: return "apartment";
    case SpaceKind::Revolution: return "revolution";
  }
  return "torus";
}

const char* operation_str(Operation op) {
  switch (op) {
    case Operation::Enumerate: return "enumerate";
    case Operation::Block: return "block";
    case Operation::Verify: return "verify";
    case Operation::Classify: return "classify";
    case Operation::Growth: return "growth";
    case Operation::Entropy: return "entropy";
    case Operation::Scan: return "scan";
  }
  return "enumerate";
}

Operation parse_operation(const std::string& text) {
  static const std::map<std::string, Operation> ops = {
      {"enumerate", Operation::Enumerate}, {"block", Operation::Block},
      {"verify", Operation::Verify},       {"classify", Operation::Classify},
      {"growth", Operation::Growth},       {"entropy", Operation::Entropy},
      {"scan", Operation::Scan}};
  auto it = ops.find(text);
  if (it == ops.end()) throw CliError("config", "unknown operation '" + text + "'");
  return it->second;
}

KeyValues parse_config_text(const std::string& text, const std::string& where) {
  KeyValues out;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string body = strip(line);
    if (body.empty()) continue;
    std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw CliError("config", where + ":" + std::to_string(lineno) +
                                   ": expected 'key = value'");
    std::string key = strip(body.substr(0, eq));
    std::string value = strip(body.substr(eq + 1));
    if (!valid_key(key))
      throw CliError("config", where + ":" + std::to_string(lineno) +
                                   ": bad key '" + key + "'");
    if (value.empty())
      throw CliError("config", where + ":" + std::to_string(lineno) +
                                   ": empty value for '" + key + "'");
    if (!out.emplace(key, value).second)
      throw CliError("config", where + ":" + std::to_string(lineno) +
                                   ": duplicate key '" + key + "'");
  }
  return out;
}

KeyValues load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("io", "cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

KeyValues merge(KeyValues base, const KeyValues& over) {
  for (const auto& [k, v] : over) base[k] = v;
  return base;
}

Rat parse_rat_value(const std::string& key, const std::string& text) {
  try {
    return geolab::parse_rational(text);
  } catch (const std::exception& e) {
    throw CliError("config", "key '" + key + "': " + e.what());
  }
}

VecQ parse_vecq_value(const std::string& key, const std::string& text) {
  try {
    return geolab::parse_vecq(text);
  } catch (const std::exception& e) {
    throw CliError("config", "key '" + key + "': " + e.what());
  }
}

double parse_real_value(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (strip(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw CliError("config", "key '" + key + "': bad number '" + text + "'");
}

long long parse_int_value(const std::string& key, const std::string& text,
                          long long lo, long long hi) {
  long long v = 0;
  try {
    std::size_t used = 0;
    v = std::stoll(text, &used);
    if (!strip(text.substr(used)).empty()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw CliError("config", "key '" + key + "': bad integer '" + text + "'");
  }
  if (v < lo || v > hi)
    throw CliError("config", "key '" + key + "': " + text + " outside [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) {
    std::string item = strip(cur);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

namespace {

SpaceKind parse_space_kind(const std::string& text) {
  if (text == "torus") return SpaceKind::Torus;
  if (text == "graph") return SpaceKind::Graph;
  if (text == "apartment") return SpaceKind::Apartment;
  if (text == "revolution") return SpaceKind::Revolution;
  throw CliError("config", "unknown space '" + text + "'");
}

std::vector<VecQ> parse_basis(const std::string& text) {
  std::vector<VecQ> rows;
  for (const std::string& row : split_list(text, ';'))
    rows.push_back(parse_vecq_value("basis", row));
  if (rows.empty()) throw CliError("config", "key 'basis': no rows");
  return rows;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_edges(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const std::string& item : split_list(text, ',')) {
    std::size_t dash = item.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
      throw CliError("config", "key 'edges': expected 'tail-head', got '" + item + "'");
    long long a = parse_int_value("edges", item.substr(0, dash), 0, 1000000);
    long long b = parse_int_value("edges", item.substr(dash + 1), 0, 1000000);
    out.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  if (out.empty()) throw CliError("config", "key 'edges': no edges");
  return out;
}

std::vector<double> parse_reals(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text, ','))
    out.push_back(parse_real_value(key, item));
  if (out.empty()) throw CliError("config", "key '" + key + "': empty list");
  return out;
}

}  // namespace

ExperimentConfig build_config(const KeyValues& raw) {
  for (const auto& [k, v] : raw) {
    (void)v;
    if (k == "operation" || space_keys().count(k) || param_keys().count(k)) continue;
    throw CliError("config", "unknown config key '" + k + "'");
  }
  auto get = [&raw](const std::string& k) -> const std::string* {
    auto it = raw.find(k);
    return it == raw.end() ? nullptr : &it->second;
  };

  ExperimentConfig cfg;
  const std::string* space = get("space");
  if (!space) throw CliError("config", "missing required key 'space'");
  cfg.space = parse_space_kind(*space);

  // keys that only exist for one space kind
  auto forbid = [&](const std::string& key, SpaceKind owner) {
    if (get(key) && cfg.space != owner)
      throw CliError("config", "key '" + key + "' does not apply to space '" +
                                   std::string(space_kind_str(cfg.space)) + "'");
  };
  forbid("basis", SpaceKind::Torus);
  forbid("vertices", SpaceKind::Graph);
  forbid("edges", SpaceKind::Graph);
  forbid("sides", SpaceKind::Apartment);
  forbid("profile", SpaceKind::Revolution);
  forbid("epsilon", SpaceKind::Revolution);
  forbid("h", SpaceKind::Revolution);

  switch (cfg.space) {
    case SpaceKind::Torus: {
      const std::string* basis = get("basis");
      if (!basis) throw CliError("config", "space 'torus' needs key 'basis'");
      cfg.basis = parse_basis(*basis);
      break;
    }
    case SpaceKind::Graph: {
      const std::string* vertices = get("vertices");
      const std::string* edges = get("edges");
      if (!vertices || !edges)
        throw CliError("config", "space 'graph' needs keys 'vertices' and 'edges'");
      cfg.vertices =
          static_cast<std::size_t>(parse_int_value("vertices", *vertices, 1, 1000000));
      cfg.edges = parse_edges(*edges);
      break;
    }
    case SpaceKind::Apartment: {
      const std::string* sides = get("sides");
      if (!sides) throw CliError("config", "space 'apartment' needs key 'sides'");
      cfg.sides = parse_vecq_value("sides", *sides);
      break;
    }
    case SpaceKind::Revolution: {
      const std::string* profile = get("profile");
      if (!profile) throw CliError("config", "space 'revolution' needs key 'profile'");
      cfg.profile = *profile;
      if (cfg.profile == "round") {
        if (get("epsilon") || get("h"))
          throw CliError("config", "profile 'round' takes no shape keys");
      } else if (cfg.profile == "zoll") {
        const std::string* eps = get("epsilon");
        if (!eps) throw CliError("config", "profile 'zoll' needs key 'epsilon'");
        cfg.epsilon = parse_real_value("epsilon", *eps);
        // h(u) = epsilon * u * (1 - u^2) = epsilon*u - epsilon*u^3
        cfg.h_coeffs = {0.0, cfg.epsilon, 0.0, -cfg.epsilon};
        if (get("h")) throw CliError("config", "profile 'zoll' takes no key 'h'");
      } else if (cfg.profile == "poly") {
        const std::string* h = get("h");
        if (!h) throw CliError("config", "profile 'poly' needs key 'h'");
        cfg.h_coeffs = parse_reals("h", *h);
        if (get("epsilon"))
          throw CliError("config", "profile 'poly' takes no key 'epsilon'");
      } else {
        throw CliError("config", "unknown profile '" + cfg.profile +
                                     "' (round, zoll, or poly)");
      }
      break;
    }
  }

  if (const std::string* op = get("operation")) cfg.op = parse_operation(*op);
  for (const auto& [k, v] : raw)
    if (param_keys().count(k)) cfg.params[k] = v;
  return cfg;
}

std::string ParamReader::take(const std::string& key) {
  auto it = left_.find(key);
  if (it == left_.end())
    throw CliError("config", "missing required parameter '" + key + "'");
  std::string v = it->second;
  left_.erase(it);
  return v;
}

std::optional<std::string> ParamReader::take_opt(const std::string& key) {
  auto it = left_.find(key);
  if (it == left_.end()) return std::nullopt;
  std::string v = it->second;
  left_.erase(it);
  return v;
}

Rat ParamReader::take_rat(const std::string& key) {
  return parse_rat_value(key, take(key));
}

Rat ParamReader::take_rat(const std::string& key, const Rat& fallback) {
  auto v = take_opt(key);
  return v ? parse_rat_value(key, *v) : fallback;
}

double ParamReader::take_real(const std::string& key, double fallback) {
  auto v = take_opt(key);
  return v ? parse_real_value(key, *v) : fallback;
}

long long ParamReader::take_int(const std::string& key, long long fallback,
                                long long lo, long long hi) {
  auto v = take_opt(key);
  return v ? parse_int_value(key, *v, lo, hi) : fallback;
}

std::uint64_t ParamReader::take_seed() {
  auto v = take_opt("seed");
  if (!v) return 0;
  try {
    std::size_t used = 0;
    unsigned long long s = std::stoull(*v, &used);
    if (strip(v->substr(used)).empty()) return s;
  } catch (const std::exception&) {
  }
  throw CliError("config", "key 'seed': bad integer '" + *v + "'");
}

double ParamReader::take_tol() {
  double tol = take_real("tol", 0.0);
  if (tol < 0) throw CliError("config", "key 'tol': must be nonnegative");
  return tol;
}

std::string ParamReader::take_out(const std::string& fallback) {
  auto v = take_opt("out");
  return v ? *v : fallback;
}

void ParamReader::finish(Operation op) {
  if (left_.empty()) return;
  throw CliError("config", "parameter '" + left_.begin()->first +
                               "' does not apply to operation '" +
                               operation_str(op) + "'");
}

}  // namespace geocli
