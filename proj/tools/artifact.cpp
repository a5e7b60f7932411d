#include "artifact.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geocli {

using geolab::GraphPoint;
using geolab::GraphRay;
using geolab::GrowthSeries;
using geolab::HitParam;
using geolab::Int;
using geolab::Rat;
using geolab::ShootingResult;
using geolab::TorusRay;
using geolab::Vec3;
using geolab::VecQ;

std::string int_str(const Int& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fmt_double(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

GraphPoint parse_graph_point(const geolab::QuotientGraph& g, const std::string& key,
                             const std::string& text) {
  try {
    if (text.size() >= 2 && text[0] == 'v') {
      long long v = parse_int_value(key, text.substr(1), 0, 1000000);
      return g.at_vertex(static_cast<std::size_t>(v));
    }
    if (text.size() >= 2 && text[0] == 'e') {
      std::size_t colon = text.find(':');
      if (colon != std::string::npos && colon > 1) {
        long long e = parse_int_value(key, text.substr(1, colon - 1), 0, 1000000);
        Rat off = parse_rat_value(key, text.substr(colon + 1));
        return g.on_edge(static_cast<std::size_t>(e), off);
      }
    }
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError("config", "key '" + key + "': " + e.what());
  }
  throw CliError("config", "key '" + key + "': graph points read 'v<i>' or " +
                               "'e<i>:<offset>', got '" + text + "'");
}

std::string graph_point_str(const GraphPoint& p) {
  if (p.is_vertex()) return "v" + std::to_string(p.vertex);
  return "e" + std::to_string(p.edge) + ":" + geolab::rational_str(p.offset);
}

std::array<double, 2> parse_polar(const std::string& key, const std::string& text) {
  std::vector<std::string> parts = split_list(text, ',');
  if (parts.size() != 2)
    throw CliError("config", "key '" + key + "': revolution points read 'r,phi'");
  double r = parse_real_value(key, parts[0]);
  double phi = parse_real_value(key, parts[1]);
  if (!(r >= 0.0 && r <= 3.14159265358979324 + 1e-12))
    throw CliError("config", "key '" + key + "': r must lie in [0, pi]");
  return {r, phi};
}

Json space_json(const ExperimentConfig& cfg) {
  Json s;
  s["kind"] = space_kind_str(cfg.space);
  switch (cfg.space) {
    case SpaceKind::Torus: {
      Json rows = Json::array();
      for (const VecQ& r : cfg.basis) rows.push_back(geolab::vecq_str(r));
      s["basis"] = rows;
      break;
    }
    case SpaceKind::Graph: {
      s["vertices"] = cfg.vertices;
      Json es = Json::array();
      for (const auto& [a, b] : cfg.edges)
        es.push_back(std::to_string(a) + "-" + std::to_string(b));
      s["edges"] = es;
      break;
    }
    case SpaceKind::Apartment:
      s["sides"] = geolab::vecq_str(cfg.sides);
      break;
    case SpaceKind::Revolution:
      s["profile"] = cfg.profile;
      if (cfg.profile == "zoll") s["epsilon"] = cfg.epsilon;
      if (cfg.profile == "poly") s["h"] = cfg.h_coeffs;
      break;
  }
  return s;
}

Json make_envelope(const ExperimentConfig& cfg, const char* kind) {
  Json doc;
  doc["schema"] = "geolab.artifact.v1";
  doc["kind"] = kind;
  doc["space"] = space_json(cfg);
  doc["operation"] = operation_str(*cfg.op);
  doc["parameters"] = Json::object();
  return doc;
}

Json torus_ray_json(const TorusRay& r) {
  Json j;
  j["coeff"] = geolab::vecq_str(r.coeff);
  j["len2"] = geolab::rational_str(r.len2);
  j["length"] = r.length;
  return j;
}

Json graph_ray_json(const GraphRay& r) {
  Json j;
  j["dedges"] = r.dedges;
  j["start"] = geolab::rational_str(r.start);
  j["end"] = geolab::rational_str(r.end);
  j["length"] = geolab::rational_str(r.length);
  j["via"] = r.via;
  return j;
}

Json vec3_json(const Vec3& u) { return Json::array({u[0], u[1], u[2]}); }

Json revolution_ray_json(const ShootingResult& r, std::size_t max_samples) {
  Json j;
  j["theta"] = r.theta;
  j["length"] = r.length;
  j["miss"] = r.miss;
  j["clairaut_drift"] = r.clairaut_drift;
  j["origin"] = vec3_json(r.origin);
  j["terminal"] = vec3_json(r.terminal);
  Json samples = Json::array();
  const std::size_t n = r.samples.size();
  if (n > 0 && max_samples >= 2) {
    std::size_t stride = 1;
    while ((n - 1 + stride - 1) / stride + 1 > max_samples) ++stride;
    for (std::size_t i = 0; i < n; i += stride) {
      const auto& s = r.samples[i];
      samples.push_back(Json::array(
          {s.s, s.u[0], s.u[1], s.u[2], s.v[0], s.v[1], s.v[2]}));
    }
    const auto& last = r.samples[n - 1];
    if ((n - 1) % stride != 0)
      samples.push_back(Json::array({last.s, last.u[0], last.u[1], last.u[2],
                                     last.v[0], last.v[1], last.v[2]}));
  }
  j["samples"] = std::move(samples);
  return j;
}

Json hits_json(
    const std::vector<std::tuple<std::size_t, std::size_t, HitParam>>& hits) {
  Json out = Json::array();
  for (const auto& [ray, blocker, at] : hits) {
    Json h;
    h["ray"] = ray;
    h["blocker"] = blocker;
    h["exact"] = at.exact;
    if (at.exact)
      h["frac"] = geolab::rational_str(at.frac_exact);
    else
      h["frac"] = at.frac;
    out.push_back(std::move(h));
  }
  return out;
}

Json family_json(const geolab::DisjointFamily& f) {
  Json j;
  j["rays"] = f.rays;
  j["exhaustive"] = f.exhaustive;
  j["exact_geometry"] = f.exact_geometry;
  if (f.pairwise_gap) j["gap"] = *f.pairwise_gap;
  return j;
}

Json check_json(const char* name, bool pass) {
  Json c;
  c["name"] = name;
  c["pass"] = pass;
  return c;
}

std::string dump_json(const Json& doc) { return doc.dump(1, ' ') + "\n"; }

void write_text_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError("io", "cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw CliError("io", "short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("io", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json load_artifact_json(const std::string& path) {
  std::string text = read_text_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw CliError("artifact", path + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != "geolab.artifact.v1")
    throw CliError("artifact", path + ": not a geolab.artifact.v1 document");
  return doc;
}

namespace {

// Artifact field access with a uniform corrupt-document error.
const Json& need(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw CliError("artifact", std::string("missing field '") + key + "'");
  return obj.at(key);
}

Rat rat_field(const Json& v, const char* key) {
  if (!v.is_string()) throw CliError("artifact", std::string("field '") + key +
                                                     "' must be a rational string");
  try {
    return geolab::parse_rational(v.get<std::string>());
  } catch (const std::exception& e) {
    throw CliError("artifact", std::string("field '") + key + "': " + e.what());
  }
}

Int int_field(const Json& v, const char* key) {
  if (!v.is_string()) throw CliError("artifact", std::string("field '") + key +
                                                     "' must be an integer string");
  try {
    return Int(v.get<std::string>());
  } catch (const std::exception& e) {
    throw CliError("artifact", std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

RebuiltSpace rebuild_space(const Json& artifact) {
  const Json& s = need(artifact, "space");
  std::string kind = need(s, "kind").get<std::string>();
  RebuiltSpace out;
  try {
    if (kind == "torus") {
      out.kind = SpaceKind::Torus;
      std::vector<VecQ> basis;
      for (const Json& row : need(s, "basis"))
        basis.push_back(geolab::parse_vecq(row.get<std::string>()));
      out.torus.emplace(basis);
    } else if (kind == "graph") {
      out.kind = SpaceKind::Graph;
      std::vector<geolab::GraphEdge> edges;
      for (const Json& e : need(s, "edges")) {
        std::string text = e.get<std::string>();
        std::size_t dash = text.find('-');
        if (dash == std::string::npos)
          throw CliError("artifact", "bad edge '" + text + "'");
        edges.push_back({static_cast<std::size_t>(std::stoull(text.substr(0, dash))),
                         static_cast<std::size_t>(std::stoull(text.substr(dash + 1)))});
      }
      out.graph.emplace(need(s, "vertices").get<std::size_t>(), edges);
    } else if (kind == "apartment") {
      out.kind = SpaceKind::Apartment;
      out.apartment.emplace(geolab::parse_vecq(need(s, "sides").get<std::string>()));
    } else if (kind == "revolution") {
      out.kind = SpaceKind::Revolution;
      std::string profile = need(s, "profile").get<std::string>();
      if (profile == "round")
        out.revolution = geolab::RevolutionMetric::round();
      else if (profile == "zoll")
        out.revolution = geolab::RevolutionMetric::zoll(need(s, "epsilon").get<double>());
      else if (profile == "poly")
        out.revolution.emplace(need(s, "h").get<std::vector<double>>());
      else
        throw CliError("artifact", "unknown profile '" + profile + "'");
    } else {
      throw CliError("artifact", "unknown space kind '" + kind + "'");
    }
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError("artifact", std::string("space does not rebuild: ") + e.what());
  }
  return out;
}

std::vector<TorusRay> rebuild_torus_rays(const geolab::TorusSpace& t,
                                         const Json& artifact) {
  VecQ x = geolab::parse_vecq(
      need(need(artifact, "parameters"), "x").get<std::string>());
  std::vector<TorusRay> out;
  try {
    for (const Json& r : need(artifact, "rays")) {
      VecQ coeff = geolab::parse_vecq(need(r, "coeff").get<std::string>());
      out.push_back(t.make_ray(t.canonical(x), t.from_coeffs(coeff)));
    }
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError("artifact", std::string("rays do not rebuild: ") + e.what());
  }
  return out;
}

std::vector<GraphRay> rebuild_graph_rays(const geolab::QuotientGraph& g,
                                         const Json& artifact) {
  std::vector<GraphRay> out;
  for (const Json& r : need(artifact, "rays")) {
    GraphRay ray;
    for (const Json& d : need(r, "dedges")) {
      std::size_t id = d.get<std::size_t>();
      if (id >= g.dedge_count()) throw CliError("artifact", "directed edge out of range");
      ray.dedges.push_back(id);
    }
    if (ray.dedges.empty()) throw CliError("artifact", "empty ray");
    ray.start = rat_field(need(r, "start"), "start");
    ray.end = rat_field(need(r, "end"), "end");
    ray.length = rat_field(need(r, "length"), "length");
    for (const Json& v : need(r, "via")) ray.via.push_back(v.get<std::size_t>());
    out.push_back(std::move(ray));
  }
  return out;
}

std::vector<ShootingResult> rebuild_revolution_rays(const Json& artifact) {
  std::vector<ShootingResult> out;
  for (const Json& r : need(artifact, "rays")) {
    ShootingResult ray;
    ray.theta = need(r, "theta").get<double>();
    ray.length = need(r, "length").get<double>();
    ray.miss = need(r, "miss").get<double>();
    ray.clairaut_drift = need(r, "clairaut_drift").get<double>();
    const Json& origin = need(r, "origin");
    const Json& terminal = need(r, "terminal");
    for (int k = 0; k < 3; ++k) {
      ray.origin[k] = origin.at(k).get<double>();
      ray.terminal[k] = terminal.at(k).get<double>();
    }
    for (const Json& s : need(r, "samples")) {
      if (!s.is_array() || s.size() != 7)
        throw CliError("artifact", "samples must be [s,x,y,z,vx,vy,vz]");
      geolab::RevSample sample;
      sample.s = s.at(0).get<double>();
      for (int k = 0; k < 3; ++k) {
        sample.u[k] = s.at(1 + k).get<double>();
        sample.v[k] = s.at(4 + k).get<double>();
      }
      ray.samples.push_back(sample);
    }
    out.push_back(std::move(ray));
  }
  return out;
}

std::vector<RebuiltHit> rebuild_hits(const Json& artifact) {
  std::vector<RebuiltHit> out;
  for (const Json& h : need(artifact, "hits")) {
    RebuiltHit hit;
    hit.ray = need(h, "ray").get<std::size_t>();
    hit.blocker = need(h, "blocker").get<std::size_t>();
    if (need(h, "exact").get<bool>())
      hit.at = HitParam::from_exact(rat_field(need(h, "frac"), "frac"));
    else
      hit.at = HitParam::from_approx(need(h, "frac").get<double>());
    out.push_back(hit);
  }
  return out;
}

GrowthSeries rebuild_series_json(const Json& artifact) {
  const Json& s = need(artifact, "series");
  GrowthSeries out;
  out.source = need(s, "source").get<std::string>();
  out.inj2 = rat_field(need(s, "inj2"), "inj2");
  for (const Json& h : need(s, "horizons")) out.horizons.push_back(rat_field(h, "horizons"));
  for (const Json& n : need(s, "n")) out.n.push_back(int_field(n, "n"));
  for (const Json& m : need(s, "m")) out.m.push_back(int_field(m, "m"));
  try {
    geolab::validate_series(out);
  } catch (const std::exception& e) {
    throw CliError("artifact", std::string("series invalid: ") + e.what());
  }
  return out;
}

std::string growth_csv(const ExperimentConfig& cfg, const GrowthSeries& s) {
  std::ostringstream os;
  os << "# geolab.growth.v1\n";
  os << "# space = " << space_kind_str(cfg.space) << "\n";
  os << "# source = " << s.source << "\n";
  os << "# inj2 = " << geolab::rational_str(s.inj2) << "\n";
  os << "T,n,m\n";
  for (std::size_t i = 0; i < s.horizons.size(); ++i)
    os << geolab::rational_str(s.horizons[i]) << "," << s.n[i] << "," << s.m[i]
       << "\n";
  return os.str();
}

GrowthSeries rebuild_series_csv(const std::string& text, const std::string& where) {
  GrowthSeries out;
  std::istringstream is(text);
  std::string line;
  bool saw_header = false;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) -> CliError {
    return CliError("artifact", where + ":" + std::to_string(lineno) + ": " + why);
  };
  try {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        key.erase(std::remove(key.begin(), key.end(), ' '), key.end());
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        while (!value.empty() && (value.back() == '\r' || value.back() == ' '))
          value.pop_back();
        if (key == "source") out.source = value;
        if (key == "inj2") out.inj2 = geolab::parse_rational(value);
        continue;
      }
      while (!line.empty() && line.back() == '\r') line.pop_back();
      if (!saw_header) {
        if (line != "T,n,m") throw fail("expected header 'T,n,m'");
        saw_header = true;
        continue;
      }
      std::vector<std::string> cells = split_list(line, ',');
      if (cells.size() != 3) throw fail("expected three cells");
      out.horizons.push_back(geolab::parse_rational(cells[0]));
      out.n.push_back(Int(cells[1]));
      out.m.push_back(Int(cells[2]));
    }
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e.what());
  }
  if (!saw_header) throw CliError("artifact", where + ": not a geolab growth CSV");
  try {
    geolab::validate_series(out);
  } catch (const std::exception& e) {
    throw CliError("artifact", where + ": series invalid: " + e.what());
  }
  return out;
}

const char* artifact_schema_text() {
  return R"SCHEMA({
 "$schema": "http://json-schema.org/draft-07/schema#",
 "title": "geolab.artifact.v1",
 "description": "Artifacts written by the geolab command line tool. Exact rationals travel as strings ('p/q' or 'p'), exact integers as decimal strings, numeric values as JSON numbers. Growth series are written as CSV (header 'T,n,m' after '# key = value' preamble lines), not JSON.",
 "oneOf": [
  {"$ref": "#/$defs/enumeration"},
  {"$ref": "#/$defs/certificate"},
  {"$ref": "#/$defs/classification"},
  {"$ref": "#/$defs/entropy"},
  {"$ref": "#/$defs/scan"},
  {"$ref": "#/$defs/error"}
 ],
 "$defs": {
  "rational": {"type": "string", "pattern": "^-?[0-9]+(/-?[0-9]+)?$"},
  "bigint": {"type": "string", "pattern": "^-?[0-9]+$"},
  "vecq": {"type": "string", "description": "comma separated rationals"},
  "vec3": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
  "graphPoint": {"type": "string", "pattern": "^(v[0-9]+|e[0-9]+:.+)$"},
  "space": {
   "type": "object",
   "required": ["kind"],
   "properties": {
    "kind": {"enum": ["torus", "graph", "apartment", "revolution"]},
    "basis": {"type": "array", "items": {"$ref": "#/$defs/vecq"}},
    "vertices": {"type": "integer", "minimum": 1},
    "edges": {"type": "array", "items": {"type": "string", "pattern": "^[0-9]+-[0-9]+$"}},
    "sides": {"$ref": "#/$defs/vecq"},
    "profile": {"enum": ["round", "zoll", "poly"]},
    "epsilon": {"type": "number"},
    "h": {"type": "array", "items": {"type": "number"}}
   }
  },
  "check": {
   "type": "object",
   "required": ["name", "pass"],
   "properties": {"name": {"type": "string"}, "pass": {"type": "boolean"}}
  },
  "hit": {
   "type": "object",
   "required": ["ray", "blocker", "exact", "frac"],
   "properties": {
    "ray": {"type": "integer"},
    "blocker": {"type": "integer"},
    "exact": {"type": "boolean"},
    "frac": {"oneOf": [{"$ref": "#/$defs/rational"}, {"type": "number"}]}
   }
  },
  "torusRay": {
   "type": "object",
   "required": ["coeff", "len2", "length"],
   "properties": {
    "coeff": {"$ref": "#/$defs/vecq"},
    "len2": {"$ref": "#/$defs/rational"},
    "length": {"type": "number"}
   }
  },
  "graphRay": {
   "type": "object",
   "required": ["dedges", "start", "end", "length", "via"],
   "properties": {
    "dedges": {"type": "array", "items": {"type": "integer"}},
    "start": {"$ref": "#/$defs/rational"},
    "end": {"$ref": "#/$defs/rational"},
    "length": {"$ref": "#/$defs/rational"},
    "via": {"type": "array", "items": {"type": "integer"}}
   }
  },
  "revolutionRay": {
   "type": "object",
   "required": ["theta", "length", "miss", "clairaut_drift", "origin", "terminal", "samples"],
   "properties": {
    "theta": {"type": "number"},
    "length": {"type": "number"},
    "miss": {"type": "number"},
    "clairaut_drift": {"type": "number"},
    "origin": {"$ref": "#/$defs/vec3"},
    "terminal": {"$ref": "#/$defs/vec3"},
    "samples": {
     "type": "array",
     "description": "subsampled [s, x, y, z, vx, vy, vz] rows along the path",
     "items": {"type": "array", "items": {"type": "number"}, "minItems": 7, "maxItems": 7}
    }
   }
  },
  "ray": {
   "oneOf": [
    {"$ref": "#/$defs/torusRay"},
    {"$ref": "#/$defs/graphRay"},
    {"$ref": "#/$defs/revolutionRay"}
   ]
  },
  "family": {
   "type": "object",
   "description": "pairwise interior-disjoint ray family; size is a lower bound for the blocking number",
   "required": ["rays", "exhaustive", "exact_geometry"],
   "properties": {
    "rays": {"type": "array", "items": {"type": "integer"}},
    "exhaustive": {"type": "boolean"},
    "exact_geometry": {"type": "boolean"},
    "gap": {"type": "number"}
   }
  },
  "envelope": {
   "type": "object",
   "required": ["schema", "kind", "space", "operation", "parameters"],
   "properties": {
    "schema": {"const": "geolab.artifact.v1"},
    "kind": {"enum": ["enumeration", "certificate", "classification", "entropy", "scan"]},
    "space": {"$ref": "#/$defs/space"},
    "operation": {"enum": ["enumerate", "block", "verify", "classify", "growth", "entropy", "scan"]},
    "parameters": {"type": "object"},
    "checks": {"type": "array", "items": {"$ref": "#/$defs/check"}}
   }
  },
  "enumeration": {
   "allOf": [{"$ref": "#/$defs/envelope"}],
   "description": "light rays (or apartment orbit targets) for one pair and horizon",
   "properties": {
    "count": {"type": "integer"},
    "rays": {"type": "array", "items": {"$ref": "#/$defs/ray"}},
    "targets": {"type": "array"},
    "continuum": {"type": "boolean"},
    "angles_scanned": {"type": "integer"}
   }
  },
  "certificate": {
   "allOf": [{"$ref": "#/$defs/envelope"}],
   "description": "blocking verification: one earliest interior hit per ray, or the first unblocked ray",
   "properties": {
    "blockers": {"type": "array"},
    "rays": {"type": "array", "items": {"$ref": "#/$defs/ray"}},
    "blocked": {"type": "boolean"},
    "hits": {"type": "array", "items": {"$ref": "#/$defs/hit"}},
    "unblocked_ray": {"type": "integer"},
    "upper_bound": {"type": "integer", "description": "distinct blockers used"},
    "lower_bound": {"type": "integer", "description": "disjoint family size"},
    "family": {"$ref": "#/$defs/family"},
    "types": {"type": "array", "items": {"$ref": "#/$defs/vecq"}, "description": "apartment midpoint types"},
    "targets": {"type": "array", "description": "apartment orbit targets with midpoints and type indices"}
   }
  },
  "classification": {
   "allOf": [{"$ref": "#/$defs/envelope"}],
   "properties": {
    "light_count": {"type": "integer"},
    "verdict": {"enum": ["cross-blocked-consistent", "cross-blocked-violated", "sphere-blocked-consistent", "sphere-blocked-violated", "indeterminate"]},
    "family": {"$ref": "#/$defs/family"},
    "distance2": {"$ref": "#/$defs/rational"},
    "diameter2": {"oneOf": [{"$ref": "#/$defs/rational"}, {"type": "null"}]},
    "distance": {"type": "number"},
    "diameter": {"type": "number"},
    "x_equals_y": {"type": "boolean"},
    "continuum": {"type": "boolean"}
   }
  },
  "entropy": {
   "allOf": [{"$ref": "#/$defs/envelope"}],
   "properties": {
    "series": {
     "type": "object",
     "required": ["source", "inj2", "horizons", "n", "m"],
     "properties": {
      "source": {"type": "string"},
      "inj2": {"$ref": "#/$defs/rational"},
      "horizons": {"type": "array", "items": {"$ref": "#/$defs/rational"}},
      "n": {"type": "array", "items": {"$ref": "#/$defs/bigint"}},
      "m": {"type": "array", "items": {"$ref": "#/$defs/bigint"}}
     }
    },
    "estimate": {
     "type": "object",
     "required": ["slope", "at_horizon", "residual"],
     "properties": {
      "slope": {"type": "number"},
      "at_horizon": {"type": "number"},
      "residual": {"type": "number"}
     }
    },
    "oracle": {"type": "number", "description": "log of the non-backtracking spectral radius; graphs only"},
    "counting": {
     "type": "object",
     "required": ["holds", "rows"],
     "properties": {
      "holds": {"type": "boolean"},
      "tightest": {"oneOf": [{"type": "integer"}, {"type": "null"}]},
      "rows": {
       "type": "array",
       "items": {
        "type": "object",
        "required": ["T", "n", "m", "holds", "ratio"],
        "properties": {
         "T": {"$ref": "#/$defs/rational"},
         "n": {"$ref": "#/$defs/bigint"},
         "m": {"$ref": "#/$defs/bigint"},
         "holds": {"type": "boolean"},
         "ratio": {"oneOf": [{"type": "number"}, {"const": "inf"}]}
        }
       }
      }
     }
    }
   }
  },
  "scan": {
   "allOf": [{"$ref": "#/$defs/envelope"}],
   "properties": {
    "diameter": {"type": "number"},
    "pairs_examined": {"type": "integer"},
    "pairs_unresolved": {"type": "integer"},
    "violations": {
     "type": "array",
     "items": {
      "type": "object",
      "required": ["x", "y", "x_polar", "y_polar", "distance", "rays", "family"],
      "properties": {
       "x": {"$ref": "#/$defs/vec3"},
       "y": {"$ref": "#/$defs/vec3"},
       "x_polar": {"type": "array", "items": {"type": "number"}},
       "y_polar": {"type": "array", "items": {"type": "number"}},
       "distance": {"type": "number"},
       "rays": {"type": "array", "items": {"$ref": "#/$defs/revolutionRay"}},
       "family": {"type": "array", "items": {"type": "integer"}}
      }
     }
    }
   }
  },
  "error": {
   "type": "object",
   "description": "printed to stdout on any failure, paired with a nonzero exit",
   "required": ["schema", "error", "detail"],
   "properties": {
    "schema": {"const": "geolab.error.v1"},
    "error": {"enum": ["usage", "config", "io", "module", "artifact"]},
    "detail": {"type": "string"}
   }
  }
 }
}
)SCHEMA";
}

}  // namespace geocli
