#pragma once

// Artifact codecs: the JSON documents and the growth CSV the runners write,
// plus the loaders that turn them back into library types. Exact values
// travel as "p/q" strings, numeric values as JSON numbers, so a document
// re-parses into what produced it. Field order is fixed by construction and
// doubles print through the shortest round-trip form, which is what makes
// byte-identical reruns possible.

#include "config.hpp"
#include "geolab/apartment.hpp"
#include "geolab/blocking.hpp"
#include "geolab/entropy.hpp"
#include "geolab/graph.hpp"
#include "geolab/revolution.hpp"
#include "geolab/torus.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace geocli {

using Json = nlohmann::ordered_json;

std::string int_str(const geolab::Int& v);
std::string fmt_double(double v, int places);

// Point literals. Graph points read "v3" or "e2:1/3"; revolution points
// read "r,phi" in radians.
geolab::GraphPoint parse_graph_point(const geolab::QuotientGraph& g,
                                     const std::string& key, const std::string& text);
std::string graph_point_str(const geolab::GraphPoint& p);
std::array<double, 2> parse_polar(const std::string& key, const std::string& text);

// Envelope: schema tag, kind, space echo, operation name, empty parameter
// object for the runner to fill.
Json space_json(const ExperimentConfig& cfg);
Json make_envelope(const ExperimentConfig& cfg, const char* kind);

Json torus_ray_json(const geolab::TorusRay& r);
Json graph_ray_json(const geolab::GraphRay& r);
// Keeps at most max_samples of the stored samples (endpoints always kept)
// so loop certificates stay a few megabytes.
Json revolution_ray_json(const geolab::ShootingResult& r, std::size_t max_samples);
Json vec3_json(const geolab::Vec3& u);
// entries are (ray index, blocker index, hit parameter)
Json hits_json(
    const std::vector<std::tuple<std::size_t, std::size_t, geolab::HitParam>>& hits);
Json family_json(const geolab::DisjointFamily& f);
Json check_json(const char* name, bool pass);

std::string dump_json(const Json& doc);
void write_text_file(const std::string& path, const std::string& bytes);
std::string read_text_file(const std::string& path);

// Loaders. load_artifact_json insists on the v1 schema tag.
Json load_artifact_json(const std::string& path);

struct RebuiltSpace {
  SpaceKind kind = SpaceKind::Torus;
  std::optional<geolab::TorusSpace> torus;
  std::optional<geolab::QuotientGraph> graph;
  std::optional<geolab::Apartment> apartment;
  std::optional<geolab::RevolutionMetric> revolution;
};
RebuiltSpace rebuild_space(const Json& artifact);

std::vector<geolab::TorusRay> rebuild_torus_rays(const geolab::TorusSpace& t,
                                                 const Json& artifact);
std::vector<geolab::GraphRay> rebuild_graph_rays(const geolab::QuotientGraph& g,
                                                 const Json& artifact);
std::vector<geolab::ShootingResult> rebuild_revolution_rays(const Json& artifact);

struct RebuiltHit {
  std::size_t ray = 0;
  std::size_t blocker = 0;
  geolab::HitParam at;
};
std::vector<RebuiltHit> rebuild_hits(const Json& artifact);

// Growth series out of an entropy artifact or a growth CSV. Both validate
// through the library before returning.
geolab::GrowthSeries rebuild_series_json(const Json& artifact);
geolab::GrowthSeries rebuild_series_csv(const std::string& text,
                                        const std::string& where);
std::string growth_csv(const ExperimentConfig& cfg, const geolab::GrowthSeries& s);

const char* artifact_schema_text();

}  // namespace geocli
