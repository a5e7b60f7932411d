#pragma once

// Finite metric graphs with unit edges whose universal cover is a tree:
// connected, minimum degree two (loops count twice), so every direction
// extends forever upstairs. Geodesics are projections of tree geodesics,
// i.e. non-backtracking edge paths with fractional first and last legs.
// Light rays between two marked points are the geodesics whose open
// interiors avoid both marks. The midpoint-type machinery of the
// reflection chamber (rank one, unit side) yields a finite set of points
// that blocks every light ray at its midpoint, for every horizon.

#include "geolab/blocking.hpp"
#include "geolab/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace geolab {

struct GraphEdge {
  std::size_t tail = 0;
  std::size_t head = 0;
};

// A point of the quotient: either a vertex or an interior point of an
// edge at a rational offset along the edge's stored orientation.
// Canonical form is unique: offsets 0 and 1 collapse to the vertex.
struct GraphPoint {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t vertex = npos;
  std::size_t edge = npos;
  Rat offset{0};

  bool is_vertex() const { return vertex != npos; }

  friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
    return a.vertex == b.vertex && a.edge == b.edge && a.offset == b.offset;
  }
  friend bool operator!=(const GraphPoint& a, const GraphPoint& b) { return !(a == b); }
};

// A geodesic between two marked points: a non-backtracking sequence of
// directed edges, entered at along-position `start` on the first and left
// at along-position `end` on the last. Directed edge 2e runs along edge
// e's orientation, 2e+1 against it; along-positions are measured in the
// direction of travel.
struct GraphRay {
  std::vector<std::size_t> dedges;
  Rat start{0};
  Rat end{1};
  Rat length{0};
  std::vector<std::size_t> via;  // junction vertices between consecutive dedges
};

class QuotientGraph {
 public:
  using Point = GraphPoint;
  using Ray = GraphRay;

  QuotientGraph(std::size_t vertex_count, std::vector<GraphEdge> edges);

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::size_t degree(std::size_t v) const { return out_[v].size(); }

  std::size_t dedge_count() const { return 2 * edges_.size(); }
  std::size_t dedge_tail(std::size_t d) const;
  std::size_t dedge_head(std::size_t d) const;
  static std::size_t dedge_reverse(std::size_t d) { return d ^ 1; }
  static std::size_t dedge_edge(std::size_t d) { return d >> 1; }
  const std::vector<std::size_t>& out_dedges(std::size_t v) const { return out_[v]; }

  GraphPoint at_vertex(std::size_t v) const;
  GraphPoint on_edge(std::size_t e, const Rat& offset) const;  // canonicalizes 0/1

  // Shortest closed non-backtracking cycle length; half of it is the
  // injectivity radius of the quotient metric.
  std::size_t girth() const;
  Rat injectivity_radius() const { return Rat(Int(girth()), 2); }

  // All light rays from x to y of length in (0, T], sorted by
  // (length, directed-edge sequence, start offset).
  std::vector<GraphRay> enumerate_light(const GraphPoint& x, const GraphPoint& y,
                                        const Rat& T) const;

  // The finite blocking set from the rank-one chamber midpoint types of
  // the two offsets, symmetrized over both edge orientations: on every
  // edge the interior offsets of the realized types, plus all vertices
  // when a boundary type is realized. Blocks every light ray between x
  // and y at its midpoint, independent of horizon.
  std::vector<GraphPoint> type_blocking_set(const GraphPoint& x,
                                            const GraphPoint& y) const;

  // counts[k] = number of non-backtracking paths u -> v of length
  // exactly k (k >= 1; counts[0] = 0), exact integers via the
  // directed-edge transfer operator.
  std::vector<Int> geodesic_count_series(std::size_t u, std::size_t v,
                                         int max_length) const;

  // Spectral radius of the directed-edge (non-backtracking) adjacency
  // operator: the exponential growth rate of the geodesic counts. Power
  // iteration with two-sided Rayleigh bounds as the stopping rule.
  double growth_oracle(double rel_tol = 1e-10, int max_iterations = 200000) const;

  // The point at arc-length position t in [0, length] along a ray.
  GraphPoint point_at(const GraphRay& r, const Rat& t) const;

  // Space hooks: exact, tolerance ignored.
  std::optional<HitParam> hit_param(const GraphRay& r, const GraphPoint& p,
                                    double tol) const;
  bool interiors_disjoint(const GraphRay& a, const GraphRay& b, double tol) const;
  double ray_length(const GraphRay& r) const { return approx(r.length); }
  bool ray_before(const GraphRay& a, const GraphRay& b) const;

 private:
  void check_point(const GraphPoint& p) const;

  std::size_t vertex_count_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;  // sorted dedge ids per vertex
};

static_assert(Space<QuotientGraph>);

}  // namespace geolab
