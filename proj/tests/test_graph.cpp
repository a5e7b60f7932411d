#include <doctest.h>

#include "geolab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

using namespace geolab;

namespace {

// Oracle: enumerate every non-backtracking directed-edge sequence up to a
// depth bound, then decide independently, by direct interval reasoning,
// whether it carries a light ray from x to y of length <= T. No pruning,
// no shared logic with the library's event-driven search.
struct OracleRay {
  std::vector<std::size_t> dedges;
  Rat start, end, length;
  bool operator<(const OracleRay& o) const {
    return std::tie(length, dedges, start) < std::tie(o.length, o.dedges, o.start);
  }
  bool operator==(const OracleRay& o) const {
    return dedges == o.dedges && start == o.start && end == o.end;
  }
};

// position of point p along directed edge d, if p lies on that edge
std::optional<Rat> along_position(const QuotientGraph& g, std::size_t d,
                                  const GraphPoint& p) {
  if (p.is_vertex() || p.edge != QuotientGraph::dedge_edge(d)) return std::nullopt;
  return d % 2 == 0 ? p.offset : Rat(1) - p.offset;
}

std::vector<OracleRay> oracle_light(const QuotientGraph& g, const GraphPoint& x,
                                    const GraphPoint& y, const Rat& T) {
  // initial directed edges and entry offsets
  std::vector<std::pair<std::size_t, Rat>> starts;
  if (x.is_vertex()) {
    for (std::size_t d : g.out_dedges(x.vertex)) starts.push_back({d, Rat(0)});
  } else {
    starts.push_back({2 * x.edge, x.offset});
    starts.push_back({2 * x.edge + 1, Rat(1) - x.offset});
  }
  int depth = int(approx(T)) + 2;

  std::vector<OracleRay> out;
  std::vector<std::size_t> seq;
  auto consider = [&](const Rat& start) {
    // does this sequence, entered at `start`, end at y with length <= T
    // and an interior avoiding both marks?
    std::vector<Rat> ends;  // candidate exit positions on the last dedge
    std::size_t last = seq.back();
    if (y.is_vertex()) {
      if (g.dedge_head(last) == y.vertex) ends.push_back(Rat(1));
    } else if (auto q = along_position(g, last, y)) {
      ends.push_back(*q);
    }
    for (const Rat& end : ends) {
      Rat lo0 = start;
      if (seq.size() == 1 && end <= lo0) continue;
      Rat length = seq.size() == 1 ? end - lo0
                                   : (Rat(1) - lo0) + Rat(Int(seq.size()) - 2) + end;
      if (length <= 0 || length > T) continue;
      bool clean = true;
      for (std::size_t i = 0; i < seq.size() && clean; ++i) {
        Rat lo = i == 0 ? lo0 : Rat(0);
        Rat hi = i + 1 == seq.size() ? end : Rat(1);
        if (lo >= hi) { clean = false; break; }  // degenerate tail leg
        for (const GraphPoint* m : {&x, &y}) {
          if (auto q = along_position(g, seq[i], *m)) {
            if (*q > lo && *q < hi) clean = false;
          }
          if (m->is_vertex() && i + 1 < seq.size() &&
              g.dedge_head(seq[i]) == m->vertex)
            clean = false;
        }
      }
      if (clean) out.push_back({seq, lo0, end, length});
    }
  };
  auto extend = [&](auto&& self, int remaining, const Rat& start) -> void {
    consider(start);
    if (remaining == 0) return;
    std::size_t last = seq.back();
    for (std::size_t d : g.out_dedges(g.dedge_head(last))) {
      if (d == QuotientGraph::dedge_reverse(last)) continue;
      seq.push_back(d);
      self(self, remaining - 1, start);
      seq.pop_back();
    }
  };
  for (auto [d0, s0] : starts) {
    seq.assign(1, d0);
    extend(extend, depth, s0);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Oracle: count non-backtracking paths between vertices by brute walk.
std::vector<long long> oracle_geodesic_counts(const QuotientGraph& g, std::size_t u,
                                              std::size_t v, int max_length) {
  std::vector<long long> counts(max_length + 1, 0);
  auto walk = [&](auto&& self, std::size_t d, int len) -> void {
    if (g.dedge_head(d) == v) ++counts[len];
    if (len == max_length) return;
    for (std::size_t nd : g.out_dedges(g.dedge_head(d)))
      if (nd != QuotientGraph::dedge_reverse(d)) self(self, nd, len + 1);
  };
  for (std::size_t d : g.out_dedges(u)) walk(walk, d, 1);
  return counts;
}

QuotientGraph wedge() { return QuotientGraph(1, {{0, 0}, {0, 0}}); }
QuotientGraph theta() { return QuotientGraph(2, {{0, 1}, {0, 1}, {0, 1}}); }
QuotientGraph cycle(std::size_t n) {
  std::vector<GraphEdge> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return QuotientGraph(n, std::move(e));
}

Rat rq(const char* s) { return parse_rational(s); }

}  // namespace

TEST_CASE("graph construction validates the building axioms") {
  CHECK_THROWS_AS(QuotientGraph(0, {}), std::invalid_argument);
  // a leaf vertex has degree one
  CHECK_THROWS_AS(QuotientGraph(2, {{0, 1}, {0, 0}}), std::invalid_argument);
  // two components
  CHECK_THROWS_AS(QuotientGraph(2, {{0, 0}, {1, 1}}), std::invalid_argument);
  // out-of-range endpoint
  CHECK_THROWS_AS(QuotientGraph(1, {{0, 1}, {0, 0}}), std::invalid_argument);

  QuotientGraph w = wedge();
  CHECK(w.degree(0) == 4);
  QuotientGraph t = theta();
  CHECK(t.degree(0) == 3);
  CHECK(t.degree(1) == 3);
  CHECK(cycle(5).degree(2) == 2);
}

TEST_CASE("graph points canonicalize to vertices at edge ends") {
  QuotientGraph t = theta();
  GraphPoint p = t.on_edge(1, rq("1/3"));
  CHECK_FALSE(p.is_vertex());
  CHECK(p.edge == 1);
  CHECK(t.on_edge(1, Rat(0)) == t.at_vertex(0));
  CHECK(t.on_edge(1, Rat(1)) == t.at_vertex(1));
  CHECK_THROWS_AS(t.on_edge(3, rq("1/2")), std::invalid_argument);
  CHECK_THROWS_AS(t.on_edge(0, rq("3/2")), std::invalid_argument);
  CHECK_THROWS_AS(t.at_vertex(7), std::invalid_argument);
}

TEST_CASE("girth and injectivity radius") {
  CHECK(wedge().girth() == 1);
  CHECK(theta().girth() == 2);
  CHECK(cycle(7).girth() == 7);
  CHECK(wedge().injectivity_radius() == rq("1/2"));
  CHECK(cycle(7).injectivity_radius() == rq("7/2"));
  // square with one doubled side
  QuotientGraph g(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 1}});
  CHECK(g.girth() == 2);
}

TEST_CASE("wedge loops are the only light rays at every horizon") {
  QuotientGraph w = wedge();
  GraphPoint v = w.at_vertex(0);
  for (const Rat& T : {Rat(1), Rat(2), Rat(12)}) {
    auto rays = w.enumerate_light(v, v, T);
    REQUIRE(rays.size() == 4);
    for (const auto& r : rays) {
      CHECK(r.length == 1);
      CHECK(r.dedges.size() == 1);
      CHECK(r.start == 0);
      CHECK(r.end == 1);
    }
    // all four directed loop edges appear
    std::set<std::size_t> seen;
    for (const auto& r : rays) seen.insert(r.dedges[0]);
    CHECK(seen == std::set<std::size_t>{0, 1, 2, 3});
  }
  CHECK(w.enumerate_light(v, v, rq("1/2")).empty());
}

TEST_CASE("theta graph has three parallel rays, uniformly in T") {
  QuotientGraph t = theta();
  GraphPoint u = t.at_vertex(0), v = t.at_vertex(1);
  for (const Rat& T : {Rat(1), Rat(8)}) {
    auto rays = t.enumerate_light(u, v, T);
    REQUIRE(rays.size() == 3);
    for (const auto& r : rays) {
      CHECK(r.length == 1);
      CHECK(r.via.empty());
    }
  }
}

TEST_CASE("cycle rays are the two arcs") {
  QuotientGraph c = cycle(3);
  GraphPoint a = c.at_vertex(0), b = c.at_vertex(1);
  auto rays = c.enumerate_light(a, b, Rat(10));
  REQUIRE(rays.size() == 2);
  CHECK(rays[0].length == 1);
  CHECK(rays[1].length == 2);
  // closed loops at a vertex need the full circumference
  CHECK(c.enumerate_light(a, a, rq("29/10")).empty());
  auto loops = c.enumerate_light(a, a, Rat(3));
  REQUIRE(loops.size() == 2);
  CHECK(loops[0].length == 3);
  CHECK(loops[1].length == 3);
}

TEST_CASE("interior offsets get fractional legs") {
  QuotientGraph c = cycle(3);
  GraphPoint x = c.on_edge(0, rq("1/4"));
  GraphPoint y = c.on_edge(0, rq("3/4"));
  auto rays = c.enumerate_light(x, y, Rat(3));
  REQUIRE(rays.size() == 2);
  CHECK(rays[0].length == rq("1/2"));
  CHECK(rays[0].dedges == std::vector<std::size_t>{0});
  CHECK(rays[1].length == rq("5/2"));
  CHECK(rays[1].via.size() == 3);

  // a marked point splits its own loop: both ways around, length 3 each
  auto around = c.enumerate_light(x, x, Rat(4));
  REQUIRE(around.size() == 2);
  CHECK(around[0].length == 3);
  CHECK(around[1].length == 3);
}

TEST_CASE("rays avoid both marks and walk consistently") {
  QuotientGraph t = theta();
  GraphPoint x = t.on_edge(0, rq("1/3")), y = t.at_vertex(1);
  auto rays = t.enumerate_light(x, y, Rat(6));
  CHECK(!rays.empty());
  for (const auto& r : rays) {
    // interiors avoid the marks: no hit parameter exists for either
    CHECK_FALSE(t.hit_param(r, x, 0.0).has_value());
    CHECK_FALSE(t.hit_param(r, y, 0.0).has_value());
    // non-backtracking and junction bookkeeping
    for (std::size_t i = 0; i + 1 < r.dedges.size(); ++i) {
      CHECK(r.dedges[i + 1] != QuotientGraph::dedge_reverse(r.dedges[i]));
      CHECK(r.via[i] == t.dedge_head(r.dedges[i]));
      CHECK(r.via[i] == t.dedge_tail(r.dedges[i + 1]));
    }
    // endpoints project to the marks
    CHECK(t.point_at(r, Rat(0)) == x);
    CHECK(t.point_at(r, r.length) == y);
  }
  // canonical output order
  for (std::size_t i = 0; i + 1 < rays.size(); ++i)
    CHECK(t.ray_before(rays[i], rays[i + 1]));
}

TEST_CASE("light enumeration matches the brute-force oracle") {
  std::vector<QuotientGraph> graphs;
  graphs.push_back(wedge());
  graphs.push_back(theta());
  graphs.push_back(cycle(4));
  // square with a doubled side and a loop: degrees 3,4,2,3... loop at 3
  graphs.push_back(QuotientGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 1}, {3, 3}}));
  // two vertices, two parallel edges plus a loop on each end
  graphs.push_back(QuotientGraph(2, {{0, 1}, {0, 1}, {0, 0}, {1, 1}}));

  for (const auto& g : graphs) {
    std::vector<GraphPoint> marks;
    marks.push_back(g.at_vertex(0));
    marks.push_back(g.at_vertex(g.vertex_count() - 1));
    marks.push_back(g.on_edge(0, rq("1/3")));
    marks.push_back(g.on_edge(g.edge_count() - 1, rq("2/5")));
    for (const auto& x : marks)
      for (const auto& y : marks)
        for (const Rat& T : {Rat(3), rq("13/2")}) {
          auto got = g.enumerate_light(x, y, T);
          auto want = oracle_light(g, x, y, T);
          REQUIRE(got.size() == want.size());
          for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].dedges == want[i].dedges);
            CHECK(got[i].start == want[i].start);
            CHECK(got[i].end == want[i].end);
            CHECK(got[i].length == want[i].length);
          }
        }
  }
}

TEST_CASE("reversal symmetry of light counts") {
  QuotientGraph g(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 1}, {3, 3}});
  GraphPoint x = g.on_edge(1, rq("2/7")), y = g.at_vertex(3);
  for (const Rat& T : {Rat(4), Rat(9)}) {
    auto fwd = g.enumerate_light(x, y, T);
    auto bwd = g.enumerate_light(y, x, T);
    REQUIRE(fwd.size() == bwd.size());
    std::multiset<Rat> lf, lb;
    for (const auto& r : fwd) lf.insert(r.length);
    for (const auto& r : bwd) lb.insert(r.length);
    CHECK(lf == lb);
  }
}

TEST_CASE("type blocking set frozen values") {
  QuotientGraph w = wedge();
  GraphPoint v = w.at_vertex(0);
  auto bs = w.type_blocking_set(v, v);
  REQUIRE(bs.size() == 3);
  CHECK(bs[0] == w.at_vertex(0));
  CHECK(bs[1] == w.on_edge(0, rq("1/2")));
  CHECK(bs[2] == w.on_edge(1, rq("1/2")));

  QuotientGraph t = theta();
  auto ts = t.type_blocking_set(t.at_vertex(0), t.at_vertex(1));
  REQUIRE(ts.size() == 5);
  CHECK(ts[0] == t.at_vertex(0));
  CHECK(ts[1] == t.at_vertex(1));
  for (std::size_t e = 0; e < 3; ++e) CHECK(ts[2 + e] == t.on_edge(e, rq("1/2")));

  // quarter-offset pair on a loop: offsets {1/4, 1/2, 3/4} on both edges
  GraphPoint q = w.on_edge(0, rq("1/4"));
  auto qs = w.type_blocking_set(q, q);
  REQUIRE(qs.size() == 7);
  CHECK(qs[0] == w.at_vertex(0));
  std::size_t k = 1;
  for (std::size_t e = 0; e < 2; ++e)
    for (const char* off : {"1/4", "1/2", "3/4"}) CHECK(qs[k++] == w.on_edge(e, rq(off)));
}

TEST_CASE("type blocking set blocks every ray at its midpoint") {
  std::vector<QuotientGraph> graphs;
  graphs.push_back(wedge());
  graphs.push_back(theta());
  graphs.push_back(cycle(4));
  graphs.push_back(QuotientGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 1}, {3, 3}}));
  graphs.push_back(QuotientGraph(2, {{0, 1}, {0, 1}, {0, 0}, {1, 1}}));
  graphs.push_back(QuotientGraph(3, {{0, 1}, {1, 2}, {2, 0}, {0, 0}, {1, 2}}));

  for (const auto& g : graphs) {
    std::vector<GraphPoint> marks;
    marks.push_back(g.at_vertex(0));
    marks.push_back(g.at_vertex(g.vertex_count() / 2));
    marks.push_back(g.on_edge(0, rq("1/4")));
    marks.push_back(g.on_edge(g.edge_count() - 1, rq("3/7")));
    for (const auto& x : marks)
      for (const auto& y : marks) {
        auto blockers = g.type_blocking_set(x, y);
        auto rays = g.enumerate_light(x, y, Rat(10));
        if (rays.empty()) continue;
        auto outcome = verify_blocking(g, blockers, rays, 0.0);
        CHECK(outcome.blocked);
        // the midpoint of every ray is itself one of the blockers
        for (const auto& r : rays) {
          GraphPoint mid = g.point_at(r, r.length / 2);
          CHECK(std::count(blockers.begin(), blockers.end(), mid) == 1);
        }
      }
  }
}

TEST_CASE("vertex pair certificates hit exactly halfway") {
  QuotientGraph w = wedge();
  GraphPoint v = w.at_vertex(0);
  auto rays = w.enumerate_light(v, v, Rat(7));
  auto cert = verify_blocking(w, w.type_blocking_set(v, v), rays, 0.0);
  REQUIRE(cert.blocked);
  for (const auto& h : cert.cert.hits) {
    CHECK(h.at.exact);
    CHECK(h.at.frac_exact == rq("1/2"));
  }

  QuotientGraph t = theta();
  auto trays = t.enumerate_light(t.at_vertex(0), t.at_vertex(1), Rat(9));
  auto tcert = verify_blocking(
      t, t.type_blocking_set(t.at_vertex(0), t.at_vertex(1)), trays, 0.0);
  REQUIRE(tcert.blocked);
  for (const auto& h : tcert.cert.hits) CHECK(h.at.frac_exact == rq("1/2"));
}

TEST_CASE("certificates are horizon independent") {
  QuotientGraph g(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 1}, {3, 3}});
  GraphPoint x = g.on_edge(4, rq("1/3")), y = g.at_vertex(2);
  auto blockers = g.type_blocking_set(x, y);
  auto small = verify_blocking(g, blockers, g.enumerate_light(x, y, Rat(5)), 0.0);
  auto large = verify_blocking(g, blockers, g.enumerate_light(x, y, Rat(10)), 0.0);
  CHECK(small.blocked);
  CHECK(large.blocked);
  CHECK(small.cert.blockers.size() == blockers.size());
  CHECK(large.cert.blockers.size() == blockers.size());
}

TEST_CASE("wedge blocking number is exactly two") {
  QuotientGraph w = wedge();
  GraphPoint v = w.at_vertex(0);
  auto rays = w.enumerate_light(v, v, Rat(6));
  auto pool = w.type_blocking_set(v, v);
  auto picked = min_blockers(w, rays, pool, 0.0);
  CHECK(picked.chosen.size() == 2);
  // the vertex itself blocks nothing; the two loop midpoints do the work
  for (std::size_t i : picked.chosen) CHECK_FALSE(pool[i].is_vertex());
  auto family = blocking_lower_bound(w, rays, 0.0);
  CHECK(family.rays.size() == 2);
  CHECK(family.exhaustive);
}

TEST_CASE("graph ray interiors: junctions and interval overlaps") {
  QuotientGraph t = theta();
  GraphPoint u = t.at_vertex(0), v = t.at_vertex(1);
  auto rays = t.enumerate_light(u, v, Rat(1));
  REQUIRE(rays.size() == 3);
  // three parallel edges are pairwise disjoint
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      CHECK(t.interiors_disjoint(rays[i], rays[j], 0.0));
  auto family = blocking_lower_bound(t, rays, 0.0);
  CHECK(family.rays.size() == 3);

  // interior pair on one edge: the short arc is disjoint from both long
  // ones, but the long ones share the far junction vertex
  GraphPoint x = t.on_edge(0, rq("1/4")), y = t.on_edge(0, rq("3/4"));
  auto mixed = t.enumerate_light(x, y, Rat(2));
  REQUIRE(mixed.size() == 3);
  CHECK(mixed[0].length == rq("1/2"));
  CHECK(t.interiors_disjoint(mixed[0], mixed[1], 0.0));
  CHECK(t.interiors_disjoint(mixed[0], mixed[2], 0.0));
  CHECK_FALSE(t.interiors_disjoint(mixed[1], mixed[2], 0.0));
  CHECK_FALSE(t.interiors_disjoint(mixed[0], mixed[0], 0.0));
}

TEST_CASE("graph pair classifications") {
  // loops at the wedge vertex: two disjoint rays rule out one-point blocking
  QuotientGraph w = wedge();
  GraphPoint v = w.at_vertex(0);
  auto loops = w.enumerate_light(v, v, Rat(3));
  auto self_cls = classify_rays(w, loops, true, false, std::nullopt, 0.0);
  CHECK(self_cls.verdict == Classification::SphereViolated);
  CHECK(self_cls.family.rays.size() == 2);

  // theta interior pair at distance 1/2 < diameter: family of two
  QuotientGraph t = theta();
  auto mixed = t.enumerate_light(t.on_edge(0, rq("1/4")), t.on_edge(0, rq("3/4")), Rat(2));
  auto cls = classify_rays(t, mixed, false, true, true, 0.0);
  CHECK(cls.verdict == Classification::CrossConsistent);
  CHECK(cls.family.rays.size() == 2);

  // theta vertex pair sits at exactly the diameter: out of scope
  auto vrays = t.enumerate_light(t.at_vertex(0), t.at_vertex(1), Rat(2));
  auto diam_cls = classify_rays(t, vrays, false, true, false, 0.0);
  CHECK(diam_cls.verdict == Classification::Indeterminate);
}

TEST_CASE("geodesic counts: transfer operator vs brute force and closed form") {
  QuotientGraph w = wedge();
  auto series = w.geodesic_count_series(0, 0, 12);
  REQUIRE(series.size() == 13);
  CHECK(series[0] == 0);
  Int expect = 4;
  for (int k = 1; k <= 12; ++k) {
    CHECK(series[k] == expect);
    expect *= 3;
  }
  // cumulative count n_T = 2*3^T - 2
  Int total = 0;
  for (int k = 1; k <= 12; ++k) total += series[k];
  CHECK(total == Int(1062880));

  auto brute = oracle_geodesic_counts(w, 0, 0, 8);
  for (int k = 0; k <= 8; ++k) CHECK(series[k] == Int(brute[k]));

  QuotientGraph g(3, {{0, 1}, {1, 2}, {2, 0}, {0, 0}, {1, 2}});
  auto gs = g.geodesic_count_series(0, 2, 9);
  auto gb = oracle_geodesic_counts(g, 0, 2, 9);
  for (int k = 0; k <= 9; ++k) CHECK(gs[k] == Int(gb[k]));
}

TEST_CASE("spectral growth oracle on known graphs") {
  CHECK(wedge().growth_oracle() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(cycle(5).growth_oracle() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(theta().growth_oracle() == doctest::Approx(2.0).epsilon(1e-9));
  // joins of loops through a path: strictly between 1 and 3
  QuotientGraph barbell(3, {{0, 0}, {0, 1}, {1, 2}, {2, 2}});
  double rho = barbell.growth_oracle();
  CHECK(rho > 1.0);
  CHECK(rho < 3.0);
}

TEST_CASE("enumeration growth matches the spectral oracle on the wedge") {
  QuotientGraph w = wedge();
  auto series = w.geodesic_count_series(0, 0, 12);
  std::vector<double> cumulative(13, 0.0);
  Int run = 0;
  for (int k = 1; k <= 12; ++k) {
    run += series[k];
    cumulative[k] = approx(Rat(run));
  }
  double estimate = std::log(cumulative[12]) - std::log(cumulative[11]);
  double target = std::log(w.growth_oracle());
  CHECK(std::abs(estimate - target) / target < 0.05);
}

TEST_CASE("branching makes the manifold counting inequality fail") {
  // with I = 1/2 the manifold bound would be n_T <= (T/2I)^2 * m_T; on the
  // wedge the light count stays 4 while geodesics multiply, so it breaks
  QuotientGraph w = wedge();
  GraphPoint v = w.at_vertex(0);
  CHECK(w.injectivity_radius() == rq("1/2"));
  int T = 12;
  auto series = w.geodesic_count_series(0, 0, T);
  Int n_T = 0;
  for (int k = 1; k <= T; ++k) n_T += series[k];
  auto m_T = w.enumerate_light(v, v, Rat(T)).size();
  CHECK(m_T == 4);
  CHECK(n_T > Int(T) * Int(T) * Int(m_T));
}
