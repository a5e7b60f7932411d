#include "geolab/graph.hpp"

#include "geolab/apartment.hpp"
#include "geolab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

namespace geolab {

namespace {

// position of p along directed edge d, if p is an interior point of that edge
std::optional<Rat> on_dedge(const GraphPoint& p, std::size_t d) {
  if (p.is_vertex() || p.edge != QuotientGraph::dedge_edge(d)) return std::nullopt;
  return d % 2 == 0 ? p.offset : Rat(1) - p.offset;
}

}  // namespace

QuotientGraph::QuotientGraph(std::size_t vertex_count, std::vector<GraphEdge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ == 0) throw std::invalid_argument("graph needs vertices");
  out_.assign(vertex_count_, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].tail >= vertex_count_ || edges_[e].head >= vertex_count_)
      throw std::invalid_argument("edge endpoint out of range");
    out_[edges_[e].tail].push_back(2 * e);
    out_[edges_[e].head].push_back(2 * e + 1);
  }
  for (std::size_t v = 0; v < vertex_count_; ++v)
    if (out_[v].size() < 2)
      throw std::invalid_argument("every vertex needs degree at least two");
  // connectivity over the undirected edges
  std::vector<char> seen(vertex_count_, 0);
  std::queue<std::size_t> bfs;
  bfs.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!bfs.empty()) {
    std::size_t v = bfs.front();
    bfs.pop();
    for (std::size_t d : out_[v]) {
      std::size_t w = dedge_head(d);
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        bfs.push(w);
      }
    }
  }
  if (reached != vertex_count_) throw std::invalid_argument("graph must be connected");
}

std::size_t QuotientGraph::dedge_tail(std::size_t d) const {
  return d % 2 == 0 ? edges_[d >> 1].tail : edges_[d >> 1].head;
}

std::size_t QuotientGraph::dedge_head(std::size_t d) const {
  return d % 2 == 0 ? edges_[d >> 1].head : edges_[d >> 1].tail;
}

GraphPoint QuotientGraph::at_vertex(std::size_t v) const {
  if (v >= vertex_count_) throw std::invalid_argument("vertex out of range");
  GraphPoint p;
  p.vertex = v;
  return p;
}

GraphPoint QuotientGraph::on_edge(std::size_t e, const Rat& offset) const {
  if (e >= edges_.size()) throw std::invalid_argument("edge out of range");
  if (offset < 0 || offset > 1) throw std::invalid_argument("offset outside [0, 1]");
  if (offset == 0) return at_vertex(edges_[e].tail);
  if (offset == 1) return at_vertex(edges_[e].head);
  GraphPoint p;
  p.edge = e;
  p.offset = offset;
  return p;
}

void QuotientGraph::check_point(const GraphPoint& p) const {
  if (p.is_vertex()) {
    if (p.vertex >= vertex_count_ || p.edge != GraphPoint::npos)
      throw std::invalid_argument("malformed vertex point");
  } else {
    if (p.edge >= edges_.size() || p.offset <= 0 || p.offset >= 1)
      throw std::invalid_argument("malformed edge point");
  }
}

std::size_t QuotientGraph::girth() const {
  for (const auto& e : edges_)
    if (e.tail == e.head) return 1;
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : edges_) {
    auto key = std::minmax(e.tail, e.head);
    if (!pairs.insert({key.first, key.second}).second) return 2;
  }
  // simple graph: breadth-first girth from every start
  std::size_t best = static_cast<std::size_t>(-1);
  for (std::size_t s = 0; s < vertex_count_; ++s) {
    std::vector<std::size_t> dist(vertex_count_, static_cast<std::size_t>(-1));
    std::vector<std::size_t> via(vertex_count_, static_cast<std::size_t>(-1));
    std::queue<std::size_t> bfs;
    dist[s] = 0;
    bfs.push(s);
    while (!bfs.empty()) {
      std::size_t v = bfs.front();
      bfs.pop();
      for (std::size_t d : out_[v]) {
        std::size_t w = dedge_head(d);
        if (dist[w] == static_cast<std::size_t>(-1)) {
          dist[w] = dist[v] + 1;
          via[w] = dedge_edge(d);
          bfs.push(w);
        } else if (via[v] != dedge_edge(d)) {
          best = std::min(best, dist[v] + dist[w] + 1);
        }
      }
    }
  }
  return best;
}

std::vector<GraphRay> QuotientGraph::enumerate_light(const GraphPoint& x,
                                                     const GraphPoint& y,
                                                     const Rat& T) const {
  check_point(x);
  check_point(y);
  if (T <= 0) throw std::invalid_argument("horizon must be positive");

  std::vector<std::pair<std::size_t, Rat>> first;  // (dedge, entry position)
  if (x.is_vertex()) {
    for (std::size_t d : out_[x.vertex]) first.push_back({d, Rat(0)});
  } else {
    first.push_back({2 * x.edge, x.offset});
    first.push_back({2 * x.edge + 1, Rat(1) - x.offset});
  }

  auto per_branch = [&](std::size_t slot) {
    std::vector<GraphRay> found;
    const Rat start0 = first[slot].second;
    std::vector<std::size_t> path{first[slot].first};
    std::vector<std::size_t> via;
    auto record = [&](const Rat& end, const Rat& length) {
      found.push_back({path, start0, end, length, via});
    };
    // walk dedge path.back() from along-position lo with `base` length spent
    auto walk = [&](auto&& self, const Rat& lo, const Rat& base) -> void {
      std::size_t d = path.back();
      auto py = on_dedge(y, d);
      auto px = on_dedge(x, d);
      if (py && *py > lo && (!px || *px <= lo || *py <= *px)) {
        Rat length = base + *py - lo;
        if (length > 0 && length <= T) record(*py, length);
        return;  // continuing would put y in the interior
      }
      if (px && *px > lo) return;  // x in the interior
      Rat length = base + Rat(1) - lo;
      std::size_t w = dedge_head(d);
      if (y.is_vertex() && w == y.vertex) {
        if (length <= T) record(Rat(1), length);
        return;
      }
      if (x.is_vertex() && w == x.vertex) return;
      if (length >= T) return;  // any further hit lands beyond the horizon
      for (std::size_t nd : out_[w]) {
        if (nd == dedge_reverse(d)) continue;
        path.push_back(nd);
        via.push_back(w);
        self(self, Rat(0), length);
        path.pop_back();
        via.pop_back();
      }
    };
    walk(walk, start0, Rat(0));
    return found;
  };

  auto buckets = parallel_map<std::vector<GraphRay>>(first.size(), per_branch);
  std::vector<GraphRay> out;
  for (auto& b : buckets)
    for (auto& r : b) out.push_back(std::move(r));
  std::sort(out.begin(), out.end(),
            [this](const GraphRay& a, const GraphRay& b) { return ray_before(a, b); });
  return out;
}

std::vector<GraphPoint> QuotientGraph::type_blocking_set(const GraphPoint& x,
                                                         const GraphPoint& y) const {
  check_point(x);
  check_point(y);
  const Rat a = x.is_vertex() ? Rat(0) : x.offset;
  const Rat b = y.is_vertex() ? Rat(0) : y.offset;
  Apartment chamber(VecQ{Rat(1)});
  // union over both orientation readings of each offset; the type set is
  // closed under t -> 1-t, so mirrored points come along automatically
  std::set<Rat> types;
  const Rat labels_x[2] = {a, Rat(1) - a};
  const Rat labels_y[2] = {b, Rat(1) - b};
  for (const Rat& alpha : labels_x)
    for (const Rat& beta : labels_y)
      for (const VecQ& t : chamber.midpoint_types(VecQ{alpha}, VecQ{beta}))
        types.insert(t[0]);

  std::vector<GraphPoint> out;
  if (types.count(Rat(0)) || types.count(Rat(1)))
    for (std::size_t v = 0; v < vertex_count_; ++v) out.push_back(at_vertex(v));
  for (std::size_t e = 0; e < edges_.size(); ++e)
    for (const Rat& t : types)
      if (t > 0 && t < 1) out.push_back(on_edge(e, t));
  return out;
}

std::vector<Int> QuotientGraph::geodesic_count_series(std::size_t u, std::size_t v,
                                                      int max_length) const {
  if (u >= vertex_count_ || v >= vertex_count_)
    throw std::invalid_argument("vertex out of range");
  if (max_length < 0) throw std::invalid_argument("negative horizon");
  std::vector<Int> counts(max_length + 1, Int(0));
  const std::size_t n = dedge_count();
  std::vector<Int> w(n, Int(0));
  for (std::size_t d : out_[u]) w[d] = 1;
  for (int k = 1; k <= max_length; ++k) {
    for (std::size_t d = 0; d < n; ++d)
      if (dedge_head(d) == v) counts[k] += w[d];
    if (k == max_length) break;
    std::vector<Int> at(vertex_count_, Int(0));
    for (std::size_t d = 0; d < n; ++d) at[dedge_head(d)] += w[d];
    std::vector<Int> next(n, Int(0));
    for (std::size_t d = 0; d < n; ++d) next[d] = at[dedge_tail(d)] - w[dedge_reverse(d)];
    w = std::move(next);
  }
  return counts;
}

double QuotientGraph::growth_oracle(double rel_tol, int max_iterations) const {
  const std::size_t n = dedge_count();
  std::vector<double> x(n, 1.0), at(vertex_count_), next(n);
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::fill(at.begin(), at.end(), 0.0);
    for (std::size_t d = 0; d < n; ++d) at[dedge_head(d)] += x[d];
    // one step of (B + I): the shift makes periodic spectra converge
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, top = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      next[d] = x[d] + at[dedge_tail(d)] - x[dedge_reverse(d)];
      double ratio = next[d] / x[d];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      top = std::max(top, next[d]);
    }
    if (hi - lo <= rel_tol * hi) return (lo + hi) / 2 - 1.0;
    for (std::size_t d = 0; d < n; ++d) x[d] = next[d] / top;
  }
  throw std::runtime_error("growth oracle did not converge after " +
                           std::to_string(max_iterations) + " iterations");
}

GraphPoint QuotientGraph::point_at(const GraphRay& r, const Rat& t) const {
  if (t < 0 || t > r.length) throw std::invalid_argument("position outside the ray");
  Rat acc(0);
  for (std::size_t i = 0; i < r.dedges.size(); ++i) {
    const Rat lo = i == 0 ? r.start : Rat(0);
    const Rat hi = i + 1 == r.dedges.size() ? r.end : Rat(1);
    const Rat seg = hi - lo;
    if (t <= acc + seg || i + 1 == r.dedges.size()) {
      Rat q = lo + (t - acc);
      std::size_t d = r.dedges[i];
      return on_edge(dedge_edge(d), d % 2 == 0 ? q : Rat(1) - q);
    }
    acc += seg;
  }
  throw std::logic_error("ray has no legs");
}

std::optional<HitParam> QuotientGraph::hit_param(const GraphRay& r, const GraphPoint& p,
                                                 double) const {
  std::optional<Rat> best;
  auto offer = [&](const Rat& t) {
    if (t <= 0 || t >= r.length) return;
    if (!best || t < *best) best = t;
  };
  Rat acc(0);
  for (std::size_t i = 0; i < r.dedges.size(); ++i) {
    const Rat lo = i == 0 ? r.start : Rat(0);
    const Rat hi = i + 1 == r.dedges.size() ? r.end : Rat(1);
    if (!p.is_vertex()) {
      if (auto q = on_dedge(p, r.dedges[i]); q && *q > lo && *q < hi)
        offer(acc + *q - lo);
    }
    acc += hi - lo;
    if (p.is_vertex() && i + 1 < r.dedges.size() && dedge_head(r.dedges[i]) == p.vertex)
      offer(acc);
  }
  if (!best) return std::nullopt;
  return HitParam::from_exact(*best / r.length);
}

bool QuotientGraph::interiors_disjoint(const GraphRay& a, const GraphRay& b,
                                       double) const {
  for (std::size_t v : a.via)
    if (std::find(b.via.begin(), b.via.end(), v) != b.via.end()) return false;
  struct Span {
    std::size_t edge;
    Rat lo, hi;
  };
  auto spans = [](const GraphRay& r) {
    std::vector<Span> out;
    for (std::size_t i = 0; i < r.dedges.size(); ++i) {
      Rat lo = i == 0 ? r.start : Rat(0);
      Rat hi = i + 1 == r.dedges.size() ? r.end : Rat(1);
      std::size_t d = r.dedges[i];
      if (d % 2 == 0)
        out.push_back({QuotientGraph::dedge_edge(d), lo, hi});
      else
        out.push_back({QuotientGraph::dedge_edge(d), Rat(1) - hi, Rat(1) - lo});
    }
    return out;
  };
  for (const Span& s : spans(a))
    for (const Span& t : spans(b)) {
      if (s.edge != t.edge) continue;
      if (std::max(s.lo, t.lo) < std::min(s.hi, t.hi)) return false;
    }
  return true;
}

bool QuotientGraph::ray_before(const GraphRay& a, const GraphRay& b) const {
  if (a.length != b.length) return a.length < b.length;
  if (a.dedges != b.dedges) return a.dedges < b.dedges;
  return a.start < b.start;
}

}  // namespace geolab
