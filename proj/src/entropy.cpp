#include "geolab/entropy.hpp"

#include "geolab/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace geolab {

namespace {

// log of an exact count; counts beyond double range go through the bit length
double log_int(const Int& v) {
  double d = v.convert_to<double>();
  if (std::isfinite(d) && d > 0.0) return std::log(d);
  unsigned long bits = boost::multiprecision::msb(v);
  Int top = v >> (bits - 52);
  return std::log(top.convert_to<double>()) +
         static_cast<double>(bits - 52) * std::log(2.0);
}

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

Fit least_squares(const std::vector<double>& t, const std::vector<double>& y) {
  std::size_t p = t.size();
  double tbar = std::accumulate(t.begin(), t.end(), 0.0) / p;
  double ybar = std::accumulate(y.begin(), y.end(), 0.0) / p;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    num += (t[i] - tbar) * (y[i] - ybar);
    den += (t[i] - tbar) * (t[i] - tbar);
  }
  Fit f;
  f.slope = num / den;
  f.intercept = ybar - f.slope * tbar;
  double ss = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double r = y[i] - (f.intercept + f.slope * t[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / p);
  return f;
}

}  // namespace

void validate_series(const GrowthSeries& s) {
  std::size_t k = s.horizons.size();
  if (s.n.size() != k || s.m.size() != k)
    throw std::invalid_argument("growth series arrays must align in length");
  for (std::size_t i = 0; i < k; ++i) {
    if (s.horizons[i] <= 0)
      throw std::invalid_argument("growth series horizons must be positive");
    if (i > 0 && s.horizons[i] <= s.horizons[i - 1])
      throw std::invalid_argument("growth series horizons must increase");
    if (s.n[i] < 0 || s.m[i] < 0)
      throw std::invalid_argument("growth series counts must be nonnegative");
    if (i > 0 && (s.n[i] < s.n[i - 1] || s.m[i] < s.m[i - 1]))
      throw std::invalid_argument("growth series counts must be nondecreasing");
    if (s.m[i] > s.n[i])
      throw std::invalid_argument(
          "light counts cannot exceed geodesic counts");
  }
}

EntropyEstimate entropy_estimate(const GrowthSeries& s) {
  validate_series(s);
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < s.n.size(); ++i)
    if (s.n[i] > 0) pos.push_back(i);
  if (pos.empty())
    throw std::invalid_argument("all horizons have zero segment counts");
  if (pos.size() < 4)
    throw std::invalid_argument(
        "entropy estimation needs at least four horizons with positive counts");

  EntropyEstimate out;
  std::size_t last = pos.back();
  out.at_horizon = log_int(s.n[last]) / approx(s.horizons[last]);

  std::vector<double> t, y;
  for (std::size_t i = pos.size() / 2; i < pos.size(); ++i) {
    t.push_back(approx(s.horizons[pos[i]]));
    y.push_back(log_int(s.n[pos[i]]));
  }
  Fit f = least_squares(t, y);
  out.slope = f.slope;
  out.residual = f.residual;
  return out;
}

LightProjection light_projection(const TorusSpace& t,
                                 const std::vector<TorusRay>& segments) {
  LightProjection out;
  if (segments.empty()) return out;

  VecQ sx = t.canonical(segments.front().start);
  VecQ sy = t.canonical(vec_add(segments.front().start, segments.front().disp));
  std::vector<TorusRay> images;
  images.reserve(segments.size());
  for (const auto& seg : segments) {
    if (!vec_eq(t.canonical(seg.start), sx) ||
        !vec_eq(t.canonical(vec_add(seg.start, seg.disp)), sy))
      throw std::invalid_argument(
          "projected segments must share both endpoints");
    TorusRay core = t.light_core(seg);
    images.push_back(t.make_ray(t.canonical(core.start), core.disp));
  }

  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (images[a].len2 != images[b].len2) return images[a].len2 < images[b].len2;
    return vec_lex_less(images[a].coeff, images[b].coeff);
  });
  for (std::size_t idx : order) {
    if (!out.rays.empty() && vec_eq(out.rays.back().coeff, images[idx].coeff)) {
      out.fiber_sizes.back() += 1;
    } else {
      out.rays.push_back(images[idx]);
      out.fiber_sizes.push_back(Int(1));
    }
  }
  return out;
}

CountingReport counting_inequality_check(const GrowthSeries& s) {
  validate_series(s);
  if (s.inj2 <= 0)
    throw std::invalid_argument(
        "counting inequality needs a positive injectivity radius");
  CountingReport rep;
  double best = -1.0;
  for (std::size_t i = 0; i < s.horizons.size(); ++i) {
    CountingRow row;
    row.T = s.horizons[i];
    row.n = s.n[i];
    row.m = s.m[i];
    Rat lhs = Rat(4) * s.inj2 * Rat(row.n);
    Rat rhs = row.T * row.T * Rat(row.m);
    row.holds = lhs <= rhs;
    if (row.m > 0) {
      row.ratio = approx(lhs / rhs);
      if (row.ratio > best) {
        best = row.ratio;
        rep.tightest = i;
      }
    } else {
      row.ratio = row.n > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    rep.holds = rep.holds && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

SplitReport blocker_split_check(const TorusSpace& t, const VecQ& x,
                                const VecQ& y, const std::vector<VecQ>& blockers,
                                const Rat& T) {
  SplitReport rep;
  Rat half = T / 2;
  for (const auto& b : blockers) {
    rep.split_sum += Int(t.enumerate_geodesics(x, b, half).size());
    rep.split_sum += Int(t.enumerate_geodesics(b, y, half).size());
  }

  auto rays = t.enumerate_light(x, y, T);
  rep.light_count = Int(rays.size());
  if (rays.empty()) {
    rep.holds = rep.light_count <= rep.split_sum;
    return rep;
  }

  auto outcome = verify_blocking(t, blockers, rays, 0.0);
  if (!outcome.blocked) {
    std::ostringstream os;
    os << "blockers do not block the enumerated light rays (ray "
       << *outcome.unblocked_ray << " escapes)";
    throw std::runtime_error(os.str());
  }

  for (const auto& hit : outcome.cert.hits) {
    if (!hit.at.exact)
      throw std::runtime_error("expected exact hit parameters on the torus");
    SplitMatch mt;
    mt.ray = hit.ray;
    mt.blocker = hit.blocker;
    mt.frac = hit.at.frac_exact;
    mt.source_half = mt.frac <= Rat(1, 2);
    Rat side = mt.source_half ? mt.frac : Rat(1) - mt.frac;
    mt.half_len2 = side * side * rays[hit.ray].len2;
    if (Rat(4) * mt.half_len2 > T * T)
      throw std::runtime_error("witness half exceeds the half horizon");
    rep.matches.push_back(mt);
  }
  rep.holds = rep.light_count <= rep.split_sum;
  return rep;
}

GrowthSeries torus_series(const TorusSpace& t, const VecQ& x, const VecQ& y,
                          const Rat& T_max, const Rat& step) {
  GrowthSeries s;
  s.source = "torus " + vecq_str(x) + " -> " + vecq_str(y);
  s.inj2 = t.shortest_len2() / 4;
  for (const auto& row : t.growth_series(x, y, T_max, step)) {
    s.horizons.push_back(row.T);
    s.n.push_back(Int(row.geodesics));
    s.m.push_back(Int(row.light));
  }
  return s;
}

GrowthSeries graph_series(const QuotientGraph& g, std::size_t u, std::size_t v,
                          int T_max) {
  if (T_max < 1)
    throw std::invalid_argument("graph series horizon must be at least 1");
  GrowthSeries s;
  s.source = "graph " + std::to_string(u) + " -> " + std::to_string(v);
  Rat inj = g.injectivity_radius();
  s.inj2 = inj * inj;
  auto counts = g.geodesic_count_series(u, v, T_max);
  auto rays = g.enumerate_light(g.at_vertex(u), g.at_vertex(v), Rat(T_max));
  for (int k = 1; k <= T_max; ++k) {
    s.horizons.push_back(Rat(k));
    s.n.push_back(counts[k]);
    Int mk = 0;
    for (const auto& r : rays)
      if (r.length <= Rat(k)) ++mk;
    s.m.push_back(mk);
  }
  return s;
}

}  // namespace geolab
