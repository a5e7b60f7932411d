#include <doctest.h>

#include "geolab/blocking.hpp"
#include "geolab/torus.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <set>

using namespace geolab;

namespace {

TorusSpace unit_square() {
  return TorusSpace({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
}

VecQ qv(std::initializer_list<Rat> xs) { return VecQ(xs); }

std::set<std::vector<std::string>> disp_set(const std::vector<TorusRay>& rays) {
  std::set<std::vector<std::string>> out;
  for (const auto& r : rays) {
    std::vector<std::string> row;
    for (const auto& c : r.disp) row.push_back(rational_str(c));
    out.insert(row);
  }
  return out;
}

}  // namespace

TEST_CASE("torus construction rejects bad bases") {
  CHECK_THROWS(TorusSpace({{Rat(1), Rat(0)}}));                        // non-square
  CHECK_THROWS(TorusSpace({{Rat(1), Rat(2)}, {Rat(2), Rat(4)}}));      // singular
  CHECK_THROWS(TorusSpace({}));
}

TEST_CASE("canonical representatives live in the fundamental domain") {
  auto S = unit_square();
  CHECK(S.canonical(qv({Rat(5, 4), Rat(-1, 3)})) == qv({Rat(1, 4), Rat(2, 3)}));
  CHECK(S.canonical(qv({Rat(0), Rat(0)})) == qv({Rat(0), Rat(0)}));
  TorusSpace skew({{Rat(2), Rat(0)}, {Rat(1), Rat(1)}});
  // (5/2, 1/2) = 1*(2,0) + (1/2)*(1,1): wraps to coefficients (0, 1/2).
  VecQ p = skew.canonical(qv({Rat(5, 2), Rat(1, 2)}));
  VecQ c = skew.to_coeffs(p);
  CHECK(c == qv({Rat(0), Rat(1, 2)}));
  CHECK(p == qv({Rat(1, 2), Rat(1, 2)}));
  CHECK(skew.from_coeffs(c) == p);
}

TEST_CASE("geodesic and light counts at the half-step pair, horizon 8/5") {
  auto S = unit_square();
  VecQ x = qv({Rat(0), Rat(0)}), y = qv({Rat(1, 2), Rat(0)});
  auto geo = S.enumerate_geodesics(x, y, Rat(8, 5));
  CHECK(geo.size() == 8);
  auto light = S.enumerate_light(x, y, Rat(8, 5));
  REQUIRE(light.size() == 6);
  // Frozen displacement set.
  std::set<std::vector<std::string>> expect = {
      {"1/2", "0"},  {"-1/2", "0"}, {"1/2", "1"},
      {"1/2", "-1"}, {"-1/2", "1"}, {"-1/2", "-1"},
  };
  CHECK(disp_set(light) == expect);
  // Canonical order: squared length ascending, then lexicographic coeff.
  CHECK(light[0].disp == qv({Rat(-1, 2), Rat(0)}));
  CHECK(light[1].disp == qv({Rat(1, 2), Rat(0)}));
  CHECK(light[0].len2 == Rat(1, 4));
  CHECK(light[2].len2 == Rat(5, 4));
  for (std::size_t i = 1; i < light.size(); ++i)
    CHECK(S.ray_before(light[i - 1], light[i]));
}

TEST_CASE("the through-segment (3/2,0) is rejected and projects to (1/2,0)") {
  auto S = unit_square();
  VecQ x = qv({Rat(0), Rat(0)}), y = qv({Rat(1, 2), Rat(0)});
  CHECK_FALSE(TorusSpace::light_displacement(qv({Rat(3, 2), Rat(0)})));
  auto r = S.make_ray(x, qv({Rat(3, 2), Rat(0)}));
  auto core = S.light_core(r);
  CHECK(core.disp == qv({Rat(1, 2), Rat(0)}));
  CHECK(core.start == x);
  CHECK(core.len2 == Rat(1, 4));
  // Multiples collapse onto their primitive core.
  auto r2 = S.make_ray(x, qv({Rat(4), Rat(6)}));
  CHECK(S.light_core(r2).disp == qv({Rat(2), Rat(3)}));
  // Light rays are their own core.
  auto r3 = S.make_ray(x, qv({Rat(1, 2), Rat(1)}));
  CHECK(S.light_core(r3).disp == r3.disp);
}

TEST_CASE("loop census at the origin") {
  auto S = unit_square();
  VecQ o = qv({Rat(0), Rat(0)});
  auto l1 = S.enumerate_light(o, o, Rat(1));
  CHECK(l1.size() == 4);
  auto g1 = S.enumerate_geodesics(o, o, Rat(1));
  CHECK(g1.size() == 4);
  auto g5 = S.enumerate_geodesics(o, o, Rat(5));
  CHECK(g5.size() == 80);
  auto l5 = S.enumerate_light(o, o, Rat(5));
  CHECK(l5.size() == 48);
  // Light rays are exactly the primitive displacements among geodesics.
  for (const auto& r : l5) CHECK(TorusSpace::light_displacement(r.coeff));
}

TEST_CASE("oracle agreement on the unit square and a skew lattice") {
  auto S = unit_square();
  VecQ x = qv({Rat(0), Rat(0)});
  for (const VecQ& y : {qv({Rat(0), Rat(0)}), qv({Rat(1, 2), Rat(0)}),
                        qv({Rat(1, 3), Rat(2, 5)})}) {
    auto ora = oracle::torus_census(S.basis(), x, y, Rat(4), 7);
    auto geo = S.enumerate_geodesics(x, y, Rat(4));
    auto light = S.enumerate_light(x, y, Rat(4));
    CHECK(geo.size() == static_cast<std::size_t>(ora.geodesics));
    REQUIRE(light.size() == static_cast<std::size_t>(ora.light));
    std::set<std::vector<std::string>> ours = disp_set(light);
    std::set<std::vector<std::string>> theirs;
    for (const auto& d : ora.light_disps) {
      std::vector<std::string> row;
      for (const auto& c : d) row.push_back(rational_str(c));
      theirs.insert(row);
    }
    CHECK(ours == theirs);
  }
  TorusSpace skew({{Rat(1), Rat(1, 2)}, {Rat(0), Rat(3, 2)}});
  VecQ y = qv({Rat(1, 2), Rat(1, 3)});
  auto ora = oracle::torus_census(skew.basis(), x, y, Rat(3), 8);
  CHECK(skew.enumerate_geodesics(x, y, Rat(3)).size() ==
        static_cast<std::size_t>(ora.geodesics));
  CHECK(skew.enumerate_light(x, y, Rat(3)).size() ==
        static_cast<std::size_t>(ora.light));
  // Rank 1: circle of circumference 1.
  TorusSpace circle({{Rat(1)}});
  auto co = oracle::torus_census(circle.basis(), qv({Rat(0)}), qv({Rat(1, 2)}),
                                 Rat(10), 12);
  CHECK(circle.enumerate_geodesics(qv({Rat(0)}), qv({Rat(1, 2)}), Rat(10)).size() ==
        static_cast<std::size_t>(co.geodesics));
  auto cl = circle.enumerate_light(qv({Rat(0)}), qv({Rat(1, 2)}), Rat(10));
  CHECK(cl.size() == static_cast<std::size_t>(co.light));
  CHECK(cl.size() == 2);  // only the two arcs of length 1/2 are light
}

TEST_CASE("midpoint blocking sets across parity classes") {
  auto S = unit_square();
  auto ms = S.midpoint_blocking_set(qv({Rat(0), Rat(0)}), qv({Rat(1, 2), Rat(1, 2)}));
  REQUIRE(ms.size() == 4);
  std::set<std::vector<std::string>> got;
  for (const auto& p : ms) got.insert({rational_str(p[0]), rational_str(p[1])});
  std::set<std::vector<std::string>> expect = {
      {"1/4", "1/4"}, {"3/4", "1/4"}, {"1/4", "3/4"}, {"3/4", "3/4"}};
  CHECK(got == expect);

  auto mo = S.midpoint_blocking_set(qv({Rat(0), Rat(0)}), qv({Rat(0), Rat(0)}));
  std::set<std::vector<std::string>> expect_o = {
      {"0", "0"}, {"1/2", "0"}, {"0", "1/2"}, {"1/2", "1/2"}};
  std::set<std::vector<std::string>> got_o;
  for (const auto& p : mo) got_o.insert({rational_str(p[0]), rational_str(p[1])});
  CHECK(got_o == expect_o);

  TorusSpace circle({{Rat(1)}});
  auto mc = circle.midpoint_blocking_set(qv({Rat(0)}), qv({Rat(1, 2)}));
  REQUIRE(mc.size() == 2);
  CHECK(mc[0] == qv({Rat(1, 4)}));
  CHECK(mc[1] == qv({Rat(3, 4)}));
}

TEST_CASE("midpoint certificate hits every light ray exactly half-way") {
  auto S = unit_square();
  VecQ x = qv({Rat(0), Rat(0)});
  for (const VecQ& y : {qv({Rat(1, 2), Rat(0)}), qv({Rat(1, 3), Rat(2, 7)}),
                        qv({Rat(0), Rat(0)})}) {
    auto rays = S.enumerate_light(x, y, Rat(5));
    auto blockers = S.midpoint_blocking_set(x, y);
    auto res = verify_blocking(S, blockers, rays, 0.0);
    REQUIRE(res.blocked);
    for (const auto& h : res.cert.hits) {
      CHECK(h.at.exact);
      CHECK(h.at.frac_exact == Rat(1, 2));
    }
    // Exactness: tolerance plays no role on exact paths.
    auto res2 = verify_blocking(S, blockers, rays, 0.25);
    REQUIRE(res2.blocked);
    for (std::size_t i = 0; i < res.cert.hits.size(); ++i) {
      CHECK(res.cert.hits[i].blocker == res2.cert.hits[i].blocker);
      CHECK(res.cert.hits[i].at.frac_exact == res2.cert.hits[i].at.frac_exact);
    }
  }
}

TEST_CASE("empty blocker pool fails on the canonically first ray") {
  auto S = unit_square();
  auto rays = S.enumerate_light(qv({Rat(0), Rat(0)}), qv({Rat(1, 2), Rat(0)}), Rat(2));
  auto res = verify_blocking(S, {}, rays, 0.0);
  CHECK_FALSE(res.blocked);
  REQUIRE(res.unblocked_ray.has_value());
  CHECK(*res.unblocked_ray == 0);
  CHECK(rays[0].len2 == Rat(1, 4));
}

TEST_CASE("quotient interiors: antiparallel loops share their circle") {
  auto S = unit_square();
  VecQ o = qv({Rat(0), Rat(0)});
  auto east = S.make_ray(o, qv({Rat(1), Rat(0)}));
  auto west = S.make_ray(o, qv({Rat(-1), Rat(0)}));
  auto north = S.make_ray(o, qv({Rat(0), Rat(1)}));
  CHECK(S.interiors_disjoint(east, north, 0.0));
  CHECK_FALSE(S.interiors_disjoint(east, west, 0.0));  // same circle in the quotient
  CHECK_FALSE(S.interiors_disjoint(east, east, 0.0));
  // Diagonals through (1/2,1/2) all meet each other but miss the axes.
  auto dpp = S.make_ray(o, qv({Rat(1), Rat(1)}));
  auto dpm = S.make_ray(o, qv({Rat(1), Rat(-1)}));
  CHECK_FALSE(S.interiors_disjoint(dpp, dpm, 0.0));
  CHECK(S.interiors_disjoint(dpp, east, 0.0));
  CHECK(S.interiors_disjoint(dpp, north, 0.0));
}

TEST_CASE("disjoint families bound the loop blocking number") {
  auto S = unit_square();
  VecQ o = qv({Rat(0), Rat(0)});
  auto r1 = S.enumerate_light(o, o, Rat(1));
  auto f1 = blocking_lower_bound(S, r1, 0.0);
  CHECK(f1.exhaustive);
  CHECK(f1.rays.size() == 2);  // one horizontal circle, one vertical
  auto r2 = S.enumerate_light(o, o, Rat(3, 2));
  auto f2 = blocking_lower_bound(S, r2, 0.0);
  CHECK(f2.rays.size() == 3);  // a diagonal joins in at length sqrt(2)
  // Upper bound from the three nonzero midpoint classes: equality b = 3.
  std::vector<VecQ> pool = {qv({Rat(1, 2), Rat(0)}), qv({Rat(0), Rat(1, 2)}),
                            qv({Rat(1, 2), Rat(1, 2)})};
  auto mb = min_blockers(S, S.enumerate_light(o, o, Rat(4)), pool, 0.0);
  CHECK(mb.chosen.size() == 3);
}

TEST_CASE("each parity class needs its own midpoint at the diagonal pair") {
  auto S = unit_square();
  VecQ x = qv({Rat(0), Rat(0)}), y = qv({Rat(1, 2), Rat(1, 2)});
  auto rays = S.enumerate_light(x, y, Rat(30));
  auto pool = S.midpoint_blocking_set(x, y);
  auto mb = min_blockers(S, rays, pool, 0.0);
  CHECK(mb.chosen.size() == 4);
  CHECK(mb.chosen == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("counts are invariant under translation and basis change") {
  auto S = unit_square();
  TorusSpace S2({{Rat(1), Rat(0)}, {Rat(3), Rat(1)}});  // same lattice, other basis
  VecQ x = qv({Rat(0), Rat(0)}), y = qv({Rat(1, 2), Rat(0)});
  VecQ t = qv({Rat(7, 3), Rat(-2, 5)});
  VecQ xt = vec_add(x, t), yt = vec_add(y, t);
  for (const Rat& T : {Rat(8, 5), Rat(3)}) {
    auto a = S.enumerate_light(x, y, T);
    auto b = S.enumerate_light(xt, yt, T);
    auto c = S2.enumerate_light(x, y, T);
    CHECK(a.size() == b.size());
    CHECK(a.size() == c.size());
    CHECK(S.enumerate_geodesics(x, y, T).size() ==
          S2.enumerate_geodesics(x, y, T).size());
  }
}

TEST_CASE("reversal gives the mirrored ray set") {
  auto S = unit_square();
  VecQ x = qv({Rat(0), Rat(0)}), y = qv({Rat(1, 3), Rat(2, 5)});
  auto fwd = S.enumerate_light(x, y, Rat(3));
  auto bwd = S.enumerate_light(y, x, Rat(3));
  REQUIRE(fwd.size() == bwd.size());
  std::set<std::vector<std::string>> rev;
  for (const auto& r : fwd) {
    auto rr = S.reverse(r);
    std::vector<std::string> row;
    for (const auto& ccc : rr.disp) row.push_back(rational_str(ccc));
    rev.insert(row);
    CHECK(rr.len2 == r.len2);
  }
  CHECK(rev == disp_set(bwd));
}

TEST_CASE("growth series matches direct enumeration") {
  auto S = unit_square();
  VecQ o = qv({Rat(0), Rat(0)});
  auto rows = S.growth_series(o, o, Rat(5), Rat(1));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].T == Rat(1));
  CHECK(rows[0].geodesics == 4);
  CHECK(rows[0].light == 4);
  CHECK(rows[4].T == Rat(5));
  CHECK(rows[4].geodesics == 80);
  CHECK(rows[4].light == 48);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Rat T = rows[i].T;
    CHECK(rows[i].geodesics ==
          static_cast<long long>(S.enumerate_geodesics(o, o, T).size()));
    CHECK(rows[i].light ==
          static_cast<long long>(S.enumerate_light(o, o, T).size()));
    if (i > 0) {
      CHECK(rows[i].geodesics >= rows[i - 1].geodesics);
      CHECK(rows[i].light >= rows[i - 1].light);
    }
  }
  // Below the first lattice length everything vanishes.
  auto small = S.growth_series(o, o, Rat(1, 2), Rat(1, 4));
  for (const auto& r : small) {
    CHECK(r.geodesics == 0);
    CHECK(r.light == 0);
  }
}

TEST_CASE("distances and diameters are exact") {
  auto S = unit_square();
  CHECK(S.distance2(qv({Rat(0), Rat(0)}), qv({Rat(1, 2), Rat(0)})) == Rat(1, 4));
  CHECK(S.distance2(qv({Rat(0), Rat(0)}), qv({Rat(3, 4), Rat(0)})) == Rat(1, 16));
  CHECK(S.distance2(qv({Rat(1, 8), Rat(0)}), qv({Rat(1, 8), Rat(0)})) == Rat(0));
  REQUIRE(S.diameter2().has_value());
  CHECK(*S.diameter2() == Rat(1, 2));
  CHECK(S.shortest_len2() == Rat(1));

  TorusSpace rect({{Rat(2), Rat(0)}, {Rat(0), Rat(1)}});
  CHECK(*rect.diameter2() == Rat(5, 4));
  CHECK(rect.shortest_len2() == Rat(1));

  TorusSpace hex({{Rat(1), Rat(0)}, {Rat(1, 2), Rat(1)}});
  CHECK(*hex.diameter2() == Rat(25, 64));
  CHECK(hex.shortest_len2() == Rat(1));

  TorusSpace circle({{Rat(3)}});
  CHECK(*circle.diameter2() == Rat(9, 4));
  CHECK(circle.distance2(qv({Rat(0)}), qv({Rat(2)})) == Rat(1));
}

TEST_CASE("classification: the flat torus violates sphere blocking, not cross") {
  auto S = unit_square();
  VecQ o = qv({Rat(0), Rat(0)});
  auto loops = S.enumerate_light(o, o, Rat(2));
  auto sum = classify_rays(S, loops, true, false, std::nullopt, 0.0);
  CHECK(sum.verdict == Classification::SphereViolated);

  VecQ y = qv({Rat(1, 2), Rat(0)});
  auto rays = S.enumerate_light(o, y, Rat(2));
  Rat d2 = S.distance2(o, y);
  bool below = d2 < *S.diameter2();
  auto cs = classify_rays(S, rays, false, d2 > 0, below, 0.0);
  // The two complementary horizontal arcs plus the two slope-2 rays are
  // pairwise disjoint, so the torus fails cross blocking at this pair.
  CHECK(cs.family.rays.size() == 4);
  CHECK(cs.verdict == Classification::CrossViolated);

  // At a tiny horizon only the two horizontal arcs exist: still consistent.
  auto few = S.enumerate_light(o, y, Rat(1));
  auto cs2 = classify_rays(S, few, false, d2 > 0, below, 0.0);
  CHECK(cs2.family.rays.size() == 2);
  CHECK(cs2.verdict == Classification::CrossConsistent);
}

TEST_CASE("uniform bound holds on random rational data in ranks 1..3") {
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  auto next = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  };
  auto rnd_rat = [&](int lo, int hi, int den_max) {
    long long den = 1 + static_cast<long long>(next() % den_max);
    long long span = (hi - lo) * den;
    long long num = lo * den + static_cast<long long>(next() % (span + 1));
    return Rat(num, den);
  };
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<VecQ> basis(n, VecQ(n, Rat(0)));
      for (std::size_t i = 0; i < n; ++i) {
        basis[i][i] = rnd_rat(1, 2, 3);
        for (std::size_t j = 0; j < i; ++j) basis[i][j] = rnd_rat(0, 1, 3);
      }
      TorusSpace S(basis);
      VecQ x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = rnd_rat(0, 1, 5);
        y[i] = rnd_rat(0, 1, 5);
      }
      auto rays = S.enumerate_light(x, y, Rat(3));
      auto blockers = S.midpoint_blocking_set(x, y);
      CHECK(blockers.size() == (std::size_t(1) << n));
      if (rays.empty()) continue;
      auto res = verify_blocking(S, blockers, rays, 0.0);
      CHECK(res.blocked);
      for (const auto& h : res.cert.hits) CHECK(h.at.frac_exact == Rat(1, 2));
    }
  }
}
