#include <doctest.h>

#include "geolab/blocking.hpp"
#include "geolab/revolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

using namespace geolab;

namespace {

constexpr double PI = 3.14159265358979323846;
constexpr double TWO_PI = 2.0 * PI;

double chord(const Vec3& a, const Vec3& b) {
  double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 scaled(const Vec3& a, double t) { return {a[0] * t, a[1] * t, a[2] * t}; }

Vec3 axis_frame_dir(const Vec3& u, double theta) {
  // matches the scan frame: first leg along increasing phi, second toward
  // decreasing polar angle (only used away from the poles here)
  double s = std::sqrt(u[0] * u[0] + u[1] * u[1]);
  Vec3 a{-u[1] / s, u[0] / s, 0.0};
  Vec3 b{u[1] * a[2] - u[2] * a[1], u[2] * a[0] - u[0] * a[2],
         u[0] * a[1] - u[1] * a[0]};
  Vec3 w;
  for (int i = 0; i < 3; ++i) w[i] = std::cos(theta) * a[i] + std::sin(theta) * b[i];
  return w;
}

// independent closed form: a unit-speed great circle on the round sphere
Vec3 great_circle(const Vec3& u0, const Vec3& w0, double s) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = std::cos(s) * u0[i] + std::sin(s) * w0[i];
  return out;
}

// independent closed form: with h(z) = eps z (1 - z^2), the meridian arc from
// the equator up to polar angle r has length (pi/2 - r) + eps (1 - sin^3 r)/3
double zoll_meridian_arc(double eps, double r) {
  double sr = std::sin(r);
  return (PI / 2.0 - r) + eps * (1.0 - sr * sr * sr) / 3.0;
}

struct XorShift {
  std::uint64_t state;
  explicit XorShift(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

const ShootingResult* ray_near(const std::vector<ShootingResult>& rays,
                               double theta, double length, double tol) {
  for (const auto& r : rays)
    if (std::abs(r.theta - theta) < tol && std::abs(r.length - length) < tol)
      return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("ambient embedding round trips polar coordinates") {
  Vec3 p = from_polar(0.7, 2.3);
  CHECK(std::abs(dot3(p, p) - 1.0) < 1e-15);
  CHECK(p[2] == doctest::Approx(std::cos(0.7)).epsilon(1e-15));
  CHECK(std::atan2(p[1], p[0]) == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(chord(from_polar(0.0, 1.0), Vec3{0, 0, 1}) < 1e-15);
  CHECK(chord(from_polar(PI, -2.0), Vec3{0, 0, -1}) < 1e-12);
  CHECK(chord(from_polar(PI / 2, 0.0), Vec3{1, 0, 0}) < 1e-12);
}

TEST_CASE("revolution profiles are validated at construction") {
  CHECK_THROWS_WITH_AS(RevolutionMetric({0.0, 0.0, 1.0}),
                       doctest::Contains("odd"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(RevolutionMetric({0.0, 1.0}),
                       doctest::Contains("vanish"), std::invalid_argument);
  // 3 u (1 - u^2) peaks at 2/sqrt(3) > 1
  CHECK_THROWS_WITH_AS(RevolutionMetric::zoll(3.0),
                       doctest::Contains("below one"), std::invalid_argument);
  // -5 z^3 (1 - z^2) stays below one in magnitude but drives 1 + c negative
  CHECK_THROWS_WITH_AS(RevolutionMetric({0.0, 0.0, 0.0, -5.0, 0.0, 5.0}),
                       doctest::Contains("positive"), std::invalid_argument);

  RevolutionMetric z = RevolutionMetric::zoll(0.3);
  CHECK(!z.is_round());
  CHECK(RevolutionMetric::round().is_round());
  CHECK(RevolutionMetric::zoll(0.0).is_round());
  // sup of 0.3 u (1 - u^2) over [-1, 1] is 0.3 * 2 / (3 sqrt 3)
  CHECK(z.sup_h() == doctest::Approx(0.3 * 2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-6));
  CHECK(z.distortion() == doctest::Approx(1.0 + z.sup_h()).epsilon(1e-12));
}

TEST_CASE("metric correction matches the squared profile identity") {
  // (1 + h)^2 = 1 + c (1 - z^2) must hold identically
  RevolutionMetric z = RevolutionMetric::zoll(0.3);
  RevolutionMetric custom({0.0, -0.2, 0.0, 0.2});  // h = 0.2 z^3 - 0.2 z
  CHECK(custom.h(0.5) == doctest::Approx(0.2 * 0.125 - 0.1).epsilon(1e-15));
  for (int i = 0; i <= 100; ++i) {
    double t = -1.0 + 0.02 * i;
    for (const RevolutionMetric* m : {&z, &custom}) {
      double lhs = (1.0 + m->h(t)) * (1.0 + m->h(t));
      double rhs = 1.0 + m->c(t) * (1.0 - t * t);
      CHECK(std::abs(lhs - rhs) < 1e-12);
      double fd = (m->c(t + 1e-6) - m->c(t - 1e-6)) / 2e-6;
      CHECK(std::abs(fd - m->c_prime(t)) < 1e-6);
    }
  }
  // tangential metric on the equator is unchanged, polar direction is scaled
  Vec3 eq{1, 0, 0};
  CHECK(z.metric_dot(eq, {0, 1, 0}, {0, 1, 0}) == doctest::Approx(1.0));
  CHECK(z.speed(eq, {0, 0, 2}) == doctest::Approx(2.0 * std::sqrt(1.0 + z.c(0.0))));
  CHECK(RevolutionMetric::clairaut({1, 0, 0}, {0, 1, 0}) == doctest::Approx(1.0));
  CHECK(RevolutionMetric::clairaut({1, 0, 0}, {0, 0, 1}) == doctest::Approx(0.0));
}

TEST_CASE("round metric geodesics follow great circles") {
  RevolutionMetric m = RevolutionMetric::round();
  Vec3 u0 = from_polar(1.1, 0.4);
  Vec3 w0 = axis_frame_dir(u0, 0.77);
  RevPath path = geodesic_flow(m, u0, w0, 5.0, 1e-3);
  REQUIRE(path.samples.size() > 100);
  CHECK(path.samples.front().s == doctest::Approx(0.0));
  CHECK(path.samples.back().s == doctest::Approx(5.0).epsilon(1e-12));
  for (const auto& smp : path.samples) {
    CHECK(chord(smp.u, great_circle(u0, w0, smp.s)) < 1e-10);
    CHECK(std::abs(dot3(smp.u, smp.u) - 1.0) < 1e-10);
  }
  CHECK(path.unit_drift < 1e-10);
  CHECK(path.clairaut_drift < 1e-10);

  // fractional final step still lands exactly on the requested length
  RevPath frac = geodesic_flow(m, u0, w0, 1.00057, 1e-3);
  CHECK(frac.samples.back().s == doctest::Approx(1.00057).epsilon(1e-12));
  CHECK(chord(frac.samples.back().u, great_circle(u0, w0, 1.00057)) < 1e-10);
}

TEST_CASE("zoll equator and meridian arcs match closed forms") {
  double eps = 0.3;
  RevolutionMetric m = RevolutionMetric::zoll(eps);

  // the equator stays a unit-speed unit circle: h vanishes there
  Vec3 x{1, 0, 0};
  RevPath eq = geodesic_flow(m, x, {0, 1, 0}, TWO_PI, 1e-3);
  for (const auto& smp : eq.samples)
    CHECK(chord(smp.u, Vec3{std::cos(smp.s), std::sin(smp.s), 0.0}) < 1e-9);

  // northward meridian: polar angle r is reached at the closed-form arc
  double to_pole = zoll_meridian_arc(eps, 0.0);
  CHECK(to_pole == doctest::Approx(PI / 2 + eps / 3.0).epsilon(1e-15));
  RevPath mer = geodesic_flow(m, x, {0, 0, 1}, to_pole, 1e-3);
  CHECK(chord(mer.samples.back().u, Vec3{0, 0, 1}) < 1e-8);
  RevPath half = geodesic_flow(m, x, {0, 0, 1}, zoll_meridian_arc(eps, PI / 4), 1e-3);
  CHECK(chord(half.samples.back().u, from_polar(PI / 4, 0.0)) < 1e-8);

  // across the pole and back down to the antipodal equator mark
  RevPath full = geodesic_flow(m, x, {0, 0, 1}, PI + 2.0 * eps / 3.0, 1e-3);
  CHECK(chord(full.samples.back().u, Vec3{-1, 0, 0}) < 1e-8);
  CHECK(full.clairaut_drift < 1e-10);
}

TEST_CASE("integration drift is tracked and enforced") {
  RevolutionMetric m = RevolutionMetric::zoll(0.3);
  Vec3 u0 = from_polar(0.9, 1.7);
  Vec3 w0 = axis_frame_dir(u0, 2.1);
  RevPath path = geodesic_flow(m, u0, w0, TWO_PI, 1e-3);
  CHECK(path.unit_drift < 1e-9 * TWO_PI);
  CHECK(path.clairaut_drift < 1e-7 * TWO_PI);
  double c0 = RevolutionMetric::clairaut(u0, path.samples.front().v);
  for (const auto& smp : path.samples)
    CHECK(std::abs(RevolutionMetric::clairaut(smp.u, smp.v) - c0) < 1e-9);

  CHECK_THROWS_WITH_AS(geodesic_flow(m, u0, w0, 3.0, 0.3),
                       doctest::Contains("drift"), std::runtime_error);
  CHECK_THROWS_AS(geodesic_flow(m, u0, w0, -1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(geodesic_flow(m, u0, w0, 1.0, 0.0), std::invalid_argument);
  RevPath zero = geodesic_flow(m, u0, w0, 0.0, 1e-3);
  CHECK(zero.samples.size() == 1);
}

TEST_CASE("the integrator converges at fourth order") {
  double eps = 0.3;
  RevolutionMetric m = RevolutionMetric::zoll(eps);
  Vec3 x{1, 0, 0};
  double L = zoll_meridian_arc(eps, 0.0);
  double coarse = chord(geodesic_flow(m, x, {0, 0, 1}, L, 8e-3).samples.back().u,
                        Vec3{0, 0, 1});
  double fine = chord(geodesic_flow(m, x, {0, 0, 1}, L, 4e-3).samples.back().u,
                      Vec3{0, 0, 1});
  CHECK(coarse > fine);
  CHECK(coarse / fine > 8.0);
  CHECK(coarse / fine < 40.0);
}

TEST_CASE("zoll geodesics close after one period") {
  RevolutionMetric m = RevolutionMetric::zoll(0.3);
  XorShift rng(0x5eedf00dULL);
  for (int trial = 0; trial < 10; ++trial) {
    Vec3 u0 = from_polar(0.15 + 2.84 * rng.uniform(), TWO_PI * rng.uniform());
    Vec3 w0 = axis_frame_dir(u0, TWO_PI * rng.uniform());
    RevPath path = geodesic_flow(m, u0, w0, TWO_PI, 1e-3);
    CHECK(chord(path.samples.back().u, u0) < 1e-6);
    // direction closes too, after normalizing the stored velocity
    Vec3 v1 = path.samples.back().v;
    Vec3 v0 = path.samples.front().v;
    CHECK(chord(v1, v0) < 1e-6);
  }
}

TEST_CASE("round sphere census finds both arcs of a great circle") {
  RevolutionMetric m = RevolutionMetric::round();
  Vec3 x{1, 0, 0};
  Vec3 y{0, 1, 0};
  LightScan scan = shoot_light(m, x, y, TWO_PI, TWO_PI / 64);
  CHECK(!scan.continuum);
  CHECK(scan.angles_scanned == 64);
  REQUIRE(scan.rays.size() == 2);
  CHECK(scan.rays[0].length == doctest::Approx(PI / 2).epsilon(1e-6));
  CHECK(scan.rays[1].length == doctest::Approx(3 * PI / 2).epsilon(1e-6));
  CHECK(std::abs(scan.rays[0].theta - 0.0) < 1e-5);
  CHECK(std::abs(scan.rays[1].theta - PI) < 1e-5);
  for (const auto& r : scan.rays) {
    CHECK(r.miss < 1e-8);
    CHECK(chord(r.terminal, y) < 1e-5);
    CHECK(chord(r.origin, x) < 1e-12);
    CHECK(r.clairaut_drift < 1e-9);
  }
  RevolutionSpace space(m);
  CHECK(space.interiors_disjoint(scan.rays[0], scan.rays[1], 0.0));

  // a generic pair: exactly the short and the long arc, opposite directions
  Vec3 xg = from_polar(0.7, 0.3);
  Vec3 yg = from_polar(2.1, 4.0);
  double d = std::acos(std::max(-1.0, std::min(1.0, dot3(xg, yg))));
  LightScan gen = shoot_light(m, xg, yg, TWO_PI, TWO_PI / 64);
  REQUIRE(gen.rays.size() == 2);
  CHECK(gen.rays[0].length == doctest::Approx(d).epsilon(1e-5));
  CHECK(gen.rays[1].length == doctest::Approx(TWO_PI - d).epsilon(1e-5));
  double dtheta = std::abs(gen.rays[1].theta - gen.rays[0].theta);
  CHECK(std::min(dtheta, TWO_PI - dtheta) == doctest::Approx(PI).epsilon(1e-4));

  // a horizon between the two arc lengths cuts the census down to the short one
  LightScan capped = shoot_light(m, xg, yg, 3.0, TWO_PI / 64);
  REQUIRE(capped.rays.size() == 1);
  CHECK(capped.rays[0].length == doctest::Approx(d).epsilon(1e-5));

  CHECK_THROWS_WITH_AS(shoot_light(m, x, y, 7.0, TWO_PI / 64),
                       doctest::Contains("period"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(shoot_light(m, x, y, TWO_PI, 1.0),
                       doctest::Contains("resolution"), std::invalid_argument);
}

TEST_CASE("conjugate targets report a continuum instead of a list") {
  RevolutionMetric round = RevolutionMetric::round();
  Vec3 x = from_polar(0.9, 1.1);
  LightScan anti = shoot_light(round, x, scaled(x, -1.0), TWO_PI, TWO_PI / 64);
  CHECK(anti.continuum);
  CHECK(anti.rays.empty());
  CHECK(anti.angles_scanned == 64);

  LightScan self_round = shoot_light(round, x, x, TWO_PI, TWO_PI / 64);
  CHECK(self_round.continuum);

  // every zoll geodesic closes after one period, so marks on themselves
  // are conjugate targets as well
  RevolutionMetric z = RevolutionMetric::zoll(0.3);
  LightScan self_zoll = shoot_light(z, x, x, TWO_PI, TWO_PI / 64);
  CHECK(self_zoll.continuum);
}

TEST_CASE("antipodal equator marks on the zoll sphere carry four disjoint rays") {
  double eps = 0.3;
  RevolutionMetric m = RevolutionMetric::zoll(eps);
  Vec3 x{1, 0, 0};
  Vec3 y{-1, 0, 0};
  LightScan scan = shoot_light(m, x, y, TWO_PI, TWO_PI / 128);
  CHECK(!scan.continuum);
  REQUIRE(scan.rays.size() >= 4);

  // two equator arcs of length pi plus the two meridian arcs, whose lengths
  // are pi +- 2 eps / 3 by the closed-form meridian integral
  double north = PI + 2.0 * eps / 3.0;
  double south = PI - 2.0 * eps / 3.0;
  const ShootingResult* east = ray_near(scan.rays, 0.0, PI, 1e-5);
  const ShootingResult* west = ray_near(scan.rays, PI, PI, 1e-5);
  const ShootingResult* over = ray_near(scan.rays, PI / 2, north, 1e-5);
  const ShootingResult* under = ray_near(scan.rays, 3 * PI / 2, south, 1e-5);
  REQUIRE(east != nullptr);
  REQUIRE(west != nullptr);
  REQUIRE(over != nullptr);
  REQUIRE(under != nullptr);

  // canonical order sorts by length first
  CHECK(scan.rays.front().length == doctest::Approx(south).epsilon(1e-6));

  RevolutionSpace space(m);
  std::vector<ShootingResult> four{*east, *west, *over, *under};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      CHECK(space.interiors_disjoint(four[i], four[j], 0.0));

  // midpoint-style blockers: the two poles and the two equator midpoints
  std::vector<Vec3> blockers{{0, 0, 1}, {0, 0, -1}, {0, 1, 0}, {0, -1, 0}};
  auto outcome = verify_blocking(space, blockers, four, 1e-6);
  CHECK(outcome.blocked);
  REQUIRE(outcome.cert.hits.size() == 4);
  for (const auto& h : outcome.cert.hits)
    CHECK(std::abs(h.at.frac - 0.5) < 1e-3);

  // dropping the south-equator blocker leaves the west arc unblocked
  std::vector<Vec3> trimmed{{0, 0, 1}, {0, 0, -1}, {0, 1, 0}};
  auto broken = verify_blocking(space, trimmed, four, 1e-6);
  CHECK(!broken.blocked);
  REQUIRE(broken.unblocked_ray.has_value());
  CHECK(*broken.unblocked_ray == 1);  // west arc: second entry of `four`

  auto family = blocking_lower_bound(space, scan.rays, 1e-6);
  CHECK(family.rays.size() >= 3);
  CHECK(!family.exact_geometry);

  auto summary = classify_rays(space, scan.rays, false, true,
                               std::optional<bool>(true), 1e-6);
  CHECK(summary.verdict == Classification::CrossViolated);
}

TEST_CASE("a vanishing profile recovers the round census") {
  RevolutionMetric tiny = RevolutionMetric::zoll(1e-4);
  RevolutionMetric round = RevolutionMetric::round();
  Vec3 x = from_polar(0.7, 0.3);
  Vec3 y = from_polar(2.1, 4.0);
  LightScan a = shoot_light(tiny, x, y, TWO_PI, TWO_PI / 64);
  LightScan b = shoot_light(round, x, y, TWO_PI, TWO_PI / 64);
  REQUIRE(a.rays.size() == 2);
  REQUIRE(b.rays.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(a.rays[i].length - b.rays[i].length) < 1e-2);
    CHECK(std::abs(a.rays[i].theta - b.rays[i].theta) < 1e-2);
  }
}

TEST_CASE("diameter estimates converge under grid refinement") {
  double round6 = diameter_estimate(RevolutionMetric::round(), 6);
  CHECK(std::abs(round6 - PI) < 1e-3);
  CHECK(std::abs(diameter_estimate(RevolutionMetric::zoll(0.0), 6) - round6) < 1e-12);

  double z6 = diameter_estimate(RevolutionMetric::zoll(0.3), 6);
  double z12 = diameter_estimate(RevolutionMetric::zoll(0.3), 12);
  CHECK(std::abs(z6 - z12) < 1e-2);
  // the polar axis keeps its round length, which realizes the diameter here
  CHECK(std::abs(z12 - PI) < 5e-2);
}

TEST_CASE("the pair scan finds a cross blocking violation") {
  auto hit = find_cross_violation(RevolutionMetric::zoll(0.3), TWO_PI, 1);
  REQUIRE(hit.has_value());
  CHECK(hit->family.size() >= 3);
  CHECK(chord(hit->x, Vec3{1, 0, 0}) < 1e-12);
  CHECK(chord(hit->y, Vec3{-1, 0, 0}) < 1e-12);
  CHECK(hit->distance == doctest::Approx(PI - 0.2).epsilon(1e-3));
  CHECK(hit->distance > 0.05);
  CHECK(hit->distance < hit->diameter - 0.05);
  CHECK(hit->scan.rays.size() >= 4);
}

TEST_CASE("sampled rays support the blocking space hooks") {
  RevolutionMetric m = RevolutionMetric::round();
  Vec3 x = from_polar(1.0, 0.5);
  std::vector<ShootingResult> loops = sample_loops(m, x, 8);
  REQUIRE(loops.size() == 8);
  for (const auto& l : loops) {
    CHECK(l.length == doctest::Approx(TWO_PI));
    CHECK(l.miss < 1e-9);  // loops close exactly on the round sphere
    CHECK(chord(l.terminal, x) < 1e-9);
  }
  CHECK(loops[0].theta < loops[1].theta);

  RevolutionSpace space(m);
  Vec3 anti = scaled(x, -1.0);
  auto hit = space.hit_param(loops[0], anti, 0.0);
  REQUIRE(hit.has_value());
  CHECK(!hit->exact);
  CHECK(std::abs(hit->frac - 0.5) < 1e-3);

  // the normal of the loop's plane is as far from the circle as possible
  Vec3 far{};
  {
    const Vec3& u = loops[0].samples.front().u;
    const Vec3& v = loops[0].samples.front().v;
    far = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
           u[0] * v[1] - u[1] * v[0]};
  }
  CHECK(!space.hit_param(loops[0], far, 0.0).has_value());

  // every pair of loops through x meets again at the antipode
  CHECK(!space.interiors_disjoint(loops[0], loops[2], 0.0));
  CHECK(!space.interiors_disjoint(loops[0], loops[0], 0.0));

  auto blocked = verify_blocking(space, std::vector<Vec3>{anti}, loops, 1e-6);
  CHECK(blocked.blocked);
  for (const auto& h : blocked.cert.hits) CHECK(std::abs(h.at.frac - 0.5) < 1e-3);

  // with the antipode gone nothing else on the list blocks the loops
  auto open = verify_blocking(space, std::vector<Vec3>{far}, loops, 1e-6);
  CHECK(!open.blocked);

  CHECK(space.ray_length(loops[0]) == doctest::Approx(TWO_PI));
  CHECK(space.ray_before(loops[0], loops[1]));
  CHECK(!space.ray_before(loops[1], loops[0]));
}
