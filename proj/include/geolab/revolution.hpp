#pragma once

// Surfaces of revolution over the 2-sphere: metrics of the form
//   ds^2 = (1 + h(cos r))^2 dr^2 + sin^2 r dphi^2
// with h an odd polynomial vanishing at +-1 and |h| < 1 (h = 0 is the
// round sphere). Writing h(z) = (1 - z^2) p(z), the same metric in
// ambient coordinates on the unit sphere is
//   g_u(v, w) = <v, w> + c(u_z) v_z w_z,   c(z) = 2 p(z) + (1 - z^2) p(z)^2,
// a polynomial correction with no chart boundary, so one global
// integrator covers the poles. Geodesics are integrated by fixed-step
// fourth-order Runge-Kutta with a fractional final step; light rays are
// found by shooting: scan initial angles, bracket sign changes of the
// side function at near-passages of the target, bisect to the requested
// miss, deduplicate, and tube-filter the interiors against both marks.

#include "geolab/blocking.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace geolab {

using Vec3 = std::array<double, 3>;

Vec3 from_polar(double r, double phi);

class RevolutionMetric {
 public:
  static RevolutionMetric round();
  static RevolutionMetric zoll(double epsilon);  // h(u) = epsilon * u * (1 - u^2)
  // coefficients of h by ascending power; must be odd, vanish at 1,
  // stay below 1 in magnitude, and keep 1 + c positive
  explicit RevolutionMetric(const std::vector<double>& h_coeffs);

  bool is_round() const;
  double h(double z) const;
  double c(double z) const;
  double c_prime(double z) const;
  double sup_h() const { return sup_h_; }
  double distortion() const { return 1.0 + sup_h_; }  // metric vs round lengths

  double metric_dot(const Vec3& u, const Vec3& a, const Vec3& b) const;
  double speed(const Vec3& u, const Vec3& v) const;
  // the Clairaut invariant sin^2 r * dphi/ds = (u x v)_z
  static double clairaut(const Vec3& u, const Vec3& v);

 private:
  RevolutionMetric() = default;
  void finish_construction();

  std::vector<double> p_;  // h(z) = (1 - z^2) p(z)
  double sup_h_ = 0.0;
};

struct RevSample {
  double s = 0.0;
  Vec3 u{};
  Vec3 v{};
};

struct RevPath {
  std::vector<RevSample> samples;  // includes s = 0 and s = length
  double length = 0.0;
  double step = 0.0;
  double unit_drift = 0.0;      // max |g-speed - 1| and sphere-constraint drift
  double clairaut_drift = 0.0;  // max deviation of the Clairaut invariant
};

// Unit-speed geodesic from u0 in direction v0 (normalized internally).
// Samples are stored roughly every sample_arc of arc length. Throws when
// the conservation drifts exceed the per-unit-length tolerances.
RevPath geodesic_flow(const RevolutionMetric& m, const Vec3& u0, const Vec3& v0,
                      double length, double step, double sample_arc = 1e-2,
                      double unit_tol = 1e-9, double clairaut_tol = 1e-7);

struct ShootingResult {
  Vec3 origin{};
  double theta = 0.0;  // initial angle in the base frame at the origin
  double length = 0.0;
  Vec3 terminal{};
  double miss = 0.0;  // distance from terminal to the target
  double clairaut_drift = 0.0;
  std::vector<RevSample> samples;
};

struct LightScan {
  std::vector<ShootingResult> rays;
  bool continuum = false;  // nearly every scan angle hits: a conjugate target
  std::size_t angles_scanned = 0;
};

struct ShootOptions {
  double step = 1e-3;
  double pass_threshold = 0.12;  // coarse near-pass detector (chordal)
  double miss_target = 1e-8;
  double match_window = 0.35;  // arc window for pairing passages across angles
  int max_bisections = 80;
  double dedup_angle = 1e-5;
  double dedup_length = 1e-5;
  double endpoint_window = 0.05;  // arc ignored at both ends of each path
  double tube_radius = 1e-3;      // interior closer than this to a mark: not light
  double sample_arc = 1e-2;
  double continuum_miss = 1e-7;
  double continuum_fraction = 0.9;
};

// All light rays from x to y of length <= T (T capped at one period 2*pi),
// scanning initial directions at the given angular resolution (which must
// divide 2*pi). A conjugate-style continuum of hits is reported as such
// instead of a ray list.
LightScan shoot_light(const RevolutionMetric& m, const Vec3& x, const Vec3& y,
                      double T, double angular_resolution,
                      const ShootOptions& opt = {});

// n geodesic loops of the given length based at x, one per equally spaced
// initial angle; no filtering, intended for closure and blocking probes.
std::vector<ShootingResult> sample_loops(const RevolutionMetric& m, const Vec3& x,
                                         int n, double length = 6.283185307179586,
                                         double step = 1e-3);

// Largest pairwise distance estimate: shooting fans from a one-parameter
// family of sources (rotational symmetry), binning samples over a target
// grid, correcting each bin by the distortion-scaled residual angle.
double diameter_estimate(const RevolutionMetric& m, int grid, double step = 2e-3);

struct RevolutionViolation {
  Vec3 x{};
  Vec3 y{};
  double distance = 0.0;  // shortest found ray
  double diameter = 0.0;
  LightScan scan;
  std::vector<std::size_t> family;  // pairwise interior-disjoint ray indices
};

// Violation test for a single pair against a known diameter estimate:
// reports the pair when it carries at least three pairwise interior-disjoint
// light rays and 0.05 < d(x,y) < diameter - 0.05; nullopt otherwise
// (including continuum scans and coincident points).
std::optional<RevolutionViolation> cross_violation_at(const RevolutionMetric& m,
                                                      const Vec3& x, const Vec3& y,
                                                      double T, double diameter,
                                                      const ShootOptions& opt = {});

// First grid pair (deterministic order) passing cross_violation_at.
std::optional<RevolutionViolation> find_cross_violation(const RevolutionMetric& m,
                                                        double T, int grid,
                                                        const ShootOptions& opt = {});

// Space hooks over sampled rays; resolution floors keep zero tolerances
// meaningful for numeric data.
class RevolutionSpace {
 public:
  using Point = Vec3;
  using Ray = ShootingResult;

  explicit RevolutionSpace(const RevolutionMetric& m) : metric_(&m) {}
  const RevolutionMetric& metric() const { return *metric_; }

  std::optional<HitParam> hit_param(const Ray& r, const Point& p, double tol) const;
  double interior_gap(const Ray& a, const Ray& b, double tol) const;
  bool interiors_disjoint(const Ray& a, const Ray& b, double tol) const;
  double ray_length(const Ray& r) const { return r.length; }
  bool ray_before(const Ray& a, const Ray& b) const;

 private:
  const RevolutionMetric* metric_;
};

static_assert(Space<RevolutionSpace>);

}  // namespace geolab
