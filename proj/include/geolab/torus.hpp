#pragma once

// Flat torus R^n / Lambda for a full-rank rational lattice basis. Everything
// here is exact: points are canonical fundamental-domain representatives,
// geodesic segments are lattice translates of the straight segment between
// lifts, and the light condition (open interior avoids every lift of either
// endpoint) is a divisibility test on the displacement in lattice
// coordinates. Midpoint blocker sets realize the uniform finite blocking
// bound of 2^n points per pair.

#include "geolab/blocking.hpp"
#include "geolab/rational.hpp"

#include <optional>
#include <vector>

namespace geolab {

struct TorusRay {
  VecQ start;   // canonical lift of the source, ambient coordinates
  VecQ disp;    // displacement to the chosen lift of the target
  VecQ coeff;   // disp in lattice coordinates (basis of the owning space)
  Rat len2;     // exact squared euclidean length
  double length = 0.0;
};

struct TorusGrowthRow {
  Rat T;
  long long geodesics = 0;
  long long light = 0;
};

class TorusSpace {
 public:
  using Point = VecQ;
  using Ray = TorusRay;

  // basis: list of n lattice generators, each a rational n-vector (rows of
  // the basis matrix). Throws on non-square or singular input.
  explicit TorusSpace(std::vector<VecQ> basis);

  std::size_t dim() const { return n_; }
  const std::vector<VecQ>& basis() const { return basis_; }
  const Rat& det() const { return det_; }

  // Canonical representative: coefficients reduced into [0,1)^n.
  Point canonical(const VecQ& p) const;
  VecQ to_coeffs(const VecQ& p) const;
  VecQ from_coeffs(const VecQ& c) const;

  // Squared length of the shortest nonzero lattice vector; the injectivity
  // radius is half its square root.
  const Rat& shortest_len2() const { return shortest_len2_; }
  double injectivity_radius() const;

  // Exact squared quotient distance (closest lattice translate).
  Rat distance2(const VecQ& x, const VecQ& y) const;

  // Squared covering radius (quotient diameter); closed form for rank 1 via
  // the half side and rank 2 via the circumradius of the obtuse superbase
  // triangle. Higher ranks report nothing.
  const std::optional<Rat>& diameter2() const { return diameter2_; }

  // All geodesic segments x -> y of positive length at most T, sorted by
  // (squared length, lexicographic lattice coordinates).
  std::vector<TorusRay> enumerate_geodesics(const VecQ& x, const VecQ& y,
                                            const Rat& T) const;
  // The light subset: segments whose open interior misses every lift of x
  // and of y.
  std::vector<TorusRay> enumerate_light(const VecQ& x, const VecQ& y,
                                        const Rat& T) const;

  // The 2^n midpoints (x + y + lambda)/2 over parity classes of Lambda,
  // canonicalized and sorted; blocks every light ray at its half-way point.
  std::vector<Point> midpoint_blocking_set(const VecQ& x, const VecQ& y) const;

  // Exact (T, n_T, m_T) at horizons step, 2*step, ..., up to T_max.
  std::vector<TorusGrowthRow> growth_series(const VecQ& x, const VecQ& y,
                                            const Rat& T_max, const Rat& step) const;

  // Light test on a displacement in lattice coordinates: with d the smallest
  // positive integer making d*c integral and g the gcd of the resulting
  // integer vector, the segment is light iff g <= d.
  static bool light_displacement(const VecQ& coeff);

  // Light subsegment of an arbitrary geodesic segment: from the last interior
  // lift of x to the first following lift of y. Identity on light rays.
  TorusRay light_core(const TorusRay& r) const;

  TorusRay reverse(const TorusRay& r) const;

  // Ray between canonical lifts with displacement disp (must be a valid
  // x -> y displacement for some lattice translate).
  TorusRay make_ray(const VecQ& x, const VecQ& disp) const;

  // Space concept hooks. Interiors and hits are decided in the quotient:
  // a hit is the smallest t in (0,1) with start + t*disp = p mod Lambda,
  // and interiors are compared across all lattice translates. tol is
  // ignored (exact space).
  std::optional<HitParam> hit_param(const TorusRay& r, const Point& p,
                                    double tol) const;
  bool interiors_disjoint(const TorusRay& a, const TorusRay& b, double tol) const;
  double ray_length(const TorusRay& r) const { return r.length; }
  bool ray_before(const TorusRay& a, const TorusRay& b) const;

 private:
  void build_reduced();
  void compute_shortest();
  void compute_diameter2();

  std::size_t n_ = 0;
  std::vector<VecQ> basis_;    // original generators (rows)
  std::vector<VecQ> inv_;      // inverse matrix, used as p * inv_ = coeffs
  Rat det_;
  std::vector<VecQ> red_;      // reduced generators used for enumeration
  std::vector<VecQ> red_inv_;
  VecQ red_colsq_;             // squared column norms of red_inv_
  Rat shortest_len2_ = 0;
  std::optional<Rat> diameter2_;
};

// Exact test for open straight segments p + t*vp, q + s*vq (t, s in (0,1))
// sharing a point, any ambient dimension. vp, vq must be nonzero.
bool open_segments_intersect(const VecQ& p, const VecQ& vp, const VecQ& q,
                             const VecQ& vq);

}  // namespace geolab
