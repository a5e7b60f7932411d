#pragma once

// Reflection tessellation of rank-r space by an axis-aligned box chamber W.
// The full group is the product of per-axis infinite dihedral groups (the
// reflections in the two facets of each side); its translation subgroup has
// index 2^r and shifts each axis by twice the side. The folding map sends a
// point to its unique chamber representative (a triangle wave per axis), the
// "type" of the point. Midpoints between two orbit families realize only
// finitely many types; that finite set, computed here by windowed
// enumeration with a saturation check, blocks every straight segment from a
// fixed point to any point of a target orbit at its midpoint.

#include "geolab/rational.hpp"

#include <vector>

namespace geolab {

struct ApartmentCertificate {
  std::vector<VecQ> types;  // complete midpoint type set, lex sorted
  struct Hit {
    VecQ target;            // orbit point of the target type within the ball
    VecQ midpoint;          // (x + target)/2
    std::size_t type_index;  // index into types realized by fold(midpoint)
  };
  std::vector<Hit> hits;    // targets in lex order
};

class Apartment {
 public:
  // One positive rational side length per axis.
  explicit Apartment(VecQ sides);

  std::size_t rank() const { return sides_.size(); }
  const VecQ& sides() const { return sides_; }

  // Chamber representative: per-axis triangle wave with period twice the
  // side. Idempotent and invariant under every group element.
  Rat fold_axis(std::size_t axis, const Rat& x) const;
  VecQ fold(const VecQ& position) const;

  // All positions in the closed box [lo, hi] whose fold equals type,
  // lex sorted. Throws if type lies outside the chamber.
  std::vector<VecQ> orbit_points(const VecQ& type, const VecQ& lo,
                                 const VecQ& hi) const;

  // Midpoint types realized inside a window of the given number of
  // translation periods per axis (no completeness check).
  std::vector<VecQ> midpoint_types_windowed(const VecQ& x_type, const VecQ& y_type,
                                            int periods) const;

  // Complete midpoint type set: computed at `periods` and certified by
  // equality with one period more. Throws "window too small" on instability.
  // Cardinality is at most 2^r * (2^r)^2.
  std::vector<VecQ> midpoint_types(const VecQ& x_type, const VecQ& y_type,
                                   int periods = 2) const;

  // For every orbit point q of y_type with 0 < |q - x| <= T, confirms that
  // the midpoint of the straight segment x -> q folds into the midpoint
  // type set, and reports the realized types.
  ApartmentCertificate verify_blocking(const VecQ& x, const VecQ& y_type,
                                       const Rat& T) const;

 private:
  void check_type(const VecQ& t) const;

  VecQ sides_;
};

}  // namespace geolab
