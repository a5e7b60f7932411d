#pragma once

// Exact solution sets of one-variable congruences t*v = c (mod L) over the
// rationals. Each coordinate of such a system contributes either "everything",
// "nothing", or an arithmetic progression {base + k*step}; intersecting them
// yields again one of those three shapes. Used for point-on-segment tests in
// lattice quotients and folded chambers, where t is the fraction along a path.

#include "geolab/rational.hpp"

#include <optional>

namespace geolab {

// ext_gcd(a, b) -> (g, x, y) with a*x + b*y = g = gcd(a, b), g >= 0.
struct ExtGcd {
  Int g, x, y;
};
ExtGcd ext_gcd(Int a, Int b);

class CongruenceSet {
 public:
  static CongruenceSet everything() { return CongruenceSet(Kind::All); }
  static CongruenceSet nothing() { return CongruenceSet(Kind::Empty); }
  static CongruenceSet progression(const Rat& base, const Rat& step);

  // Solutions t of t*v == c + k*period, k in Z. period > 0.
  // v == 0 degenerates to everything/nothing depending on period | c.
  static CongruenceSet solutions(const Rat& v, const Rat& c, const Rat& period);

  CongruenceSet intersect(const CongruenceSet& other) const;

  bool empty() const { return kind_ == Kind::Empty; }
  bool all() const { return kind_ == Kind::All; }

  // Smallest element strictly inside (lo, hi); nullopt if none. Rejects
  // unbounded "everything" sets (caller must have at least one real
  // constraint before asking).
  std::optional<Rat> first_in_open(const Rat& lo, const Rat& hi) const;

  // True iff some element lies strictly inside (lo, hi).
  bool intersects_open(const Rat& lo, const Rat& hi) const {
    return first_in_open(lo, hi).has_value();
  }

 private:
  enum class Kind { All, Empty, Prog };
  explicit CongruenceSet(Kind k) : kind_(k) {}

  Kind kind_;
  Rat base_ = 0;  // normalized into [0, step_)
  Rat step_ = 0;  // > 0 when kind_ == Prog
};

}  // namespace geolab
