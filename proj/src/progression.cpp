#include "geolab/progression.hpp"

namespace geolab {

ExtGcd ext_gcd(Int a, Int b) {
  Int old_r = a, r = b;
  Int old_s = 1, s = 0;
  Int old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;  // truncated division is fine for the invariants
    Int tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_r, old_s, old_t};
}

CongruenceSet CongruenceSet::progression(const Rat& base, const Rat& step) {
  if (step <= 0) throw std::invalid_argument("progression step must be positive");
  CongruenceSet cs(Kind::Prog);
  cs.step_ = step;
  cs.base_ = mod_rat(base, step);
  return cs;
}

CongruenceSet CongruenceSet::solutions(const Rat& v, const Rat& c, const Rat& period) {
  if (period <= 0) throw std::invalid_argument("period must be positive");
  if (v == 0) {
    // 0 == c (mod period): either every t works or none does.
    return mod_rat(c, period) == 0 ? everything() : nothing();
  }
  // t = (c + k*period) / v, k in Z: progression with step |period / v|.
  Rat step = period / v;
  if (step < 0) step = -step;
  return progression(c / v, step);
}

CongruenceSet CongruenceSet::intersect(const CongruenceSet& other) const {
  if (kind_ == Kind::Empty || other.kind_ == Kind::All) return *this;
  if (other.kind_ == Kind::Empty) return nothing();
  if (kind_ == Kind::All) return other;
  // Solve base_ + k*step_ = other.base_ + l*other.step_ over integers k, l.
  Int d1 = rat_den(step_), d2 = rat_den(other.step_);
  Int d3 = rat_den(other.base_ - base_);
  Int D = lcm(lcm(d1, d2), d3);
  Rat Df(D);
  Int S = rat_num(step_ * Df);        // exact: denominators divide D
  Int U = rat_num(other.step_ * Df);
  Int Delta = rat_num((other.base_ - base_) * Df);
  ExtGcd e = ext_gcd(S, U);
  if (Delta % e.g != 0) return nothing();
  // k = x*(Delta/g) (mod U/g)
  Int m = U / e.g;
  Int k0 = (e.x * (Delta / e.g)) % m;
  if (k0 < 0) k0 += m;
  return progression(base_ + Rat(k0) * step_, step_ * Rat(m));
}

std::optional<Rat> CongruenceSet::first_in_open(const Rat& lo, const Rat& hi) const {
  if (kind_ == Kind::Empty) return std::nullopt;
  if (kind_ == Kind::All)
    throw std::logic_error("unconstrained congruence set queried for an element");
  if (lo >= hi) return std::nullopt;
  // First element strictly above lo.
  Int k = floor_rat((lo - base_) / step_) + 1;
  Rat t = base_ + Rat(k) * step_;
  while (t <= lo) t += step_;  // exact-arithmetic safety, at most one pass
  if (t < hi) return t;
  return std::nullopt;
}

}  // namespace geolab
