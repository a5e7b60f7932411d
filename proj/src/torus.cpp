#include "geolab/torus.hpp"

#include "geolab/parallel.hpp"
#include "geolab/progression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace geolab {

namespace {

// Row-vector times row-matrix: (v * M)_j = sum_i v_i M[i][j].
VecQ mul_vm(const VecQ& v, const std::vector<VecQ>& M) {
  const std::size_t n = M.size();
  VecQ out(M.empty() ? 0 : M[0].size(), Rat(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[i] * M[i][j];
  return out;
}

Rat sq_norm(const VecQ& v) { return vec_dot(v, v); }

// Gauss-Jordan inverse of a square row-matrix; also reports the determinant.
std::vector<VecQ> invert(std::vector<VecQ> m, Rat& det) {
  const std::size_t n = m.size();
  std::vector<VecQ> inv(n, VecQ(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) throw std::invalid_argument("torus basis is singular");
    if (piv != col) {
      std::swap(m[piv], m[col]);
      std::swap(inv[piv], inv[col]);
      det = -det;
    }
    Rat p = m[col][col];
    det *= p;
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rat f = m[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// Smallest integer j >= 1 with j^2 >= a (a >= 0 rational).
Int ceil_sqrt_rat(const Rat& a) {
  if (a <= 0) return 1;
  Int j = isqrt_floor(floor_rat(a));
  while (Rat(j) * Rat(j) < a) ++j;
  if (j < 1) j = 1;
  return j;
}

}  // namespace

TorusSpace::TorusSpace(std::vector<VecQ> basis) : basis_(std::move(basis)) {
  n_ = basis_.size();
  if (n_ == 0) throw std::invalid_argument("torus basis is empty");
  for (const auto& row : basis_)
    if (row.size() != n_)
      throw std::invalid_argument("torus basis must be square");
  inv_ = invert(basis_, det_);
  build_reduced();
  Rat red_det;
  red_inv_ = invert(red_, red_det);
  red_colsq_.assign(n_, Rat(0));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      red_colsq_[i] += red_inv_[j][i] * red_inv_[j][i];
  compute_shortest();
  compute_diameter2();
}

void TorusSpace::build_reduced() {
  red_ = basis_;
  if (n_ != 2) return;
  // Lagrange reduction: afterwards |red_[0]| <= |red_[1]| and the pair is
  // size-reduced; flip the sign so the inner product is nonpositive (obtuse
  // superbase, needed for the covering radius below).
  VecQ a = red_[0], b = red_[1];
  for (;;) {
    if (sq_norm(b) < sq_norm(a)) std::swap(a, b);
    Rat mu_q = vec_dot(a, b) / sq_norm(a);
    Int mu = round_rat(mu_q);
    if (mu == 0) break;
    Rat mf(mu);
    for (std::size_t j = 0; j < n_; ++j) b[j] -= mf * a[j];
  }
  if (vec_dot(a, b) > 0)
    for (auto& c : b) c = -c;
  red_ = {a, b};
}

void TorusSpace::compute_shortest() {
  if (n_ == 1) {
    shortest_len2_ = sq_norm(basis_[0]);
    return;
  }
  if (n_ == 2) {
    shortest_len2_ = sq_norm(red_[0]);
    return;
  }
  // Scan the ball of radius min basis norm around the origin.
  Rat best = sq_norm(red_[0]);
  for (std::size_t i = 1; i < n_; ++i) best = std::min(best, sq_norm(red_[i]));
  std::vector<Int> lo(n_), hi(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    Int b = ceil_sqrt_rat(best * red_colsq_[i]);
    lo[i] = -b;
    hi[i] = b;
  }
  std::vector<Int> k = lo;
  for (;;) {
    bool zero = true;
    for (const auto& ki : k)
      if (ki != 0) {
        zero = false;
        break;
      }
    if (!zero) {
      VecQ v(n_, Rat(0));
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) v[j] += Rat(k[i]) * red_[i][j];
      Rat l2 = sq_norm(v);
      if (l2 < best) best = l2;
    }
    std::size_t axis = 0;
    while (axis < n_ && k[axis] == hi[axis]) {
      k[axis] = lo[axis];
      ++axis;
    }
    if (axis == n_) break;
    ++k[axis];
  }
  shortest_len2_ = best;
}

void TorusSpace::compute_diameter2() {
  if (n_ == 1) {
    diameter2_ = sq_norm(basis_[0]) / 4;
    return;
  }
  if (n_ == 2) {
    // Circumradius of the obtuse superbase triangle with edge vectors
    // red_[0], red_[1], -(red_[0]+red_[1]): R = abc / (4K), K = |det|/2.
    Rat a2 = sq_norm(red_[0]);
    Rat b2 = sq_norm(red_[1]);
    VecQ c = vec_add(red_[0], red_[1]);
    Rat c2 = sq_norm(c);
    diameter2_ = (a2 * b2 * c2) / (4 * det_ * det_);
    return;
  }
  diameter2_ = std::nullopt;
}

double TorusSpace::injectivity_radius() const {
  return std::sqrt(approx(shortest_len2_)) / 2.0;
}

VecQ TorusSpace::to_coeffs(const VecQ& p) const {
  if (p.size() != n_) throw std::invalid_argument("point dimension mismatch");
  return mul_vm(p, inv_);
}

VecQ TorusSpace::from_coeffs(const VecQ& c) const {
  if (c.size() != n_) throw std::invalid_argument("coefficient dimension mismatch");
  return mul_vm(c, basis_);
}

TorusSpace::Point TorusSpace::canonical(const VecQ& p) const {
  VecQ c = to_coeffs(p);
  for (auto& ci : c) ci = mod_rat(ci, Rat(1));
  return from_coeffs(c);
}

bool TorusSpace::light_displacement(const VecQ& coeff) {
  Int d = 1;
  for (const auto& c : coeff) d = lcm(d, rat_den(c));
  Int g = 0;
  for (const auto& c : coeff) {
    Rat w = c * Rat(d);
    g = gcd(g, rat_num(w));
  }
  if (g < 0) g = -g;
  if (g == 0) return false;  // zero displacement, not a ray
  return g <= d;
}

TorusRay TorusSpace::make_ray(const VecQ& x, const VecQ& disp) const {
  if (vec_is_zero(disp)) throw std::invalid_argument("zero-length ray");
  TorusRay r;
  r.start = canonical(x);
  r.disp = disp;
  r.coeff = to_coeffs(disp);
  r.len2 = sq_norm(disp);
  r.length = std::sqrt(approx(r.len2));
  return r;
}

TorusRay TorusSpace::reverse(const TorusRay& r) const {
  TorusRay out;
  out.start = canonical(vec_add(r.start, r.disp));
  out.disp = vec_scale(Rat(-1), r.disp);
  out.coeff = vec_scale(Rat(-1), r.coeff);
  out.len2 = r.len2;
  out.length = r.length;
  return out;
}

TorusRay TorusSpace::light_core(const TorusRay& r) const {
  Int d = 1;
  for (const auto& c : r.coeff) d = lcm(d, rat_den(c));
  Int g = 0;
  for (const auto& c : r.coeff) g = gcd(g, rat_num(c * Rat(d)));
  if (g < 0) g = -g;
  if (g <= d) return r;  // already light
  // Interior lifts of x sit at parameter multiples of t0 = d/g < 1; lifts of
  // y at 1 minus such multiples. The subsegment from the last x-lift to the
  // next y-lift is light.
  Rat t0(d, g);
  Rat t1 = t0 * Rat(ceil_rat(1 / t0) - 1);
  Rat q = (1 - t1) / t0;
  Int j = is_integer(q) ? floor_rat(q) - 1 : floor_rat(q);
  Rat t2 = 1 - Rat(j) * t0;
  Rat f = t2 - t1;
  TorusRay out;
  out.start = r.start;  // t1 * disp is a lattice vector, start is unchanged
  out.disp = vec_scale(f, r.disp);
  out.coeff = vec_scale(f, r.coeff);
  out.len2 = r.len2 * f * f;
  out.length = std::sqrt(approx(out.len2));
  return out;
}

bool TorusSpace::ray_before(const TorusRay& a, const TorusRay& b) const {
  if (a.len2 != b.len2) return a.len2 < b.len2;
  return vec_lex_less(a.coeff, b.coeff);
}

// Visits every displacement v = ybar - xbar + lambda with 0 < |v|^2 <= T2,
// slicing the outermost reduced-basis coefficient across workers. setup
// receives the slice count before any visit; visit is called as
// visit(slice, v, len2) and must only touch slice-local state.
namespace {
void scan_ball(const std::vector<VecQ>& red, const std::vector<VecQ>& red_inv,
               const VecQ& red_colsq, const VecQ& diff, const Rat& T2,
               const std::function<void(std::size_t)>& setup,
               const std::function<void(std::size_t, const VecQ&, const Rat&)>& visit) {
  const std::size_t n = red.size();
  VecQ u = mul_vm(diff, red_inv);
  std::vector<Int> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    Int b = ceil_sqrt_rat(T2 * red_colsq[i]);
    lo[i] = ceil_rat(-u[i]) - b;
    hi[i] = floor_rat(-u[i]) + b;
    if (hi[i] < lo[i]) {
      setup(0);
      return;
    }
  }
  Int width0 = hi[0] - lo[0] + 1;
  auto slices = static_cast<std::size_t>(width0);
  setup(slices);
  parallel_for(slices, [&](std::size_t s) {
    std::vector<Int> k(n);
    k[0] = lo[0] + Int(s);
    for (std::size_t i = 1; i < n; ++i) k[i] = lo[i];
    for (;;) {
      VecQ v = diff;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[j] += Rat(k[i]) * red[i][j];
      Rat l2 = sq_norm(v);
      if (l2 > 0 && l2 <= T2) visit(s, v, l2);
      std::size_t axis = 1;
      while (axis < n && k[axis] == hi[axis]) {
        k[axis] = lo[axis];
        ++axis;
      }
      if (axis >= n) break;
      ++k[axis];
    }
  });
}
}  // namespace

std::vector<TorusRay> TorusSpace::enumerate_geodesics(const VecQ& x, const VecQ& y,
                                                      const Rat& T) const {
  if (T <= 0) throw std::invalid_argument("horizon must be positive");
  VecQ xb = canonical(x), yb = canonical(y);
  VecQ diff = vec_sub(yb, xb);
  Rat T2 = T * T;
  // Collect per slice, then merge and sort canonically.
  std::vector<std::vector<TorusRay>> buckets;
  scan_ball(red_, red_inv_, red_colsq_, diff, T2,
            [&](std::size_t slices) { buckets.assign(slices, {}); },
            [&](std::size_t s, const VecQ& v, const Rat& l2) {
              TorusRay r;
              r.start = xb;
              r.disp = v;
              r.coeff = mul_vm(v, inv_);
              r.len2 = l2;
              r.length = std::sqrt(approx(l2));
              buckets[s].push_back(std::move(r));
            });
  std::vector<TorusRay> out;
  for (auto& b : buckets)
    for (auto& r : b) out.push_back(std::move(r));
  std::sort(out.begin(), out.end(), [this](const TorusRay& a, const TorusRay& b) {
    return ray_before(a, b);
  });
  return out;
}

std::vector<TorusRay> TorusSpace::enumerate_light(const VecQ& x, const VecQ& y,
                                                  const Rat& T) const {
  auto rays = enumerate_geodesics(x, y, T);
  std::vector<TorusRay> out;
  out.reserve(rays.size());
  for (auto& r : rays)
    if (light_displacement(r.coeff)) out.push_back(std::move(r));
  return out;
}

std::vector<TorusSpace::Point> TorusSpace::midpoint_blocking_set(const VecQ& x,
                                                                 const VecQ& y) const {
  VecQ xb = canonical(x), yb = canonical(y);
  VecQ mid(n_);
  for (std::size_t j = 0; j < n_; ++j) mid[j] = (xb[j] + yb[j]) / 2;
  std::vector<Point> out;
  std::vector<int> eps(n_, 0);
  for (;;) {
    VecQ half(n_);
    for (std::size_t i = 0; i < n_; ++i) half[i] = Rat(eps[i], 2);
    out.push_back(canonical(vec_add(mid, from_coeffs(half))));
    std::size_t axis = 0;
    while (axis < n_ && eps[axis] == 1) {
      eps[axis] = 0;
      ++axis;
    }
    if (axis == n_) break;
    eps[axis] = 1;
  }
  std::sort(out.begin(), out.end(), vec_lex_less);
  return out;
}

std::vector<TorusGrowthRow> TorusSpace::growth_series(const VecQ& x, const VecQ& y,
                                                      const Rat& T_max,
                                                      const Rat& step) const {
  if (step <= 0 || step > T_max)
    throw std::invalid_argument("growth step must satisfy 0 < step <= T_max");
  Int rows_i = floor_rat(T_max / step);
  std::size_t m = static_cast<std::size_t>(rows_i);
  VecQ xb = canonical(x), yb = canonical(y);
  VecQ diff = vec_sub(yb, xb);
  Rat T2 = (step * Rat(rows_i)) * (step * Rat(rows_i));
  Rat step2 = step * step;
  std::vector<std::vector<long long>> geo, lig;
  scan_ball(red_, red_inv_, red_colsq_, diff, T2,
            [&](std::size_t slices) {
              geo.assign(slices, std::vector<long long>(m, 0));
              lig.assign(slices, std::vector<long long>(m, 0));
            },
            [&](std::size_t s, const VecQ& v, const Rat& l2) {
              // First horizon index j (1-based) with l2 <= (j*step)^2.
              Int j = ceil_sqrt_rat(l2 / step2);
              if (j > rows_i) return;
              auto idx = static_cast<std::size_t>(j) - 1;
              geo[s][idx]++;
              if (light_displacement(mul_vm(v, inv_))) lig[s][idx]++;
            });
  std::vector<TorusGrowthRow> out(m);
  long long gacc = 0, lacc = 0;
  std::vector<long long> gtot(m, 0), ltot(m, 0);
  for (std::size_t s = 0; s < geo.size(); ++s)
    for (std::size_t j = 0; j < m; ++j) {
      gtot[j] += geo[s][j];
      ltot[j] += lig[s][j];
    }
  for (std::size_t j = 0; j < m; ++j) {
    gacc += gtot[j];
    lacc += ltot[j];
    out[j].T = step * Rat(Int(j + 1));
    out[j].geodesics = gacc;
    out[j].light = lacc;
  }
  return out;
}

Rat TorusSpace::distance2(const VecQ& x, const VecQ& y) const {
  VecQ diff = vec_sub(canonical(y), canonical(x));
  VecQ u = mul_vm(diff, red_inv_);
  VecQ v0 = diff;
  for (std::size_t i = 0; i < n_; ++i) {
    Rat ki(-round_rat(u[i]));
    for (std::size_t j = 0; j < n_; ++j) v0[j] += ki * red_[i][j];
  }
  Rat best = sq_norm(v0);
  if (best == 0) return best;
  std::vector<std::optional<Rat>> mins;
  scan_ball(red_, red_inv_, red_colsq_, diff, best,
            [&](std::size_t slices) { mins.assign(slices, std::nullopt); },
            [&](std::size_t s, const VecQ&, const Rat& l2) {
              if (!mins[s] || l2 < *mins[s]) mins[s] = l2;
            });
  for (const auto& mo : mins)
    if (mo && *mo < best) best = *mo;
  return best;
}

std::optional<HitParam> TorusSpace::hit_param(const TorusRay& r, const Point& p,
                                              double) const {
  VecQ c = to_coeffs(vec_sub(p, r.start));
  CongruenceSet acc = CongruenceSet::everything();
  for (std::size_t i = 0; i < n_; ++i) {
    acc = acc.intersect(CongruenceSet::solutions(r.coeff[i], c[i], Rat(1)));
    if (acc.empty()) return std::nullopt;
  }
  auto t = acc.first_in_open(Rat(0), Rat(1));
  if (!t) return std::nullopt;
  return HitParam::from_exact(*t);
}

bool TorusSpace::interiors_disjoint(const TorusRay& a, const TorusRay& b,
                                    double) const {
  VecQ delta = vec_sub(b.start, a.start);
  VecQ dc = to_coeffs(delta);
  std::vector<Int> lo(n_), hi(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (a.coeff[i] == 0 && b.coeff[i] == 0) {
      // The offset on this axis is the constant -dc[i], attained exactly.
      if (!is_integer(-dc[i])) return true;
      lo[i] = hi[i] = floor_rat(-dc[i]);
      continue;
    }
    // Otherwise t*a - s*b - dc ranges over an open interval as t,s run
    // through (0,1).
    Rat l = std::min(Rat(0), a.coeff[i]) - std::max(Rat(0), b.coeff[i]) - dc[i];
    Rat h = std::max(Rat(0), a.coeff[i]) - std::min(Rat(0), b.coeff[i]) - dc[i];
    lo[i] = floor_rat(l) + 1;
    hi[i] = ceil_rat(h) - 1;
    if (hi[i] < lo[i]) return true;
  }
  std::vector<Int> k = lo;
  for (;;) {
    VecQ kq(n_);
    for (std::size_t i = 0; i < n_; ++i) kq[i] = Rat(k[i]);
    VecQ qstart = vec_add(b.start, from_coeffs(kq));
    if (open_segments_intersect(a.start, a.disp, qstart, b.disp)) return false;
    std::size_t axis = 0;
    while (axis < n_ && k[axis] == hi[axis]) {
      k[axis] = lo[axis];
      ++axis;
    }
    if (axis == n_) break;
    ++k[axis];
  }
  return true;
}

bool open_segments_intersect(const VecQ& p, const VecQ& vp, const VecQ& q,
                             const VecQ& vq) {
  const std::size_t n = p.size();
  VecQ delta = vec_sub(q, p);
  std::size_t r1 = n;
  for (std::size_t i = 0; i < n; ++i)
    if (vp[i] != 0 || vq[i] != 0) {
      r1 = i;
      break;
    }
  if (r1 == n) return false;  // both displacements zero, not rays
  std::size_t r2 = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == r1) continue;
    if (vp[r1] * vq[i] - vp[i] * vq[r1] != 0) {
      r2 = i;
      break;
    }
  }
  if (r2 != n) {
    // Independent directions: solve the 2x2 system, then check the rest.
    Rat D = vq[r1] * vp[r2] - vp[r1] * vq[r2];
    Rat t = (vq[r1] * delta[r2] - delta[r1] * vq[r2]) / D;
    Rat s = (vp[r1] * delta[r2] - delta[r1] * vp[r2]) / D;
    if (!(t > 0 && t < 1 && s > 0 && s < 1)) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (t * vp[i] - s * vq[i] != delta[i]) return false;
    return true;
  }
  // Parallel directions. Distinct parallel lines never meet.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (delta[i] * vp[j] != delta[j] * vp[i]) return false;
  // Same line: compare open parameter intervals along axis r1.
  Rat a_end = p[r1] + vp[r1], b_end = q[r1] + vq[r1];
  Rat a_lo = std::min(p[r1], a_end), a_hi = std::max(p[r1], a_end);
  Rat b_lo = std::min(q[r1], b_end), b_hi = std::max(q[r1], b_end);
  return std::max(a_lo, b_lo) < std::min(a_hi, b_hi);
}

}  // namespace geolab
