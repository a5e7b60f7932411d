#include "geolab/apartment.hpp"

#include <algorithm>
#include <stdexcept>

namespace geolab {

namespace {

// Cartesian product of per-axis value lists, lex sorted.
std::vector<VecQ> product(const std::vector<std::vector<Rat>>& axis) {
  std::vector<VecQ> out;
  std::size_t n = 1;
  for (const auto& vals : axis) n *= vals.size();
  if (n == 0) return out;
  out.reserve(n);
  VecQ cur(axis.size(), Rat(0));
  std::vector<std::size_t> idx(axis.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < axis.size(); ++i) cur[i] = axis[i][idx[i]];
    out.push_back(cur);
    std::size_t i = axis.size();
    while (i > 0 && ++idx[i - 1] == axis[i - 1].size()) idx[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

}  // namespace

Apartment::Apartment(VecQ sides) : sides_(std::move(sides)) {
  if (sides_.empty()) throw std::invalid_argument("apartment needs at least one axis");
  for (const Rat& s : sides_)
    if (s <= 0) throw std::invalid_argument("apartment sides must be positive");
}

void Apartment::check_type(const VecQ& t) const {
  if (t.size() != rank()) throw std::invalid_argument("type has wrong rank");
  for (std::size_t i = 0; i < rank(); ++i)
    if (t[i] < 0 || t[i] > sides_[i])
      throw std::invalid_argument("type outside the chamber");
}

Rat Apartment::fold_axis(std::size_t axis, const Rat& x) const {
  const Rat period = Rat(2) * sides_[axis];
  Rat y = mod_rat(x, period);
  if (y > sides_[axis]) y = period - y;
  return y;
}

VecQ Apartment::fold(const VecQ& position) const {
  if (position.size() != rank()) throw std::invalid_argument("point has wrong rank");
  VecQ out(rank(), Rat(0));
  for (std::size_t i = 0; i < rank(); ++i) out[i] = fold_axis(i, position[i]);
  return out;
}

std::vector<VecQ> Apartment::orbit_points(const VecQ& type, const VecQ& lo,
                                          const VecQ& hi) const {
  check_type(type);
  if (lo.size() != rank() || hi.size() != rank())
    throw std::invalid_argument("window has wrong rank");
  std::vector<std::vector<Rat>> axis(rank());
  for (std::size_t i = 0; i < rank(); ++i) {
    const Rat period = Rat(2) * sides_[i];
    std::vector<Rat> vals;
    for (int sign = 0; sign < 2; ++sign) {
      const Rat t = sign == 0 ? type[i] : -type[i];
      // t + period*k in [lo, hi]
      for (Int k = ceil_rat((lo[i] - t) / period), kmax = floor_rat((hi[i] - t) / period);
           k <= kmax; ++k)
        vals.push_back(t + period * Rat(k));
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    axis[i] = std::move(vals);
  }
  return product(axis);
}

std::vector<VecQ> Apartment::midpoint_types_windowed(const VecQ& x_type,
                                                     const VecQ& y_type,
                                                     int periods) const {
  check_type(x_type);
  check_type(y_type);
  if (periods < 1) throw std::invalid_argument("window needs at least one period");
  VecQ lo(rank(), Rat(0)), hi(rank(), Rat(0));
  for (std::size_t i = 0; i < rank(); ++i) hi[i] = Rat(2 * periods) * sides_[i];
  auto xs = orbit_points(x_type, lo, hi);
  auto ys = orbit_points(y_type, lo, hi);
  std::vector<VecQ> folds;
  folds.reserve(xs.size() * ys.size());
  VecQ mid(rank(), Rat(0));
  for (const VecQ& p : xs)
    for (const VecQ& q : ys) {
      for (std::size_t i = 0; i < rank(); ++i) mid[i] = fold_axis(i, (p[i] + q[i]) / 2);
      folds.push_back(mid);
    }
  std::sort(folds.begin(), folds.end(), vec_lex_less);
  folds.erase(std::unique(folds.begin(), folds.end(), vec_eq), folds.end());
  return folds;
}

std::vector<VecQ> Apartment::midpoint_types(const VecQ& x_type, const VecQ& y_type,
                                            int periods) const {
  auto got = midpoint_types_windowed(x_type, y_type, periods);
  auto wider = midpoint_types_windowed(x_type, y_type, periods + 1);
  if (got != wider)
    throw std::runtime_error("midpoint type window too small at " +
                             std::to_string(periods) + " periods");
  return got;
}

ApartmentCertificate Apartment::verify_blocking(const VecQ& x, const VecQ& y_type,
                                                const Rat& T) const {
  if (x.size() != rank()) throw std::invalid_argument("point has wrong rank");
  if (T <= 0) throw std::invalid_argument("horizon must be positive");
  ApartmentCertificate cert;
  cert.types = midpoint_types(fold(x), y_type);

  VecQ lo(rank(), Rat(0)), hi(rank(), Rat(0));
  for (std::size_t i = 0; i < rank(); ++i) {
    lo[i] = x[i] - T;
    hi[i] = x[i] + T;
  }
  const Rat T2 = T * T;
  for (const VecQ& q : orbit_points(y_type, lo, hi)) {
    Rat d2(0);
    for (std::size_t i = 0; i < rank(); ++i) {
      Rat d = q[i] - x[i];
      d2 += d * d;
    }
    if (d2 == 0 || d2 > T2) continue;
    VecQ mid(rank(), Rat(0)), tf(rank(), Rat(0));
    for (std::size_t i = 0; i < rank(); ++i) {
      mid[i] = (x[i] + q[i]) / 2;
      tf[i] = fold_axis(i, mid[i]);
    }
    auto it = std::lower_bound(cert.types.begin(), cert.types.end(), tf, vec_lex_less);
    if (it == cert.types.end() || !vec_eq(*it, tf))
      throw std::logic_error("midpoint escaped the type set");
    cert.hits.push_back({q, mid, std::size_t(it - cert.types.begin())});
  }
  return cert;
}

}  // namespace geolab
