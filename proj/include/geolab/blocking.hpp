#pragma once

// Geometry-agnostic blocking machinery. A "space" supplies exact or numeric
// answers to three questions about a light ray (a geodesic between two marked
// points whose open interior avoids both): where does a candidate point meet
// it, do two ray interiors overlap, and how do rays order canonically. On top
// of that this header builds blocking certificates, exact/greedy disjoint
// families (lower bounds), minimum hitting sets over a candidate pool (upper
// bounds), and the cross/sphere classification verdicts.
//
// Parameters along a ray are stored as fractions of total length in (0, 1):
// exact rationals for exact spaces, doubles for sampled ones.

#include "geolab/parallel.hpp"
#include "geolab/rational.hpp"

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geolab {

struct HitParam {
  bool exact = false;
  Rat frac_exact = 0;  // meaningful when exact
  double frac = 0.0;   // always populated

  static HitParam from_exact(const Rat& f) { return {true, f, approx(f)}; }
  static HitParam from_approx(double f) { return {false, 0, f}; }

  bool before(const HitParam& o) const {
    if (exact && o.exact) return frac_exact < o.frac_exact;
    return frac < o.frac;
  }
};

template <class S>
concept Space = requires(const S& s, const typename S::Ray& r,
                         const typename S::Point& p, double tol) {
  typename S::Point;
  typename S::Ray;
  // Smallest interior parameter (fraction of length) at which the ray's
  // interior passes through p, within tol; nullopt if it never does.
  { s.hit_param(r, p, tol) } -> std::same_as<std::optional<HitParam>>;
  // Whether the open interiors of two rays are disjoint subsets of the space.
  { s.interiors_disjoint(r, r, tol) } -> std::same_as<bool>;
  { s.ray_length(r) } -> std::same_as<double>;
  // Canonical order: length first, then lexicographic path data.
  { s.ray_before(r, r) } -> std::same_as<bool>;
};

template <Space S>
struct Certificate {
  struct Hit {
    std::size_t ray;      // index into the ray list that was verified
    std::size_t blocker;  // index into blockers
    HitParam at;
  };
  std::vector<typename S::Point> blockers;
  double tolerance = 0.0;
  std::vector<Hit> hits;  // exactly one per ray, ray indices ascending
};

template <Space S>
struct VerifyOutcome {
  bool blocked = false;
  Certificate<S> cert;
  // When !blocked: the offending ray, first in canonical order.
  std::optional<std::size_t> unblocked_ray;
};

// For every ray, the earliest interior hit over the blocker pool (ties to the
// lowest blocker index). Fails with the canonically-first unblocked ray.
template <Space S>
VerifyOutcome<S> verify_blocking(const S& space,
                                 const std::vector<typename S::Point>& blockers,
                                 const std::vector<typename S::Ray>& rays,
                                 double tol) {
  if (rays.empty()) throw std::invalid_argument("verify_blocking: empty ray list");
  if (tol < 0) throw std::invalid_argument("verify_blocking: negative tolerance");
  VerifyOutcome<S> out;
  out.cert.tolerance = tol;
  out.cert.blockers = blockers;
  struct Slot {
    bool hit = false;
    std::size_t blocker = 0;
    HitParam at;
  };
  std::vector<Slot> slots(rays.size());
  parallel_for(rays.size(), [&](std::size_t i) {
    Slot s;
    for (std::size_t b = 0; b < blockers.size(); ++b) {
      auto h = space.hit_param(rays[i], blockers[b], tol);
      if (h && (!s.hit || h->before(s.at))) {
        s.hit = true;
        s.blocker = b;
        s.at = *h;
      }
    }
    slots[i] = s;
  });
  std::optional<std::size_t> witness;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (!slots[i].hit) {
      if (!witness || space.ray_before(rays[i], rays[*witness])) witness = i;
    }
  }
  if (witness) {
    out.blocked = false;
    out.unblocked_ray = witness;
    return out;
  }
  out.blocked = true;
  out.cert.hits.reserve(rays.size());
  for (std::size_t i = 0; i < rays.size(); ++i)
    out.cert.hits.push_back({i, slots[i].blocker, slots[i].at});
  return out;
}

struct DisjointFamily {
  std::vector<std::size_t> rays;  // ascending indices into the input list
  bool exhaustive = false;        // true when the family size is provably maximum
  bool exact_geometry = false;    // disjointness decided with exact arithmetic
  std::optional<double> pairwise_gap;  // numeric spaces: realized min interior gap
};

namespace detail {

// Max independent set by branch and bound over adjacency bitmasks; include
// branch explored first so the first maximum found is deterministic.
inline void mis_recurse(const std::vector<std::uint64_t>& adj, std::uint64_t allowed,
                        std::uint64_t chosen, int chosen_count,
                        std::uint64_t& best, int& best_count) {
  if (allowed == 0) {
    if (chosen_count > best_count) {
      best = chosen;
      best_count = chosen_count;
    }
    return;
  }
  int remaining = std::popcount(allowed);
  if (chosen_count + remaining <= best_count) return;
  int v = std::countr_zero(allowed);
  std::uint64_t bit = std::uint64_t(1) << v;
  mis_recurse(adj, (allowed & ~bit) & ~adj[v], chosen | bit, chosen_count + 1, best,
              best_count);
  mis_recurse(adj, allowed & ~bit, chosen, chosen_count, best, best_count);
}

template <Space S>
bool rays_conflict(const S& space, const typename S::Ray& a, const typename S::Ray& b,
                   double tol) {
  return !space.interiors_disjoint(a, b, tol);
}

}  // namespace detail

// Largest family of pairwise interior-disjoint rays: exhaustive search up to
// exact_limit rays, greedy-by-canonical-order with one-out-two-in local
// augmentation beyond. Family size is a lower bound for the blocking number.
template <Space S>
DisjointFamily blocking_lower_bound(const S& space,
                                    const std::vector<typename S::Ray>& rays, double tol,
                                    std::size_t exact_limit = 24) {
  if (rays.empty()) throw std::invalid_argument("blocking_lower_bound: empty ray list");
  DisjointFamily fam;
  const std::size_t n = rays.size();
  if (n <= exact_limit && n <= 64) {
    std::vector<std::uint64_t> adj(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
    std::vector<char> conflict(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
      conflict[k] =
          detail::rays_conflict(space, rays[pairs[k].first], rays[pairs[k].second], tol);
    });
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (conflict[k]) {
        adj[pairs[k].first] |= std::uint64_t(1) << pairs[k].second;
        adj[pairs[k].second] |= std::uint64_t(1) << pairs[k].first;
      }
    }
    std::uint64_t all = (n == 64) ? ~std::uint64_t(0) : ((std::uint64_t(1) << n) - 1);
    std::uint64_t best = 0;
    int best_count = 0;
    detail::mis_recurse(adj, all, 0, 0, best, best_count);
    for (std::size_t i = 0; i < n; ++i)
      if (best & (std::uint64_t(1) << i)) fam.rays.push_back(i);
    fam.exhaustive = true;
  } else {
    // Greedy in canonical (length-sorted) order.
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < n; ++i) {
      bool ok = true;
      for (std::size_t c : chosen)
        if (detail::rays_conflict(space, rays[i], rays[c], tol)) {
          ok = false;
          break;
        }
      if (ok) chosen.push_back(i);
    }
    // One-out-two-in augmentation until stable.
    const std::size_t scan_cap = 128;
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t ci = 0; ci < chosen.size() && !improved; ++ci) {
        std::vector<std::size_t> cands;
        for (std::size_t i = 0; i < n && cands.size() < scan_cap; ++i) {
          if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
          bool clean = true;
          for (std::size_t cj = 0; cj < chosen.size(); ++cj) {
            if (cj == ci) continue;
            if (detail::rays_conflict(space, rays[i], rays[chosen[cj]], tol)) {
              clean = false;
              break;
            }
          }
          if (clean) cands.push_back(i);
        }
        for (std::size_t a = 0; a < cands.size() && !improved; ++a)
          for (std::size_t b = a + 1; b < cands.size() && !improved; ++b)
            if (!detail::rays_conflict(space, rays[cands[a]], rays[cands[b]], tol)) {
              chosen.erase(chosen.begin() + ci);
              chosen.push_back(cands[a]);
              chosen.push_back(cands[b]);
              std::sort(chosen.begin(), chosen.end());
              improved = true;
            }
      }
    }
    fam.rays = chosen;
    fam.exhaustive = false;
  }
  std::sort(fam.rays.begin(), fam.rays.end());
  // Realized pairwise gap (numeric spaces only).
  if constexpr (requires(const S& s, const typename S::Ray& r) {
                  { s.interior_gap(r, r, tol) } -> std::same_as<double>;
                }) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < fam.rays.size(); ++a)
      for (std::size_t b = a + 1; b < fam.rays.size(); ++b)
        gap = std::min(gap, space.interior_gap(rays[fam.rays[a]], rays[fam.rays[b]], tol));
    if (fam.rays.size() >= 2) fam.pairwise_gap = gap;
    fam.exact_geometry = false;
  } else {
    fam.exact_geometry = true;
  }
  return fam;
}

template <Space S>
struct MinBlockers {
  std::vector<std::size_t> chosen;  // ascending indices into the candidate pool
  Certificate<S> cert;              // certificate over the chosen subset
};

namespace detail {

struct CoverSearch {
  const std::vector<std::uint64_t>& rows;
  int ncand;
  std::uint64_t best_mask = 0;
  int best_count = 0;  // 0 = none found yet
  bool found = false;

  std::uint64_t greedy_cover() const {
    std::vector<int> todo(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) todo[i] = static_cast<int>(i);
    std::uint64_t cur = 0;
    while (!todo.empty()) {
      int bestc = -1, bestcov = -1;
      for (int c = 0; c < ncand; ++c) {
        if (cur & (std::uint64_t(1) << c)) continue;
        int cov = 0;
        for (int r : todo)
          if (rows[r] & (std::uint64_t(1) << c)) ++cov;
        if (cov > bestcov) {
          bestcov = cov;
          bestc = c;
        }
      }
      cur |= std::uint64_t(1) << bestc;
      std::vector<int> rest;
      for (int r : todo)
        if (!(rows[r] & cur)) rest.push_back(r);
      todo.swap(rest);
    }
    return cur;
  }

  int disjoint_lower(const std::vector<int>& open) const {
    std::uint64_t used = 0;
    int count = 0;
    for (int r : open) {
      if ((rows[r] & used) == 0) {
        used |= rows[r];
        ++count;
      }
    }
    return count;
  }

  void recurse(std::uint64_t chosen, int chosen_count, const std::vector<int>& open) {
    if (open.empty()) {
      if (!found || chosen_count < best_count) {
        best_mask = chosen;
        best_count = chosen_count;
        found = true;
      }
      return;
    }
    if (found && chosen_count + disjoint_lower(open) >= best_count) return;
    // Branch on the open row with the fewest candidates.
    int pick = open[0], fewest = 65;
    for (int r : open) {
      int c = std::popcount(rows[r]);
      if (c < fewest) {
        fewest = c;
        pick = r;
      }
    }
    for (int c = 0; c < ncand; ++c) {
      if (!(rows[pick] & (std::uint64_t(1) << c))) continue;
      std::uint64_t nchosen = chosen | (std::uint64_t(1) << c);
      std::vector<int> rest;
      rest.reserve(open.size());
      for (int r : open)
        if (!(rows[r] & nchosen)) rest.push_back(r);
      recurse(nchosen, chosen_count + 1, rest);
    }
  }
};

}  // namespace detail

// Smallest subset of the candidate pool hitting every ray, by branch and
// bound with a greedy upper bound and a disjoint-rows lower bound. Throws if
// some ray is hit by no candidate. Pool size capped at 64.
template <Space S>
MinBlockers<S> min_blockers(const S& space, const std::vector<typename S::Ray>& rays,
                            const std::vector<typename S::Point>& candidates, double tol) {
  if (rays.empty()) throw std::invalid_argument("min_blockers: empty ray list");
  if (candidates.empty()) throw std::invalid_argument("min_blockers: empty candidate pool");
  if (candidates.size() > 64)
    throw std::invalid_argument("min_blockers: candidate pool larger than 64");
  std::vector<std::uint64_t> hitmask(rays.size(), 0);
  parallel_for(rays.size(), [&](std::size_t i) {
    std::uint64_t m = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if (space.hit_param(rays[i], candidates[c], tol)) m |= std::uint64_t(1) << c;
    hitmask[i] = m;
  });
  for (std::size_t i = 0; i < rays.size(); ++i)
    if (hitmask[i] == 0)
      throw std::runtime_error("min_blockers: candidate pool cannot hit ray " +
                               std::to_string(i));
  // Dedup identical rows; keep deterministic order.
  std::vector<std::uint64_t> rows = hitmask;
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  detail::CoverSearch search{rows, static_cast<int>(candidates.size())};
  // Seed with the greedy cover so the very first branches can prune.
  search.best_mask = search.greedy_cover();
  search.best_count = std::popcount(search.best_mask);
  search.found = true;
  std::vector<int> all_rows(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) all_rows[i] = static_cast<int>(i);
  search.recurse(0, 0, all_rows);
  MinBlockers<S> out;
  std::vector<typename S::Point> subset;
  for (int c = 0; c < static_cast<int>(candidates.size()); ++c)
    if (search.best_mask & (std::uint64_t(1) << c)) {
      out.chosen.push_back(static_cast<std::size_t>(c));
      subset.push_back(candidates[c]);
    }
  auto ver = verify_blocking(space, subset, rays, tol);
  if (!ver.blocked)
    throw std::logic_error("min_blockers: cover search produced a non-blocking set");
  out.cert = std::move(ver.cert);
  return out;
}

enum class Classification {
  CrossConsistent,
  CrossViolated,
  SphereConsistent,
  SphereViolated,
  Indeterminate,
};

inline const char* classification_str(Classification c) {
  switch (c) {
    case Classification::CrossConsistent: return "cross-blocked-consistent";
    case Classification::CrossViolated: return "cross-blocked-violated";
    case Classification::SphereConsistent: return "sphere-blocked-consistent";
    case Classification::SphereViolated: return "sphere-blocked-violated";
    case Classification::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

struct PairSummary {
  std::size_t light_count = 0;
  DisjointFamily family;
  Classification verdict = Classification::Indeterminate;
};

// Verdict from an enumerated ray list. Cross blocking is only meaningful for
// 0 < d(x,y) < diameter, so the caller reports those two exact/numeric
// comparisons; pass nullopt when the diameter is unknown.
template <Space S>
PairSummary classify_rays(const S& space, const std::vector<typename S::Ray>& rays,
                          bool x_equals_y, bool dist_positive,
                          std::optional<bool> dist_below_diam, double tol,
                          std::size_t exact_limit = 24) {
  PairSummary out;
  out.light_count = rays.size();
  if (rays.empty()) {
    out.verdict = Classification::Indeterminate;
    return out;
  }
  out.family = blocking_lower_bound(space, rays, tol, exact_limit);
  std::size_t lower = out.family.rays.size();
  if (x_equals_y) {
    out.verdict = lower >= 2 ? Classification::SphereViolated
                             : Classification::SphereConsistent;
    return out;
  }
  if (!dist_positive || !dist_below_diam.has_value()) {
    out.verdict = Classification::Indeterminate;
    return out;
  }
  if (!*dist_below_diam) {
    out.verdict = Classification::Indeterminate;  // cross blocking is vacuous here
    return out;
  }
  out.verdict =
      lower >= 3 ? Classification::CrossViolated : Classification::CrossConsistent;
  return out;
}

}  // namespace geolab
