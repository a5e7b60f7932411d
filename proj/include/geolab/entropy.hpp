#pragma once

// Growth-rate estimation and counting inequalities over exact geodesic
// census data. A growth series records, per horizon T, how many geodesic
// segments and how many light rays connect a fixed pair of points; the
// exponential growth rate of the segment counts estimates topological
// entropy (reported as an estimate with a convergence diagnostic, never as
// a computed invariant). The light projection folds each segment onto the
// light ray it contains, and two exact inequalities relate segment counts,
// light counts, and blocker sub-segment counts through the squared
// injectivity radius. All checks run in rational arithmetic; doubles appear
// only in reported ratios and logarithms.

#include "geolab/graph.hpp"
#include "geolab/rational.hpp"
#include "geolab/torus.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace geolab {

struct GrowthSeries {
  std::string source;         // free-form label of the space and pair
  std::vector<Rat> horizons;  // strictly increasing, positive
  std::vector<Int> n;         // geodesic segment counts per horizon
  std::vector<Int> m;         // light ray counts per horizon
  Rat inj2{0};                // exact squared injectivity radius; 0 = unset
};

// Throws invalid_argument unless sizes align, horizons are positive and
// strictly increasing, counts are nonnegative and nondecreasing, and
// m[i] <= n[i] throughout.
void validate_series(const GrowthSeries& s);

struct EntropyEstimate {
  double at_horizon = 0.0;  // log(n)/T at the largest positive-count horizon
  double slope = 0.0;       // least-squares slope of log n against T, top half
  double residual = 0.0;    // rms residual of that fit; the convergence gauge
};

// Requires at least four horizons with positive segment counts. The slope
// is the primary estimate; at_horizon is the raw quotient at the frontier.
EntropyEstimate entropy_estimate(const GrowthSeries& s);

struct LightProjection {
  std::vector<TorusRay> rays;    // distinct image rays in canonical order
  std::vector<Int> fiber_sizes;  // aligned with rays; sums to the input size
};

// Folds each segment onto its light core (last interior departure from the
// source to the first following arrival at the target). Light rays are
// fixed points, so the image equals the light census at the same horizon.
// All segments must share both endpoints in the quotient.
LightProjection light_projection(const TorusSpace& t,
                                 const std::vector<TorusRay>& segments);

struct CountingRow {
  Rat T;
  Int n{0};
  Int m{0};
  bool holds = false;  // 4 * inj2 * n <= T^2 * m, exactly
  double ratio = 0.0;  // lhs/rhs as a double; +inf when m = 0 < n
};

struct CountingReport {
  bool holds = true;
  std::vector<CountingRow> rows;
  // Index of the largest finite ratio (the nearest miss, or the worst
  // violation); npos when no row has m > 0.
  std::size_t tightest = static_cast<std::size_t>(-1);
};

// Checks n_T <= (T / 2I)^2 * m_T at every horizon in exact arithmetic.
// Valid for spaces where every segment contains a light core (manifolds);
// on branching graphs the inequality is expected to fail and the report
// simply records where. Requires inj2 > 0.
CountingReport counting_inequality_check(const GrowthSeries& s);

struct SplitMatch {
  std::size_t ray = 0;      // index into the enumerated light rays
  std::size_t blocker = 0;  // index into the blocker list
  bool source_half = true;  // true: the x->blocker half is the witness
  Rat frac{0};              // hit parameter along the ray
  Rat half_len2{0};         // exact squared length of the witness half
};

struct SplitReport {
  Int light_count{0};  // light rays x -> y of length <= T
  Int split_sum{0};    // sum over blockers of both half-horizon segment counts
  bool holds = false;  // light_count <= split_sum
  std::vector<SplitMatch> matches;  // one witness per light ray
};

// Certifies m_T(x, y) <= sum_j [ n_{T/2}(x, b_j) + n_{T/2}(b_j, y) ]: every
// light ray is first verified blocked, then matched to the sub-segment on
// the nearer side of its hit, which has length at most T/2. Throws if the
// blockers fail to block the enumerated rays.
SplitReport blocker_split_check(const TorusSpace& t, const VecQ& x,
                                const VecQ& y, const std::vector<VecQ>& blockers,
                                const Rat& T);

// Series builders. The torus one wraps the exact growth rows and the exact
// squared injectivity radius (shortest lattice vector over two). The graph
// one records, per integer horizon k, the count of geodesic loops of length
// exactly k (the transfer-operator census) and the cumulative light count;
// its inj2 comes from the girth.
GrowthSeries torus_series(const TorusSpace& t, const VecQ& x, const VecQ& y,
                          const Rat& T_max, const Rat& step);
GrowthSeries graph_series(const QuotientGraph& g, std::size_t u, std::size_t v,
                          int T_max);

}  // namespace geolab
