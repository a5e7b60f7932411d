#include "geolab/revolution.hpp"

#include "geolab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace geolab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double vdot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 vcross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double vchord2(const Vec3& a, const Vec3& b) {
  double x = a[0] - b[0], y = a[1] - b[1], z = a[2] - b[2];
  return x * x + y * y + z * z;
}

double vchord(const Vec3& a, const Vec3& b) { return std::sqrt(vchord2(a, b)); }

Vec3 vnormalize(const Vec3& a) {
  double n = std::sqrt(vdot(a, a));
  if (!(n > 1e-12))
    throw std::invalid_argument("revolution point must be a nonzero vector");
  return {a[0] / n, a[1] / n, a[2] / n};
}

double poly_eval(const std::vector<double>& coeffs, double z) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
  return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
  std::vector<double> out;
  for (std::size_t i = 1; i < coeffs.size(); ++i)
    out.push_back(static_cast<double>(i) * coeffs[i]);
  return out;
}

struct State {
  Vec3 u{};
  Vec3 v{};
};

// acceleration of the constrained ambient system: u'' = lambda u on the first
// two coordinates, with the polar coordinate corrected by the profile term
struct Accel {
  const RevolutionMetric* m;

  Vec3 operator()(const Vec3& u, const Vec3& v) const {
    double z = u[2];
    double c = m->c(z);
    double cp = m->c_prime(z);
    double v2 = vdot(v, v);
    double vz2 = v[2] * v[2];
    double lam =
        (-v2 * (1.0 + c) + 0.5 * cp * z * vz2) / (1.0 + c * (1.0 - z * z));
    double a3 = (lam * z - 0.5 * cp * vz2) / (1.0 + c);
    return {lam * u[0], lam * u[1], a3};
  }

  State derivative(const State& s) const { return {s.v, (*this)(s.u, s.v)}; }
};

State axpy(const State& s, const State& d, double h) {
  State out;
  for (int i = 0; i < 3; ++i) {
    out.u[i] = s.u[i] + h * d.u[i];
    out.v[i] = s.v[i] + h * d.v[i];
  }
  return out;
}

State rk4_step(const Accel& acc, const State& s, double h) {
  State k1 = acc.derivative(s);
  State k2 = acc.derivative(axpy(s, k1, 0.5 * h));
  State k3 = acc.derivative(axpy(s, k2, 0.5 * h));
  State k4 = acc.derivative(axpy(s, k3, h));
  State out = s;
  for (int i = 0; i < 3; ++i) {
    out.u[i] += h / 6.0 * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
    out.v[i] += h / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
  }
  return out;
}

// tangent-plane projection followed by unit metric speed
Vec3 tangent_unit(const RevolutionMetric& m, const Vec3& u, const Vec3& v_raw) {
  double along = vdot(v_raw, u);
  Vec3 v{v_raw[0] - along * u[0], v_raw[1] - along * u[1],
         v_raw[2] - along * u[2]};
  double sp = m.speed(u, v);
  if (!(sp > 1e-12))
    throw std::invalid_argument("revolution direction must be nonzero");
  return {v[0] / sp, v[1] / sp, v[2] / sp};
}

// orthonormal legs at u: first along increasing phi, second toward the north
// pole; at a pole any pair works and a fixed one keeps scans deterministic
void base_frame(const Vec3& u, Vec3& a, Vec3& b) {
  double s = std::sqrt(u[0] * u[0] + u[1] * u[1]);
  if (s < 1e-12) {
    a = {1.0, 0.0, 0.0};
  } else {
    a = {-u[1] / s, u[0] / s, 0.0};
  }
  b = vcross(u, a);
}

Vec3 frame_direction(const RevolutionMetric& m, const Vec3& u, const Vec3& a,
                     const Vec3& b, double theta) {
  double ct = std::cos(theta), st = std::sin(theta);
  Vec3 w{ct * a[0] + st * b[0], ct * a[1] + st * b[1], ct * a[2] + st * b[2]};
  return tangent_unit(m, u, w);
}

struct Passage {
  double s = 0.0;
  double miss = 0.0;
  double side = 0.0;  // sign of the target against the oriented path
};

// one-step quadratic model around a sampled state, with the exact
// acceleration; Newton on the squared distance to the target
Passage refine_passage(const Accel& acc, const State& st, double s0,
                       const Vec3& y, double lo, double hi) {
  Vec3 a = acc(st.u, st.v);
  double d = 0.0;
  for (int it = 0; it < 8; ++it) {
    Vec3 pos, vel;
    for (int i = 0; i < 3; ++i) {
      pos[i] = st.u[i] + d * st.v[i] + 0.5 * d * d * a[i] - y[i];
      vel[i] = st.v[i] + d * a[i];
    }
    double g1 = 2.0 * vdot(pos, vel);
    double g2 = 2.0 * (vdot(vel, vel) + vdot(pos, a));
    if (!(g2 > 0.0)) break;
    d = std::min(hi, std::max(lo, d - g1 / g2));
  }
  Vec3 pos;
  for (int i = 0; i < 3; ++i) pos[i] = st.u[i] + d * st.v[i] + 0.5 * d * d * a[i];
  Passage p;
  p.s = s0 + d;
  p.miss = vchord(pos, y);
  p.side = vdot(vcross(st.u, st.v), y);
  return p;
}

// integrate from (x, w) to arc T, recording refined near-passes of y
std::vector<Passage> scan_passages(const Accel& acc, const Vec3& x, const Vec3& w,
                                   const Vec3& y, double T, double step,
                                   double threshold, double endpoint_window) {
  std::vector<Passage> out;
  double thr2 = threshold * threshold;
  State cur{x, w};
  double f_prev2 = std::numeric_limits<double>::infinity();
  double f_prev = vchord2(x, y);
  long n_full = static_cast<long>(std::floor(T / step + 1e-12));
  double rem = T - static_cast<double>(n_full) * step;
  long total = n_full + (rem > 1e-12 ? 1 : 0);
  double s = 0.0;
  for (long k = 1; k <= total; ++k) {
    double h = (k <= n_full) ? step : rem;
    State nxt = rk4_step(acc, cur, h);
    double s_next = (k == total) ? T : s + h;
    double f = vchord2(nxt.u, y);
    // cur and s describe sample k-1, the candidate interior local minimum
    if (k >= 2 && f_prev <= f && f_prev < f_prev2 && f_prev < thr2) {
      Passage p = refine_passage(acc, cur, s, y, -step, step);
      p.s = std::min(p.s, T);
      if (p.s >= endpoint_window && p.s <= T) out.push_back(p);
    }
    f_prev2 = f_prev;
    f_prev = f;
    cur = nxt;
    s = s_next;
  }
  if (total >= 1 && f_prev < f_prev2 && f_prev < thr2) {
    Passage p = refine_passage(acc, cur, s, y, -step, 0.0);
    if (p.s >= endpoint_window && p.s <= T) out.push_back(p);
  }
  return out;
}

// first interior approach of a sampled path to p within threshold, refined on
// the local quadratic model; nullopt when the path stays clear
std::optional<std::pair<double, double>> first_approach(
    const Accel& acc, const std::vector<RevSample>& smp, const Vec3& p,
    double s_lo, double s_hi, double threshold) {
  if (s_lo >= s_hi) return std::nullopt;
  auto refined = [&](std::size_t i, double lo, double hi) {
    State st{smp[i].u, smp[i].v};
    return refine_passage(acc, st, smp[i].s, p, lo, hi);
  };
  std::size_t n = smp.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (smp[i].s < s_lo || smp[i].s > s_hi) continue;
    double f = vchord2(smp[i].u, p);
    double f_before = (i > 0) ? vchord2(smp[i - 1].u, p)
                              : std::numeric_limits<double>::infinity();
    double f_after = (i + 1 < n) ? vchord2(smp[i + 1].u, p)
                                 : std::numeric_limits<double>::infinity();
    if (f > f_before || f > f_after) continue;  // not a local minimum
    double gap_lo = (i > 0) ? smp[i].s - smp[i - 1].s : 0.0;
    double gap_hi = (i + 1 < n) ? smp[i + 1].s - smp[i].s : 0.0;
    Passage q = refined(i, std::max(-gap_lo, s_lo - smp[i].s),
                        std::min(gap_hi, s_hi - smp[i].s));
    if (q.miss <= threshold && q.s > s_lo && q.s < s_hi)
      return std::make_pair(q.s, q.miss);
  }
  return std::nullopt;
}

}  // namespace

Vec3 from_polar(double r, double phi) {
  return {std::sin(r) * std::cos(phi), std::sin(r) * std::sin(phi), std::cos(r)};
}

RevolutionMetric RevolutionMetric::round() {
  RevolutionMetric m;
  m.finish_construction();
  return m;
}

RevolutionMetric RevolutionMetric::zoll(double epsilon) {
  RevolutionMetric m;
  if (epsilon != 0.0) m.p_ = {0.0, epsilon};
  m.finish_construction();
  return m;
}

RevolutionMetric::RevolutionMetric(const std::vector<double>& h_coeffs) {
  double scale = 1.0;
  for (double c : h_coeffs) scale = std::max(scale, std::abs(c));
  for (std::size_t i = 0; i < h_coeffs.size(); i += 2)
    if (std::abs(h_coeffs[i]) > 1e-14 * scale)
      throw std::invalid_argument("revolution profile must be an odd polynomial");
  double at_one = 0.0;
  for (double c : h_coeffs) at_one += c;
  if (std::abs(at_one) > 1e-12 * scale)
    throw std::invalid_argument("revolution profile must vanish at the poles");
  // divide h by (1 - z^2): coefficients satisfy p_k = h_k + p_{k-2}
  std::vector<double> p(h_coeffs.size(), 0.0);
  for (std::size_t k = 0; k < h_coeffs.size(); ++k)
    p[k] = h_coeffs[k] + (k >= 2 ? p[k - 2] : 0.0);
  // the top two accumulated values are the division remainder
  for (std::size_t k = h_coeffs.size(); k-- > 0 && k + 2 >= h_coeffs.size();)
    if (std::abs(p[k]) > 1e-12 * scale)
      throw std::invalid_argument("revolution profile must vanish at the poles");
  if (h_coeffs.size() >= 2)
    p_.assign(p.begin(), p.end() - 2);
  while (!p_.empty() && p_.back() == 0.0) p_.pop_back();
  finish_construction();
}

void RevolutionMetric::finish_construction() {
  while (!p_.empty() && p_.back() == 0.0) p_.pop_back();
  sup_h_ = 0.0;
  double min_metric = std::numeric_limits<double>::infinity();
  const int grid = 4096;
  for (int i = 0; i <= grid; ++i) {
    double z = -1.0 + 2.0 * static_cast<double>(i) / grid;
    sup_h_ = std::max(sup_h_, std::abs(h(z)));
    min_metric = std::min(min_metric, 1.0 + c(z));
  }
  if (sup_h_ >= 1.0 - 1e-9)
    throw std::invalid_argument(
        "revolution profile magnitude must stay below one");
  if (min_metric <= 1e-9)
    throw std::invalid_argument("revolution metric must stay positive definite");
}

bool RevolutionMetric::is_round() const { return p_.empty(); }

double RevolutionMetric::h(double z) const {
  return (1.0 - z * z) * poly_eval(p_, z);
}

double RevolutionMetric::c(double z) const {
  double p = poly_eval(p_, z);
  return 2.0 * p + (1.0 - z * z) * p * p;
}

double RevolutionMetric::c_prime(double z) const {
  double p = poly_eval(p_, z);
  double dp = poly_eval(poly_derivative(p_), z);
  return 2.0 * dp + (1.0 - z * z) * 2.0 * p * dp - 2.0 * z * p * p;
}

double RevolutionMetric::metric_dot(const Vec3& u, const Vec3& a,
                                    const Vec3& b) const {
  return vdot(a, b) + c(u[2]) * a[2] * b[2];
}

double RevolutionMetric::speed(const Vec3& u, const Vec3& v) const {
  double q = metric_dot(u, v, v);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

double RevolutionMetric::clairaut(const Vec3& u, const Vec3& v) {
  return u[0] * v[1] - u[1] * v[0];
}

RevPath geodesic_flow(const RevolutionMetric& m, const Vec3& u0, const Vec3& v0,
                      double length, double step, double sample_arc,
                      double unit_tol, double clairaut_tol) {
  if (length < 0.0)
    throw std::invalid_argument("geodesic length must be nonnegative");
  if (!(step > 0.0))
    throw std::invalid_argument("integration step must be positive");
  Vec3 u = vnormalize(u0);
  Vec3 v = tangent_unit(m, u, v0);
  Accel acc{&m};

  RevPath path;
  path.length = length;
  path.step = step;
  path.samples.push_back({0.0, u, v});
  if (length == 0.0) return path;

  long n_full = static_cast<long>(std::floor(length / step + 1e-12));
  double rem = length - static_cast<double>(n_full) * step;
  long total = n_full + (rem > 1e-12 ? 1 : 0);
  long stride = std::max<long>(1, std::lround(sample_arc / step));

  double c0 = RevolutionMetric::clairaut(u, v);
  State cur{u, v};
  double s = 0.0;
  for (long k = 1; k <= total; ++k) {
    double h = (k <= n_full) ? step : rem;
    cur = rk4_step(acc, cur, h);
    s = (k == total) ? length : s + h;
    double sphere = std::abs(std::sqrt(vdot(cur.u, cur.u)) - 1.0);
    double unit = std::abs(m.speed(cur.u, cur.v) - 1.0);
    path.unit_drift = std::max(path.unit_drift, std::max(sphere, unit));
    path.clairaut_drift =
        std::max(path.clairaut_drift,
                 std::abs(RevolutionMetric::clairaut(cur.u, cur.v) - c0));
    if (k == total || k % stride == 0)
      if (s - path.samples.back().s > 1e-12 || k == total)
        path.samples.push_back({s, cur.u, cur.v});
  }
  if (path.samples.back().s != length) path.samples.push_back({length, cur.u, cur.v});

  double budget = std::max(length, 1.0);
  if (path.unit_drift > unit_tol * budget ||
      path.clairaut_drift > clairaut_tol * budget) {
    std::ostringstream os;
    os << "geodesic integration drift exceeded tolerance (unit "
       << path.unit_drift << ", invariant " << path.clairaut_drift
       << " over length " << length << " at step " << step << ")";
    throw std::runtime_error(os.str());
  }
  return path;
}

namespace {

struct Candidate {
  double theta = 0.0;
  double length = 0.0;
  double miss = 0.0;
};

struct Bracket {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double side_lo = 0.0;
  double s_center = 0.0;
};

ShootingResult finish_ray(const RevolutionMetric& m, const Vec3& x, const Vec3& a,
                          const Vec3& b, const Candidate& cand, const Vec3& y,
                          const ShootOptions& opt) {
  double theta = std::fmod(cand.theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  Vec3 w = frame_direction(m, x, a, b, cand.theta);
  RevPath path = geodesic_flow(m, x, w, cand.length, opt.step, opt.sample_arc);
  ShootingResult r;
  r.origin = x;
  r.theta = theta;
  r.length = cand.length;
  r.terminal = path.samples.back().u;
  r.miss = cand.miss;
  r.clairaut_drift = path.clairaut_drift;
  r.samples = std::move(path.samples);
  (void)y;
  return r;
}

}  // namespace

LightScan shoot_light(const RevolutionMetric& m, const Vec3& x, const Vec3& y,
                      double T, double angular_resolution, const ShootOptions& opt) {
  if (!(T > 0.0) || T > kTwoPi + 1e-9)
    throw std::invalid_argument(
        "shooting horizon must lie within one period of the surface");
  if (!(angular_resolution > 0.0))
    throw std::invalid_argument("angular resolution must be positive");
  double ratio = kTwoPi / angular_resolution;
  long n = std::lround(ratio);
  if (n < 32 || std::abs(static_cast<double>(n) * angular_resolution - kTwoPi) > 1e-9)
    throw std::invalid_argument(
        "angular resolution must divide the full circle into at least 32 steps");

  Vec3 xs = vnormalize(x);
  Vec3 ys = vnormalize(y);
  Vec3 a, b;
  base_frame(xs, a, b);
  Accel acc{&m};
  double res = angular_resolution;
  double threshold = std::max(opt.pass_threshold, 2.5 * res);

  auto passages = parallel_map<std::vector<Passage>>(
      static_cast<std::size_t>(n), [&](std::size_t i) {
        Vec3 w = frame_direction(m, xs, a, b, res * static_cast<double>(i));
        return scan_passages(acc, xs, w, ys, T, opt.step, threshold,
                             opt.endpoint_window);
      });

  LightScan out;
  out.angles_scanned = static_cast<std::size_t>(n);

  std::size_t hit_angles = 0;
  for (const auto& ps : passages)
    for (const auto& p : ps)
      if (p.miss < opt.continuum_miss) {
        ++hit_angles;
        break;
      }
  if (static_cast<double>(hit_angles) >=
      opt.continuum_fraction * static_cast<double>(n)) {
    out.continuum = true;
    return out;
  }

  std::vector<Candidate> cands;
  auto is_direct = [&](const Passage& p) { return p.miss < opt.miss_target; };
  for (long i = 0; i < n; ++i)
    for (const auto& p : passages[i])
      if (is_direct(p))
        cands.push_back({res * static_cast<double>(i), p.s, p.miss});

  std::vector<Bracket> brackets;
  std::vector<std::pair<long, double>> bracketed;  // (angle index, arc) members
  for (long i = 0; i < n; ++i) {
    long j = (i + 1) % n;
    for (const auto& pa : passages[i]) {
      if (is_direct(pa)) continue;
      const Passage* best = nullptr;
      double best_ds = opt.match_window;
      for (const auto& pb : passages[j]) {
        if (is_direct(pb)) continue;
        double ds = std::abs(pb.s - pa.s);
        if (ds < best_ds) {
          best_ds = ds;
          best = &pb;
        }
      }
      if (best == nullptr || pa.side * best->side >= 0.0) continue;
      brackets.push_back({res * static_cast<double>(i),
                          res * static_cast<double>(i + 1), pa.side,
                          0.5 * (pa.s + best->s)});
      bracketed.push_back({i, pa.s});
      bracketed.push_back({j, best->s});
    }
  }

  // a near-hit that neither registered as a direct ray nor sits in any
  // bracket hides two candidate rays inside one resolution cell
  for (long i = 0; i < n; ++i)
    for (const auto& pa : passages[i]) {
      if (is_direct(pa) || pa.miss >= 10.0 * opt.miss_target) continue;
      bool covered = false;
      for (const auto& [bi, bs] : bracketed)
        if ((bi == i || (bi + 1) % n == i || (i + 1) % n == bi) &&
            std::abs(bs - pa.s) < opt.match_window) {
          covered = true;
          break;
        }
      for (const auto& c : cands) {
        double dt = std::abs(c.theta - res * static_cast<double>(i));
        dt = std::min(dt, kTwoPi - dt);
        if (dt <= res + 1e-12 && std::abs(c.length - pa.s) < opt.match_window)
          covered = true;
      }
      if (!covered) {
        std::ostringstream os;
        os << "unresolved near-pass at angle " << res * static_cast<double>(i)
           << ": two candidate rays within one resolution cell; rerun at a "
              "finer angular resolution";
        throw std::runtime_error(os.str());
      }
    }

  auto bisected = parallel_map<Candidate>(brackets.size(), [&](std::size_t bi) {
    Bracket br = brackets[bi];
    double t_cap = std::min(T, br.s_center + opt.match_window + 0.7);
    for (int iter = 0; iter < opt.max_bisections; ++iter) {
      double mid = 0.5 * (br.theta_lo + br.theta_hi);
      Vec3 w = frame_direction(m, xs, a, b, mid);
      auto ps = scan_passages(acc, xs, w, ys, t_cap, opt.step, threshold,
                              opt.endpoint_window);
      const Passage* best = nullptr;
      double best_ds = opt.match_window;
      for (const auto& p : ps) {
        double ds = std::abs(p.s - br.s_center);
        if (ds < best_ds) {
          best_ds = ds;
          best = &p;
        }
      }
      if (best == nullptr) break;
      if (best->miss < opt.miss_target) return Candidate{mid, best->s, best->miss};
      if (best->side * br.side_lo > 0.0)
        br.theta_lo = mid;
      else
        br.theta_hi = mid;
      br.s_center = best->s;
    }
    std::ostringstream os;
    os << "unresolved bracket near angle " << 0.5 * (br.theta_lo + br.theta_hi)
       << ": rerun at a finer angular resolution";
    throw std::runtime_error(os.str());
  });
  cands.insert(cands.end(), bisected.begin(), bisected.end());

  // deduplicate by (angle, length) clusters, keeping the smallest miss
  std::sort(cands.begin(), cands.end(), [](const Candidate& p, const Candidate& q) {
    return p.theta < q.theta;
  });
  std::vector<Candidate> unique;
  for (const auto& c : cands) {
    if (!unique.empty() && std::abs(c.theta - unique.back().theta) < opt.dedup_angle &&
        std::abs(c.length - unique.back().length) < opt.dedup_length) {
      if (c.miss < unique.back().miss) unique.back() = c;
      continue;
    }
    unique.push_back(c);
  }
  if (unique.size() >= 2) {
    const Candidate& first = unique.front();
    const Candidate& last = unique.back();
    if (std::abs(first.theta + kTwoPi - last.theta) < opt.dedup_angle &&
        std::abs(first.length - last.length) < opt.dedup_length) {
      if (last.miss < first.miss) unique.front() = last;
      unique.pop_back();
    }
  }

  // integrate the survivors with stored samples, then tube-test interiors
  for (const auto& c : unique) {
    ShootingResult r = finish_ray(m, xs, a, b, c, ys, opt);
    double lo = opt.endpoint_window;
    double hi = r.length - opt.endpoint_window;
    bool through_mark =
        first_approach(acc, r.samples, xs, lo, hi, opt.tube_radius).has_value() ||
        first_approach(acc, r.samples, ys, lo, hi, opt.tube_radius).has_value();
    if (!through_mark) out.rays.push_back(std::move(r));
  }
  std::sort(out.rays.begin(), out.rays.end(),
            [](const ShootingResult& p, const ShootingResult& q) {
              if (p.length != q.length) return p.length < q.length;
              return p.theta < q.theta;
            });
  return out;
}

std::vector<ShootingResult> sample_loops(const RevolutionMetric& m, const Vec3& x,
                                         int n, double length, double step) {
  if (n < 1) throw std::invalid_argument("loop count must be positive");
  if (!(length > 0.0)) throw std::invalid_argument("loop length must be positive");
  Vec3 xs = vnormalize(x);
  Vec3 a, b;
  base_frame(xs, a, b);
  return parallel_map<ShootingResult>(static_cast<std::size_t>(n), [&](std::size_t i) {
    double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    Vec3 w = frame_direction(m, xs, a, b, theta);
    RevPath path = geodesic_flow(m, xs, w, length, step);
    ShootingResult r;
    r.origin = xs;
    r.theta = theta;
    r.length = length;
    r.terminal = path.samples.back().u;
    r.miss = vchord(r.terminal, xs);
    r.clairaut_drift = path.clairaut_drift;
    r.samples = std::move(path.samples);
    return r;
  });
}

namespace {

// distance upper bound from binned fan samples: arc so far plus the
// distortion-scaled residual angle to the probe point
double probe_value(const std::vector<RevSample>& samples, const Vec3& q,
                   double distortion, double cap) {
  double best = cap;
  for (const auto& smp : samples) {
    if (smp.s >= best) continue;
    double d2 = vchord2(smp.u, q);
    if (!(d2 >= 0.0 && d2 <= 4.0 + 1e-9)) continue;  // corrupt sample guard
    // chord is a lower bound for the angle: cheap pruning before acos
    double guess = smp.s + distortion * std::sqrt(d2);
    if (guess >= best) continue;
    double dot = 1.0 - 0.5 * d2;
    double angle = std::acos(std::max(-1.0, std::min(1.0, dot)));
    best = std::min(best, smp.s + distortion * angle);
  }
  return best;
}

std::vector<RevSample> fan_samples(const RevolutionMetric& m, const Vec3& x,
                                   const Vec3& a, const Vec3& b, double theta_lo,
                                   double theta_hi, int count, double length,
                                   double step, double sample_arc,
                                   std::vector<double>* thetas) {
  Accel acc{&m};
  std::vector<RevSample> out;
  long stride = std::max<long>(1, std::lround(sample_arc / step));
  for (int j = 0; j < count; ++j) {
    double theta =
        count == 1 ? 0.5 * (theta_lo + theta_hi)
                   : theta_lo + (theta_hi - theta_lo) * static_cast<double>(j) /
                                    static_cast<double>(count - 1);
    State cur{x, frame_direction(m, x, a, b, theta)};
    long n_full = static_cast<long>(std::floor(length / step + 1e-12));
    double s = 0.0;
    for (long k = 1; k <= n_full; ++k) {
      cur = rk4_step(acc, cur, step);
      s += step;
      if (k % stride == 0) {
        out.push_back({s, cur.u, cur.v});
        if (thetas != nullptr) thetas->push_back(theta);
      }
    }
  }
  return out;
}

}  // namespace

double diameter_estimate(const RevolutionMetric& m, int grid, double step) {
  if (grid < 2) throw std::invalid_argument("diameter grid must be at least 2");
  if (!(step > 0.0) || step > 0.05)
    throw std::invalid_argument("diameter step must lie in (0, 0.05]");
  const double distortion = m.distortion();
  const double reach = kPi * distortion + 0.2;
  const int n_src = grid + 1;
  const int n_r = 2 * grid;
  const int n_phi = 4 * grid;
  const int n_fan = 16 * grid;
  const double cap = std::numeric_limits<double>::infinity();

  auto per_source = parallel_map<double>(
      static_cast<std::size_t>(n_src), [&](std::size_t i) {
        double r0 = kPi * static_cast<double>(i) / grid;
        Vec3 x = from_polar(r0, 0.0);
        Vec3 a, b;
        base_frame(x, a, b);
        std::vector<double> thetas;
        std::vector<RevSample> coarse = fan_samples(
            m, x, a, b, 0.0, kTwoPi * (1.0 - 1.0 / n_fan), n_fan, reach, step,
            0.08, &thetas);

        double best_val = 0.0, best_r = kPi / 2, best_phi = kPi, best_theta = 0.0;
        for (int jr = 0; jr < n_r; ++jr)
          for (int jp = 0; jp < n_phi; ++jp) {
            Vec3 q = from_polar(kPi * (jr + 0.5) / n_r, kTwoPi * (jp + 0.5) / n_phi);
            double val = probe_value(coarse, q, distortion, cap);
            if (val > best_val) {
              best_val = val;
              best_r = kPi * (jr + 0.5) / n_r;
              best_phi = kTwoPi * (jp + 0.5) / n_phi;
              // remember which direction realized the bound
              double pick = cap;
              for (std::size_t t = 0; t < coarse.size(); ++t) {
                double d2 = vchord2(coarse[t].u, q);
                double angle =
                    std::acos(std::max(-1.0, std::min(1.0, 1.0 - 0.5 * d2)));
                double v = coarse[t].s + distortion * angle;
                if (v < pick) {
                  pick = v;
                  best_theta = thetas[t];
                }
              }
            }
          }

        // walk the probe uphill on shrinking local grids, rescanning a
        // narrow sub-fan around the realizing direction each time
        double width = 2.0 * kTwoPi / n_fan;
        double dr = kPi / n_r;
        double dphi = kTwoPi / n_phi;
        for (int level = 0; level < 3; ++level) {
          std::vector<RevSample> micro =
              fan_samples(m, x, a, b, best_theta - width, best_theta + width, 33,
                          reach, step, 0.02, nullptr);
          double local_best = 0.0, local_r = best_r, local_phi = best_phi;
          for (int jr = -2; jr <= 2; ++jr)
            for (int jp = -2; jp <= 2; ++jp) {
              double rr = std::min(kPi, std::max(0.0, best_r + jr * dr * 0.5));
              double pp = best_phi + jp * dphi * 0.5;
              Vec3 q = from_polar(rr, pp);
              double val = std::min(probe_value(micro, q, distortion, cap),
                                    probe_value(coarse, q, distortion, cap));
              if (val > local_best) {
                local_best = val;
                local_r = rr;
                local_phi = pp;
              }
            }
          best_val = local_best;
          best_r = local_r;
          best_phi = local_phi;
          width /= 8.0;
          dr /= 4.0;
          dphi /= 4.0;
        }
        return best_val;
      });
  return *std::max_element(per_source.begin(), per_source.end());
}

std::optional<RevolutionViolation> cross_violation_at(const RevolutionMetric& m,
                                                      const Vec3& x, const Vec3& y,
                                                      double T, double diameter,
                                                      const ShootOptions& opt) {
  if (vchord(x, y) < 1e-9) return std::nullopt;
  LightScan scan = shoot_light(m, x, y, T, kTwoPi / 128, opt);
  if (scan.continuum || scan.rays.empty()) return std::nullopt;
  double d = scan.rays.front().length;
  if (d <= 0.05 || d >= diameter - 0.05) return std::nullopt;
  RevolutionSpace space(m);
  DisjointFamily family = blocking_lower_bound(space, scan.rays, 1e-6);
  if (family.rays.size() < 3) return std::nullopt;
  RevolutionViolation out;
  out.x = x;
  out.y = y;
  out.distance = d;
  out.diameter = diameter;
  out.scan = std::move(scan);
  out.family = family.rays;
  return out;
}

std::optional<RevolutionViolation> find_cross_violation(const RevolutionMetric& m,
                                                        double T, int grid,
                                                        const ShootOptions& opt) {
  if (grid < 1) throw std::invalid_argument("scan grid must be at least 1");
  double diam = diameter_estimate(m, 8);
  const int n_phi = 2 * (grid + 1);
  for (int i = 1; i <= grid; ++i) {
    Vec3 x = from_polar(kPi * i / (grid + 1), 0.0);
    for (int j = 1; j <= grid; ++j)
      for (int k = 0; k < n_phi; ++k) {
        Vec3 y = from_polar(kPi * j / (grid + 1), kTwoPi * k / n_phi);
        auto hit = cross_violation_at(m, x, y, T, diam, opt);
        if (hit) return hit;
      }
  }
  return std::nullopt;
}

std::optional<HitParam> RevolutionSpace::hit_param(const Ray& r, const Point& p,
                                                   double tol) const {
  if (r.samples.size() < 2 || !(r.length > 0.0)) return std::nullopt;
  double window = 0.02 * r.length;
  Accel acc{metric_};
  auto hit = first_approach(acc, r.samples, p, window, r.length - window,
                            std::max(tol, 1e-3));
  if (!hit.has_value()) return std::nullopt;
  double frac = hit->first / r.length;
  if (frac <= 0.0 || frac >= 1.0) return std::nullopt;
  return HitParam::from_approx(frac);
}

double RevolutionSpace::interior_gap(const Ray& a, const Ray& b, double) const {
  auto window = [](const Ray& r) {
    double w = std::min(0.05, 0.1 * r.length);
    return std::make_pair(w, r.length - w);
  };
  auto [alo, ahi] = window(a);
  auto [blo, bhi] = window(b);
  double best2 = std::numeric_limits<double>::infinity();
  double gap_a = 0.0, gap_b = 0.0;
  for (std::size_t i = 1; i < a.samples.size(); ++i)
    gap_a = std::max(gap_a, a.samples[i].s - a.samples[i - 1].s);
  for (std::size_t i = 1; i < b.samples.size(); ++i)
    gap_b = std::max(gap_b, b.samples[i].s - b.samples[i - 1].s);
  for (const auto& sa : a.samples) {
    if (sa.s < alo || sa.s > ahi) continue;
    for (const auto& sb : b.samples) {
      if (sb.s < blo || sb.s > bhi) continue;
      best2 = std::min(best2, vchord2(sa.u, sb.u));
    }
  }
  if (best2 == std::numeric_limits<double>::infinity()) return 0.0;
  // curve can dip below the sampled minimum by half a gap on each side
  return std::max(0.0, std::sqrt(best2) - 0.5 * (gap_a + gap_b));
}

bool RevolutionSpace::interiors_disjoint(const Ray& a, const Ray& b,
                                         double tol) const {
  return interior_gap(a, b, tol) > std::max(tol, 1e-3);
}

bool RevolutionSpace::ray_before(const Ray& a, const Ray& b) const {
  if (a.length != b.length) return a.length < b.length;
  return a.theta < b.theta;
}

}  // namespace geolab
