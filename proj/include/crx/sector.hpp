// Sign analysis of weighted-homogeneous polynomials on the unit circle of a
// w-direction: trig-polynomial restrictions, maximal positivity arcs, the
// sector-width condition of Theorems 1.1/1.2, and the threshold/barrier
// formulas of the Boggess-Pitts comparison.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "crx/manifold.hpp"

namespace crx {

class SectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrigPoly {
  std::vector<double> a;  // cosine coefficients, a[0..D]
  std::vector<double> b;  // sine coefficients, b[0] unused

  int degree() const { return int(a.size()) - 1; }

  double eval(double theta) const {
    double s = a.empty() ? 0.0 : a[0];
    for (size_t d = 1; d < a.size(); ++d)
      s += a[d] * std::cos(d * theta) + b[d] * std::sin(d * theta);
    return s;
  }

  bool is_zero(double eps = 1e-14) const {
    for (double c : a)
      if (std::abs(c) > eps) return false;
    for (double c : b)
      if (std::abs(c) > eps) return false;
    return true;
  }
};

struct Sector {
  double center = 0.0;  // radians, in [0, 2pi)
  double width = 0.0;   // radians, (0, 2pi]
};

// g(theta) = <xi, P(e^{i theta})> for graph-layout polynomials depending only
// on one w-direction.
inline TrigPoly circle_restriction(const std::vector<Poly>& P, const GraphLayout& lay,
                                   int wdir, const Eigen::VectorXd& xi) {
  if (int(xi.size()) != int(P.size()))
    throw SectorError("circle_restriction: xi/P size mismatch");
  if (wdir < 0 || wdir >= lay.n) throw SectorError("circle_restriction: bad w direction");

  int D = 0;
  for (const auto& p : P)
    for (const auto& [mon, c] : p.terms()) D = std::max(D, int(mon.degree()));
  std::vector<Complex> amp(2 * D + 1, Complex(0));  // amp[d + D], d = m - n

  for (size_t j = 0; j < P.size(); ++j)
    for (const auto& [mon, c] : P[j].terms()) {
      int mm = 0, nn = 0;
      for (int v = 0; v < lay.nvars(); ++v) {
        if (mon.e[v] == 0) continue;
        if (v == lay.w(wdir))
          mm = mon.e[v];
        else if (v == lay.cw(wdir))
          nn = mon.e[v];
        else
          throw SectorError("circle_restriction: P involves other variables");
      }
      amp[mm - nn + D] += xi(int(j)) * c;
    }

  TrigPoly g;
  g.a.assign(D + 1, 0.0);
  g.b.assign(D + 1, 0.0);
  if (std::abs(amp[D].imag()) > 1e-12)
    throw SectorError("circle_restriction: restriction not real");
  g.a[0] = amp[D].real();
  for (int d = 1; d <= D; ++d) {
    Complex sym = amp[D + d] - std::conj(amp[D - d]);
    if (std::abs(sym) > 1e-12 * (1.0 + std::abs(amp[D + d])))
      throw SectorError("circle_restriction: restriction not real");
    g.a[d] = 2.0 * amp[D + d].real();
    g.b[d] = -2.0 * amp[D + d].imag();
  }
  return g;
}

namespace detail {

inline double bisect_root(const TrigPoly& g, double lo, double hi) {
  double flo = g.eval(lo);
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    double fm = g.eval(mid);
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Maximal arcs where g > 0 (strict) or g >= 0; roots located by dense
// sampling (8192 points) plus bisection to 1e-12.
inline std::vector<Sector> positive_sectors(const TrigPoly& g, bool strict = true,
                                            int samples = 8192) {
  if (g.is_zero()) throw SectorError("positive_sectors: g is identically zero");
  const double two_pi = 2.0 * M_PI;
  std::vector<double> roots;
  double prev = g.eval(0.0);
  for (int i = 1; i <= samples; ++i) {
    double t = two_pi * i / samples;
    double cur = g.eval(t);
    if ((prev < 0) != (cur < 0))
      roots.push_back(detail::bisect_root(g, two_pi * (i - 1) / samples, t));
    prev = cur;
  }
  if (roots.empty()) {
    if (g.eval(0.0) > 0 || (!strict && g.eval(0.0) >= 0))
      return {Sector{0.0, two_pi}};
    return {};
  }
  std::sort(roots.begin(), roots.end());

  // intervals between consecutive sign-change roots (cyclic)
  std::vector<Sector> out;
  int R = int(roots.size());
  for (int i = 0; i < R; ++i) {
    double lo = roots[i];
    double hi = (i + 1 < R) ? roots[i + 1] : roots[0] + two_pi;
    double mid = 0.5 * (lo + hi);
    if (g.eval(mid) > 0) {
      double c = std::fmod(mid, two_pi);
      out.push_back(Sector{c < 0 ? c + two_pi : c, hi - lo});
    }
  }
  return out;
}

inline double widest_positive_width(const TrigPoly& g, bool strict = true) {
  double w = 0.0;
  for (const auto& s : positive_sectors(g, strict)) w = std::max(w, s.width);
  return w;
}

// Global minimum of g over the circle: dense sampling plus local ternary
// refinement.
inline double trig_min(const TrigPoly& g, int samples = 8192) {
  const double two_pi = 2.0 * M_PI;
  double best = g.eval(0.0);
  int bi = 0;
  for (int i = 1; i < samples; ++i) {
    double v = g.eval(two_pi * i / samples);
    if (v < best) {
      best = v;
      bi = i;
    }
  }
  double lo = two_pi * (bi - 1) / samples, hi = two_pi * (bi + 1) / samples;
  while (hi - lo > 1e-14) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (g.eval(m1) < g.eval(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min(best, g.eval(0.5 * (lo + hi)));
}

struct SectorConditionResult {
  bool holds = false;
  Sector best_sector;
  double required_width = 0.0;          // pi / m_j, the Theorem 1.1/1.2 width
  std::vector<double> candidate_widths;  // pi/m_j, pi/(m_j-1), pi/(m_j-2):
                                         // the paper uses all three in
                                         // different passages; reported so
                                         // callers can see which ones hold
};

// Theorem 1.1 check: <xi, P_{I_j}> >= 0 on a sector of width > pi/m_j, with
// P the leading weighted-homogeneous part of block j (w-dependent only).
inline SectorConditionResult sector_condition_leading(const ManifoldModel& m, int block,
                                                      const Eigen::VectorXd& xi,
                                                      int wdir = 0) {
  int mj = m.weights.weights.at(block);
  if (is_infinite(mj)) throw SectorError("sector_condition: infinite weight");
  std::vector<Poly> P = lowest_weight_part(m, block);
  TrigPoly g = circle_restriction(P, m.layout(), wdir, xi);

  SectorConditionResult res;
  res.required_width = M_PI / mj;
  for (int d = 0; d <= 2 && mj - d >= 1; ++d)
    res.candidate_widths.push_back(M_PI / (mj - d));
  for (const auto& s : positive_sectors(g, /*strict=*/false))
    if (s.width > res.best_sector.width) res.best_sector = s;
  res.holds = res.best_sector.width > res.required_width;
  return res;
}

// Theorem 1.2 check: <xi, h_{I_j}> > 0 on {theta in S, |x_{I_i}| < c
// |w_1|^{m_i}}, minimized over the constrained x-box by interval bounds at a
// geometric radius ladder |w_1| = 2^{-s}.
inline SectorConditionResult sector_condition_constrained(const ManifoldModel& m,
                                                          int block,
                                                          const Eigen::VectorXd& xi,
                                                          double c = 0.5, int wdir = 0,
                                                          int ladder = 20) {
  int mj = m.weights.weights.at(block);
  if (is_infinite(mj)) throw SectorError("sector_condition: infinite weight");
  if (!(c > 0)) throw SectorError("sector_condition: empty constraint box");
  GraphLayout lay = m.layout();
  int start = m.weights.block_start(block);
  int bsz = m.weights.block_sizes.at(block);
  if (int(xi.size()) != bsz) throw SectorError("sector_condition: xi size mismatch");

  // Per radius r: exact x-free trig part (normalized by r^{m_j}) minus an
  // interval bound on the x-dependent terms over the box.
  const int samples = 8192;
  std::vector<double> lower(samples, std::numeric_limits<double>::infinity());
  for (int s = 0; s <= ladder; ++s) {
    double r = std::pow(2.0, -s);
    double rnorm = std::pow(r, mj);
    double box_bound = 0.0;
    std::vector<Complex> amp(2 * 64 + 1, Complex(0));  // e^{i d theta}, x-free terms
    for (int j = 0; j < bsz; ++j)
      for (const auto& [mon, co] : m.h[start + j].terms()) {
        int mm = 0, nn = 0;
        double xfac = 1.0;
        bool has_x = false, other_w = false;
        for (int v = 0; v < lay.nvars(); ++v) {
          if (mon.e[v] == 0) continue;
          if (v < m.l) {
            has_x = true;
            int mi = m.weights.weight_of_var(v);
            if (is_infinite(mi)) { xfac = 0.0; continue; }
            xfac *= std::pow(c * std::pow(r, mi), int(mon.e[v]));
          } else if (v == lay.w(wdir))
            mm = mon.e[v];
          else if (v == lay.cw(wdir))
            nn = mon.e[v];
          else
            other_w = true;
        }
        if (other_w) continue;  // other w-directions are set to zero
        double rad = std::pow(r, mm + nn);
        if (has_x) {
          box_bound += std::abs(xi(j)) * std::abs(co) * xfac * rad;
        } else {
          if (std::abs(mm - nn) > 64)
            throw SectorError("sector_condition: degree too high");
          amp[mm - nn + 64] += xi(j) * co * rad;
        }
      }
    for (int k = 0; k < samples; ++k) {
      double t = 2.0 * M_PI * k / samples;
      Complex val(0);
      for (int d = -64; d <= 64; ++d)
        if (amp[d + 64] != Complex(0)) val += amp[d + 64] * std::polar(1.0, d * t);
      lower[k] = std::min(lower[k], (val.real() - box_bound) / rnorm);
    }
  }

  SectorConditionResult res;
  res.required_width = M_PI / mj;
  for (int d = 0; d <= 2 && mj - d >= 1; ++d)
    res.candidate_widths.push_back(M_PI / (mj - d));
  // widest arc of strictly positive lower bound (sampled resolution)
  std::vector<char> pos(samples);
  for (int k = 0; k < samples; ++k) pos[k] = lower[k] > 0;
  int bestlen = 0, bestend = 0, run = 0;
  for (int k = 0; k < 2 * samples; ++k) {
    if (pos[k % samples]) {
      ++run;
      if (run > bestlen) {
        bestlen = run;
        bestend = k;
      }
    } else
      run = 0;
    if (run >= 2 * samples) break;
  }
  double dt = 2.0 * M_PI / samples;
  if (bestlen >= 2 * samples)
    res.best_sector = Sector{0.0, 2.0 * M_PI};
  else if (bestlen > 0) {
    double width = bestlen * dt;
    double center = (bestend - 0.5 * (bestlen - 1)) * dt;
    center = std::fmod(center, 2.0 * M_PI);
    res.best_sector = Sector{center < 0 ? center + 2.0 * M_PI : center, width};
  }
  res.holds = res.best_sector.width > res.required_width;
  return res;
}

struct Thresholds {
  double bp_coef = 0.0;      // Boggess-Pitts: extension down for a > bp_coef
  double sector_coef = 0.0;  // sector property: extension down for a > sector_coef
  int q = 0;                 // (k - 2 - p) / 2
};

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline Thresholds thresholds(int k, int p) {
  if (k < 4 || k % 2 != 0 || p < 2 || p % 2 != 0 || p > k - 2)
    throw SectorError("thresholds: need even k >= 4, even p with 2 <= p <= k-2");
  Thresholds t;
  t.q = (k - 2 - p) / 2;
  t.bp_coef = factorial(p + t.q) * factorial(t.q) /
              (factorial(k / 2 - 1) * factorial(k - 1 - k / 2));
  t.sector_coef = 1.0 / std::cos(p * M_PI / (2.0 * k));
  if (!(t.bp_coef > t.sector_coef))
    throw SectorError("thresholds: bp <= sector, contradicts Lemma 4.10");
  return t;
}

struct Barrier {
  double b = 0.0;
  TrigPoly g1;
  double min_value = 0.0;
};

// Prop 4.8 barrier g1 = 1 - a cos(p theta) + b cos(k theta) >= 0 with
// b = (p/k) tan(p pi / 2k), valid for p | k and a up to the sector threshold.
inline Barrier barrier_construct(int k, int p, double a) {
  Thresholds t = thresholds(k, p);  // validates (k, p)
  if (k % p != 0) throw SectorError("barrier_construct: p does not divide k");
  if (a > t.sector_coef + 1e-12)
    throw SectorError("barrier_construct: a above the sector threshold");
  Barrier bar;
  bar.b = (double(p) / k) * std::tan(p * M_PI / (2.0 * k));
  bar.g1.a.assign(k + 1, 0.0);
  bar.g1.b.assign(k + 1, 0.0);
  bar.g1.a[0] = 1.0;
  bar.g1.a[p] = -a;
  bar.g1.a[k] += bar.b;
  bar.min_value = trig_min(bar.g1);
  if (bar.min_value < -1e-10)
    throw SectorError("barrier_construct: barrier minimum below tolerance");
  return bar;
}

}  // namespace crx
