// Spectral solver for Bishop's equation u = -T1 h(u + x, w) on the circle,
// the (1-tau)^alpha partial-sum machinery, Hopf-lemma radial derivatives,
// and the attached-family sweep.
#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>

#include "crx/circle.hpp"
#include "crx/manifold.hpp"

namespace crx {

class BishopError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Taylor coefficients b_n >= 0 with (1-tau)^alpha = 1 - sum_{n>=1} b_n tau^n:
// b_1 = alpha, b_{n+1} = b_n (n - alpha)/(n + 1).
inline std::vector<double> binomial_tail_coeffs(double alpha, int N) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw BishopError("binomial_tail_coeffs: alpha out of (0,1)");
  std::vector<double> b(N + 1, 0.0);
  if (N >= 1) b[1] = alpha;
  for (int n = 1; n < N; ++n) b[n + 1] = b[n] * (n - alpha) / (n + 1);
  return b;
}

inline Complex partial_sum_eval(const std::vector<double>& b, Complex tau) {
  Complex s(1.0);
  Complex p(1.0);
  for (size_t n = 1; n < b.size(); ++n) {
    p *= tau;
    s -= b[n] * p;
  }
  return s;
}

inline Complex partial_sum_derivative(const std::vector<double>& b, Complex tau) {
  Complex s(0.0);
  Complex p(1.0);
  for (size_t n = 1; n < b.size(); ++n) {
    s -= double(n) * b[n] * p;
    p *= tau;
  }
  return s;
}

// Prescribed CR component w1(tau) = eta (1-tau)^alpha i (principal branch).
inline BoundaryFn cr_component_singular(double alpha, double eta, CircleGrid grid) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw BishopError("cr_component_singular: alpha out of (0,1)");
  return BoundaryFn::from_sampler(grid, [alpha, eta](double t) {
    Complex one = 1.0 - std::polar(1.0, t);
    Complex pw = (std::abs(one) == 0.0) ? Complex(0) : std::pow(one, alpha);
    return Complex(0, eta) * pw;
  });
}

// Prescribed CR component w1(tau) = eta i (S_N(tau) - S_N(1)), S_N the
// degree-N partial sum of (1-tau)^alpha.
inline BoundaryFn cr_component_partial_sum(double alpha, double eta, int N_terms,
                                           CircleGrid grid) {
  auto b = binomial_tail_coeffs(alpha, N_terms);
  Complex at_one = partial_sum_eval(b, Complex(1.0));
  return BoundaryFn::from_sampler(grid, [b, eta, at_one](double t) {
    return Complex(0, eta) * (partial_sum_eval(b, std::polar(1.0, t)) - at_one);
  });
}

struct BishopOptions {
  double tol = 1e-11;       // Picard sup-change
  int max_iter = 400;
  double tol_M = 1e-8;      // boundary-on-manifold residual
  double tol_H = 1e-8;      // negative-frequency residual of u + iv
  double damping = 1.0;     // auto-halved on divergence
  int max_N = 1 << 16;      // aliasing-driven refinement cap
  double alias_tol = 1e-8;  // top-quarter energy fraction of v
};

struct DiscSolution {
  Eigen::VectorXd x;
  std::vector<BoundaryFn> u, v;  // real, size l
  std::vector<BoundaryFn> w;     // size n
  int iterations = 0;
  double residual = 0.0;

  const CircleGrid& grid() const { return w.at(0).grid(); }
};

namespace detail {

// Evaluate h_j(u + x, w, cw) samplewise; h real-valued on real arguments of M.
inline Eigen::MatrixXd eval_h(const ManifoldModel& m, const Eigen::MatrixXd& u,
                              const Eigen::VectorXd& x,
                              const std::vector<BoundaryFn>& w) {
  const CircleGrid& g = w[0].grid();
  Eigen::MatrixXd hv(m.l, g.N);
  std::vector<Complex> pt(m.l + 2 * m.n);
  for (int k = 0; k < g.N; ++k) {
    for (int j = 0; j < m.l; ++j) pt[j] = Complex(u(j, k) + x(j), 0.0);
    for (int j = 0; j < m.n; ++j) {
      pt[m.l + j] = w[j].value(k);
      pt[m.l + m.n + j] = std::conj(w[j].value(k));
    }
    for (int j = 0; j < m.l; ++j) {
      Complex val = m.h[j].eval(pt);
      if (std::abs(val.imag()) > 1e-9 * std::max(1.0, std::abs(val)))
        throw BishopError("solve_bishop: h not real-valued on the disc boundary");
      hv(j, k) = val.real();
    }
  }
  return hv;
}

}  // namespace detail

// Picard iteration u <- -T1 h(u + x, w), with damping auto-halved on
// divergence and spectral refinement when the nonlinearity aliases.
inline DiscSolution solve_bishop(const ManifoldModel& m, std::vector<BoundaryFn> w,
                                 const Eigen::VectorXd& x,
                                 const BishopOptions& opts = {},
                                 const DiscSolution* warm_start = nullptr) {
  if (int(w.size()) != m.n) throw BishopError("solve_bishop: wrong number of w components");
  if (int(x.size()) != m.l) throw BishopError("solve_bishop: wrong base-point size");
  for (const auto& wc : w)
    if (!(wc.grid() == w[0].grid())) throw BishopError("solve_bishop: w grid mismatch");

  CircleGrid g = w[0].grid();
  while (true) {
    int N = g.N;
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(m.l, N);
    if (warm_start && int(warm_start->u.size()) == m.l) {
      for (int j = 0; j < m.l; ++j) {
        BoundaryFn uw = warm_start->u[j];
        if (!(uw.grid() == g)) uw = uw.resample(g);
        for (int k = 0; k < N; ++k) u(j, k) = uw.value(k).real();
      }
    }

    double damping = opts.damping;
    double change = 0.0;
    double prev_change = std::numeric_limits<double>::infinity();
    int grow_streak = 0;
    bool converged = false;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
      Eigen::MatrixXd hv = detail::eval_h(m, u, x, w);
      Eigen::MatrixXd nu(m.l, N);
      for (int j = 0; j < m.l; ++j) {
        Eigen::VectorXcd row = hv.row(j).transpose().cast<Complex>();
        BoundaryFn t1 = hilbert_transform(BoundaryFn(g, row));
        for (int k = 0; k < N; ++k) nu(j, k) = -t1.value(k).real();
      }
      change = (nu - u).cwiseAbs().maxCoeff();
      if (change <= opts.tol) {
        u = nu;
        converged = true;
        ++iter;
        break;
      }
      grow_streak = change > prev_change ? grow_streak + 1 : 0;
      if (grow_streak >= 3 || change > 1e6) {
        damping *= 0.5;
        grow_streak = 0;
        if (damping < 1.0 / 64.0)
          throw BishopError(
              "solve_bishop: no convergence (diverging); last residual " +
              std::to_string(change) + ", contraction estimate " +
              std::to_string(change / std::max(prev_change, 1e-300)));
      }
      prev_change = change;
      u = u + damping * (nu - u);
    }
    if (!converged)
      throw BishopError("solve_bishop: no convergence in " +
                        std::to_string(opts.max_iter) + " iterations; last residual " +
                        std::to_string(change) + ", contraction estimate " +
                        std::to_string(change / std::max(prev_change, 1e-300)));

    DiscSolution d;
    d.x = x;
    d.w = w;
    d.iterations = iter;
    d.residual = change;
    Eigen::MatrixXd hv = detail::eval_h(m, u, x, w);
    for (int j = 0; j < m.l; ++j) {
      d.u.emplace_back(g, Eigen::VectorXcd(u.row(j).transpose().cast<Complex>()));
      d.v.emplace_back(g, Eigen::VectorXcd(hv.row(j).transpose().cast<Complex>()));
    }

    // aliasing health check on v; refine the grid and re-solve if it fails
    double alias = 0.0;
    for (int j = 0; j < m.l; ++j)
      alias = std::max(alias, d.v[j].top_quarter_energy_fraction());
    if (alias > opts.alias_tol && 2 * N <= opts.max_N) {
      CircleGrid fine(2 * N);
      std::vector<BoundaryFn> wf;
      for (const auto& wc : w) wf.push_back(wc.resample(fine));
      w = std::move(wf);
      g = fine;
      continue;
    }

    // DiscSolution invariants
    for (int j = 0; j < m.l; ++j) {
      if (std::abs(d.u[j].value_at_zero()) > opts.tol_M)
        throw BishopError("solve_bishop: anchoring invariant violated");
      double scale = std::max(1.0, d.u[j].sup_norm() + d.v[j].sup_norm());
      // the unpaired Nyquist bin n = -N/2 cannot cancel against a +N/2
      // partner and is excluded; the aliasing check controls its size
      for (int n = -N / 2 + 1; n < 0; ++n) {
        Complex f = d.u[j].coeff(n) + Complex(0, 1) * d.v[j].coeff(n);
        if (std::abs(f) > opts.tol_H * scale)
          throw BishopError("solve_bishop: holomorphy invariant violated");
      }
    }
    double res_m = 0.0;
    for (int j = 0; j < m.l; ++j)
      for (int k = 0; k < N; ++k)
        res_m = std::max(res_m, std::abs(d.v[j].value(k).real() - hv(j, k)));
    if (res_m > opts.tol_M)
      throw BishopError("solve_bishop: boundary-on-manifold invariant violated");
    return d;
  }
}

// Radial derivative of the harmonic extension of v at tau = 1.
inline Eigen::VectorXd radial_derivative_at_one(const DiscSolution& d) {
  Eigen::VectorXd out(int(d.v.size()));
  for (size_t j = 0; j < d.v.size(); ++j)
    out(int(j)) = d.v[j].harmonic_radial_derivative_at_one().real();
  return out;
}

struct HopfScanResult {
  double eta_coefficient = 0.0;     // fitted c in <xi, d_r v(1)> ~ c eta^m
  Eigen::VectorXd direction;        // v'_o = d_r v(1) at the largest eta
  bool sign_ok = false;             // c < 0
  double fit_residual = 0.0;        // relative l2 residual of the fit
  double feedback_c = 0.0;          // max |u_i| / |w|^{m_i} over the grid
  std::vector<double> etas;
  std::vector<double> pairings;     // <xi, d_r v(1)> per eta
};

// Default CR profile theta -> i (1 - e^{i theta})^alpha; a custom profile
// (e.g. 1 - tau for closed-form checks) may be supplied.
inline HopfScanResult hopf_scan(const ManifoldModel& m, const Eigen::VectorXd& xi,
                                double alpha, const std::vector<double>& eta_grid,
                                int order, const BishopOptions& opts = {},
                                std::function<Complex(double)> profile = nullptr,
                                int wdir = 0, int grid_N = 2048) {
  if (int(xi.size()) != m.l) throw BishopError("hopf_scan: xi size mismatch");
  if (eta_grid.empty()) throw BishopError("hopf_scan: empty eta grid");
  if (order < 1 || is_infinite(order)) throw BishopError("hopf_scan: bad order");
  if (wdir < 0 || wdir >= m.n) throw BishopError("hopf_scan: bad w direction");
  if (!profile) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw BishopError("hopf_scan: alpha out of (0,1)");
    profile = [alpha](double t) {
      Complex one = 1.0 - std::polar(1.0, t);
      return std::abs(one) == 0.0 ? Complex(0) : Complex(0, 1) * std::pow(one, alpha);
    };
  }

  CircleGrid g(grid_N);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m.l);
  HopfScanResult res;
  std::optional<DiscSolution> warm;
  DiscSolution last;
  for (double eta : eta_grid) {
    std::vector<BoundaryFn> w;
    for (int j = 0; j < m.n; ++j) {
      if (j == wdir)
        w.push_back(BoundaryFn::from_sampler(
            g, [profile, eta](double t) { return eta * profile(t); }));
      else
        w.push_back(BoundaryFn::constant(g, Complex(0)));
    }
    DiscSolution d = solve_bishop(m, std::move(w), x, opts, warm ? &*warm : nullptr);
    Eigen::VectorXd dr = radial_derivative_at_one(d);
    res.etas.push_back(eta);
    res.pairings.push_back(xi.dot(dr));
    warm = d;
    last = std::move(d);
  }

  // least-squares fit of the pairing to c eta^order
  double num = 0, den = 0, ss = 0;
  for (size_t i = 0; i < res.etas.size(); ++i) {
    double p = std::pow(res.etas[i], order);
    num += res.pairings[i] * p;
    den += p * p;
    ss += res.pairings[i] * res.pairings[i];
  }
  res.eta_coefficient = den > 0 ? num / den : 0.0;
  double rr = 0;
  for (size_t i = 0; i < res.etas.size(); ++i) {
    double e = res.pairings[i] - res.eta_coefficient * std::pow(res.etas[i], order);
    rr += e * e;
  }
  res.fit_residual = ss > 0 ? std::sqrt(rr / ss) : 0.0;
  if (res.fit_residual > 0.2)
    throw BishopError("hopf_scan: fit residual above tolerance (leading power mismatch?)");
  res.sign_ok = res.eta_coefficient < 0.0;
  res.direction = radial_derivative_at_one(last);

  // Feedback bound |u_{I_i}| <= c |w|^{m_i}: fit c at the largest eta, on a
  // fixed angular window away from tau = 1. Near theta = 0 the ratio is not
  // stable: d_theta u(1) = d_r v(1) != 0 (Cauchy-Riemann), so |u| ~ |theta|
  // while |w|^{m_i} ~ |theta|^{m_i alpha} with m_i alpha > 1.
  const CircleGrid& lg = last.grid();
  double c = 0.0;
  for (int j = 0; j < m.l; ++j) {
    int mj = m.weights.weight_of_var(j);
    if (is_infinite(mj)) continue;
    for (int k = 0; k < lg.N; ++k) {
      if (std::abs(lg.theta(k)) < M_PI / 32) continue;
      double aw = std::abs(last.w[wdir].value(k));
      if (aw < 1e-8) continue;
      c = std::max(c, std::abs(last.u[j].value(k).real()) / std::pow(aw, mj));
    }
  }
  res.feedback_c = c;
  return res;
}

struct FgammaEntry {
  int N = 0;
  double sup_error = 0.0;
  double fgamma_error = 0.0;
  bool c5_bound_ok = false;
  double sn_at_one = 0.0;
};

// Discrete F^gamma distance between S_N and (1-tau)^alpha on the boundary
// (sup norm plus Holder-gamma seminorm of (1-tau) d/dtheta of the
// difference, centered differences), plus the |S'_N| <= alpha (1-r)^{alpha-1}
// check on interior circles.
inline std::vector<FgammaEntry> fgamma_report(double alpha, double gamma,
                                              const std::vector<int>& N_list,
                                              CircleGrid grid,
                                              const std::vector<double>& radii = {0.5, 0.9,
                                                                                  0.99}) {
  if (!(0.0 < gamma && gamma < alpha && alpha < 1.0))
    throw BishopError("fgamma_report: need 0 < gamma < alpha < 1");
  int G = grid.N;
  std::vector<Complex> target(G);
  for (int k = 0; k < G; ++k) {
    Complex one = 1.0 - std::polar(1.0, grid.theta(k));
    target[k] = std::abs(one) == 0.0 ? Complex(0) : std::pow(one, alpha);
  }

  std::vector<FgammaEntry> out;
  for (int N : N_list) {
    auto b = binomial_tail_coeffs(alpha, N);
    FgammaEntry e;
    e.N = N;
    e.sn_at_one = partial_sum_eval(b, Complex(1.0)).real();

    std::vector<Complex> diff(G);
    for (int k = 0; k < G; ++k) {
      diff[k] = partial_sum_eval(b, std::polar(1.0, grid.theta(k))) - target[k];
      e.sup_error = std::max(e.sup_error, std::abs(diff[k]));
    }
    // g = (1 - tau) d(diff)/dtheta by centered differences
    double dt = 2.0 * M_PI / G;
    std::vector<Complex> gv(G);
    for (int k = 0; k < G; ++k) {
      Complex dd = (diff[(k + 1) % G] - diff[(k + G - 1) % G]) / (2.0 * dt);
      gv[k] = (1.0 - std::polar(1.0, grid.theta(k))) * dd;
    }
    double semi = 0.0;
    for (int j = 0; j < G; ++j)
      for (int k = j + 1; k < G; ++k) {
        double ad = std::abs(grid.theta(j) - grid.theta(k));
        double dist = std::min(ad, 2.0 * M_PI - ad);
        semi = std::max(semi, std::abs(gv[j] - gv[k]) / std::pow(dist, gamma));
      }
    e.fgamma_error = e.sup_error + semi;

    e.c5_bound_ok = true;
    for (double r : radii) {
      double bound = alpha * std::pow(1.0 - r, alpha - 1.0);
      for (int k = 0; k < 256; ++k) {
        Complex tau = std::polar(r, 2.0 * M_PI * k / 256);
        if (std::abs(partial_sum_derivative(b, tau)) > bound * (1.0 + 1e-12))
          e.c5_bound_ok = false;
      }
    }
    out.push_back(e);
  }
  return out;
}

struct SweepResult {
  std::vector<Eigen::VectorXd> points;  // real ambient coords (x, y, Re w, Im w)
  int tangent_rank = 0;
  Eigen::VectorXd gained_direction;  // y-part of the radial derivative
  double angular_error = 0.0;        // angle to v'_o from the spectral formula
};

namespace detail {

// Real ambient coordinates of the disc at tau = r (theta = 0), through the
// holomorphic extensions of u + iv and w.
inline Eigen::VectorXd disc_point(const ManifoldModel& m, const DiscSolution& d,
                                  double r) {
  Eigen::VectorXd p(2 * (m.l + m.n));
  for (int j = 0; j < m.l; ++j) {
    BoundaryFn f = d.u[j] + d.v[j] * Complex(0, 1);
    Complex z = f.holomorphic_eval(r, 0.0) + Complex(d.x(j), 0.0);
    p(j) = z.real();
    p(m.l + j) = z.imag();
  }
  for (int j = 0; j < m.n; ++j) {
    Complex wv = d.w[j].holomorphic_eval(r, 0.0);
    p(2 * m.l + 2 * j) = wv.real();
    p(2 * m.l + 2 * j + 1) = wv.imag();
  }
  return p;
}

}  // namespace detail

// Sweep of the attached family over constant perturbations of (w, x) plus the
// radial direction; the point cloud fills a half-space of dimension
// dim M + 1 whose extra direction is the Hopf direction v'_o.
inline SweepResult sweep_attached_family(const ManifoldModel& m,
                                         const DiscSolution& base, double delta = 1e-3,
                                         double r_eps = 1e-2,
                                         const BishopOptions& opts = {}) {
  Eigen::VectorXd vprime = radial_derivative_at_one(base);
  if (vprime.norm() < 1e-10) throw BishopError("sweep_attached_family: no transversal gain");

  const CircleGrid& g = base.grid();
  Eigen::VectorXd p0 = detail::disc_point(m, base, 1.0);
  SweepResult res;
  res.points.push_back(p0);
  for (double r : {1.0 - r_eps, 1.0 - 0.5 * r_eps}) res.points.push_back(detail::disc_point(m, base, r));

  std::vector<Eigen::VectorXd> cols;
  auto push_perturbed = [&](const std::vector<BoundaryFn>& w, const Eigen::VectorXd& x) {
    DiscSolution d = solve_bishop(m, w, x, opts, &base);
    Eigen::VectorXd p = detail::disc_point(m, d, 1.0);
    res.points.push_back(p);
    cols.push_back((p - p0) / delta);
  };

  for (int j = 0; j < m.l; ++j) {
    Eigen::VectorXd x = base.x;
    x(j) += delta;
    push_perturbed(base.w, x);
  }
  for (int j = 0; j < m.n; ++j)
    for (Complex dw : {Complex(delta, 0), Complex(0, delta)}) {
      std::vector<BoundaryFn> w = base.w;
      w[j] = w[j] + BoundaryFn::constant(g, dw);
      push_perturbed(w, base.x);
    }
  // radial column
  Eigen::VectorXd radial = (p0 - detail::disc_point(m, base, 1.0 - r_eps)) / r_eps;
  cols.push_back(radial);

  Eigen::MatrixXd A(p0.size(), int(cols.size()));
  for (int c = 0; c < int(cols.size()); ++c) {
    double nrm = cols[c].norm();
    A.col(c) = nrm > 0 ? Eigen::VectorXd(cols[c] / nrm) : cols[c];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  double top = svd.singularValues()(0);
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-6 * std::max(top, 1.0)) ++res.tangent_rank;

  res.gained_direction = radial.segment(m.l, m.l);
  double denom = res.gained_direction.norm() * vprime.norm();
  if (denom > 0) {
    double c = std::clamp(res.gained_direction.dot(vprime) / denom, -1.0, 1.0);
    res.angular_error = std::acos(c);
  }
  return res;
}

// CSV export: theta, u_1..u_l, v_1..v_l, Re w_1, Im w_1, ... with # metadata.
inline void write_disc_csv(std::ostream& os, const ManifoldModel& m,
                           const DiscSolution& d, const BishopOptions& opts = {}) {
  const CircleGrid& g = d.grid();
  os << "# N=" << g.N << " tol=" << opts.tol << " iterations=" << d.iterations
     << " residual=" << d.residual << "\n";
  os << "theta";
  for (int j = 0; j < m.l; ++j) os << ",u" << (j + 1);
  for (int j = 0; j < m.l; ++j) os << ",v" << (j + 1);
  for (int j = 0; j < m.n; ++j) os << ",Re_w" << (j + 1) << ",Im_w" << (j + 1);
  os << "\n";
  os.precision(17);
  for (int k = 0; k < g.N; ++k) {
    os << g.theta(k);
    for (int j = 0; j < m.l; ++j) os << "," << d.u[j].value(k).real();
    for (int j = 0; j < m.l; ++j) os << "," << d.v[j].value(k).real();
    for (int j = 0; j < m.n; ++j)
      os << "," << d.w[j].value(k).real() << "," << d.w[j].value(k).imag();
    os << "\n";
  }
}

}  // namespace crx
