// Multivariate polynomial and truncated-jet arithmetic with weighted degrees.
//
// Polynomials are stored sparsely as exponent-vector -> complex coefficient.
// Variable layouts used throughout the library:
//   graph layout   [x_1..x_l, w_1..w_n, cw_1..cw_n]          (l + 2n vars)
//   ambient layout [z_1..z_l, cz_1..cz_l, w_1..w_n, cw_1..cw_n] (2l + 2n vars)
// Weighted degrees assign an integer weight to every variable; the weight
// kInfiniteWeight is a sentinel (a term containing such a variable has
// infinite order, never a large finite one).
#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace crx {

using Complex = std::complex<double>;

constexpr int kInfiniteWeight = std::numeric_limits<int>::max();

inline bool is_infinite(int order) { return order == kInfiniteWeight; }

// Exponent vector over a fixed number of variables.
struct Monomial {
  std::vector<std::uint16_t> e;

  explicit Monomial(int nvars = 0) : e(nvars, 0) {}

  int degree() const { return std::accumulate(e.begin(), e.end(), 0); }

  bool operator==(const Monomial& o) const { return e == o.e; }
  bool operator<(const Monomial& o) const { return e < o.e; }
};

// Sparse complex-coefficient polynomial. Zero coefficients are never stored.
class Poly {
 public:
  explicit Poly(int nvars = 0) : nvars_(nvars) {}

  static Poly constant(int nvars, Complex c) {
    Poly p(nvars);
    if (c != Complex(0)) p.terms_[Monomial(nvars)] = c;
    return p;
  }

  static Poly variable(int nvars, int i) {
    Poly p(nvars);
    Monomial m(nvars);
    m.e[i] = 1;
    p.terms_[m] = Complex(1);
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Complex>& terms() const { return terms_; }

  Complex coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Complex(0) : it->second;
  }

  void add_term(const Monomial& m, Complex c) {
    if (c == Complex(0)) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (std::abs(it->second) == 0.0) terms_.erase(it);
    }
  }

  // Drop coefficients with modulus <= eps (cleanup after float cancellation).
  Poly& prune(double eps) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) <= eps)
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  Poly& operator+=(const Poly& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(Complex s) {
    if (s == Complex(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, Complex s) { return a *= s; }
  friend Poly operator*(Complex s, Poly a) { return a *= s; }
  friend Poly operator-(Poly a) { return a *= Complex(-1); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_same(b);
    Poly r(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m(a.nvars_);
        for (int i = 0; i < a.nvars_; ++i) m.e[i] = ma.e[i] + mb.e[i];
        r.add_term(m, ca * cb);
      }
    return r;
  }

  Poly derivative(int var) const {
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) {
      if (m.e[var] == 0) continue;
      Monomial d = m;
      d.e[var] -= 1;
      r.add_term(d, c * double(m.e[var]));
    }
    return r;
  }

  Complex eval(const std::vector<Complex>& point) const {
    Complex s(0);
    for (const auto& [m, c] : terms_) {
      Complex t = c;
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < m.e[i]; ++k) t *= point[i];
      s += t;
    }
    return s;
  }

  Complex constant_term() const { return coeff(Monomial(nvars_)); }

  // Composition: each variable replaced by the given polynomial (all in the
  // target variable space).
  Poly substitute(const std::vector<Poly>& assignment) const {
    if ((int)assignment.size() != nvars_)
      throw std::invalid_argument("substitute: assignment size mismatch");
    int tv = assignment.empty() ? nvars_ : assignment[0].nvars();
    Poly r(tv);
    for (const auto& [m, c] : terms_) {
      Poly t = Poly::constant(tv, c);
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < m.e[i]; ++k) t = t * assignment[i];
      r += t;
    }
    return r;
  }

 private:
  void check_same(const Poly& o) const {
    if (nvars_ != o.nvars_)
      throw std::invalid_argument("poly: variable count mismatch");
  }

  int nvars_;
  std::map<Monomial, Complex> terms_;
};

// Weighted degree of a single term; kInfiniteWeight if the term contains a
// variable of infinite weight.
inline int term_order(const Monomial& m, const std::vector<int>& weights) {
  long s = 0;
  for (size_t i = 0; i < m.e.size(); ++i) {
    if (m.e[i] == 0) continue;
    if (is_infinite(weights[i])) return kInfiniteWeight;
    s += long(weights[i]) * m.e[i];
  }
  return int(s);
}

// Minimum weighted degree over all terms; kInfiniteWeight for the zero
// polynomial.
inline int weighted_order(const Poly& p, const std::vector<int>& weights) {
  int best = kInfiniteWeight;
  for (const auto& [m, c] : p.terms())
    best = std::min(best, term_order(m, weights));
  return best;
}

// Block/weight bookkeeping: l real variables split into consecutive blocks
// I_1..I_r with strictly increasing weights m_1 < ... < m_r (the last possibly
// infinite); every w and cw variable has weight 1.
struct WeightVector {
  std::vector<int> block_sizes;  // l_1..l_r, sum = l
  std::vector<int> weights;      // m_1 < ... < m_r

  WeightVector() = default;
  WeightVector(std::vector<int> sizes, std::vector<int> ws)
      : block_sizes(std::move(sizes)), weights(std::move(ws)) {
    validate();
  }

  void validate() const {
    if (block_sizes.size() != weights.size())
      throw std::invalid_argument("weights: block/weight count mismatch");
    for (int s : block_sizes)
      if (s <= 0) throw std::invalid_argument("weights: empty block");
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
      if (is_infinite(weights[i]))
        throw std::invalid_argument("weights: infinite weight must be last");
      if (weights[i] >= weights[i + 1])
        throw std::invalid_argument("weights: not strictly increasing");
    }
    for (int w : weights)
      if (w < 1 && !is_infinite(w))
        throw std::invalid_argument("weights: weight < 1");
  }

  int l() const { return std::accumulate(block_sizes.begin(), block_sizes.end(), 0); }
  int nblocks() const { return int(block_sizes.size()); }

  // Block index (0-based) of real variable j in 0..l-1.
  int block_of(int j) const {
    int acc = 0;
    for (int b = 0; b < nblocks(); ++b) {
      acc += block_sizes[b];
      if (j < acc) return b;
    }
    throw std::out_of_range("block_of");
  }

  int block_start(int b) const {
    int acc = 0;
    for (int i = 0; i < b; ++i) acc += block_sizes[i];
    return acc;
  }

  int weight_of_var(int j) const { return weights[block_of(j)]; }

  // Per-variable weights for the graph layout [x(l), w(n), cw(n)].
  std::vector<int> graph_weights(int n) const {
    std::vector<int> w;
    for (int j = 0; j < l(); ++j) w.push_back(weight_of_var(j));
    w.insert(w.end(), 2 * n, 1);
    return w;
  }

  // Per-variable weights for the ambient layout [z(l), cz(l), w(n), cw(n)].
  std::vector<int> ambient_weights(int n) const {
    std::vector<int> w;
    for (int rep = 0; rep < 2; ++rep)
      for (int j = 0; j < l(); ++j) w.push_back(weight_of_var(j));
    w.insert(w.end(), 2 * n, 1);
    return w;
  }
};

// Truncated jet: polynomial plus per-variable weights and a weighted-degree
// cutoff. Arithmetic discards terms above the cutoff.
class Jet {
 public:
  Jet() = default;
  Jet(Poly p, std::vector<int> weights, int cutoff)
      : poly_(std::move(p)), weights_(std::move(weights)), cutoff_(cutoff) {
    truncate();
  }

  static Jet constant(int nvars, Complex c, std::vector<int> weights, int cutoff) {
    return Jet(Poly::constant(nvars, c), std::move(weights), cutoff);
  }

  const Poly& poly() const { return poly_; }
  const std::vector<int>& weights() const { return weights_; }
  int cutoff() const { return cutoff_; }
  int nvars() const { return poly_.nvars(); }
  bool is_zero() const { return poly_.is_zero(); }
  int order() const { return weighted_order(poly_, weights_); }
  Complex constant_term() const { return poly_.constant_term(); }

  Jet& operator+=(const Jet& o) {
    check_compatible(o);
    poly_ += o.poly_;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_compatible(o);
    poly_ -= o.poly_;
    return *this;
  }
  Jet& operator*=(Complex s) {
    poly_ *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, Complex s) { return a *= s; }
  friend Jet operator*(Complex s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a) { return a *= Complex(-1); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    return Jet(a.poly_ * b.poly_, a.weights_, a.cutoff_);
  }

  Jet derivative(int var) const {
    // Differentiation may not re-truncate: a term at the cutoff stays
    // representable after losing one variable.
    Jet r;
    r.poly_ = poly_.derivative(var);
    r.weights_ = weights_;
    r.cutoff_ = cutoff_;
    return r;
  }

  Jet with_poly(Poly p) const { return Jet(std::move(p), weights_, cutoff_); }

 private:
  void check_compatible(const Jet& o) const {
    if (cutoff_ != o.cutoff_)
      throw std::invalid_argument("jet: cutoff mismatch");
    if (weights_ != o.weights_)
      throw std::invalid_argument("jet: weight table mismatch");
  }

  void truncate() {
    Poly kept(poly_.nvars());
    for (const auto& [m, c] : poly_.terms()) {
      int o = term_order(m, weights_);
      if (!is_infinite(o) && o <= cutoff_) kept.add_term(m, c);
    }
    poly_ = std::move(kept);
  }

  Poly poly_;
  std::vector<int> weights_;
  int cutoff_ = 0;
};

inline Jet jet_mul(const Jet& a, const Jet& b) { return a * b; }

// Composition with per-variable jet assignments, truncated at the cutoff of
// the assignments.
inline Jet jet_substitute(const Jet& p, const std::vector<Jet>& assignment) {
  if ((int)assignment.size() != p.nvars())
    throw std::invalid_argument("jet_substitute: assignment size mismatch");
  std::vector<Poly> polys;
  polys.reserve(assignment.size());
  for (const auto& j : assignment) polys.push_back(j.poly());
  const Jet& a0 = assignment.front();
  return Jet(p.poly().substitute(polys), a0.weights(), a0.cutoff());
}

using JetMatrix = std::vector<std::vector<Jet>>;

// Inverse of a square jet matrix whose constant term is invertible, by a
// truncated Neumann series: M = C(I + C^{-1}N), M^{-1} = sum (-C^{-1}N)^k C^{-1}.
inline JetMatrix jet_matrix_inverse(const JetMatrix& M) {
  const int d = int(M.size());
  if (d == 0) return {};
  const Jet& probe = M[0][0];
  const auto& weights = probe.weights();
  const int cutoff = probe.cutoff();
  const int nv = probe.nvars();

  Eigen::MatrixXcd C(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) C(i, j) = M[i][j].constant_term();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(C);
  if (!lu.isInvertible())
    throw std::invalid_argument("jet_matrix_inverse: singular constant term");
  Eigen::MatrixXcd Cinv = lu.inverse();

  auto zero = Jet::constant(nv, Complex(0), weights, cutoff);
  auto mat_zero = JetMatrix(d, std::vector<Jet>(d, zero));

  // B = -C^{-1} N where N is the nonconstant part of M.
  JetMatrix B = mat_zero;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Jet n_kj = mat_zero[0][0];
      for (int k = 0; k < d; ++k) {
        Jet nk = M[k][j] - Jet::constant(nv, M[k][j].constant_term(), weights, cutoff);
        n_kj += Complex(-1) * Cinv(i, k) * nk;
      }
      B[i][j] = n_kj;
    }

  // acc = I + B + B^2 + ... ; each factor of B raises weighted order by >= 1.
  JetMatrix acc = mat_zero;
  JetMatrix power = mat_zero;
  for (int i = 0; i < d; ++i) {
    acc[i][i] = Jet::constant(nv, Complex(1), weights, cutoff);
    power[i][i] = acc[i][i];
  }
  for (int k = 1; k <= cutoff; ++k) {
    JetMatrix next = mat_zero;
    bool nonzero = false;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        for (int t = 0; t < d; ++t) next[i][j] += power[i][t] * B[t][j];
        if (!next[i][j].is_zero()) nonzero = true;
      }
    power = std::move(next);
    if (!nonzero) break;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) acc[i][j] += power[i][j];
  }

  // result = acc * C^{-1}
  JetMatrix R = mat_zero;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int t = 0; t < d; ++t) R[i][j] += acc[i][t] * Cinv(t, j);
  return R;
}

}  // namespace crx
