// Lie-bracket calculus at the origin: CR vector-field basis from the defining
// functions, the bracket filtration L^j with Hormander numbers, bracket
// pairings against the defining functions, and the Boggess-Pitts direction
// formula.
#pragma once

#include <string>
#include <utility>

#include "crx/manifold.hpp"
#include "crx/vector_field.hpp"

namespace crx {

class HormanderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Defining functions r_i = -y_i + h_i as ambient jets, with
// y_i = (z_i - cz_i)/(2i) and h_i evaluated at x = (z + cz)/2.
inline std::vector<Jet> ambient_r(const ManifoldModel& m, int cutoff) {
  AmbientLayout alay{m.l, m.n};
  auto aw = m.weights.ambient_weights(m.n);
  const int av = alay.nvars();

  std::vector<Poly> assign;
  for (int j = 0; j < m.l; ++j)
    assign.push_back((Poly::variable(av, alay.z(j)) + Poly::variable(av, alay.cz(j))) *
                     Complex(0.5));
  for (int j = 0; j < m.n; ++j) assign.push_back(Poly::variable(av, alay.w(j)));
  for (int j = 0; j < m.n; ++j) assign.push_back(Poly::variable(av, alay.cw(j)));

  std::vector<Jet> r;
  for (int i = 0; i < m.l; ++i) {
    // -y_i = (i/2) z_i - (i/2) cz_i
    Poly p = Poly::variable(av, alay.z(i)) * Complex(0, 0.5) +
             Poly::variable(av, alay.cz(i)) * Complex(0, -0.5);
    p += m.h[i].substitute(assign);
    r.emplace_back(std::move(p), aw, cutoff);
  }
  return r;
}

// Basis X_1..X_n of (1,0) tangent fields: X_j = sum_h a_jh d/dz_h + d/dw_j
// with A = -t(d_w r) t(d_z r)^{-1}; the constant term of t(d_z r) is (i/2)I,
// hence invertible.
inline std::vector<VectorFieldJet> cr_basis(const ManifoldModel& m, int cutoff) {
  if (cutoff < 2) throw HormanderError("cr_basis: cutoff must be >= 2");
  AmbientLayout alay{m.l, m.n};
  auto aw = m.weights.ambient_weights(m.n);
  std::vector<Jet> r = ambient_r(m, cutoff);

  // T[t][h] = d r_h / d z_t  (the transpose of d_z r)
  JetMatrix T(m.l, std::vector<Jet>(m.l));
  for (int t = 0; t < m.l; ++t)
    for (int h = 0; h < m.l; ++h) T[t][h] = r[h].derivative(alay.z(t));
  JetMatrix Tinv = jet_matrix_inverse(T);

  std::vector<VectorFieldJet> X;
  for (int j = 0; j < m.n; ++j) {
    VectorFieldJet f = VectorFieldJet::zero(alay, aw, cutoff);
    for (int h = 0; h < m.l; ++h) {
      Jet a = Jet::constant(alay.nvars(), Complex(0), aw, cutoff);
      for (int t = 0; t < m.l; ++t)
        a += Complex(-1) * r[t].derivative(alay.w(j)) * Tinv[t][h];
      f.coef[alay.z(h)] = a;
    }
    f.coef[alay.w(j)] = Jet::constant(alay.nvars(), Complex(1), aw, cutoff);
    X.push_back(std::move(f));
  }
  return X;
}

struct FiltrationReport {
  std::vector<int> dims;  // dim L^j at the origin, j = 1..cap
  std::vector<std::pair<int, int>> hormander_numbers;  // (m_i, l_i)
  bool finite_type = false;
  int cap = 0;
  std::string message;  // "type > cap" when the span is not reached
};

// Bracket filtration at the origin: L^1 = span{X_j, conj X_j}, L^j adds
// values at 0 of all left-normed brackets of length <= j of the generators.
inline FiltrationReport filtration(const ManifoldModel& m, int cap, int cutoff = -1) {
  if (cap < 2) throw HormanderError("filtration: cap must be >= 2");
  if (cutoff < 0) cutoff = cap + 1;
  if (cutoff < cap + 1)
    throw HormanderError("filtration: cutoff insufficient for requested cap");

  std::vector<VectorFieldJet> gen = cr_basis(m, cutoff);
  {
    std::vector<VectorFieldJet> conj_gen;
    for (const auto& X : gen) conj_gen.push_back(conjugate(X));
    gen.insert(gen.end(), conj_gen.begin(), conj_gen.end());
  }

  const int av = 2 * m.l + 2 * m.n;
  auto rank_of = [&](const std::vector<Eigen::VectorXcd>& cols) {
    Eigen::MatrixXcd A(av, int(cols.size()));
    for (int c = 0; c < int(cols.size()); ++c) A.col(c) = cols[c];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-9 * std::max(top, 1.0)) ++rank;
    return rank;
  };

  FiltrationReport rep;
  rep.cap = cap;
  std::vector<Eigen::VectorXcd> values;
  // left-normed brackets: level k fields are [g, B] for generators g and
  // level k-1 fields B
  std::vector<VectorFieldJet> level = gen;
  for (const auto& f : level) values.push_back(f.value_at_origin());
  rep.dims.push_back(rank_of(values));
  for (int length = 2; length <= cap; ++length) {
    std::vector<VectorFieldJet> next;
    for (const auto& g : gen)
      for (const auto& B : level) next.push_back(lie_bracket(g, B));
    for (const auto& f : next) values.push_back(f.value_at_origin());
    rep.dims.push_back(rank_of(values));
    level = std::move(next);
  }

  for (int j = 1; j < cap; ++j)
    if (rep.dims[j] > rep.dims[j - 1])
      rep.hormander_numbers.emplace_back(j + 1, rep.dims[j] - rep.dims[j - 1]);
  rep.finite_type = rep.dims.back() == 2 * m.n + m.l;
  if (!rep.finite_type) rep.message = "type > " + std::to_string(cap);
  return rep;
}

// Value at the origin of the left-normed bracket prescribed by the word
// (+1 -> X_o, -1 -> conj X_o, innermost pair last), paired against the
// defining functions of block i through the complex-structure identification
// T M / T^C M ~ R^l: component j is (1/2i) (J B(0))(r_j)(0), which for the
// linear parts of r reduces to i (beta_{z_j} + beta_{cz_j}) / 4.
inline Eigen::VectorXcd bracket_pairing(const std::vector<int>& word,
                                        const ManifoldModel& m, int block,
                                        int base = 0, double phase = 0.0) {
  if (word.size() < 2) throw HormanderError("bracket_pairing: word too short");
  if (block < 0 || block >= m.weights.nblocks())
    throw HormanderError("bracket_pairing: bad block index");
  if (base < 0 || base >= m.n) throw HormanderError("bracket_pairing: bad base index");
  const int cutoff = int(word.size()) + 2;

  std::vector<VectorFieldJet> X = cr_basis(m, cutoff);
  VectorFieldJet Xo = std::polar(1.0, phase) * X[base];
  VectorFieldJet Xbar = conjugate(Xo);

  auto field = [&](int eps) -> const VectorFieldJet& { return eps > 0 ? Xo : Xbar; };
  VectorFieldJet B = field(word.back());
  for (int k = int(word.size()) - 2; k >= 0; --k) B = lie_bracket(field(word[k]), B);

  AmbientLayout alay{m.l, m.n};
  Eigen::VectorXcd beta = B.value_at_origin();
  int start = m.weights.block_start(block);
  int sz = m.weights.block_sizes[block];
  Eigen::VectorXcd out(sz);
  for (int j = 0; j < sz; ++j)
    out(j) = Complex(0, 0.25) * (beta(alay.z(start + j)) + beta(alay.cz(start + j)));
  return out;
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

// Boggess-Pitts direction for a line restriction at phase phi:
// v_j = sum_{m+n=k, m,n>=1} C(k-2, m-1) (1/(m! n!)) d_w^m dbar_w^n h_j(0)
// e^{i(m-n)phi}, real by Hermitian symmetry of h.
inline Eigen::VectorXd bp_direction(const LineRestriction& line, int k, double phi) {
  const ManifoldModel& m = line.model;
  if (is_infinite(k)) throw HormanderError("bp_direction: k infinite");
  if (k != m.weights.weights[0])
    throw HormanderError("bp_direction: k is not the first Hormander number");
  GraphLayout lay = m.layout();

  Eigen::VectorXd v(m.l);
  for (int j = 0; j < m.l; ++j) {
    Complex s(0);
    for (int mm = 1; mm <= k - 1; ++mm) {
      int nn = k - mm;
      Monomial mon(lay.nvars());
      mon.e[lay.w(0)] = std::uint16_t(mm);
      mon.e[lay.cw(0)] = std::uint16_t(nn);
      s += binom(k - 2, mm - 1) * m.h[j].coeff(mon) *
           std::polar(1.0, (mm - nn) * phi);
    }
    if (std::abs(s.imag()) > 1e-9 * std::max(1.0, std::abs(s)))
      throw HormanderError("bp_direction: non-real result");
    v(j) = s.real();
  }
  return v;
}

}  // namespace crx
