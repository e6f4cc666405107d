// Vector fields with truncated-jet coefficients over the ambient derivation
// basis [d/dz_1..z_l, d/dcz_1..cz_l, d/dw_1..w_n, d/dcw_1..cw_n], and their
// Lie brackets.
#pragma once

#include <Eigen/Dense>

#include "crx/layout.hpp"
#include "crx/poly.hpp"

namespace crx {

struct VectorFieldJet {
  AmbientLayout lay;
  std::vector<Jet> coef;  // one Jet per ambient derivation, equal cutoffs

  static VectorFieldJet zero(const AmbientLayout& lay,
                             const std::vector<int>& weights, int cutoff) {
    VectorFieldJet f;
    f.lay = lay;
    f.coef.assign(lay.nvars(), Jet::constant(lay.nvars(), Complex(0), weights, cutoff));
    return f;
  }

  int cutoff() const { return coef.at(0).cutoff(); }
  bool is_zero() const {
    for (const auto& c : coef)
      if (!c.is_zero()) return false;
    return true;
  }

  // Apply to a function jet: sum_k coef_k * d f / d var_k.
  Jet apply(const Jet& f) const {
    Jet r = coef[0] * f.derivative(0);
    for (int k = 1; k < int(coef.size()); ++k) r += coef[k] * f.derivative(k);
    return r;
  }

  // Coefficient values at the origin as a complex vector.
  Eigen::VectorXcd value_at_origin() const {
    Eigen::VectorXcd v(int(coef.size()));
    for (int k = 0; k < int(coef.size()); ++k) v(k) = coef[k].constant_term();
    return v;
  }

  VectorFieldJet& operator*=(Complex s) {
    for (auto& c : coef) c *= s;
    return *this;
  }
  friend VectorFieldJet operator*(VectorFieldJet f, Complex s) { return f *= s; }
  friend VectorFieldJet operator*(Complex s, VectorFieldJet f) { return f *= s; }
  VectorFieldJet& operator+=(const VectorFieldJet& o) {
    for (size_t k = 0; k < coef.size(); ++k) coef[k] += o.coef[k];
    return *this;
  }
  friend VectorFieldJet operator+(VectorFieldJet a, const VectorFieldJet& b) {
    return a += b;
  }
};

// Complex conjugate field: conjugate coefficients, swap z<->cz and w<->cw in
// both the derivation index and the coefficient polynomials.
inline VectorFieldJet conjugate(const VectorFieldJet& f) {
  const AmbientLayout& lay = f.lay;
  auto swapped = [&](int k) {
    if (k < lay.l) return lay.cz(k);
    if (k < 2 * lay.l) return lay.z(k - lay.l);
    if (k < 2 * lay.l + lay.n) return lay.cw(k - 2 * lay.l);
    return lay.w(k - 2 * lay.l - lay.n);
  };
  VectorFieldJet r = f;
  for (int k = 0; k < lay.nvars(); ++k)
    r.coef[swapped(k)] = f.coef[k].with_poly(crx::conj(f.coef[k].poly(), lay));
  return r;
}

// Commutator [X, Y] = X(Y_k) d_k - Y(X_k) d_k.
inline VectorFieldJet lie_bracket(const VectorFieldJet& X, const VectorFieldJet& Y) {
  if (X.cutoff() != Y.cutoff())
    throw std::invalid_argument("lie_bracket: cutoff mismatch");
  VectorFieldJet r = X;
  for (int k = 0; k < int(X.coef.size()); ++k)
    r.coef[k] = X.apply(Y.coef[k]) - Y.apply(X.coef[k]);
  return r;
}

}  // namespace crx
