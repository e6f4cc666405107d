// Variable index maps for the two polynomial layouts and the conjugation
// involutions they induce.
#pragma once

#include "crx/poly.hpp"

namespace crx {

// Graph layout: functions of (x, w, cw) on the parameter space of M.
struct GraphLayout {
  int l, n;
  int nvars() const { return l + 2 * n; }
  int x(int j) const { return j; }
  int w(int j) const { return l + j; }
  int cw(int j) const { return l + n + j; }
};

// Ambient layout: functions of (z, cz, w, cw) on C^N.
struct AmbientLayout {
  int l, n;
  int nvars() const { return 2 * l + 2 * n; }
  int z(int j) const { return j; }
  int cz(int j) const { return l + j; }
  int w(int j) const { return 2 * l + j; }
  int cw(int j) const { return 2 * l + n + j; }
};

// Complex conjugate of a graph-layout polynomial: conjugate coefficients and
// swap w <-> cw (x is real).
inline Poly conj(const Poly& p, const GraphLayout& lay) {
  Poly r(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    Monomial mm = m;
    for (int j = 0; j < lay.n; ++j)
      std::swap(mm.e[lay.w(j)], mm.e[lay.cw(j)]);
    r.add_term(mm, std::conj(c));
  }
  return r;
}

inline Poly conj(const Poly& p, const AmbientLayout& lay) {
  Poly r(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    Monomial mm = m;
    for (int j = 0; j < lay.l; ++j)
      std::swap(mm.e[lay.z(j)], mm.e[lay.cz(j)]);
    for (int j = 0; j < lay.n; ++j)
      std::swap(mm.e[lay.w(j)], mm.e[lay.cw(j)]);
    r.add_term(mm, std::conj(c));
  }
  return r;
}

// Real-valuedness as Hermitian symmetry: p equals its own conjugate.
template <class Layout>
bool is_hermitian(const Poly& p, const Layout& lay, double tol = 1e-12) {
  Poly d = p - conj(p, lay);
  for (const auto& [m, c] : d.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

}  // namespace crx
