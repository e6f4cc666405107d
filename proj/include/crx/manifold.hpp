// Generic submanifold of C^N in graph form y = h(x, w) at the origin, with
// block/weight structure, line restrictions, weighted-homogeneous leading
// parts and the pluriharmonicity test.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crx/expr.hpp"
#include "crx/layout.hpp"
#include "crx/poly.hpp"

namespace crx {

class ManifoldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ManifoldModel {
  int l = 0;  // codimension
  int n = 0;  // CR dimension
  WeightVector weights;
  std::vector<Poly> h;  // graph-layout polynomials, h.size() == l

  GraphLayout layout() const { return GraphLayout{l, n}; }

  void validate() const {
    weights.validate();
    if (weights.l() != l) throw ManifoldError("blocks do not partition 1..l");
    if ((int)h.size() != l) throw ManifoldError("need exactly l defining functions");
    GraphLayout lay = layout();
    auto gw = weights.graph_weights(n);
    for (int j = 0; j < l; ++j) {
      const Poly& p = h[j];
      if (p.nvars() != lay.nvars())
        throw ManifoldError("h has wrong variable count");
      if (std::abs(p.constant_term()) > 1e-14)
        throw ManifoldError("h(0)=0 violated");
      for (int v = 0; v < lay.nvars(); ++v) {
        Monomial m(lay.nvars());
        m.e[v] = 1;
        if (std::abs(p.coeff(m)) > 1e-14)
          throw ManifoldError("dh(0)=0 violated");
      }
      if (!is_hermitian(p, lay))
        throw ManifoldError("h component is not real-valued");
      int mi = weights.weights[weights.block_of(j)];
      int o = weighted_order(p, gw);
      if (!is_infinite(mi) && !is_infinite(o) && o < mi)
        throw ManifoldError("weighted order of h below declared weight");
      if (is_infinite(mi) && !is_infinite(o))
        throw ManifoldError("weighted order of h below declared weight");
    }
  }
};

// Restriction M ~ = M cap (C^l_z x C^1_{w_k}): a manifold model with n = 1.
struct LineRestriction {
  ManifoldModel model;  // n == 1
  int direction = 0;    // 0-based index of the retained w variable
};

// --- manifold-spec document (JSON text) ------------------------------------

inline ManifoldModel parse_manifold(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifoldError(std::string("syntax error: ") + e.what());
  }
  ManifoldModel m;
  try {
    m.l = doc.at("l").get<int>();
    m.n = doc.at("n").get<int>();
    m.weights.block_sizes = doc.at("blocks").get<std::vector<int>>();
    for (const auto& w : doc.at("weights")) {
      if (w.is_string() && w.get<std::string>() == "inf")
        m.weights.weights.push_back(kInfiniteWeight);
      else
        m.weights.weights.push_back(w.get<int>());
    }
    GraphLayout lay{m.l, m.n};
    for (const auto& s : doc.at("h"))
      m.h.push_back(parse_poly(s.get<std::string>(), lay));
  } catch (const nlohmann::json::exception& e) {
    throw ManifoldError(std::string("syntax error: ") + e.what());
  } catch (const PolyParseError& e) {
    throw ManifoldError(std::string("syntax error: ") + e.what());
  }
  m.validate();
  return m;
}

inline std::string print_manifold(const ManifoldModel& m) {
  nlohmann::ordered_json doc;
  doc["l"] = m.l;
  doc["n"] = m.n;
  doc["blocks"] = m.weights.block_sizes;
  doc["weights"] = nlohmann::json::array();
  for (int w : m.weights.weights) {
    if (is_infinite(w))
      doc["weights"].push_back("inf");
    else
      doc["weights"].push_back(w);
  }
  doc["h"] = nlohmann::json::array();
  for (const auto& p : m.h) doc["h"].push_back(print_poly(p, m.layout()));
  return doc.dump(2);
}

inline bool operator==(const ManifoldModel& a, const ManifoldModel& b) {
  if (a.l != b.l || a.n != b.n) return false;
  if (a.weights.block_sizes != b.weights.block_sizes) return false;
  if (a.weights.weights != b.weights.weights) return false;
  if (a.h.size() != b.h.size()) return false;
  for (size_t j = 0; j < a.h.size(); ++j)
    if (!(a.h[j].terms() == b.h[j].terms())) return false;
  return true;
}

// --- operations ------------------------------------------------------------

// Substitute w_j = 0 for all j != k, keeping a single w variable.
inline LineRestriction restrict_to_line(const ManifoldModel& m, int k) {
  if (k < 0 || k >= m.n) throw ManifoldError("direction index out of range");
  GraphLayout src = m.layout();
  GraphLayout dst{m.l, 1};
  std::vector<Poly> assign(src.nvars(), Poly(dst.nvars()));
  for (int j = 0; j < m.l; ++j) assign[src.x(j)] = Poly::variable(dst.nvars(), dst.x(j));
  assign[src.w(k)] = Poly::variable(dst.nvars(), dst.w(0));
  assign[src.cw(k)] = Poly::variable(dst.nvars(), dst.cw(0));
  LineRestriction line;
  line.direction = k;
  line.model.l = m.l;
  line.model.n = 1;
  line.model.weights = m.weights;
  for (const auto& p : m.h) line.model.h.push_back(p.substitute(assign));
  line.model.validate();
  return line;
}

// Weighted-homogeneous degree-m_i part of block i; the discarded remainder
// has weighted order >= m_i + 1.
inline std::vector<Poly> lowest_weight_part(const ManifoldModel& m, int block) {
  int mi = m.weights.weights.at(block);
  if (is_infinite(mi)) throw ManifoldError("lowest_weight_part: infinite weight");
  auto gw = m.weights.graph_weights(m.n);
  std::vector<Poly> out;
  int start = m.weights.block_start(block);
  int size = m.weights.block_sizes[block];
  bool any = false;
  for (int j = start; j < start + size; ++j) {
    Poly part(m.h[j].nvars());
    for (const auto& [mon, c] : m.h[j].terms())
      if (term_order(mon, gw) == mi) part.add_term(mon, c);
    if (!m.h[j].is_zero()) any = true;
    out.push_back(std::move(part));
  }
  if (!any) throw ManifoldError("lowest_weight_part: block has order infinity");
  return out;
}

struct PluriharmonicResult {
  bool is_pluriharmonic = false;
  // Witness: coefficients of the holomorphic polynomial F over the monomial
  // basis z^a w^d of weighted degree <= m, plus that basis.
  std::vector<std::pair<Monomial, Complex>> witness;  // ambient-free: (a, d) packed below
};

namespace detail {

// Enumerate exponent vectors (a_1..a_l, d) with sum a_i*weight_i + d <= m.
inline void holomorphic_basis_rec(const std::vector<int>& var_weights, int budget,
                                  size_t idx, std::vector<std::uint16_t>& cur,
                                  std::vector<std::vector<std::uint16_t>>& out) {
  if (idx == var_weights.size()) {
    out.push_back(cur);
    return;
  }
  int w = var_weights[idx];
  for (int e = 0;; ++e) {
    if (is_infinite(w) && e > 0) break;
    long used = long(e) * w;
    if (used > budget) break;
    cur[idx] = std::uint16_t(e);
    holomorphic_basis_rec(var_weights, budget - int(used), idx + 1, cur, out);
  }
  cur[idx] = 0;
}

}  // namespace detail

// Decide whether a weighted-homogeneous g of weight m on the line M~ can be
// written Im F|_{M~} + O^{m+1} with F a holomorphic polynomial in (z, w_1) of
// weighted degree <= m. The restriction substitutes z = x + i h(x, w_1)
// truncated at weighted degree m.
inline PluriharmonicResult pluriharmonic_test(const Poly& g,
                                              const LineRestriction& line,
                                              double svd_rel_tol = 1e-9) {
  const ManifoldModel& m = line.model;
  GraphLayout lay = m.layout();
  auto gw = m.weights.graph_weights(1);

  int weight = weighted_order(g, gw);
  if (g.is_zero()) {
    PluriharmonicResult r;
    r.is_pluriharmonic = true;
    return r;
  }
  for (const auto& [mon, c] : g.terms())
    if (term_order(mon, gw) != weight)
      throw ManifoldError("pluriharmonic_test: g not weighted-homogeneous");

  // z_j = x_j + i (h_j minus its leading homogeneous part), truncated at the
  // weight. Only the strictly-higher-order remainder of h enters the
  // restriction: the leading parts are the obstructions being classified and
  // are not available for cancellation.
  std::vector<Jet> zrep;
  for (int j = 0; j < m.l; ++j) {
    int mj = m.weights.weight_of_var(j);
    Poly rem(lay.nvars());
    for (const auto& [mon, c] : m.h[j].terms())
      if (is_infinite(mj) || term_order(mon, gw) > mj) rem.add_term(mon, c);
    zrep.push_back(Jet(Poly::variable(lay.nvars(), lay.x(j)) + Complex(0, 1) * rem,
                       gw, weight));
  }
  Jet wrep(Poly::variable(lay.nvars(), lay.w(0)), gw, weight);

  // Basis of holomorphic monomials z^a w^d of weighted degree <= weight.
  std::vector<int> hw;
  for (int j = 0; j < m.l; ++j) hw.push_back(m.weights.weight_of_var(j));
  hw.push_back(1);
  std::vector<std::vector<std::uint16_t>> basis;
  {
    std::vector<std::uint16_t> cur(hw.size(), 0);
    detail::holomorphic_basis_rec(hw, weight, 0, cur, basis);
  }
  // Drop the constant monomial: it contributes a constant to Im F only.
  std::erase_if(basis, [](const auto& b) {
    return std::all_of(b.begin(), b.end(), [](auto e) { return e == 0; });
  });

  // Restriction of each basis monomial, split into Re and Im parts.
  std::vector<Poly> re_part, im_part;
  for (const auto& b : basis) {
    Jet f = Jet::constant(lay.nvars(), Complex(1), gw, weight);
    for (int j = 0; j < m.l; ++j)
      for (int k = 0; k < b[j]; ++k) f = f * zrep[j];
    for (int k = 0; k < b[m.l]; ++k) f = f * wrep;
    Poly fp = f.poly();
    Poly fc = crx::conj(fp, lay);
    re_part.push_back((fp + fc) * Complex(0.5));
    im_part.push_back((fp - fc) * Complex(0, -0.5));
  }

  // Assemble the real linear system over the weight-m monomials: g must equal
  // the weight-m homogeneous part of Im F restricted to the line.
  std::map<Monomial, int> rows;
  auto note = [&](const Poly& p) {
    for (const auto& [mon, c] : p.terms())
      if (term_order(mon, gw) == weight && rows.find(mon) == rows.end())
        rows.emplace(mon, int(rows.size()));
  };
  for (const auto& p : im_part) note(p);
  for (const auto& p : re_part) note(p);
  note(g);

  int R = int(rows.size());
  int K = int(basis.size());
  // Unknowns: alpha_k (real part of F coefficient) multiplying Im F_k, and
  // beta_k (imag part) multiplying Re F_k.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * R, 2 * K);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * R);
  for (int k = 0; k < K; ++k) {
    for (const auto& [mon, c] : im_part[k].terms()) {
      auto it = rows.find(mon);
      if (it == rows.end()) continue;
      A(2 * it->second, k) += c.real();
      A(2 * it->second + 1, k) += c.imag();
    }
    for (const auto& [mon, c] : re_part[k].terms()) {
      auto it = rows.find(mon);
      if (it == rows.end()) continue;
      A(2 * it->second, K + k) += c.real();
      A(2 * it->second + 1, K + k) += c.imag();
    }
  }
  for (const auto& [mon, c] : g.terms()) {
    int r = rows.at(mon);
    rhs(2 * r) = c.real();
    rhs(2 * r + 1) = c.imag();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sol = svd.solve(rhs);
  double resid = (A * sol - rhs).norm();
  double scale = std::max(1.0, rhs.norm());

  PluriharmonicResult out;
  out.is_pluriharmonic = resid <= svd_rel_tol * scale;
  if (out.is_pluriharmonic) {
    for (int k = 0; k < K; ++k) {
      Complex c(sol(k), sol(K + k));
      if (std::abs(c) > 1e-10) {
        Monomial mon(int(hw.size()));
        mon.e = basis[k];
        out.witness.emplace_back(mon, c);
      }
    }
  }
  return out;
}

}  // namespace crx
