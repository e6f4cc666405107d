#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crx/hormander.hpp"

using namespace crx;

namespace {

const char* kLevi = R"json({"l":1,"n":1,"blocks":[1],"weights":[2],"h":["abs2(w1)"]})json";
const char* kFlat = R"json({"l":1,"n":1,"blocks":[1],"weights":[2],"h":["0"]})json";
const char* kMain = R"json({
  "l": 2, "n": 2, "blocks": [1, 1], "weights": [2, 4],
  "h": ["abs2(w1)+abs2(w2)", "abs2(w2)^2+x1*abs2(w1)"]
})json";

std::string k4_model(double a) {
  std::ostringstream os;
  os.precision(17);
  os << R"json({"l":1,"n":1,"blocks":[1],"weights":[4],)json"
     << "\"h\":[\"abs2(w1)^2+" << a << "*abs2(w1)*Re(w1^2)\"]}";
  return os.str();
}

std::mt19937 rng(4242);

bool jet_small(const Jet& j, double tol = 1e-9) {
  for (const auto& [m, c] : j.poly().terms())
    if (std::abs(c) > tol) return false;
  return true;
}

bool field_small(const VectorFieldJet& f, double tol = 1e-9) {
  for (const auto& c : f.coef)
    if (!jet_small(c, tol)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Independent oracle: CR vector fields in the parameter space (x, w, cw) of
// the graph, L_j = d/dw_j + sum_h b_jh d/dx_h with b_j solving
// (I - i d_x h) b_j = i d_{w_j} h, i.e. L_j annihilates all x_h - i h_h.
// Filtration dimensions computed here must match the ambient computation.
// ---------------------------------------------------------------------------

struct PField {
  GraphLayout lay;
  std::vector<Jet> coef;  // over derivations d/dx (l), d/dw (n), d/dcw (n)

  Jet apply(const Jet& f) const {
    Jet r = coef[0] * f.derivative(0);
    for (int k = 1; k < int(coef.size()); ++k) r += coef[k] * f.derivative(k);
    return r;
  }
  Eigen::VectorXcd value0() const {
    Eigen::VectorXcd v(int(coef.size()));
    for (int k = 0; k < int(coef.size()); ++k) v(k) = coef[k].constant_term();
    return v;
  }
};

PField pconj(const PField& f) {
  PField r = f;
  auto swapped = [&](int k) {
    if (k < f.lay.l) return k;
    if (k < f.lay.l + f.lay.n) return k + f.lay.n;
    return k - f.lay.n;
  };
  for (int k = 0; k < int(f.coef.size()); ++k)
    r.coef[swapped(k)] = f.coef[k].with_poly(conj(f.coef[k].poly(), f.lay));
  return r;
}

PField pbracket(const PField& X, const PField& Y) {
  PField r = X;
  for (int k = 0; k < int(X.coef.size()); ++k)
    r.coef[k] = X.apply(Y.coef[k]) - Y.apply(X.coef[k]);
  return r;
}

std::vector<int> oracle_dims(const ManifoldModel& m, int cap) {
  GraphLayout lay = m.layout();
  auto gw = m.weights.graph_weights(m.n);
  const int cutoff = cap + 1;
  const int nv = lay.nvars();

  JetMatrix M(m.l, std::vector<Jet>(m.l));
  for (int h = 0; h < m.l; ++h)
    for (int t = 0; t < m.l; ++t) {
      Jet d = Jet(m.h[h], gw, cutoff).derivative(lay.x(t)) * Complex(0, -1);
      if (h == t) d += Jet::constant(nv, Complex(1), gw, cutoff);
      M[h][t] = d;
    }
  JetMatrix Minv = jet_matrix_inverse(M);

  std::vector<PField> gen;
  for (int j = 0; j < m.n; ++j) {
    PField f;
    f.lay = lay;
    f.coef.assign(nv, Jet::constant(nv, Complex(0), gw, cutoff));
    for (int h = 0; h < m.l; ++h) {
      Jet b = Jet::constant(nv, Complex(0), gw, cutoff);
      for (int t = 0; t < m.l; ++t)
        b += Minv[h][t] * Jet(m.h[t], gw, cutoff).derivative(lay.w(j));
      f.coef[lay.x(h)] = Complex(0, 1) * b;
    }
    f.coef[lay.w(j)] = Jet::constant(nv, Complex(1), gw, cutoff);
    gen.push_back(f);
  }
  {
    std::vector<PField> cg;
    for (const auto& f : gen) cg.push_back(pconj(f));
    gen.insert(gen.end(), cg.begin(), cg.end());
  }

  auto rank_of = [&](const std::vector<Eigen::VectorXcd>& cols) {
    Eigen::MatrixXcd A(nv, int(cols.size()));
    for (int c = 0; c < int(cols.size()); ++c) A.col(c) = cols[c];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-9 * std::max(top, 1.0)) ++rank;
    return rank;
  };

  std::vector<int> dims;
  std::vector<Eigen::VectorXcd> values;
  std::vector<PField> level = gen;
  for (const auto& f : level) values.push_back(f.value0());
  dims.push_back(rank_of(values));
  for (int len = 2; len <= cap; ++len) {
    std::vector<PField> next;
    for (const auto& g : gen)
      for (const auto& B : level) next.push_back(pbracket(g, B));
    for (const auto& f : next) values.push_back(f.value0());
    dims.push_back(rank_of(values));
    level = std::move(next);
  }
  return dims;
}

VectorFieldJet random_field(const AmbientLayout& lay, const std::vector<int>& aw,
                            int cutoff, bool vanish_at_origin) {
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  std::uniform_int_distribution<int> deg(vanish_at_origin ? 1 : 0, 2);
  VectorFieldJet f = VectorFieldJet::zero(lay, aw, cutoff);
  std::uniform_int_distribution<int> pick(0, lay.nvars() - 1);
  for (int k = 0; k < lay.nvars(); ++k) {
    Poly p(lay.nvars());
    for (int t = 0; t < 3; ++t) {
      Monomial m(lay.nvars());
      int d = deg(rng);
      for (int q = 0; q < d; ++q) m.e[pick(rng)] += 1;
      p.add_term(m, Complex(coef(rng), coef(rng)));
    }
    f.coef[k] = Jet(p, aw, cutoff);
  }
  return f;
}

}  // namespace

TEST_CASE("cr_basis on the flat model is exactly d/dw") {
  ManifoldModel m = parse_manifold(kFlat);
  auto X = cr_basis(m, 4);
  REQUIRE(X.size() == 1);
  AmbientLayout alay{1, 1};
  for (int k = 0; k < alay.nvars(); ++k) {
    if (k == alay.w(0))
      CHECK(X[0].coef[k].constant_term() == Complex(1));
    else
      CHECK(X[0].coef[k].is_zero());
  }
}

TEST_CASE("cr_basis on the Levi model annihilates r") {
  ManifoldModel m = parse_manifold(kLevi);
  const int J = 6;
  auto X = cr_basis(m, J);
  auto r = ambient_r(m, J);
  AmbientLayout alay{1, 1};
  CHECK(X[0].coef[alay.z(0)].constant_term() == Complex(0));
  CHECK(jet_small(X[0].apply(r[0])));
  // a = 2i cw explicitly
  Poly expect = Poly::variable(alay.nvars(), alay.cw(0)) * Complex(0, 2);
  Jet diff = X[0].coef[alay.z(0)] - Jet(expect, X[0].coef[0].weights(), J);
  CHECK(jet_small(diff));
}

TEST_CASE("cr_basis on the two-block model annihilates both r") {
  ManifoldModel m = parse_manifold(kMain);
  const int J = 6;
  auto X = cr_basis(m, J);
  auto r = ambient_r(m, J);
  REQUIRE(X.size() == 2);
  for (const auto& f : X)
    for (const auto& ri : r) CHECK(jet_small(f.apply(ri)));
}

TEST_CASE("lie_bracket basics") {
  ManifoldModel m = parse_manifold(kLevi);
  auto X = cr_basis(m, 5);
  CHECK(field_small(lie_bracket(X[0], X[0])));

  // [d/dw, w d/dz] = d/dz
  AmbientLayout alay{1, 1};
  auto aw = m.weights.ambient_weights(1);
  VectorFieldJet dw = VectorFieldJet::zero(alay, aw, 5);
  dw.coef[alay.w(0)] = Jet::constant(alay.nvars(), Complex(1), aw, 5);
  VectorFieldJet wdz = VectorFieldJet::zero(alay, aw, 5);
  wdz.coef[alay.z(0)] = Jet(Poly::variable(alay.nvars(), alay.w(0)), aw, 5);
  VectorFieldJet br = lie_bracket(dw, wdz);
  CHECK(br.coef[alay.z(0)].poly().terms() ==
        Poly::constant(alay.nvars(), Complex(1)).terms());

  // cutoff mismatch
  auto Y = cr_basis(m, 4);
  CHECK_THROWS_AS(lie_bracket(X[0], Y[0]), std::invalid_argument);
}

TEST_CASE("Jacobi identity on random fields") {
  // cutoff chosen large enough that no truncation occurs: double brackets of
  // degree-2 coefficients stay below weighted degree 30
  AmbientLayout alay{2, 1};
  WeightVector wv({1, 1}, {2, 3});
  auto aw = wv.ambient_weights(1);
  for (int trial = 0; trial < 5; ++trial) {
    auto X = random_field(alay, aw, 30, false);
    auto Y = random_field(alay, aw, 30, false);
    auto Z = random_field(alay, aw, 30, false);
    VectorFieldJet J1 = lie_bracket(X, lie_bracket(Y, Z));
    J1 += lie_bracket(Y, lie_bracket(Z, X));
    J1 += lie_bracket(Z, lie_bracket(X, Y));
    CHECK(field_small(J1, 1e-8));
  }
}

TEST_CASE("filtration on the Levi model") {
  ManifoldModel m = parse_manifold(kLevi);
  FiltrationReport rep = filtration(m, 3);
  CHECK(rep.dims == std::vector<int>{2, 3, 3});
  REQUIRE(rep.hormander_numbers.size() == 1);
  CHECK(rep.hormander_numbers[0] == std::pair<int, int>(2, 1));
  CHECK(rep.finite_type);
  CHECK(rep.message.empty());
}

TEST_CASE("filtration on the flat model reports type > cap") {
  ManifoldModel m = parse_manifold(kFlat);
  FiltrationReport rep = filtration(m, 6);
  CHECK(rep.dims == std::vector<int>(6, 2));
  CHECK(rep.hormander_numbers.empty());
  CHECK_FALSE(rep.finite_type);
  CHECK(rep.message == "type > 6");
}

TEST_CASE("filtration on the two-block model") {
  ManifoldModel m = parse_manifold(kMain);
  FiltrationReport rep = filtration(m, 5);
  REQUIRE(rep.hormander_numbers.size() == 2);
  CHECK(rep.hormander_numbers[0] == std::pair<int, int>(2, 1));
  CHECK(rep.hormander_numbers[1] == std::pair<int, int>(4, 1));
  CHECK(rep.finite_type);
  CHECK(rep.dims.front() == 4);
  CHECK(rep.dims.back() == 6);
}

TEST_CASE("filtration errors") {
  ManifoldModel m = parse_manifold(kLevi);
  CHECK_THROWS_AS(filtration(m, 1), HormanderError);
  CHECK_THROWS_AS(filtration(m, 3, 3), HormanderError);
}

TEST_CASE("filtration dims match the parameter-space oracle") {
  for (const char* doc : {kLevi, kFlat, kMain}) {
    ManifoldModel m = parse_manifold(doc);
    int cap = 5;
    CHECK(filtration(m, cap).dims == oracle_dims(m, cap));
  }
  ManifoldModel k4 = parse_manifold(k4_model(3.0));
  CHECK(filtration(k4, 4).dims == oracle_dims(k4, 4));
}

TEST_CASE("filtration dims invariant under unitary w-substitution") {
  ManifoldModel m = parse_manifold(kMain);
  // a fixed unitary mixing w1, w2 with a phase
  Complex c(0.6, 0.0), s(0.48, 0.64);  // |c|^2 + |s|^2 = 1
  GraphLayout lay = m.layout();
  const int nv = lay.nvars();
  // substitution w = U^H w~, cw = conj
  std::vector<Poly> assign(nv);
  for (int j = 0; j < m.l; ++j) assign[lay.x(j)] = Poly::variable(nv, lay.x(j));
  Poly w1 = Poly::variable(nv, lay.w(0)), w2 = Poly::variable(nv, lay.w(1));
  Poly cw1 = Poly::variable(nv, lay.cw(0)), cw2 = Poly::variable(nv, lay.cw(1));
  assign[lay.w(0)] = std::conj(c) * w1 - s * w2;
  assign[lay.w(1)] = std::conj(s) * w1 + c * w2;
  assign[lay.cw(0)] = conj(assign[lay.w(0)], lay);
  assign[lay.cw(1)] = conj(assign[lay.w(1)], lay);

  ManifoldModel mu = m;
  for (auto& h : mu.h) h = h.substitute(assign).prune(1e-14);
  mu.validate();
  CHECK(filtration(mu, 5).dims == filtration(m, 5).dims);
}

TEST_CASE("tensoriality: bracket class mod L^1 unchanged by vanishing perturbations") {
  // perturb by tangent fields vanishing at the origin: sums of f_j X_j and
  // g_j conj X_j with f_j(0) = g_j(0) = 0; the class of [X_1, conj X_1] at
  // the origin modulo L^1 depends only on the initial values
  ManifoldModel m = parse_manifold(kMain);
  const int J = 5;
  auto X = cr_basis(m, J);
  std::vector<VectorFieldJet> Xb{conjugate(X[0]), conjugate(X[1])};
  Eigen::VectorXcd b0 = lie_bracket(X[0], Xb[0]).value_at_origin();

  AmbientLayout alay{2, 2};
  auto aw = m.weights.ambient_weights(2);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  std::uniform_int_distribution<int> pick(0, alay.nvars() - 1);
  auto random_vanishing_scalar = [&]() {
    Poly p(alay.nvars());
    for (int t = 0; t < 3; ++t) {
      Monomial mo(alay.nvars());
      mo.e[pick(rng)] += 1;
      if (t % 2) mo.e[pick(rng)] += 1;
      p.add_term(mo, Complex(coef(rng), coef(rng)));
    }
    return Jet(p, aw, J);
  };
  auto scale = [&](const VectorFieldJet& f, const Jet& s) {
    VectorFieldJet r = f;
    for (auto& c : r.coef) c = c * s;
    return r;
  };

  Eigen::MatrixXcd L1(alay.nvars(), 4);
  L1.col(0) = X[0].value_at_origin();
  L1.col(1) = X[1].value_at_origin();
  L1.col(2) = Xb[0].value_at_origin();
  L1.col(3) = Xb[1].value_at_origin();

  for (int trial = 0; trial < 5; ++trial) {
    VectorFieldJet Xp = X[0] + scale(X[0], random_vanishing_scalar()) +
                        scale(X[1], random_vanishing_scalar());
    VectorFieldJet Xbp = Xb[0] + scale(Xb[0], random_vanishing_scalar()) +
                         scale(Xb[1], random_vanishing_scalar());
    Eigen::VectorXcd b1 = lie_bracket(Xp, Xbp).value_at_origin();
    Eigen::VectorXcd d = b1 - b0;
    Eigen::VectorXcd res = d - L1 * L1.colPivHouseholderQr().solve(d);
    CHECK(res.norm() < 1e-8 * std::max(1.0, b0.norm()));
  }
}

TEST_CASE("brackets below m_2 lie in the predicted span") {
  // all brackets of length <= m_2 - 1 = 3 at the origin lie in
  // span{d/dw, d/dcw, d/dx_{I_1}} with d/dx_1 = d/dz_1 + d/dcz_1
  ManifoldModel m = parse_manifold(kMain);
  const int J = 5;
  auto gen = cr_basis(m, J);
  {
    std::vector<VectorFieldJet> cg;
    for (const auto& X : gen) cg.push_back(conjugate(X));
    gen.insert(gen.end(), cg.begin(), cg.end());
  }
  AmbientLayout alay{2, 2};
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(alay.nvars(), 5);
  for (int j = 0; j < 2; ++j) {
    S(alay.w(j), j) = 1;
    S(alay.cw(j), 2 + j) = 1;
  }
  S(alay.z(0), 4) = 1;
  S(alay.cz(0), 4) = 1;

  std::vector<VectorFieldJet> level = gen;
  for (int len = 2; len <= 3; ++len) {
    std::vector<VectorFieldJet> next;
    for (const auto& g : gen)
      for (const auto& B : level) next.push_back(lie_bracket(g, B));
    level = std::move(next);
    for (const auto& B : level) {
      Eigen::VectorXcd v = B.value_at_origin();
      Eigen::VectorXcd res = v - S * S.colPivHouseholderQr().solve(v);
      CHECK(res.norm() < 1e-8 * std::max(1.0, v.norm()));
    }
  }
}

TEST_CASE("bracket_pairing on explicit examples") {
  ManifoldModel levi = parse_manifold(kLevi);
  auto p = bracket_pairing({+1, -1}, levi, 0);
  REQUIRE(p.size() == 1);
  CHECK(std::abs(p(0) - Complex(1)) < 1e-10);

  ManifoldModel flat = parse_manifold(kFlat);
  CHECK(bracket_pairing({+1, -1}, flat, 0).norm() < 1e-12);
  CHECK(bracket_pairing({+1, +1, -1}, flat, 0).norm() < 1e-12);

  // two-block model: length-2 word pairs to zero against the heavier block
  ManifoldModel m = parse_manifold(kMain);
  CHECK(bracket_pairing({+1, -1}, m, 1).norm() < 1e-10);
  CHECK(bracket_pairing({+1, -1}, m, 1, 1).norm() < 1e-10);
}

TEST_CASE("bracket_pairing reproduces derivative values on the quartic model") {
  // h = |w|^4 + a|w|^2 Re w^2; pairing of a word with m occurrences of X and
  // n of conj X at total length 4 equals d_w^m dbar_w^n h(0)
  double a = 3.0;
  ManifoldModel m = parse_manifold(k4_model(a));
  // d^2 dbar^2 h(0) = 4, d^3 dbar h(0) = 3a, d dbar^3 h(0) = 3a
  auto p22 = bracket_pairing({+1, -1, +1, -1}, m, 0);
  CHECK(std::abs(p22(0) - Complex(4)) < 1e-9);
  auto p22b = bracket_pairing({-1, +1, +1, -1}, m, 0);
  CHECK(std::abs(p22b(0) - Complex(4)) < 1e-9);
  auto p31 = bracket_pairing({+1, +1, +1, -1}, m, 0);
  CHECK(std::abs(p31(0) - Complex(3 * a)) < 1e-9);
  auto p13 = bracket_pairing({-1, -1, +1, -1}, m, 0);
  CHECK(std::abs(p13(0) - Complex(3 * a)) < 1e-9);
}

TEST_CASE("bp_direction closed form") {
  // quartic hypersurface: c_phi = 2 + a cos(2 phi)
  double a = 3.0;
  ManifoldModel m = parse_manifold(k4_model(a));
  LineRestriction line = restrict_to_line(m, 0);
  auto v0 = bp_direction(line, 4, 0.0);
  CHECK(v0(0) == doctest::Approx(2 + a).epsilon(1e-12));
  auto vq = bp_direction(line, 4, M_PI / 2);
  CHECK(vq(0) == doctest::Approx(-1.0).epsilon(1e-12));

  // Levi: k = 2 gives v = (1)
  ManifoldModel levi = parse_manifold(kLevi);
  auto vl = bp_direction(restrict_to_line(levi, 0), 2, 0.7);
  CHECK(vl(0) == doctest::Approx(1.0).epsilon(1e-12));

  // sign change exactly at a = 2 (phi = pi/2 is the minimizing phase)
  for (double eps : {1e-6, 1e-3}) {
    ManifoldModel lo = parse_manifold(k4_model(2 - eps));
    ManifoldModel hi = parse_manifold(k4_model(2 + eps));
    CHECK(bp_direction(restrict_to_line(lo, 0), 4, M_PI / 2)(0) > 0);
    CHECK(bp_direction(restrict_to_line(hi, 0), 4, M_PI / 2)(0) < 0);
  }

  // errors: k not the first weight, or infinite
  CHECK_THROWS_AS(bp_direction(restrict_to_line(levi, 0), 4, 0.0), HormanderError);
  CHECK_THROWS_AS(bp_direction(restrict_to_line(levi, 0), kInfiniteWeight, 0.0),
                  HormanderError);
}
