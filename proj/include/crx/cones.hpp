// Extension-direction cones in the normal space: conic hulls of collected
// directions, dimension counts, and the half-space cone comparison between
// the sector method and the Boggess-Pitts construction.
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "crx/sector.hpp"

namespace crx {

class ConeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Planar cone {y in R^2 : angle(y, e_1) < half_aperture}; apertures beyond
// pi/2 describe the non-convex "V" regions y_1 > -|y_2| tan(ha - pi/2).
struct PlanarCone {
  double half_aperture = 0.0;
};

struct ConeDescription {
  std::vector<Eigen::VectorXd> generators;
  // optional convex polyhedral form {y : <n_i, y> > 0 for all i}
  std::vector<Eigen::VectorXd> halfspaces;
  std::optional<PlanarCone> planar;  // symmetric about e_1 when set

  int ambient_dim() const {
    return generators.empty() ? 0 : int(generators.front().size());
  }
};

// Convex conic hull of a direction list; in the plane the polyhedral
// half-space form is attached, with each face tightened inward by eps
// radians.
inline ConeDescription collect_directions(const std::vector<Eigen::VectorXd>& dirs,
                                          double eps = 0.0) {
  if (dirs.empty()) throw ConeError("collect_directions: empty direction list");
  ConeDescription c;
  for (const auto& d : dirs) {
    if (d.norm() == 0.0) throw ConeError("collect_directions: zero direction");
    if (d.size() != dirs.front().size())
      throw ConeError("collect_directions: dimension mismatch");
    c.generators.push_back(d / d.norm());
  }
  if (c.ambient_dim() == 2) {
    std::vector<double> ang;
    for (const auto& g : c.generators) ang.push_back(std::atan2(g(1), g(0)));
    // salient test: all directions within an open half-plane around some ray
    double a0 = ang.front();
    double lo = 0, hi = 0;
    bool salient = true;
    for (double a : ang) {
      double d = std::remainder(a - a0, 2.0 * M_PI);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      if (hi - lo >= M_PI) salient = false;
    }
    if (salient) {
      auto ray = [&](double t) {
        Eigen::VectorXd v(2);
        v << std::cos(t), std::sin(t);
        return v;
      };
      // inward normals of the two boundary rays, rotated inward by eps
      c.halfspaces.push_back(ray(a0 + lo + eps + M_PI / 2));
      c.halfspaces.push_back(ray(a0 + hi - eps - M_PI / 2));
    }
  }
  return c;
}

inline int cone_dimension(const ConeDescription& c) {
  if (c.generators.empty()) return 0;
  Eigen::MatrixXd A(c.generators.front().size(), int(c.generators.size()));
  for (int i = 0; i < int(c.generators.size()); ++i) A.col(i) = c.generators[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  double top = svd.singularValues()(0);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * std::max(top, 1.0)) ++r;
  return r;
}

struct HalfspaceCones {
  ConeDescription bp;      // Boggess-Pitts cone {y1 > -|y2| (a1 - 1)}
  ConeDescription sector;  // sector-method cone {y1 > -|y2| (a2 - 1)}
  double a1 = 0.0;         // a / bp_coef
  double a2 = 0.0;         // a cos(p pi / 2k)
};

namespace detail {

inline ConeDescription v_cone(double c) {
  // {y1 > -|y2| c} as a planar cone about e_1 with half-aperture
  // pi/2 + atan(c)
  ConeDescription cone;
  cone.planar = PlanarCone{M_PI / 2 + std::atan(c)};
  Eigen::VectorXd e1(2), bplus(2), bminus(2);
  e1 << 1, 0;
  bplus << -c, 1;
  bminus << -c, -1;
  cone.generators = {e1, bplus / bplus.norm(), bminus / bminus.norm()};
  return cone;
}

}  // namespace detail

inline HalfspaceCones halfspace_cones(int k, int p, double a) {
  Thresholds t = thresholds(k, p);
  if (!(a > 0)) throw ConeError("halfspace_cones: a must be positive");
  HalfspaceCones hc;
  hc.a1 = a / t.bp_coef;
  hc.a2 = a * std::cos(p * M_PI / (2.0 * k));
  hc.bp = detail::v_cone(hc.a1 - 1.0);
  hc.sector = detail::v_cone(hc.a2 - 1.0);
  return hc;
}

inline bool opens_below_axis(const ConeDescription& c) {
  if (c.planar) return c.planar->half_aperture > M_PI / 2 + 1e-12;
  for (const auto& g : c.generators)
    if (g(0) < -1e-12) return true;
  return false;
}

namespace detail {

// Small Lawson-Hanson style nonnegative least squares; dimensions here are
// tiny, so a plain active-set loop suffices.
inline double nnls_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  int n = int(A.cols());
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(n);
  std::vector<bool> active(n, false);
  for (int outer = 0; outer < 4 * n + 8; ++outer) {
    Eigen::VectorXd grad = A.transpose() * (b - A * lam);
    int best = -1;
    double bg = 1e-12;
    for (int i = 0; i < n; ++i)
      if (!active[i] && grad(i) > bg) {
        bg = grad(i);
        best = i;
      }
    if (best < 0) break;
    active[best] = true;
    while (true) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (active[i]) idx.push_back(i);
      Eigen::MatrixXd Ap(A.rows(), int(idx.size()));
      for (int i = 0; i < int(idx.size()); ++i) Ap.col(i) = A.col(idx[i]);
      Eigen::VectorXd sol = Ap.colPivHouseholderQr().solve(b);
      bool ok = true;
      for (int i = 0; i < sol.size(); ++i)
        if (sol(i) < 0) ok = false;
      if (ok) {
        lam.setZero();
        for (int i = 0; i < int(idx.size()); ++i) lam(idx[i]) = sol(i);
        break;
      }
      // step back toward feasibility and drop a blocking variable
      double alpha = 1.0;
      for (int i = 0; i < int(idx.size()); ++i)
        if (sol(i) < 0) alpha = std::min(alpha, lam(idx[i]) / (lam(idx[i]) - sol(i)));
      for (int i = 0; i < int(idx.size()); ++i) {
        lam(idx[i]) += alpha * (sol(i) - lam(idx[i]));
        if (lam(idx[i]) <= 1e-14) {
          lam(idx[i]) = 0;
          active[idx[i]] = false;
        }
      }
    }
  }
  return (b - A * lam).norm();
}

}  // namespace detail

// Does outer contain inner? Planar symmetric cones compare apertures;
// otherwise inner generators are checked against outer's half-space form, or
// expressed as nonnegative combinations of outer's generators.
inline bool cone_contains(const ConeDescription& outer, const ConeDescription& inner) {
  if (outer.ambient_dim() != inner.ambient_dim())
    throw ConeError("cone_contains: dimension mismatch");
  if (outer.planar && inner.planar)
    return outer.planar->half_aperture >= inner.planar->half_aperture - 1e-12;
  if (!outer.halfspaces.empty()) {
    // closure containment: boundary generators count as inside
    for (const auto& g : inner.generators)
      for (const auto& n : outer.halfspaces)
        if (n.dot(g) < -1e-9) return false;
    return true;
  }
  Eigen::MatrixXd A(outer.ambient_dim(), int(outer.generators.size()));
  for (int i = 0; i < int(outer.generators.size()); ++i) A.col(i) = outer.generators[i];
  for (const auto& g : inner.generators)
    if (detail::nnls_residual(A, g) > 1e-9 * (1.0 + g.norm())) return false;
  return true;
}

inline nlohmann::ordered_json cone_to_json(const ConeDescription& c) {
  nlohmann::ordered_json j;
  j["generators"] = nlohmann::ordered_json::array();
  for (const auto& g : c.generators)
    j["generators"].push_back(std::vector<double>(g.data(), g.data() + g.size()));
  j["inequalities"] = nlohmann::ordered_json::array();
  for (const auto& n : c.halfspaces)
    j["inequalities"].push_back(std::vector<double>(n.data(), n.data() + n.size()));
  if (c.planar) j["half_aperture"] = c.planar->half_aperture;
  j["dimension"] = cone_dimension(c);
  return j;
}

}  // namespace crx
