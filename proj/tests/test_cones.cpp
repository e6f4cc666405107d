#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crx/bishop.hpp"
#include "crx/cones.hpp"

using namespace crx;

namespace {

Eigen::VectorXd v2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

std::mt19937 rng(31);

}  // namespace

TEST_CASE("collect_directions quadrant and ray") {
  ConeDescription q = collect_directions({v2(1, 0), v2(0, 1)});
  CHECK(cone_dimension(q) == 2);
  REQUIRE(q.halfspaces.size() == 2);
  // inward normals of the positive quadrant are the axes themselves
  for (const auto& n : q.halfspaces) {
    CHECK(n.dot(v2(1, 1) / std::sqrt(2.0)) > 0.5);
    CHECK(std::min(std::abs(n.dot(v2(1, 0))), std::abs(n.dot(v2(0, 1)))) < 1e-12);
  }

  ConeDescription ray = collect_directions({v2(0.3, 0.4)});
  CHECK(cone_dimension(ray) == 1);
  CHECK(ray.generators[0].norm() == doctest::Approx(1.0));

  CHECK_THROWS_AS(collect_directions({v2(0, 0)}), ConeError);
  CHECK_THROWS_AS(collect_directions({}), ConeError);
}

TEST_CASE("epsilon tightening shrinks the cone") {
  ConeDescription loose = collect_directions({v2(1, 0), v2(0, 1)}, 0.0);
  ConeDescription tight = collect_directions({v2(1, 0), v2(0, 1)}, 0.1);
  // the boundary generator fails the tightened inequalities
  bool boundary_in = true;
  for (const auto& n : tight.halfspaces)
    if (n.dot(v2(1, 0)) < -1e-9) boundary_in = false;
  CHECK_FALSE(boundary_in);
  CHECK(cone_contains(loose, tight));
}

TEST_CASE("cone_contains pinned examples") {
  ConeDescription quadrant = collect_directions({v2(1, 0), v2(0, 1)});
  ConeDescription halfplane = collect_directions({v2(0, 1), v2(1, 0), v2(0, -1)});
  CHECK(halfplane.halfspaces.empty());  // not salient, generator form only
  CHECK(cone_contains(halfplane, quadrant));
  CHECK_FALSE(cone_contains(quadrant, halfplane));
  CHECK_THROWS_AS(cone_contains(quadrant, collect_directions({Eigen::VectorXd::Ones(3)})),
                  ConeError);
}

TEST_CASE("collect_directions is monotone") {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::VectorXd> dirs;
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd d(3);
      d << U(rng), U(rng), U(rng) + 2.0;
      dirs.push_back(d);
    }
    ConeDescription small = collect_directions(dirs);
    Eigen::VectorXd extra(3);
    extra << U(rng), U(rng), U(rng) + 2.0;
    dirs.push_back(extra);
    ConeDescription big = collect_directions(dirs);
    CHECK(cone_contains(big, small));
  }
}

TEST_CASE("cone_dimension equals independent matrix rank") {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::VectorXd> dirs;
    int amb = 4;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(amb);
      for (int j = 0; j < amb; ++j) d(j) = U(rng);
      dirs.push_back(d);
    }
    dirs.push_back(dirs[0] + dirs[1]);  // dependent direction
    ConeDescription c = collect_directions(dirs);
    Eigen::MatrixXd A(amb, int(dirs.size()));
    for (int i = 0; i < int(dirs.size()); ++i) A.col(i) = dirs[i];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-9);
    CHECK(cone_dimension(c) == int(lu.rank()));
  }
}

TEST_CASE("halfspace_cones pinned comparison k=4 p=2") {
  HalfspaceCones hc = halfspace_cones(4, 2, 3.0);
  CHECK(hc.a1 == doctest::Approx(1.5));
  CHECK(hc.a2 == doctest::Approx(3.0 / std::sqrt(2.0)));
  // bp cone {y1 > -|y2|/2}: boundary ray (-1/2, 1) normalized
  CHECK(hc.bp.planar->half_aperture == doctest::Approx(M_PI / 2 + std::atan(0.5)));
  CHECK(hc.sector.planar->half_aperture ==
        doctest::Approx(M_PI / 2 + std::atan(3.0 / std::sqrt(2.0) - 1.0)));
  CHECK(cone_contains(hc.sector, hc.bp));
  CHECK_FALSE(cone_contains(hc.bp, hc.sector));

  // boundary case a = 2: bp degenerates to the half-plane y1 > 0
  HalfspaceCones h2 = halfspace_cones(4, 2, 2.0);
  CHECK(h2.a1 == doctest::Approx(1.0));
  CHECK(h2.bp.planar->half_aperture == doctest::Approx(M_PI / 2));
  CHECK_FALSE(opens_below_axis(h2.bp));

  CHECK_THROWS_AS(halfspace_cones(4, 2, -1.0), ConeError);
  CHECK_THROWS_AS(halfspace_cones(5, 2, 1.0), SectorError);
}

TEST_CASE("sector-only regime: sector cone dips below the axis, bp does not") {
  Thresholds t = thresholds(4, 2);
  for (double a : {1.45, 1.8, 2.0}) {
    REQUIRE(a > t.sector_coef);
    REQUIRE(a <= t.bp_coef);
    HalfspaceCones hc = halfspace_cones(4, 2, a);
    CHECK(opens_below_axis(hc.sector));
    CHECK_FALSE(opens_below_axis(hc.bp));
    CHECK(cone_contains(hc.sector, hc.bp));
  }
  // above both thresholds each cone opens below
  HalfspaceCones hc = halfspace_cones(4, 2, 3.0);
  CHECK(opens_below_axis(hc.bp));
  CHECK(opens_below_axis(hc.sector));
}

TEST_CASE("eta-ladder directions on a two-block model span the normal space") {
  ManifoldModel m = parse_manifold(R"json({
    "l": 2, "n": 2, "blocks": [1, 1], "weights": [2, 4],
    "h": ["abs2(w1)+abs2(w2)", "abs2(w2)^2+x1*abs2(w1)"]})json");
  CircleGrid g(256);
  std::vector<Eigen::VectorXd> dirs;
  for (double eta : {0.1, 0.3}) {
    std::vector<BoundaryFn> w = {
        BoundaryFn::constant(g, Complex(0)),
        BoundaryFn::from_sampler(
            g, [eta](double t) { return eta * (1.0 - std::polar(1.0, t)); })};
    DiscSolution d = solve_bishop(m, w, Eigen::VectorXd::Zero(2));
    dirs.push_back(-radial_derivative_at_one(d));
  }
  ConeDescription c = collect_directions(dirs);
  CHECK(cone_dimension(c) == 2);  // l1 + l2
}

TEST_CASE("cone_to_json shape") {
  ConeDescription q = collect_directions({v2(1, 0), v2(0, 1)});
  auto j = cone_to_json(q);
  CHECK(j["generators"].size() == 2);
  CHECK(j["inequalities"].size() == 2);
  CHECK(j["dimension"] == 2);
  auto jp = cone_to_json(halfspace_cones(4, 2, 3.0).bp);
  CHECK(jp.contains("half_aperture"));
}
