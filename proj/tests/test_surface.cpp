#include "pshlab/error.hpp"
#include "pshlab/surface.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace pshlab;
using namespace pshlab::surface;

namespace {

// Hyperbolic area of a geodesic triangle from its angle defect.
double hyperbolic_area(const std::array<hypgeom::ModelPoint, 3>& t) {
  double angles = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto u = hypgeom::log_map(t[k], t[(k + 1) % 3]).components;
    const auto v = hypgeom::log_map(t[k], t[(k + 2) % 3]).components;
    angles += std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
  }
  return std::acos(-1.0) - angles;
}

double signed_area(const std::array<hypgeom::ModelPoint, 3>& t) {
  const auto a = t[1].coords - t[0].coords, b = t[2].coords - t[0].coords;
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

}  // namespace

TEST_CASE("torus mesh has the expected combinatorics") {
  for (int n : {2, 3, 8}) {
    const Surface s = build_torus(n);
    CHECK(s.mesh.num_vertices() == n * n);
    CHECK(s.mesh.num_faces() == 2 * n * n);
    CHECK(s.mesh.euler_characteristic() == 0);
    CHECK(s.mesh.validate().ok());
    double area = 0.0;
    for (int f = 0; f < s.mesh.num_faces(); ++f) {
      const double a = signed_area(s.face_lift(f));
      CHECK(a == doctest::Approx(0.5 / (n * n)));
      area += a;
    }
    CHECK(area == doctest::Approx(1.0));
  }
}

TEST_CASE("octagon side pairings satisfy the surface relation") {
  const auto gens = octagon_side_pairings();
  Development dev;
  dev.model = hypgeom::Model::HyperbolicDisk;
  dev.generators = gens;
  CHECK(dev.evaluate("abABcdCD").deviation_from_identity() < 1e-9);
  for (const auto& [letter, g] : gens) CHECK(std::abs(g.trace()) > 2.0);
  // The pairing a maps the octagon corner set to itself.
  const double rc = octagon_corner_radius();
  const double pi = std::acos(-1.0);
  for (const auto& [letter, g] : gens) {
    int hits = 0;
    for (int k = 0; k < 8; ++k) {
      const auto c = hypgeom::ModelPoint::disk(rc * std::cos(k * pi / 4), rc * std::sin(k * pi / 4));
      const auto img = g.apply(c);
      for (int j = 0; j < 8; ++j)
        if (std::abs(img.z() - std::polar(rc, j * pi / 4)) < 1e-9) ++hits;
    }
    CHECK(hits == 2);
  }
}

TEST_CASE("genus-two octagon mesh") {
  const Surface s = build_genus2_octagon(0);
  CHECK(s.mesh.genus() == 2);
  CHECK(s.mesh.num_faces() == 128);
  CHECK(s.mesh.euler_characteristic() == -2);
  CHECK(s.mesh.validate().ok());
  double area = 0.0;
  for (int f = 0; f < s.mesh.num_faces(); ++f) {
    const auto t = s.face_lift(f);
    CHECK(signed_area(t) > 0.0);
    area += hyperbolic_area(t);
  }
  // Gauss-Bonnet: area 4 pi for genus two.
  CHECK(area == doctest::Approx(4.0 * std::acos(-1.0)).epsilon(1e-9));
}

TEST_CASE("refinement preserves validity and lifts") {
  const Surface s = build_genus2_octagon(0);
  const RefinementMap r = refine(s);
  CHECK(r.child.mesh.num_faces() == 4 * s.mesh.num_faces());
  CHECK(r.child.mesh.num_vertices() == s.mesh.num_vertices() + s.mesh.num_edges());
  CHECK(r.child.mesh.validate().ok());
  CHECK(r.provenance.size() == static_cast<size_t>(r.child.mesh.num_vertices()));
  double area = 0.0;
  for (int f = 0; f < r.child.mesh.num_faces(); ++f) {
    const auto t = r.child.face_lift(f);
    CHECK(signed_area(t) > 0.0);
    area += hyperbolic_area(t);
  }
  CHECK(area == doctest::Approx(4.0 * std::acos(-1.0)).epsilon(1e-9));
}

TEST_CASE("refined torus is isomorphic to the finer grid") {
  const Surface coarse = build_torus(3);
  const Surface fine = refine(coarse).child;
  const Surface direct = build_torus(6);
  CHECK(fine.mesh.num_vertices() == direct.mesh.num_vertices());
  CHECK(fine.mesh.num_faces() == direct.mesh.num_faces());
  auto key = [](const hypgeom::ModelPoint& p) {
    auto wrap = [](double x) {
      const long k = std::lround(std::fmod(x + 10.0, 1.0) * 6.0) % 6;
      return k;
    };
    return std::make_pair(wrap(p.coords.x()), wrap(p.coords.y()));
  };
  std::map<std::pair<long, long>, int> by_pos;
  for (int v = 0; v < direct.mesh.num_vertices(); ++v) by_pos[key(direct.dev.position[v])] = v;
  REQUIRE(by_pos.size() == 36u);
  std::vector<int> perm(fine.mesh.num_vertices());
  for (int v = 0; v < fine.mesh.num_vertices(); ++v) perm[v] = by_pos.at(key(fine.dev.position[v]));
  // Every refined face, developed, is a face of the direct grid up to translation.
  int matched = 0;
  for (int f = 0; f < fine.mesh.num_faces(); ++f) {
    const auto t = fine.face_lift(f);
    CHECK(std::abs(signed_area(t)) == doctest::Approx(0.5 / 36));
    const auto fv = fine.mesh.face_vertices(f);
    for (int g = 0; g < direct.mesh.num_faces(); ++g) {
      const auto dv = direct.mesh.face_vertices(g);
      for (int rot = 0; rot < 3; ++rot) {
        if (perm[fv[0]] == dv[rot] && perm[fv[1]] == dv[(rot + 1) % 3] &&
            perm[fv[2]] == dv[(rot + 2) % 3]) {
          const auto u = direct.face_lift(g);
          const auto d0 = t[1].coords - t[0].coords;
          const auto e0 = u[(rot + 1) % 3].coords - u[rot].coords;
          if ((d0 - e0).norm() < 1e-12) ++matched;
        }
      }
    }
  }
  CHECK(matched == fine.mesh.num_faces());
}

TEST_CASE("validation reports corrupt meshes") {
  const Surface s = build_torus(3);
  const HalfEdgeMesh& m = s.mesh;
  std::vector<Halfedge> hes;
  for (int h = 0; h < m.num_halfedges(); ++h) hes.push_back(m.halfedge(h));

  SUBCASE("twin fixed point") {
    auto bad = hes;
    const int t = bad[0].twin;
    bad[0].twin = 0;
    bad[t].twin = t;
    CHECK_FALSE(HalfEdgeMesh::from_raw(m.num_vertices(), bad, m.labels(), 1).validate().ok());
  }
  SUBCASE("label not inverse of twin") {
    auto labels = m.labels();
    labels[0] += "a";
    CHECK_FALSE(HalfEdgeMesh::from_raw(m.num_vertices(), hes, labels, 1).validate().ok());
  }
  SUBCASE("nontrivial face word") {
    // Shift a label pair by a generator: twins stay inverse but the face word breaks.
    auto labels = m.labels();
    labels[0] = free_reduce(labels[0] + "a");
    labels[m.twin(0)] = inverse_word(labels[0]);
    const auto report = HalfEdgeMesh::from_raw(m.num_vertices(), hes, labels, 1).validate();
    CHECK_FALSE(report.ok());
  }
  SUBCASE("wrong genus") {
    CHECK_FALSE(HalfEdgeMesh::from_raw(m.num_vertices(), hes, m.labels(), 2).validate().ok());
  }
  SUBCASE("orientation flip") {
    auto bad = hes;
    std::swap(bad[0].origin, bad[1].origin);
    CHECK_FALSE(HalfEdgeMesh::from_raw(m.num_vertices(), bad, m.labels(), 1).validate().ok());
  }
  SUBCASE("from_faces throws structured errors") {
    std::vector<std::array<int, 3>> faces{{0, 1, 2}};
    try {
      (void)HalfEdgeMesh::from_faces(3, faces, {"", "", ""}, 1);
      FAIL("expected an invalid mesh");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidMesh);
    }
  }
}

TEST_CASE("mesh JSON round trip") {
  const Surface s = build_genus2_octagon(0);
  const Surface back = surface_from_json(surface_to_json(s));
  CHECK(back.mesh.num_faces() == s.mesh.num_faces());
  CHECK(back.mesh.labels() == s.mesh.labels());
  for (int v = 0; v < s.mesh.num_vertices(); ++v)
    CHECK((back.dev.position[v].coords - s.dev.position[v].coords).norm() < 1e-15);
  CHECK(back.dev.evaluate("abABcdCD").deviation_from_identity() < 1e-9);
  CHECK_THROWS_AS(surface_from_json("{\"genus\": 1}"), Error);
  CHECK_THROWS_AS(surface_from_json("not json"), Error);
}
