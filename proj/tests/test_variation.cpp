#include "pshlab/variation.hpp"

#include <doctest.h>

#include <cmath>

using namespace pshlab;
using namespace pshlab::variation;

namespace {

target::Target torus_target(const Eigen::Matrix2i& degree) {
  return target::flat_torus_target(Eigen::Matrix2d::Identity(), degree);
}

Eigen::Matrix2i diag21() {
  Eigen::Matrix2i d;
  d << 2, 0, 0, 1;
  return d;
}

// Energy of the class `degree` over the sheared torus z -> z + nu conj z.
double sheared_oracle(cplx nu, const Eigen::Matrix2i& degree) {
  const cplx a = 1.0 + nu, b = cplx(0.0, 1.0) + nu * cplx(0.0, -1.0);
  return target::torus_harmonic_oracle(b / a, Eigen::Matrix2d::Identity(), degree).energy;
}

}  // namespace

TEST_CASE("five-point Laplacian is exact on quadratics") {
  auto e = [](double s, double t) { return 1.0 + 3.0 * s * s + 2.0 * t * t + s * t + 0.5 * s; };
  const double h = 0.1;
  CHECK(five_point(e(0, 0), e(h, 0), e(-h, 0), e(0, h), e(0, -h), h) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("torus stencil energies match the sheared-torus oracle") {
  const auto s = surface::build_torus(8);
  const cplx mu(0.2, 0.1);
  for (const Eigen::Matrix2i& degree : {Eigen::Matrix2i(Eigen::Matrix2i::Identity()), diag21()}) {
    const auto t = torus_target(degree);
    const conformal::DiskFamily fam(conformal::structure_from_surface(s), conformal::BeltramiField::constant(s, mu), 0.9);
    StencilOptions opt;
    opt.h = 0.05;
    const Eigen::Matrix2d lin = degree.cast<double>();
    const StencilGrid g = energy_stencil(fam, s.mesh, t, harmonic::affine_torus_map(s, lin), opt);
    CHECK(g.nodes.size() == 13);
    for (const auto& n : g.nodes)
      CHECK(n.energy == doctest::Approx(sheared_oracle(cplx(n.i, n.j) * g.h * mu, degree)).epsilon(1e-9));
  }
  // Identity class: E(nu) = (1 + |nu|^2) / (1 - |nu|^2), so Delta E = 8 |mu|^2.
  CHECK(sheared_oracle(0.3, Eigen::Matrix2i::Identity()) == doctest::Approx(1.09 / 0.91).epsilon(1e-12));
}

TEST_CASE("torus certificates") {
  const auto s = surface::build_torus(8);
  const conformal::ConformalStructure base = conformal::structure_from_surface(s);
  StencilOptions opt;
  opt.h = 0.05;

  SUBCASE("identity class, constant mu") {
    const auto t = torus_target(Eigen::Matrix2i::Identity());
    const conformal::DiskFamily fam(base, conformal::BeltramiField::constant(s, {0.2, 0.1}), 0.9);
    const StencilGrid g = energy_stencil(fam, s.mesh, t, harmonic::map_from_development(s, t), opt);
    const PshCertificate c = ledger({fam, s.mesh, t, g});
    CHECK(c.delta_E_extrapolated == doctest::Approx(8.0 * 0.05).epsilon(1e-6));
    CHECK(std::abs(c.a) < 1e-12);
    CHECK(c.b == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(c.rho == 0.0);
    CHECK(c.hopf_norm < 1e-12);
    CHECK_FALSE(c.first_variation.c.has_value());
    CHECK(c.verdict == Verdict::Pass);
  }
  SUBCASE("degree (2,1), constant mu: the Hopf pairing gives c = -4") {
    const auto t = torus_target(diag21());
    const conformal::DiskFamily fam(base, conformal::BeltramiField::constant(s, {0.2, 0.1}), 0.9);
    const Eigen::Matrix2d lin = diag21().cast<double>();
    const StencilGrid g = energy_stencil(fam, s.mesh, t, harmonic::affine_torus_map(s, lin), opt);
    const PshCertificate c = ledger({fam, s.mesh, t, g});
    // E(nu) = (10 - 12 Re nu + 10 |nu|^2) / (4 (1 - |nu|^2)) gives dE/ds = -3 Re mu,
    // Delta E = 20 |mu|^2 and Q = 3/4.
    CHECK(c.hopf_norm == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(c.first_variation.dEs == doctest::Approx(-3.0 * 0.2).epsilon(1e-6));
    REQUIRE(c.first_variation.c.has_value());
    CHECK(*c.first_variation.c == doctest::Approx(-4.0).epsilon(1e-6));
    CHECK(c.delta_E_extrapolated == doctest::Approx(20.0 * 0.05).epsilon(1e-6));
  }
  SUBCASE("degree (2,1), random mu: flat ledger") {
    const auto t = torus_target(diag21());
    const conformal::DiskFamily fam(base, conformal::BeltramiField::random(s, 3, 0.3), 0.9);
    const Eigen::Matrix2d lin = diag21().cast<double>();
    const StencilGrid g = energy_stencil(fam, s.mesh, t, harmonic::affine_torus_map(s, lin), opt);
    const PshCertificate c = ledger({fam, s.mesh, t, g});
    CHECK(c.rho == 0.0);
    CHECK(c.a > 0.0);
    CHECK(std::abs(c.alpha - 0.5 * c.a) < 1e-6 * c.a);
    CHECK(c.r1 < 1e-5 * c.b);
    CHECK(c.convention == WConvention::TPlusIS);
    CHECK(c.verdict == Verdict::Pass);
    CHECK(c.first_variation.residual < 1e-6);
  }
}

TEST_CASE("genus-two certificate") {
  const auto s = surface::build_genus2_octagon(0);
  const auto t = target::octagon_generators();
  const conformal::DiskFamily fam(conformal::structure_from_surface(s), conformal::BeltramiField::random(s, 5, 0.3), 0.9);
  StencilOptions opt;
  opt.h = 0.04;
  const StencilGrid g = energy_stencil(fam, s.mesh, t, harmonic::map_from_development(s, t), opt);
  const PshCertificate c = ledger({fam, s.mesh, t, g});
  CHECK(c.verdict == Verdict::Pass);
  CHECK(c.delta_E > c.epsilon);
  CHECK(c.rho <= 0.0);
  CHECK(c.r1 < 1e-4 * c.b);
  CHECK(c.r2 < 0.05 * c.a);
  CHECK(c.convention == WConvention::TPlusIS);
  const auto& other = c.by_convention.at(WConvention::SPlusIT);
  CHECK(c.by_convention.at(c.convention).pairing_residual < 0.1 * other.pairing_residual);
  CHECK(std::abs(c.calibration_s - cplx(0.0, 2.0)) < 1e-8);
}

TEST_CASE("zero direction gives W = 0") {
  const auto s = surface::build_torus(6);
  const auto t = torus_target(diag21());
  const conformal::DiskFamily fam(conformal::structure_from_surface(s), conformal::BeltramiField::zero(s.mesh.num_faces()), 0.9);
  StencilOptions opt;
  opt.h = 0.05;
  const StencilGrid g = energy_stencil(fam, s.mesh, t, harmonic::affine_torus_map(s, diag21().cast<double>()), opt);
  const harmonic::EnergyProblem p(s.mesh, fam.base, t);
  const Variation v = variation_W(g, p);
  for (cplx x : v.fs.v) CHECK(x == 0.0);
  for (cplx x : v.ft.v) CHECK(x == 0.0);
  CHECK(laplacian_E(g) == 0.0);
  CHECK_THROWS_AS(default_step(fam.direction), Error);
}

TEST_CASE("tangency diagnostic") {
  const auto s = surface::build_genus2_octagon(1);
  const auto t = target::octagon_generators();
  const auto base = conformal::structure_from_surface(s);
  const harmonic::EnergyProblem p(s.mesh, base, t);
  const auto f = harmonic::solve_harmonic(p, harmonic::map_from_development(s, t)).map;
  const FaceFrames frames(s.mesh, base, t);
  std::vector<double> lambda;
  for (const auto& q : s.dev.position) lambda.push_back(1.0 + 0.5 * q.z().real());
  const auto [re, im] = synthetic_tangent_field(frames, f, lambda);
  const std::vector<cplx> zero(s.mesh.num_faces(), 0.0);
  const Tangency tangent = tangency_diagnostic(frames, f, re, im, zero);
  const Tangency generic =
      tangency_diagnostic(frames, f, harmonic::random_field(f, 1), harmonic::random_field(f, 2), zero);
  CHECK(tangent.defect < 0.05);
  CHECK(generic.defect > 10.0 * tangent.defect);
  const auto none = harmonic::VertexField::zeros(f);
  const Tangency nothing = tangency_diagnostic(frames, f, none, none, zero);
  CHECK(nothing.defect == 0.0);
  CHECK(nothing.parallel_residual == 0.0);
}

TEST_CASE("second variation identity converges") {
  const auto s = surface::build_torus(8);
  const auto t = torus_target(diag21());
  const conformal::DiskFamily fam(conformal::structure_from_surface(s), conformal::BeltramiField::random(s, 3, 0.3), 0.9);
  double prev = 0.0;
  for (double h : {0.08, 0.04}) {
    StencilOptions opt;
    opt.h = h;
    const StencilGrid g = energy_stencil(fam, s.mesh, t, harmonic::affine_torus_map(s, diag21().cast<double>()), opt);
    const harmonic::EnergyProblem p(s.mesh, fam.base, t);
    const SecondVariation sv = second_variation_identity({fam, s.mesh, t, g}, variation_W(g, p));
    CHECK(sv.residual < 1e-3 * std::abs(sv.lhs));
    if (prev > 0.0) CHECK(prev / sv.residual == doctest::Approx(4.0).epsilon(0.15));
    prev = sv.residual;
  }
}

TEST_CASE("stencil determinism and failures") {
  const auto s = surface::build_genus2_octagon(0);
  const auto t = target::octagon_generators();
  const conformal::DiskFamily fam(conformal::structure_from_surface(s), conformal::BeltramiField::random(s, 8, 0.3), 0.9);
  StencilOptions one;
  one.h = 0.04;
  StencilOptions three = one;
  three.threads = 3;
  const auto f0 = harmonic::map_from_development(s, t);
  const StencilGrid a = energy_stencil(fam, s.mesh, t, f0, one);
  const StencilGrid b = energy_stencil(fam, s.mesh, t, f0, three);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (size_t k = 0; k < a.nodes.size(); ++k) {
    CHECK(a.nodes[k].energy == b.nodes[k].energy);
    CHECK(a.nodes[k].map.z == b.nodes[k].map.z);
  }

  StencilOptions far = one;
  far.h = 0.5;
  CHECK_THROWS_AS(energy_stencil(fam, s.mesh, t, f0, far), Error);

  StencilOptions starved = one;
  starved.solver.max_iters = 1;
  const auto centre = a.at(0, 0).map;
  try {
    energy_stencil(fam, s.mesh, t, centre, starved);
    FAIL("expected a stencil failure");
  } catch (const StencilError& e) {
    CHECK(e.partial().nodes.size() == 1);
    CHECK(e.partial().has(0, 0));
  }
}

TEST_CASE("certificate depends on the disk only through its first-order data") {
  const auto s = surface::build_genus2_octagon(0);
  const auto t = target::octagon_generators();
  const auto f0 = harmonic::map_from_development(s, t);
  conformal::DiskFamily plain(conformal::structure_from_surface(s), conformal::BeltramiField::random(s, 5, 0.3), 0.9);
  conformal::DiskFamily bent = plain;
  bent.second_order = conformal::BeltramiField::random(s, 9, 0.3);
  StencilOptions opt;
  opt.h = 0.04;
  const StencilGrid gp = energy_stencil(plain, s.mesh, t, f0, opt);
  const StencilGrid gb = energy_stencil(bent, s.mesh, t, f0, opt);
  const PshCertificate cp = ledger({plain, s.mesh, t, gp});
  const PshCertificate cb = ledger({bent, s.mesh, t, gb});
  // u^2 mu2 adds Re(B u^2) to E, which the Laplacian removes up to O(h^2).
  CHECK(std::abs(gb.energy(1, 0) - gp.energy(1, 0)) > 1e-3 * std::abs(cp.delta_E) * opt.h * opt.h);
  CHECK(std::abs(cb.delta_E_extrapolated - cp.delta_E_extrapolated) < cp.epsilon);
  CHECK(cb.a == doctest::Approx(cp.a).epsilon(1e-3));
  CHECK(cb.b == doctest::Approx(cp.b).epsilon(1e-6));  // s is calibrated by differences that see mu2
  CHECK(cb.verdict == Verdict::Pass);
}
