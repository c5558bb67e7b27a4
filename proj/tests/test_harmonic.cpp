#include "pshlab/harmonic.hpp"

#include <doctest.h>

#include <cmath>

using namespace pshlab;
using namespace pshlab::harmonic;

namespace {

target::Target unit_torus() { return target::flat_torus_target(Eigen::Matrix2d::Identity(), Eigen::Matrix2i::Identity()); }

// Largest vertex offset after removing the mean translation.
double aligned_distance(const EquivariantMap& f, const EquivariantMap& g) {
  cplx shift = 0.0;
  for (size_t i = 0; i < f.z.size(); ++i) shift += g.z[i] - f.z[i];
  shift /= static_cast<double>(f.z.size());
  double worst = 0.0;
  for (size_t i = 0; i < f.z.size(); ++i) worst = std::max(worst, std::abs(g.z[i] - shift - f.z[i]));
  return worst;
}

}  // namespace

TEST_CASE("torus solves match the affine oracle") {
  Eigen::Matrix2d lattice;
  lattice << 1.0, 0.3, 0.0, 0.9;
  Eigen::Matrix2i degree;
  degree << 2, 0, 1, 1;
  const auto s = surface::build_torus(8);
  const auto t = target::flat_torus_target(lattice, degree);
  const auto oracle = target::torus_harmonic_oracle(cplx(0.0, 1.0), lattice, degree);
  const EnergyProblem p(s.mesh, conformal::structure_from_surface(s), t);
  const EquivariantMap exact = affine_torus_map(s, oracle.linear);
  CHECK(p.energy(exact) == doctest::Approx(oracle.energy).epsilon(1e-12));

  const auto r = solve_harmonic(p, perturb(p, exact, 0.05, 3));
  CHECK(r.report.converged);
  CHECK(std::abs(p.energy(r.map) / oracle.energy - 1.0) < 1e-6);
  CHECK(aligned_distance(exact, r.map) < 1e-8);
  // Energy trace is non-increasing up to rounding.
  for (size_t i = 1; i < r.report.energy_trace.size(); ++i)
    CHECK(r.report.energy_trace[i] <= r.report.energy_trace[i - 1] * (1.0 + 1e-14));

  SolverOptions gd;
  gd.method = "gd";
  const auto g = solve_harmonic(p, perturb(p, exact, 0.05, 3), gd);
  CHECK(std::abs(p.energy(g.map) / oracle.energy - 1.0) < 1e-6);
  CHECK(g.report.iterations > r.report.iterations);
}

TEST_CASE("a harmonic start is returned unchanged") {
  const auto s = surface::build_torus(6);
  const auto t = unit_torus();
  const EnergyProblem p(s.mesh, conformal::structure_from_surface(s), t);
  const EquivariantMap f = map_from_development(s, t);
  const auto r = solve_harmonic(p, f);
  CHECK(r.report.iterations == 0);
  CHECK(r.map.z == f.z);
}

TEST_CASE("gradient agrees with finite differences") {
  const auto s = surface::build_genus2_octagon(0);
  const auto t = target::octagon_generators();
  const EnergyProblem p(s.mesh, conformal::structure_from_surface(s), t);
  const EquivariantMap f = perturb(p, map_from_development(s, t), 0.05, 11);
  const VertexField v = random_field(f, 12);
  const double h = 1e-5;
  const double fd = (p.energy(p.exp(f, v, h)) - p.energy(p.exp(f, v, -h))) / (2.0 * h);
  const double exact = p.inner(f, p.gradient(f), v);
  CHECK(std::abs(fd - exact) < 1e-6 * std::max(1.0, std::abs(exact)));
}

TEST_CASE("energy is invariant under conjugating the target") {
  const auto s = surface::build_genus2_octagon(0);
  const auto t = target::octagon_generators();
  const EnergyProblem p(s.mesh, conformal::structure_from_surface(s), t);
  const EquivariantMap f = perturb(p, map_from_development(s, t), 0.05, 5);

  Eigen::Matrix2d m;
  m << 1.3, 0.4, 0.2, 1.0 / 1.3 + 0.4 * 0.2 / 1.3;
  const auto phi = hypgeom::ModelIsometry::moebius(m);
  std::map<char, std::vector<hypgeom::ModelIsometry>> rep;
  for (const auto& [c, g] : t.representation()) rep[c] = {phi.compose(g[0]).compose(phi.inverse())};
  const target::Target moved({hypgeom::Model::HyperbolicDisk}, rep, "conjugated");
  EquivariantMap g = f;
  for (auto& z : g.z) z = phi.apply_chart(z);
  const EnergyProblem q(s.mesh, conformal::structure_from_surface(s), moved);
  CHECK(q.energy(g) == doctest::Approx(p.energy(f)).epsilon(1e-12));
}

TEST_CASE("index form") {
  const auto s = surface::build_genus2_octagon(0);
  const auto t = target::octagon_generators();
  const EnergyProblem p(s.mesh, conformal::structure_from_surface(s), t);
  const EquivariantMap f = solve_harmonic(p, map_from_development(s, t)).map;
  const VertexField v = random_field(f, 1), w = random_field(f, 2);
  const double iv = index_form(p, f, v), iw = index_form(p, f, w);
  CHECK(iv > 0.0);
  CHECK(iw > 0.0);
  VertexField v2 = v;
  for (auto& x : v2.v) x *= 2.0;
  CHECK(index_form(p, f, v2) == doctest::Approx(4.0 * iv).epsilon(1e-7));
  VertexField sum = v;
  for (size_t i = 0; i < sum.v.size(); ++i) sum.v[i] += w.v[i];
  const double mixed = index_form(p, f, v, w);
  CHECK(mixed == doctest::Approx(0.5 * (index_form(p, f, sum) - iv - iw)).epsilon(1e-6));
  CHECK(index_form(p, f, w, v) == doctest::Approx(mixed).epsilon(1e-12));

  // Translations of a flat target are Killing fields.
  const auto ts = surface::build_torus(6);
  const auto tt = unit_torus();
  const EnergyProblem tp(ts.mesh, conformal::structure_from_surface(ts), tt);
  const EquivariantMap tf = map_from_development(ts, tt);
  VertexField shift = VertexField::zeros(tf);
  for (auto& x : shift.v) x = cplx(0.3, -0.2);
  CHECK(std::abs(index_form(tp, tf, shift)) < 1e-9);

  CHECK_THROWS_AS(index_form(p, perturb(p, f, 0.05, 9), v), Error);
}

TEST_CASE("solver failures") {
  const auto s = surface::build_genus2_octagon(0);
  const auto t = target::octagon_generators();
  const EnergyProblem p(s.mesh, conformal::structure_from_surface(s), t);
  SolverOptions opt;
  opt.max_iters = 2;
  try {
    solve_harmonic(p, map_from_development(s, t), opt);
    FAIL("expected non-convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
    CHECK(e.report().iterations == 2);
    CHECK(e.report().energy_trace.size() == 3);
  }
  opt.method = "newton";
  CHECK_THROWS_AS(solve_harmonic(p, map_from_development(s, t), opt), Error);
  const EquivariantMap wrong{2, std::vector<cplx>(2 * s.mesh.num_vertices(), 0.0)};
  CHECK_THROWS_AS(p.energy(wrong), Error);
}
