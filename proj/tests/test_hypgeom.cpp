#include "pshlab/error.hpp"
#include "pshlab/hypgeom.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pshlab;
using namespace pshlab::hypgeom;

namespace {

// Independent oracle: distance via the upper half plane formula after the Cayley map.
double uhp_distance(cplx p, cplx q) {
  const cplx i(0.0, 1.0);
  const cplx a = i * (1.0 + p) / (1.0 - p);
  const cplx b = i * (1.0 + q) / (1.0 - q);
  return std::acosh(1.0 + std::norm(a - b) / (2.0 * a.imag() * b.imag()));
}

ModelPoint random_disk_point(std::mt19937_64& rng, double rmax = 0.8) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    const double x = rmax * u(rng), y = rmax * u(rng);
    if (x * x + y * y < rmax * rmax) return ModelPoint::disk(x, y);
  }
}

}  // namespace

TEST_CASE("disk distance matches the half-plane formula") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const ModelPoint p = random_disk_point(rng), q = random_disk_point(rng);
    CHECK(distance(p, q) == doctest::Approx(uhp_distance(p.z(), q.z())).epsilon(1e-10));
  }
}

TEST_CASE("exp inverts log and log has the distance as its norm") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const ModelPoint p = random_disk_point(rng), q = random_disk_point(rng);
    const TangentVec v = log_map(p, q);
    CHECK(norm(v) == doctest::Approx(distance(p, q)).epsilon(1e-10));
    const ModelPoint back = exp_map(v);
    CHECK((back.coords - q.coords).norm() < 1e-11);
  }
}

TEST_CASE("transport preserves the metric norm and reverses log") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const ModelPoint p = random_disk_point(rng), q = random_disk_point(rng);
    const TangentVec v = log_map(p, q);
    const TangentVec moved = transport(v, q);
    CHECK(norm(moved) == doctest::Approx(norm(v)).epsilon(1e-10));
    // Transporting log_p(q) to q gives -log_q(p).
    const TangentVec w = log_map(q, p);
    CHECK((moved.components + w.components).norm() < 1e-10);
  }
}

TEST_CASE("Moebius isometries preserve distance and compose") {
  Eigen::Matrix2d m;
  m << 2.0, 1.0, 3.0, 2.0;
  const ModelIsometry g = ModelIsometry::moebius(m);
  std::mt19937_64 rng(5);
  const ModelPoint p = random_disk_point(rng, 0.5), q = random_disk_point(rng, 0.5);
  CHECK(distance(g.apply(p), g.apply(q)) == doctest::Approx(distance(p, q)).epsilon(1e-10));
  CHECK(g.compose(g.inverse()).deviation_from_identity() < 1e-12);
  const TangentVec v = log_map(p, q);
  const TangentVec pushed = g.push(v);
  CHECK(norm(pushed) == doctest::Approx(norm(v)).epsilon(1e-10));
  CHECK((log_map(g.apply(p), g.apply(q)).components - pushed.components).norm() < 1e-10);
}

TEST_CASE("determinant and model checks raise structured errors") {
  Eigen::Matrix2d bad;
  bad << 2.0, 0.0, 0.0, 2.0;
  CHECK_THROWS_AS(ModelIsometry::moebius(bad), Error);
  const ModelPoint p = ModelPoint::disk(0.1, 0.2);
  const ModelPoint e = ModelPoint::euclid(0.1, 0.2);
  try {
    (void)distance(p, e);
    FAIL("expected a model mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::ModelMismatch);
  }
  try {
    (void)inner(TangentVec{p, {1, 0}}, TangentVec{ModelPoint::disk(0.0, 0.0), {1, 0}});
    FAIL("expected a base point mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::BasePointMismatch);
  }
  CHECK_THROWS_AS(ModelPoint::disk(1.0, 0.0), Error);
}

TEST_CASE("hermitian curvature agrees with the constant-curvature closed form") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 20; ++t) {
    const ModelPoint p = random_disk_point(rng);
    ComplexTangentVec x{p, {}}, y{p, {}};
    for (int k = 0; k < 2; ++k) {
      x.components[k] = {n01(rng), n01(rng)};
      y.components[k] = {n01(rng), n01(rng)};
    }
    // Complex bilinear extension of the metric: g(X, Y) = lambda^2 sum X_k Y_k.
    const double l2 = std::pow(metric_factor(p), 2);
    auto g = [&](const CVec2& a, const CVec2& b) { return l2 * (a(0) * b(0) + a(1) * b(1)); };
    const CVec2 xb = x.components.conjugate(), yb = y.components.conjugate();
    const cplx closed = -(g(x.components, xb) * g(y.components, yb) - g(x.components, yb) * g(y.components, xb));
    CHECK(hermitian_curvature(x, y) == doctest::Approx(closed.real()).epsilon(1e-10));
    CHECK(hermitian_curvature(x, y) <= 1e-12);
  }
  const ModelPoint e = ModelPoint::euclid(0.3, 0.1);
  ComplexTangentVec x{e, CVec2(cplx(1, 2), cplx(0, 1))}, y{e, CVec2(cplx(0, 1), cplx(3, 0))};
  CHECK(hermitian_curvature(x, y) == 0.0);
}

TEST_CASE("real curvature has the Gaussian curvature as sectional value") {
  const ModelPoint p = ModelPoint::disk(0.2, -0.3);
  const TangentVec x{p, {1, 0}}, y{p, {0, 1}};
  const double area2 = inner(x, x) * inner(y, y) - inner(x, y) * inner(x, y);
  CHECK(curvature(x, y, x, y) / area2 == doctest::Approx(-1.0));
}
