#include "pshlab/hypgeom.hpp"

#include "pshlab/error.hpp"

#include <array>
#include <cmath>

namespace pshlab::hypgeom {

namespace {

constexpr double kDiskMargin = 1e-12;

cplx to_c(const Vec2& v) { return {v.x(), v.y()}; }
Vec2 to_v(cplx z) { return {z.real(), z.imag()}; }

void require_same_model(const ModelPoint& p, const ModelPoint& q) {
  if (p.model != q.model)
    throw Error(ErrorCode::ModelMismatch, "points belong to different models");
}

void require_same_base(const TangentVec& a, const TangentVec& b) {
  require_same_model(a.base, b.base);
  if ((a.base.coords - b.base.coords).lpNorm<Eigen::Infinity>() > 1e-12)
    throw Error(ErrorCode::BasePointMismatch, "tangent vectors have different base points");
}

// Cayley transform conjugation: upper half plane matrix -> disk matrix.
Eigen::Matrix2cd to_disk_matrix(const Eigen::Matrix2d& m) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd k;
  k << 1.0, -i, 1.0, i;
  Eigen::Matrix2cd kinv;
  kinv << i, i, -1.0, 1.0;
  kinv /= 2.0 * i;
  Eigen::Matrix2cd d = k * m.cast<cplx>() * kinv;
  d /= std::sqrt(d.determinant());
  return d;
}

}  // namespace

const char* to_string(Model model) {
  return model == Model::HyperbolicDisk ? "hyperbolic_disk" : "euclidean";
}

double curvature_constant(Model model) { return model == Model::HyperbolicDisk ? -1.0 : 0.0; }

ModelPoint ModelPoint::disk(double x, double y) {
  if (x * x + y * y >= 1.0 - kDiskMargin)
    throw Error(ErrorCode::InvalidArgument, "disk point outside the unit disk");
  return {Model::HyperbolicDisk, Vec2(x, y)};
}

ModelPoint ModelPoint::euclid(double x, double y) { return {Model::Euclidean, Vec2(x, y)}; }

// --- disk kernels ----------------------------------------------------------

namespace disk {

double distance(cplx p, cplx q) {
  const double r = std::abs(q - p) / std::abs(1.0 - std::conj(p) * q);
  return 2.0 * std::atanh(std::min(r, 1.0 - 1e-16));
}

cplx log(cplx p, cplx q) {
  const cplx w = (q - p) / (1.0 - std::conj(p) * q);
  const double r = std::abs(w);
  if (r == 0.0) return 0.0;
  // atanh(r)/r is smooth at 0; use the series to avoid cancellation.
  const double scale = r < 1e-6 ? 1.0 + r * r / 3.0 : std::atanh(r) / r;
  return (1.0 - std::norm(p)) * scale * w;
}

cplx exp(cplx p, cplx v) {
  const cplx v0 = v / (1.0 - std::norm(p));
  const double s = std::abs(v0);
  if (s == 0.0) return p;
  const double scale = s < 1e-6 ? 1.0 - s * s / 3.0 : std::tanh(s) / s;
  const cplx w = scale * v0;
  return (w + p) / (1.0 + std::conj(p) * w);
}

cplx transport_factor(cplx p, cplx q) {
  const cplx w = (q - p) / (1.0 - std::conj(p) * q);
  const cplx den = 1.0 + std::conj(p) * w;
  return (1.0 - std::norm(w)) / (den * den);
}

}  // namespace disk

// --- isometries ----------------------------------------------------------------

ModelIsometry ModelIsometry::identity(Model model) {
  return model == Model::HyperbolicDisk ? moebius(Eigen::Matrix2d::Identity())
                                        : translation(Vec2::Zero());
}

ModelIsometry ModelIsometry::moebius(const Eigen::Matrix2d& sl2) {
  if (std::abs(sl2.determinant() - 1.0) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "Moebius matrix must have determinant 1");
  ModelIsometry g;
  g.kind_ = Kind::Moebius;
  g.sl2_ = sl2;
  g.disk_ = to_disk_matrix(sl2);
  return g;
}

ModelIsometry ModelIsometry::moebius_from_disk(const Eigen::Matrix2cd& su11) {
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd k;
  k << 1.0, -i, 1.0, i;
  Eigen::Matrix2cd m = k.inverse() * su11 * k;
  m /= std::sqrt(m.determinant());
  if (m.imag().lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + m.real().lpNorm<Eigen::Infinity>())) {
    m *= i;  // the square root may pick the purely imaginary representative
  }
  if (m.imag().lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + m.real().lpNorm<Eigen::Infinity>()))
    throw Error(ErrorCode::InvalidArgument, "matrix is not a disk automorphism");
  Eigen::Matrix2d real = m.real();
  real /= std::sqrt(real.determinant());
  return moebius(real);
}

ModelIsometry ModelIsometry::translation(const Vec2& offset) {
  ModelIsometry g;
  g.kind_ = Kind::LatticeTranslation;
  g.offset_ = offset;
  return g;
}

Model ModelIsometry::model() const {
  return kind_ == Kind::Moebius ? Model::HyperbolicDisk : Model::Euclidean;
}

cplx ModelIsometry::apply_chart(cplx z) const {
  if (kind_ == Kind::LatticeTranslation) return z + to_c(offset_);
  return (disk_(0, 0) * z + disk_(0, 1)) / (disk_(1, 0) * z + disk_(1, 1));
}

cplx ModelIsometry::derivative_chart(cplx z) const {
  if (kind_ == Kind::LatticeTranslation) return 1.0;
  const cplx den = disk_(1, 0) * z + disk_(1, 1);
  return 1.0 / (den * den);
}

ModelPoint ModelIsometry::apply(const ModelPoint& p) const {
  if (p.model != model()) throw Error(ErrorCode::ModelMismatch, "isometry applied to foreign model");
  return {p.model, to_v(apply_chart(p.z()))};
}

TangentVec ModelIsometry::push(const TangentVec& v) const {
  return {apply(v.base), to_v(derivative_chart(v.base.z()) * to_c(v.components))};
}

ModelIsometry ModelIsometry::compose(const ModelIsometry& rhs) const {
  if (kind_ != rhs.kind_) throw Error(ErrorCode::ModelMismatch, "composing isometries of different models");
  if (kind_ == Kind::LatticeTranslation) return translation(offset_ + rhs.offset_);
  Eigen::Matrix2d m = sl2_ * rhs.sl2_;
  // Renormalise the determinant to keep long products on SL(2).
  m /= std::sqrt(m.determinant());
  return moebius(m);
}

ModelIsometry ModelIsometry::inverse() const {
  if (kind_ == Kind::LatticeTranslation) return translation(-offset_);
  Eigen::Matrix2d inv;
  inv << sl2_(1, 1), -sl2_(0, 1), -sl2_(1, 0), sl2_(0, 0);
  return moebius(inv);
}

double ModelIsometry::deviation_from_identity() const {
  if (kind_ == Kind::LatticeTranslation) return offset_.lpNorm<Eigen::Infinity>();
  // Projective: M and -M are the same map.
  const double plus = (sl2_ - Eigen::Matrix2d::Identity()).lpNorm<Eigen::Infinity>();
  const double minus = (sl2_ + Eigen::Matrix2d::Identity()).lpNorm<Eigen::Infinity>();
  return std::min(plus, minus);
}

// --- metric operations ---------------------------------------------------------

double metric_factor(const ModelPoint& p) {
  return p.model == Model::HyperbolicDisk ? disk::lambda(p.z()) : 1.0;
}

double inner(const TangentVec& x, const TangentVec& y) {
  require_same_base(x, y);
  const double f = metric_factor(x.base);
  return f * f * x.components.dot(y.components);
}

double norm(const TangentVec& v) { return metric_factor(v.base) * v.components.norm(); }

double distance(const ModelPoint& p, const ModelPoint& q) {
  require_same_model(p, q);
  if (p.model == Model::Euclidean) return (p.coords - q.coords).norm();
  return disk::distance(p.z(), q.z());
}

ModelPoint exp_map(const TangentVec& v) {
  if (v.base.model == Model::Euclidean) return {Model::Euclidean, v.base.coords + v.components};
  return {Model::HyperbolicDisk, to_v(disk::exp(v.base.z(), to_c(v.components)))};
}

TangentVec log_map(const ModelPoint& p, const ModelPoint& q) {
  require_same_model(p, q);
  if (p.model == Model::Euclidean) return {p, q.coords - p.coords};
  return {p, to_v(disk::log(p.z(), q.z()))};
}

TangentVec transport(const TangentVec& v, const ModelPoint& to) {
  require_same_model(v.base, to);
  if (to.model == Model::Euclidean) return {to, v.components};
  return {to, to_v(disk::transport_factor(v.base.z(), to.z()) * to_c(v.components))};
}

double curvature(const TangentVec& x, const TangentVec& y, const TangentVec& z,
                 const TangentVec& w) {
  require_same_base(x, y);
  require_same_base(x, z);
  require_same_base(x, w);
  const double c = curvature_constant(x.base.model);
  if (c == 0.0) return 0.0;
  return c * (inner(x, z) * inner(y, w) - inner(x, w) * inner(y, z));
}

cplx complex_curvature(const ComplexTangentVec& x, const ComplexTangentVec& y,
                       const ComplexTangentVec& z, const ComplexTangentVec& w) {
  const std::array<const ComplexTangentVec*, 4> slots{&x, &y, &z, &w};
  const cplx i(0.0, 1.0);
  cplx total = 0.0;
  // Each slot contributes either its real part (weight 1) or imaginary part
  // (weight i); sum the 16 real evaluations.
  for (int mask = 0; mask < 16; ++mask) {
    std::array<TangentVec, 4> parts;
    cplx weight = 1.0;
    for (int s = 0; s < 4; ++s) {
      const bool imag = (mask >> s) & 1;
      parts[s] = imag ? slots[s]->imag() : slots[s]->real();
      if (imag) weight *= i;
    }
    total += weight * curvature(parts[0], parts[1], parts[2], parts[3]);
  }
  return total;
}

double hermitian_curvature(const ComplexTangentVec& x, const ComplexTangentVec& y) {
  return complex_curvature(x, y, x.conj(), y.conj()).real();
}

}  // namespace pshlab::hypgeom
