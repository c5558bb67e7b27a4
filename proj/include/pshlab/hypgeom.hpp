#pragma once

// Constant-curvature model geometry: the Poincare disk (curvature -1) and the
// Euclidean plane (curvature 0). Points and tangent vectors are stored in the
// model chart; all inner products use the model metric.

#include <Eigen/Dense>

#include <complex>

namespace pshlab::hypgeom {

using Vec2 = Eigen::Vector2d;
using CVec2 = Eigen::Vector2cd;
using cplx = std::complex<double>;

enum class Model { HyperbolicDisk, Euclidean };

const char* to_string(Model model);

/// Sectional curvature of the model: -1 for the disk, 0 for the plane.
double curvature_constant(Model model);

struct ModelPoint {
  Model model = Model::Euclidean;
  Vec2 coords = Vec2::Zero();

  static ModelPoint disk(double x, double y);
  static ModelPoint euclid(double x, double y);

  cplx z() const { return {coords.x(), coords.y()}; }
};

struct TangentVec {
  ModelPoint base;
  Vec2 components = Vec2::Zero();
};

struct ComplexTangentVec {
  ModelPoint base;
  CVec2 components = CVec2::Zero();

  ComplexTangentVec conj() const { return {base, components.conjugate()}; }
  TangentVec real() const { return {base, components.real()}; }
  TangentVec imag() const { return {base, components.imag()}; }
};

/// An orientation-preserving isometry of a model: a real SL(2) Moebius map
/// (acting on the disk through the Cayley transform) or a Euclidean translation.
class ModelIsometry {
public:
  enum class Kind { Moebius, LatticeTranslation };

  static ModelIsometry identity(Model model);
  /// `sl2` acts on the upper half plane; determinant must be 1 to 1e-10.
  static ModelIsometry moebius(const Eigen::Matrix2d& sl2);
  static ModelIsometry translation(const Vec2& offset);
  /// Builds the SL(2,R) form of a disk automorphism given in SU(1,1) form.
  static ModelIsometry moebius_from_disk(const Eigen::Matrix2cd& su11);

  Kind kind() const { return kind_; }
  Model model() const;

  const Eigen::Matrix2d& matrix() const { return sl2_; }
  const Vec2& offset() const { return offset_; }
  double trace() const { return sl2_.trace(); }

  ModelPoint apply(const ModelPoint& p) const;
  /// Differential of the isometry applied to a tangent vector.
  TangentVec push(const TangentVec& v) const;

  /// Returns this ∘ rhs.
  ModelIsometry compose(const ModelIsometry& rhs) const;
  ModelIsometry inverse() const;

  /// Distance from the identity map, in matrix/offset entries.
  double deviation_from_identity() const;

  // Chart-level kernels used by the assembly loops.
  cplx apply_chart(cplx z) const;
  cplx derivative_chart(cplx z) const;

private:
  Kind kind_ = Kind::LatticeTranslation;
  Eigen::Matrix2d sl2_ = Eigen::Matrix2d::Identity();
  Eigen::Matrix2cd disk_ = Eigen::Matrix2cd::Identity();
  Vec2 offset_ = Vec2::Zero();
};

/// Conformal factor of the model metric at p (|v|_g = factor * |v|).
double metric_factor(const ModelPoint& p);

double inner(const TangentVec& x, const TangentVec& y);
double norm(const TangentVec& v);

double distance(const ModelPoint& p, const ModelPoint& q);
ModelPoint exp_map(const TangentVec& v);
TangentVec log_map(const ModelPoint& p, const ModelPoint& q);
/// Parallel transport along the geodesic from v.base to `to`.
TangentVec transport(const TangentVec& v, const ModelPoint& to);

/// R(x,y,z,w) = <R(x,y)z,w>; for constant curvature c this is
/// c(<x,z><y,w> - <x,w><y,z>).
double curvature(const TangentVec& x, const TangentVec& y, const TangentVec& z,
                 const TangentVec& w);

/// Complex multilinear extension of `curvature`, expanded over real and
/// imaginary parts of each slot.
cplx complex_curvature(const ComplexTangentVec& x, const ComplexTangentVec& y,
                       const ComplexTangentVec& z, const ComplexTangentVec& w);

/// Hermitian sectional curvature R(x, y, conj x, conj y).
double hermitian_curvature(const ComplexTangentVec& x, const ComplexTangentVec& y);

// Raw chart kernels. For the disk, tangent vectors are complex numbers in the
// chart; for the plane everything is ordinary vector arithmetic.
namespace disk {
inline double lambda(cplx p) { return 2.0 / (1.0 - std::norm(p)); }
double distance(cplx p, cplx q);
cplx log(cplx p, cplx q);
cplx exp(cplx p, cplx v);
/// Multiplier taking chart vectors at p to their parallel transport at q.
cplx transport_factor(cplx p, cplx q);
}  // namespace disk

}  // namespace pshlab::hypgeom
