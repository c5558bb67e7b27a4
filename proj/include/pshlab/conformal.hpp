#pragma once

// Conformal structures on a fixed mesh, stored as per-face triangle shapes,
// and the holomorphic Beltrami disks through a base structure.

#include "pshlab/surface.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pshlab::conformal {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2d;

/// Per-face shapes normalized to (0, 1, z2) with Im z2 > 0.
struct ConformalStructure {
  std::vector<cplx> z2;

  int num_faces() const { return static_cast<int>(z2.size()); }
};

/// Euclidean faces use their developed coordinates; hyperbolic faces use the
/// Euclidean triangle with the same geodesic side lengths.
ConformalStructure structure_from_surface(const surface::Surface& s);

/// Inradius over circumradius; 1/2 for an equilateral triangle.
double shape_quality(cplx z2);
void require_nondegenerate(const ConformalStructure& c);

/// Per-face Beltrami coefficients, expressed in each face's shape chart.
struct BeltramiField {
  std::vector<cplx> mu;

  double max_abs() const;

  static BeltramiField zero(int num_faces);
  /// Converts coefficients given in the model chart to the face shape charts.
  static BeltramiField from_model(const surface::Surface& s, const std::vector<cplx>& model_mu);
  static BeltramiField constant(const surface::Surface& s, cplx model_mu);
  /// Smooth compactly supported bump around `centre` of the given model radius.
  static BeltramiField bump(const surface::Surface& s, cplx centre, double radius, cplx amplitude);
  /// Smooth random field with max |mu| = amplitude, reproducible from the seed.
  static BeltramiField random(const surface::Surface& s, std::uint64_t seed, double amplitude);

  /// Text format: one "face re im" line per face; '#' starts a comment.
  static BeltramiField load(const std::string& path, int num_faces);
  void save(const std::string& path) const;

  /// Parses "random:<seed>:<amp>", "const:<re>:<im>",
  /// "bump:<x>:<y>:<radius>:<re>:<im>" or a file path.
  static BeltramiField parse(const std::string& spec, const surface::Surface& s);
};

/// u -> (z -> z + (u mu + u^2 mu2) conj z) per face. `mu2` is optional and only
/// changes the disk at second order.
struct DiskFamily {
  ConformalStructure base;
  BeltramiField direction;
  BeltramiField second_order;  // empty means zero
  double radius = 0.5;

  DiskFamily(ConformalStructure base, BeltramiField direction, double radius);
  cplx coefficient(int face, cplx u) const;
};

ConformalStructure family_at(const DiskFamily& fam, cplx u);

/// Per-face real 2x2 matrices in the base shape chart.
struct StructureEndo {
  std::vector<Mat2> m;
};

/// Complex structure of `c` expressed in the shape charts of `chart`.
StructureEndo endo_J(const ConformalStructure& c, const ConformalStructure& chart);
StructureEndo endo_J(const ConformalStructure& c);

/// m such that H acts as z -> m conj z in the face chart.
cplx antilinear_coefficient(const Mat2& h);
Mat2 antilinear_matrix(cplx m);

/// Finite-difference derivative of J along the real direction s at u = 0
/// (central differences with one Richardson step).
StructureEndo fd_dJ_ds(const DiskFamily& fam, double h);

struct Calibration {
  cplx s;              // m_f = s * mu_f
  double relative_spread = 0.0;  // std-dev / |mean| of per-face estimates
  int faces_used = 0;
};

/// Least-squares fit of m_f = s * mu_f against the finite-difference H.
Calibration calibrate_s(const DiskFamily& fam, double h = 1e-4);

/// H from the calibrated constant: z -> s mu_f conj z.
StructureEndo endo_H(const DiskFamily& fam, cplx s);

using FamilyFn = std::function<ConformalStructure(cplx)>;

/// max_f |dJ/dt - J dJ/ds| with central differences of step h around u.
double verify_cr(const FamilyFn& fam, const ConformalStructure& chart, cplx u, double h);
double verify_cr(const DiskFamily& fam, cplx u, double h);

struct LaplacianCheck {
  double residual = 0.0;          // |Delta J - 2 J H^2|, the consistent identity
  double literal_residual = 0.0;  // |Delta J - J H^2|, kept as a diagnostic
  double laplacian_norm = 0.0;
};

/// Five-point Laplacian of J at u = 0 against J (dJ/ds)^2.
LaplacianCheck verify_laplacian_J(const DiskFamily& fam, double h);

/// One weight per edge, in the order of HalfEdgeMesh::edges().
struct CotanWeights {
  std::vector<double> w;
};

CotanWeights cotan_weights(const ConformalStructure& c, const surface::HalfEdgeMesh& mesh);

/// Cotangent of the angle opposite halfedge k (0..2) of the shape (0, 1, z2).
double opposite_cot(cplx z2, int k);

}  // namespace pshlab::conformal
