#pragma once

// Target manifolds: products of two-dimensional constant-curvature quotients
// (flat tori and hyperbolic surfaces), each given as a model plus the
// representation of the domain's crossing letters into its isometry group.

#include "pshlab/hypgeom.hpp"
#include "pshlab/surface.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pshlab::target {

using hypgeom::cplx;
using hypgeom::Model;
using hypgeom::ModelIsometry;
using hypgeom::ModelPoint;
using hypgeom::TangentVec;
using hypgeom::ComplexTangentVec;

/// One point per factor.
using TargetPoint = std::vector<ModelPoint>;

struct TargetVec {
  std::vector<TangentVec> parts;
};

struct ComplexTargetVec {
  std::vector<ComplexTangentVec> parts;
};

class Target {
public:
  Target() = default;
  Target(std::vector<Model> factors, std::map<char, std::vector<ModelIsometry>> rep, std::string name);

  const std::string& name() const { return name_; }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  Model factor_model(int k) const { return factors_[k]; }
  int dimension() const { return 2 * num_factors(); }

  const std::map<char, std::vector<ModelIsometry>>& representation() const { return rep_; }
  /// rho(w) in factor k; letters missing from the representation act trivially.
  ModelIsometry evaluate(const Word& w, int factor) const;

  /// Largest deviation from the identity of rho(word) over the mesh face words.
  double face_word_defect(const surface::HalfEdgeMesh& mesh) const;
  /// Deviation of rho(relator) from the identity.
  double relator_defect(int genus) const;

  double distance(const TargetPoint& p, const TargetPoint& q) const;
  TargetVec log(const TargetPoint& p, const TargetPoint& q) const;
  TargetPoint exp(const TargetVec& v) const;
  TargetVec transport(const TargetVec& v, const TargetPoint& to) const;

  double inner(const TargetVec& x, const TargetVec& y) const;
  double curvature(const TargetVec& x, const TargetVec& y, const TargetVec& z, const TargetVec& w) const;
  cplx complex_curvature(const ComplexTargetVec& x, const ComplexTargetVec& y,
                         const ComplexTargetVec& z, const ComplexTargetVec& w) const;
  double hermitian_curvature(const ComplexTargetVec& x, const ComplexTargetVec& y) const;

private:
  std::vector<Model> factors_;
  std::map<char, std::vector<ModelIsometry>> rep_;
  std::string name_;
};

/// Flat torus R^2 / (basis columns). `degree` sends each crossing letter to an
/// integer combination of the two basis vectors.
Target flat_torus_target(const Eigen::Matrix2d& basis, const std::map<char, std::array<int, 2>>& degree);
/// Convenience: a -> degree row 0, b -> degree row 1.
Target flat_torus_target(const Eigen::Matrix2d& basis, const Eigen::Matrix2i& degree);

/// The regular-octagon genus-two surface with the identity-class assignment.
Target octagon_generators();

/// Factors side by side; letters missing from one factor act trivially there.
Target product_target(const Target& t1, const Target& t2);

/// Text format: "<letter> <factor> <m00> <m01> <m10> <m11>" for Moebius
/// factors, "<letter> <factor> <x> <y>" for flat ones; replaces those entries.
Target with_representation_file(const Target& t, const std::string& path);

struct TorusOracle {
  Eigen::Matrix2d linear;  // df in the domain's Euclidean coordinates
  double energy = 0.0;
};

/// Harmonic map between flat tori: the affine map in the given class, with
/// energy (1/2) |df|^2 area. The domain is C / (Z + modulus Z).
TorusOracle torus_harmonic_oracle(cplx domain_modulus, const Eigen::Matrix2d& lattice,
                                  const Eigen::Matrix2i& degree);

/// Largest hermitian curvature over random points and complex 2-frames.
double sample_max_hermitian_curvature(const Target& t, int samples, std::uint64_t seed);

}  // namespace pshlab::target
