#pragma once

// Second variation of the energy over a holomorphic disk of structures: the
// energy stencil, the variation field W, the Hopf differential, the ledger
// quantities a, alpha, b, rho and the certificates built from them.

#include "pshlab/conformal.hpp"
#include "pshlab/harmonic.hpp"
#include "pshlab/target.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pshlab::variation {

using cplx = std::complex<double>;
using harmonic::EquivariantMap;
using harmonic::VertexField;

// --- stencil -------------------------------------------------------------------------

struct StencilNode {
  int i = 0, j = 0;  // offset (i + i j) h
  conformal::ConformalStructure structure;
  EquivariantMap map;
  double energy = 0.0;
  harmonic::SolverReport report;
};

struct StencilGrid {
  double h = 0.0;
  std::vector<StencilNode> nodes;

  const StencilNode& at(int i, int j) const;
  bool has(int i, int j) const;
  double energy(int i, int j) const { return at(i, j).energy; }
};

/// Offsets of the 13-node stencil {0, +-h, +-ih, +-h+-ih, +-2h, +-2ih}.
std::vector<std::pair<int, int>> stencil_offsets();

struct StencilOptions {
  double h = 0.0;  // 0 selects 1e-2 / max |mu|
  harmonic::SolverOptions solver;
  int threads = 1;
};

/// Raised when a node fails; carries the nodes solved so far.
class StencilError : public Error {
public:
  StencilError(const std::string& message, StencilGrid partial)
      : Error(ErrorCode::NonConvergence, message, "stencil"), partial_(std::move(partial)) {}
  const StencilGrid& partial() const { return partial_; }

private:
  StencilGrid partial_;
};

double default_step(const conformal::BeltramiField& mu);

/// Solves the harmonic map at every node, centre first, then the remaining
/// nodes warm-started from the centre (optionally in parallel).
StencilGrid energy_stencil(const conformal::DiskFamily& fam, const surface::HalfEdgeMesh& mesh,
                           const target::Target& target, const EquivariantMap& initial,
                           const StencilOptions& opt);

/// Five-point Laplacian (E(h)+E(-h)+E(ih)+E(-ih)-4E(0))/h^2 with spacing
/// `scale` * h (scale 1 or 2).
double laplacian_E(const StencilGrid& g, int scale = 1);
double five_point(double e0, double ep, double em, double etp, double etm, double h);

// --- variation field and face geometry ------------------------------------------------

enum class WConvention { TPlusIS, SPlusIT };  // W = f_t + i f_s, or f_s + i f_t
const char* to_string(WConvention c);

struct Variation {
  VertexField fs, ft;  // real tangent fields at the centre map
};

/// Central differences of log_{f(0)} f(+-h) (flat factors aligned by their mean shift).
Variation variation_W(const StencilGrid& g, const harmonic::EnergyProblem& centre);

/// Complexified W as (real part, imaginary part).
std::pair<VertexField, VertexField> assemble_W(const Variation& v, WConvention c);

/// Per-face corner isometries (the lifts used by face_lift), shapes and areas.
class FaceFrames {
public:
  FaceFrames(const surface::HalfEdgeMesh& mesh, const conformal::ConformalStructure& c,
             const target::Target& target);

  int num_faces() const { return static_cast<int>(faces_.size()); }
  const target::Target& target() const { return target_; }
  const surface::HalfEdgeMesh& mesh() const { return mesh_; }
  cplx shape(int f) const { return faces_[f].z2; }
  double area(int f) const { return 0.5 * faces_[f].z2.imag(); }

  struct Jet {
    std::vector<cplx> bary;  // barycentre per factor
    Eigen::VectorXcd fz;     // d'f at the barycentre, chart components (x, y per factor)
    double energy = 0.0;     // face share of the discrete energy
    std::array<double, 3> edge2{};  // squared target length of halfedge k (corner k to k+1)
  };
  Jet jet(const EquivariantMap& f, int face) const;

  struct WJet {
    Eigen::VectorXcd w;     // W at the barycentre
    Eigen::VectorXcd dbar;  // d''W (covariant, via transport to the barycentre)
  };
  WJet w_jet(const EquivariantMap& f, const Jet& j, const VertexField& re, const VertexField& im, int face) const;

  /// Metric pairings at the barycentre, chart components.
  double norm2(const Jet& j, const Eigen::VectorXcd& x) const;               // Hermitian
  cplx bilinear(const Jet& j, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const;
  cplx hermitian(const Jet& j, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const;
  /// R(x, y, z, w) of the target at the barycentre (complex multilinear).
  cplx curvature(const Jet& j, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y,
                 const Eigen::VectorXcd& z, const Eigen::VectorXcd& w) const;

private:
  struct Face {
    std::array<int, 3> v;
    cplx z2;
    std::array<std::vector<hypgeom::ModelIsometry>, 3> corner;  // per factor
  };
  surface::HalfEdgeMesh mesh_;
  target::Target target_;
  std::vector<Face> faces_;
};

// --- Hopf differential and first variation --------------------------------------------

struct HopfDifferential {
  std::vector<cplx> q;  // per face, in the face shape chart, from the pullback of edge lengths
  double norm = 0.0;    // sum |Q_f| A_f
  double energy = 0.0;  // sum of face energies, for scale
};

HopfDifferential hopf(const FaceFrames& frames, const EquivariantMap& f);

struct FirstVariation {
  double dEs = 0.0, dEt = 0.0;
  cplx pairing;  // sum mu_f Q_f A_f
  std::optional<double> c;  // empty when the pairing is below the noise floor
  double residual = 0.0;
};

FirstVariation first_variation_check(const StencilGrid& g, const HopfDifferential& q,
                                     const conformal::BeltramiField& mu, const FaceFrames& frames);

// --- ledger -------------------------------------------------------------------------------

enum class Verdict { Pass, Fail };
const char* to_string(Verdict v);

struct ConventionLedger {
  double alpha = 0.0, rho = 0.0, mm_residual = 0.0;
  double pairing = 0.0;           // 4 Re sum <d'conj W, m f_z> A, which should equal a in size
  double pairing_residual = 0.0;  // | |pairing| - a |
};

struct PshCertificate {
  double delta_E = 0.0;       // plain h stencil
  double delta_E_2h = 0.0;    // 2h stencil
  double delta_E_extrapolated = 0.0;
  double extrapolation_error = 0.0;
  double a = 0.0, alpha = 0.0, b = 0.0, rho = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
  double epsilon = 0.0;
  WConvention convention = WConvention::TPlusIS;
  std::map<WConvention, ConventionLedger> by_convention;
  double tangency_defect = 0.0;
  double parallel_residual = 0.0;
  int excluded_faces = 0;
  cplx calibration_s;
  double hopf_norm = 0.0;
  FirstVariation first_variation;
  double second_variation_residual = 0.0;
  Verdict verdict = Verdict::Fail;
  std::vector<std::string> failures;
};

struct LedgerInputs {
  const conformal::DiskFamily& fam;
  const surface::HalfEdgeMesh& mesh;
  const target::Target& target;
  const StencilGrid& grid;
  double solver_tol = 1e-10;
};

PshCertificate ledger(const LedgerInputs& in);

struct Tangency {
  double defect = 0.0;
  double parallel_residual = 0.0;
  int excluded = 0;
};

/// Normalized |f_z ^ W| and min over sign of |d''W -+ m f_z|.
Tangency tangency_diagnostic(const FaceFrames& frames, const EquivariantMap& f, const VertexField& re,
                             const VertexField& im, const std::vector<cplx>& m);

/// lambda * f_z averaged to the vertices, a field tangent to d'f by construction.
std::pair<VertexField, VertexField> synthetic_tangent_field(const FaceFrames& frames, const EquivariantMap& f,
                                                            const std::vector<double>& lambda);

struct SecondVariation {
  double lhs = 0.0;  // stencil d^2E/ds^2
  double rhs = 0.0;  // -I(f_s, f_s) + structure term
  double residual = 0.0;
};

SecondVariation second_variation_identity(const LedgerInputs& in, const Variation& v);

}  // namespace pshlab::variation
