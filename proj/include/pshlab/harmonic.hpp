#pragma once

// Discrete equivariant Dirichlet energy with cotangent weights, its Riemannian
// gradient, the harmonic-map solver and the finite-difference index form.

#include "pshlab/conformal.hpp"
#include "pshlab/error.hpp"
#include "pshlab/surface.hpp"
#include "pshlab/target.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace pshlab::harmonic {

using cplx = std::complex<double>;

/// Values at the canonical vertex lifts, one chart coordinate per target
/// factor, vertex-major. Crossing a labeled halfedge applies rho(label).
struct EquivariantMap {
  int num_factors = 1;
  std::vector<cplx> z;

  int num_vertices() const { return static_cast<int>(z.size()) / num_factors; }
  cplx& at(int v, int k) { return z[v * num_factors + k]; }
  cplx at(int v, int k) const { return z[v * num_factors + k]; }
  target::TargetPoint point(const target::Target& t, int v) const;
};

/// Tangent vectors at the map's vertex values, in chart components (x + iy)
/// per factor, laid out like EquivariantMap.
struct VertexField {
  int num_factors = 1;
  std::vector<cplx> v;

  static VertexField zeros(const EquivariantMap& f);
  cplx& at(int i, int k) { return v[i * num_factors + k]; }
  cplx at(int i, int k) const { return v[i * num_factors + k]; }
};

/// Precomputed edge list: endpoints, weight and crossing isometries.
class EnergyProblem {
public:
  EnergyProblem(const surface::HalfEdgeMesh& mesh, const conformal::CotanWeights& weights,
                const target::Target& target);
  EnergyProblem(const surface::HalfEdgeMesh& mesh, const conformal::ConformalStructure& c,
                const target::Target& target);

  const target::Target& target() const { return target_; }
  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int negative_weights() const { return negative_weights_; }

  double energy(const EquivariantMap& f) const;
  /// Per-edge energy terms (w/2) d^2, in edge order.
  std::vector<double> edge_terms(const EquivariantMap& f) const;
  /// Riemannian gradient, chart components.
  VertexField gradient(const EquivariantMap& f) const;
  /// Largest metric norm of the gradient over vertices.
  double gradient_sup_norm(const VertexField& g, const EquivariantMap& f) const;
  /// Sum of |w_e| over the edges at each vertex (Jacobi preconditioner).
  const std::vector<double>& diagonal() const { return diagonal_; }

  /// Product metric inner product of two fields at f.
  double inner(const EquivariantMap& f, const VertexField& a, const VertexField& b) const;
  EquivariantMap exp(const EquivariantMap& f, const VertexField& v, double t) const;
  /// Transport of v from f to exp(f, d, t) along the per-vertex geodesics.
  VertexField transport(const EquivariantMap& f, const EquivariantMap& to, const VertexField& v) const;

private:
  struct Edge {
    int i, j;
    double w;
    std::vector<hypgeom::ModelIsometry> gamma;  // per factor
    std::vector<hypgeom::ModelIsometry> gamma_inv;
  };
  target::Target target_;
  int num_vertices_ = 0;
  int negative_weights_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> diagonal_;
};

/// The development positions as a map (identity class when domain = target).
EquivariantMap map_from_development(const surface::Surface& s, const target::Target& t);
/// Torus domain to a flat torus target: x -> linear * x.
EquivariantMap affine_torus_map(const surface::Surface& s, const Eigen::Matrix2d& linear);
/// Moves every vertex along a random tangent vector of the given metric length.
EquivariantMap perturb(const EnergyProblem& p, const EquivariantMap& f, double size, std::uint64_t seed);
VertexField random_field(const EquivariantMap& f, std::uint64_t seed);

struct SolverOptions {
  std::string method = "cg";  // "cg" or "gd"
  double tol = 1e-10;
  int max_iters = 20000;
};

struct SolverReport {
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> energy_trace;
  bool converged = false;
  std::string method;
};

struct SolveResult {
  EquivariantMap map;
  SolverReport report;
};

/// Raised when the solver stops before reaching the tolerance.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& message, SolverReport report)
      : Error(ErrorCode::NonConvergence, message, "solver"), report_(std::move(report)) {}
  const SolverReport& report() const { return report_; }

private:
  SolverReport report_;
};

/// Minimizes the energy from f0.
SolveResult solve_harmonic(const EnergyProblem& p, const EquivariantMap& f0, const SolverOptions& opt = {});

struct IndexFormOptions {
  double step = 2e-3;  // largest vertex displacement of the difference step
  double tol = 1e-10;  // harmonicity tolerance of f
};

/// Second derivative of the energy along exp(eps v), Richardson-extrapolated.
double index_form(const EnergyProblem& p, const EquivariantMap& f, const VertexField& v,
                  const IndexFormOptions& opt = {});
/// Mixed form by polarization.
double index_form(const EnergyProblem& p, const EquivariantMap& f, const VertexField& v,
                  const VertexField& w, const IndexFormOptions& opt = {});

}  // namespace pshlab::harmonic
