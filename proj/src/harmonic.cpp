#include "pshlab/harmonic.hpp"

#include <cmath>
#include <random>

namespace pshlab::harmonic {

using hypgeom::Model;

namespace {

// Chart kernels for one factor.
double dist2(Model m, cplx p, cplx q) {
  if (m == Model::Euclidean) return std::norm(q - p);
  const double d = hypgeom::disk::distance(p, q);
  return d * d;
}

cplx log_at(Model m, cplx p, cplx q) { return m == Model::Euclidean ? q - p : hypgeom::disk::log(p, q); }

cplx exp_at(Model m, cplx p, cplx v) { return m == Model::Euclidean ? p + v : hypgeom::disk::exp(p, v); }

double metric2(Model m, cplx p) {
  if (m == Model::Euclidean) return 1.0;
  const double l = hypgeom::disk::lambda(p);
  return l * l;
}

}  // namespace

target::TargetPoint EquivariantMap::point(const target::Target& t, int v) const {
  target::TargetPoint p;
  for (int k = 0; k < num_factors; ++k)
    p.push_back({t.factor_model(k), hypgeom::Vec2(at(v, k).real(), at(v, k).imag())});
  return p;
}

VertexField VertexField::zeros(const EquivariantMap& f) {
  return {f.num_factors, std::vector<cplx>(f.z.size(), 0.0)};
}

// --- energy problem --------------------------------------------------------------------

EnergyProblem::EnergyProblem(const surface::HalfEdgeMesh& mesh, const conformal::CotanWeights& weights,
                             const target::Target& target)
    : target_(target), num_vertices_(mesh.num_vertices()) {
  const std::vector<int> owners = mesh.edges();
  if (owners.size() != weights.w.size())
    throw Error(ErrorCode::InvalidArgument, "weight count differs from edge count", "harmonic");
  diagonal_.assign(num_vertices_, 0.0);
  for (size_t e = 0; e < owners.size(); ++e) {
    const int h = owners[e];
    Edge edge{mesh.origin(h), mesh.dest(h), weights.w[e], {}, {}};
    for (int k = 0; k < target.num_factors(); ++k) {
      edge.gamma.push_back(target.evaluate(mesh.label(h), k));
      edge.gamma_inv.push_back(edge.gamma.back().inverse());
    }
    if (edge.w < 0.0) ++negative_weights_;
    diagonal_[edge.i] += std::abs(edge.w);
    diagonal_[edge.j] += std::abs(edge.w);
    edges_.push_back(std::move(edge));
  }
  for (double& d : diagonal_)
    if (d == 0.0) d = 1.0;
}

EnergyProblem::EnergyProblem(const surface::HalfEdgeMesh& mesh, const conformal::ConformalStructure& c,
                             const target::Target& target)
    : EnergyProblem(mesh, conformal::cotan_weights(c, mesh), target) {}

std::vector<double> EnergyProblem::edge_terms(const EquivariantMap& f) const {
  std::vector<double> out(edges_.size());
  const int nk = f.num_factors;
  for (size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    double d2 = 0.0;
    for (int k = 0; k < nk; ++k)
      d2 += dist2(target_.factor_model(k), f.at(ed.i, k), ed.gamma[k].apply_chart(f.at(ed.j, k)));
    out[e] = 0.5 * ed.w * d2;
  }
  return out;
}

double EnergyProblem::energy(const EquivariantMap& f) const {
  if (f.num_factors != target_.num_factors() || f.num_vertices() != num_vertices_)
    throw Error(ErrorCode::InvalidArgument, "map does not match the energy problem", "harmonic");
  double total = 0.0;
  for (double t : edge_terms(f)) total += t;
  return total;
}

VertexField EnergyProblem::gradient(const EquivariantMap& f) const {
  VertexField g = VertexField::zeros(f);
  const int nk = f.num_factors;
  for (const Edge& ed : edges_) {
    for (int k = 0; k < nk; ++k) {
      const Model m = target_.factor_model(k);
      const cplx zi = f.at(ed.i, k), zj = f.at(ed.j, k);
      g.at(ed.i, k) -= ed.w * log_at(m, zi, ed.gamma[k].apply_chart(zj));
      g.at(ed.j, k) -= ed.w * log_at(m, zj, ed.gamma_inv[k].apply_chart(zi));
    }
  }
  return g;
}

double EnergyProblem::gradient_sup_norm(const VertexField& g, const EquivariantMap& f) const {
  double worst = 0.0;
  for (int v = 0; v < num_vertices_; ++v) {
    double n2 = 0.0;
    for (int k = 0; k < f.num_factors; ++k) n2 += metric2(target_.factor_model(k), f.at(v, k)) * std::norm(g.at(v, k));
    worst = std::max(worst, std::sqrt(n2));
  }
  return worst;
}

double EnergyProblem::inner(const EquivariantMap& f, const VertexField& a, const VertexField& b) const {
  double s = 0.0;
  for (int v = 0; v < num_vertices_; ++v)
    for (int k = 0; k < f.num_factors; ++k)
      s += metric2(target_.factor_model(k), f.at(v, k)) * (std::conj(a.at(v, k)) * b.at(v, k)).real();
  return s;
}

EquivariantMap EnergyProblem::exp(const EquivariantMap& f, const VertexField& v, double t) const {
  EquivariantMap out = f;
  for (int i = 0; i < num_vertices_; ++i)
    for (int k = 0; k < f.num_factors; ++k)
      out.at(i, k) = exp_at(target_.factor_model(k), f.at(i, k), t * v.at(i, k));
  return out;
}

VertexField EnergyProblem::transport(const EquivariantMap& f, const EquivariantMap& to, const VertexField& v) const {
  VertexField out = v;
  for (int i = 0; i < num_vertices_; ++i)
    for (int k = 0; k < f.num_factors; ++k)
      if (target_.factor_model(k) == Model::HyperbolicDisk)
        out.at(i, k) *= hypgeom::disk::transport_factor(f.at(i, k), to.at(i, k));
  return out;
}

// --- initial maps -------------------------------------------------------------------------

EquivariantMap map_from_development(const surface::Surface& s, const target::Target& t) {
  if (t.num_factors() != 1 || t.factor_model(0) != s.dev.model)
    throw Error(ErrorCode::ModelMismatch, "development and target models differ", "harmonic");
  EquivariantMap f{1, {}};
  for (const auto& p : s.dev.position) f.z.push_back(p.z());
  return f;
}

EquivariantMap affine_torus_map(const surface::Surface& s, const Eigen::Matrix2d& linear) {
  EquivariantMap f{1, {}};
  for (const auto& p : s.dev.position) {
    const hypgeom::Vec2 q = linear * p.coords;
    f.z.push_back({q.x(), q.y()});
  }
  return f;
}

VertexField random_field(const EquivariantMap& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
  VertexField v = VertexField::zeros(f);
  for (cplx& c : v.v) c = {unit(), unit()};
  return v;
}

EquivariantMap perturb(const EnergyProblem& p, const EquivariantMap& f, double size, std::uint64_t seed) {
  VertexField v = random_field(f, seed);
  for (int i = 0; i < f.num_vertices(); ++i)
    for (int k = 0; k < f.num_factors; ++k)
      v.at(i, k) *= size / std::sqrt(metric2(p.target().factor_model(k), f.at(i, k)));
  return p.exp(f, v, 1.0);
}

// --- index form ------------------------------------------------------------------------------

namespace {

// Second difference of the energy along exp(eps v), summed edge by edge so the
// cancellation happens at the scale of single edge terms.
double second_difference(const EnergyProblem& p, const EquivariantMap& f, const VertexField& v,
                         const std::vector<double>& base, double eps) {
  const std::vector<double> plus = p.edge_terms(p.exp(f, v, eps));
  const std::vector<double> minus = p.edge_terms(p.exp(f, v, -eps));
  double s = 0.0;
  for (size_t e = 0; e < base.size(); ++e) s += (plus[e] - base[e]) + (minus[e] - base[e]);
  return s / (eps * eps);
}

}  // namespace

double index_form(const EnergyProblem& p, const EquivariantMap& f, const VertexField& v,
                  const IndexFormOptions& opt) {
  const double g = p.gradient_sup_norm(p.gradient(f), f);
  if (g > 10.0 * opt.tol)
    throw Error(ErrorCode::NotHarmonic,
                "index form needs a harmonic map (gradient " + std::to_string(g) + ")", "harmonic");
  // The step is a displacement size; the largest vertex moves by opt.step.
  const double size = p.gradient_sup_norm(v, f);
  if (size == 0.0) return 0.0;
  const double eps = opt.step / size;
  const std::vector<double> base = p.edge_terms(f);
  const double coarse = second_difference(p, f, v, base, eps);
  const double fine = second_difference(p, f, v, base, eps / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

double index_form(const EnergyProblem& p, const EquivariantMap& f, const VertexField& v,
                  const VertexField& w, const IndexFormOptions& opt) {
  VertexField sum = v, diff = v;
  for (size_t i = 0; i < v.v.size(); ++i) {
    sum.v[i] += w.v[i];
    diff.v[i] -= w.v[i];
  }
  return 0.25 * (index_form(p, f, sum, opt) - index_form(p, f, diff, opt));
}

}  // namespace pshlab::harmonic
